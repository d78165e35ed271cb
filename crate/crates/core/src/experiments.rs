//! Laminate sequences and finite-`j` lower-semicontinuity experiments.
//!
//! For rank-one connected `A₀, A₁` with `A₁ − A₀ = a ⊗ n`, the map
//! `u_j(z) = A₀z + a·g_j(⟨z, n⟩)` with a sawtooth `g_j` has gradient `A₀` on stripes of
//! relative width `1 − λ` and `A₁` on the rest. As `j → ∞` it converges weakly to the
//! affine map `A_λ z`, `A_λ = (1 − λ)A₀ + λA₁`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::functionals::FunctionalSpec;
use crate::mat2::Mat2C;
use crate::quadrature::{pairwise_sum, DiskGrid};
use crate::report::CheckReport;

/// `A₁ − A₀` counts as rank one when `σ_min ≤ RANK_ONE_TOL · σ_max`.
pub const RANK_ONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaminateSpec {
    #[serde(rename = "A0")]
    pub a0: Mat2C,
    #[serde(rename = "A1")]
    pub a1: Mat2C,
    pub lambda: f64,
    pub j: u32,
}

impl LaminateSpec {
    pub fn new(a0: Mat2C, a1: Mat2C, lambda: f64, j: u32) -> Result<Self> {
        let spec = LaminateSpec { a0, a1, lambda, j };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.j == 0 {
            return Err(Error::InvalidParameter(
                "oscillation frequency j must be positive".into(),
            ));
        }
        self.normal().map(|_| ())
    }

    pub fn with_j(&self, j: u32) -> Self {
        LaminateSpec { j, ..*self }
    }

    /// `A_λ = (1 − λ)A₀ + λA₁`.
    pub fn average(&self) -> Mat2C {
        self.a0.scale(1.0 - self.lambda) + self.a1.scale(self.lambda)
    }

    /// The unit normal `n` with `A₁ − A₀ = a ⊗ n`.
    pub fn normal(&self) -> Result<[f64; 2]> {
        let d = self.a1 - self.a0;
        let (big, small) = (d.opnorm(), d.min_singular());
        if big == 0.0 {
            return Err(Error::DegenerateDirection("A1 = A0 has no rank-one direction".into()));
        }
        if small > RANK_ONE_TOL * big {
            return Err(Error::NotRankOne { ratio: small / big });
        }
        // Rows of a ⊗ n are multiples of n; take the larger one.
        let m = d.to_real();
        let row = if m[0][0].hypot(m[0][1]) >= m[1][0].hypot(m[1][1]) {
            m[0]
        } else {
            m[1]
        };
        let len = row[0].hypot(row[1]);
        Ok([row[0] / len, row[1] / len])
    }

    /// The `a` in `A₁ − A₀ = a ⊗ n`.
    pub fn amplitude(&self) -> Result<[f64; 2]> {
        let n = self.normal()?;
        let m = (self.a1 - self.a0).to_real();
        Ok([m[0][0] * n[0] + m[0][1] * n[1], m[1][0] * n[0] + m[1][1] * n[1]])
    }
}

fn in_second_stripe(spec: &LaminateSpec, n: [f64; 2], z: num_complex::Complex64) -> bool {
    let x = spec.j as f64 * (z.re * n[0] + z.im * n[1]);
    x - x.floor() >= 1.0 - spec.lambda
}

/// `Du_j(z)`: `A₀` where the fractional part of `j⟨z, n⟩` is below `1 − λ`, else `A₁`.
pub fn laminate_gradient(spec: &LaminateSpec, z: num_complex::Complex64) -> Result<Mat2C> {
    let n = spec.normal()?;
    Ok(if in_second_stripe(spec, n, z) { spec.a1 } else { spec.a0 })
}

/// Area fraction of `{Du_j = A₁}` on the grid nodes.
pub fn stripe_fraction(spec: &LaminateSpec, grid: &DiskGrid) -> Result<f64> {
    let n = spec.normal()?;
    let hits: Vec<f64> = grid
        .nodes
        .iter()
        .map(|node| {
            if in_second_stripe(spec, n, node.z) {
                node.weight
            } else {
                0.0
            }
        })
        .collect();
    Ok(pairwise_sum(&hits) / grid.total_weight())
}

/// Disk mean of `E ∘ Du_j` with upper-integral semantics.
pub fn laminate_energy_average(e: &FunctionalSpec, spec: &LaminateSpec, grid: &DiskGrid) -> Result<ExtReal> {
    let n = spec.normal()?;
    let (e0, e1) = (e.evaluate(&spec.a0)?, e.evaluate(&spec.a1)?);
    let r = grid.integrate(|z| Ok(if in_second_stripe(spec, n, z) { e1 } else { e0 }))?;
    Ok(r.normalized(PI).value)
}

/// `(1 − λ)E(A₀) + λE(A₁)` with upper-integral semantics.
pub fn two_point_mixture(e: &FunctionalSpec, spec: &LaminateSpec) -> Result<ExtReal> {
    let w = [1.0 - spec.lambda, spec.lambda];
    Ok(crate::quadrature::upper_integral(&[e.evaluate(&spec.a0)?, e.evaluate(&spec.a1)?], &w).value)
}

/// Energy average for one rung of the `j` ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminateRung {
    pub j: u32,
    pub average: ExtReal,
    pub stripe_fraction: f64,
}

/// Energy averages and stripe fractions for each `j` of an increasing ladder.
pub fn laminate_rungs(
    e: &FunctionalSpec,
    spec: &LaminateSpec,
    ladder: &[u32],
    grid: &DiskGrid,
) -> Result<Vec<LaminateRung>> {
    spec.validate()?;
    if ladder.is_empty() || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "j ladder must be nonempty and increasing, got {ladder:?}"
        )));
    }
    ladder
        .iter()
        .map(|&j| {
            let s = spec.with_j(j);
            s.validate()?;
            Ok(LaminateRung {
                j,
                average: laminate_energy_average(e, &s, grid)?,
                stripe_fraction: stripe_fraction(&s, grid)?,
            })
        })
        .collect()
}

/// Constant `C` of the boundary-layer estimate `|avg_j − mixture| ≤ C/j`.
pub const MIXTURE_RATE: f64 = 5.0;

/// Checks `|mean E(Du_j) − ((1 − λ)E(A₀) + λE(A₁))| ≤ MIXTURE_RATE/j + tol` on every rung.
/// `margin` is the smallest slack `MIXTURE_RATE/j − |avg_j − mixture|`.
pub fn mixture_convergence_check(
    e: &FunctionalSpec,
    spec: &LaminateSpec,
    ladder: &[u32],
    grid: &DiskGrid,
    tol: f64,
) -> Result<CheckReport> {
    let rungs = laminate_rungs(e, spec, ladder, grid)?;
    let mixture = two_point_mixture(e, spec)?;
    let slack = rungs
        .iter()
        .map(|r| {
            let dev = if r.average == mixture {
                ExtReal::ZERO
            } else {
                r.average.upper_sub(mixture)
            };
            match dev {
                ExtReal::Finite(d) => ExtReal::from_f64(MIXTURE_RATE / r.j as f64 - d.abs()),
                _ => ExtReal::NegInf,
            }
        })
        .min()
        .expect("nonempty ladder");
    Ok(CheckReport::new(
        "laminate",
        format!("laminate-mixture/{}/lambda={}", e, spec.lambda),
        format!("|mean E(Du_j) - mixture| <= {MIXTURE_RATE}/j"),
    )
    .with_functional(e)
    .with_subject(format!(
        "laminate(A0={}, A1={}, lambda={})",
        spec.a0, spec.a1, spec.lambda
    ))
    .inequality(slack, ExtReal::ZERO, None, tol)
    .detail("rungs", &rungs)
    .detail("two_point_mixture", mixture)
    .verdict(
        "energy averages approach the two-point mixture",
        "energy averages stay away from the two-point mixture",
    ))
}

/// Runs the laminate at each `j` of the ladder and compares the smallest average
/// (a finite-`j` proxy for the liminf) with `E(A_λ)`. Rank-one convexity of `E`
/// predicts `margin = min_j avg_j − E(A_λ) ≥ −tol`.
pub fn lsc_experiment(
    e: &FunctionalSpec,
    spec: &LaminateSpec,
    ladder: &[u32],
    grid: &DiskGrid,
    tol: f64,
) -> Result<CheckReport> {
    let rungs = laminate_rungs(e, spec, ladder, grid)?;
    let liminf = rungs.iter().map(|r| r.average).min().expect("nonempty ladder");
    let at_average = e.evaluate(&spec.average())?;
    let report = CheckReport::new(
        "laminate",
        format!("laminate/{}/lambda={}", e, spec.lambda),
        "liminf_j mean E(Du_j) >= E(A_lambda)",
    )
    .with_functional(e)
    .with_subject(format!(
        "laminate(A0={}, A1={}, lambda={})",
        spec.a0, spec.a1, spec.lambda
    ))
    .inequality(liminf, at_average, None, tol)
    .note("finite-j proxy: liminf taken as the minimum over the j ladder")
    .detail("rungs", &rungs)
    .detail("two_point_mixture", two_point_mixture(e, spec)?)
    .verdict(
        "lower semicontinuity consistent along the laminate",
        "lower semicontinuity violated along the laminate",
    );
    Ok(report)
}
