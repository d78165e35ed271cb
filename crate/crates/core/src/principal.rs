//! Closed-form principal maps and the disk identities they satisfy.
//!
//! A principal map is an orientation-preserving homeomorphism of the plane that is
//! conformal outside the closed unit disk with expansion `b₀z + Σ b_n z^{−n}`,
//! `|b₁| < |b₀|`. Its linear part `A_f = (b₀, b₁)` is the disk mean of `Df`, so disk
//! means of `E(Df)` compared against `E(A_f)` test Jensen-type inequalities.
//!
//! Only explicit families are provided. A passing Jensen test on them is evidence
//! consistent with principal quasiconvexity, never a proof of it.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::functionals::FunctionalSpec;
use crate::mat2::Mat2C;
use crate::quadrature::{mean_over_disk, pairwise_sum, richardson_error, DiskGrid};
use crate::report::CheckReport;

/// Upper bound on `|t|` for the quadratic-tail family. On the closed disk
/// `|f(z₁) − f(z₂)| ≥ (1 − 2|t|)|z₁ − z₂|`, and the exterior branch is injective too.
pub const QUAD_TAIL_T_BOUND: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PrincipalMapSpec {
    /// `b₀z + b₁z̄` on `𝔻̄`, `b₀z + b₁/z` outside.
    LinearBeltrami { b0: Complex64, b1: Complex64 },
    /// `|z|^{1/K − 1}z` on `𝔻̄`, `z` outside.
    RadialStretch {
        #[serde(rename = "K")]
        k: f64,
    },
    /// `z + t z̄²` on `𝔻̄`, `z + t/z²` outside.
    QuadTail { t: f64 },
}

/// Coefficients of the expansion at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentTail {
    pub b0: Complex64,
    pub b1: Complex64,
    /// `(n, b_n)` for `n ≥ 2`.
    pub higher: Vec<(u32, Complex64)>,
}

impl LaurentTail {
    /// `A_f = b₀z + b₁z̄`.
    pub fn linear_part(&self) -> Mat2C {
        Mat2C::new(self.b0, self.b1)
    }

    /// `Σ_{n≥2} n|b_n|²`.
    pub fn area_defect(&self) -> f64 {
        self.higher.iter().map(|(n, b)| *n as f64 * b.norm_sqr()).sum()
    }
}

impl PrincipalMapSpec {
    pub fn linear_beltrami(b0: Complex64, b1: Complex64) -> Result<Self> {
        PrincipalMapSpec::LinearBeltrami { b0, b1 }.validated()
    }

    pub fn radial_stretch(k: f64) -> Result<Self> {
        PrincipalMapSpec::RadialStretch { k }.validated()
    }

    pub fn quad_tail(t: f64) -> Result<Self> {
        PrincipalMapSpec::QuadTail { t }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            PrincipalMapSpec::LinearBeltrami { b0, b1 } if !(b1.norm() < b0.norm()) => Err(Error::InvalidParameter(
                format!("linear-beltrami needs |b1| < |b0|, got b0 = {b0}, b1 = {b1}"),
            )),
            PrincipalMapSpec::RadialStretch { k } if !(k >= 1.0) || !k.is_finite() => {
                Err(Error::InvalidParameter(format!("radial-stretch needs K >= 1, got {k}")))
            }
            PrincipalMapSpec::QuadTail { t } if !(t.abs() < QUAD_TAIL_T_BOUND) => Err(Error::InvalidParameter(
                format!("quad-tail needs |t| < {QUAD_TAIL_T_BOUND}, got {t}"),
            )),
            ok => Ok(ok),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let inside = z.norm() <= 1.0;
        match *self {
            PrincipalMapSpec::LinearBeltrami { b0, b1 } => {
                if inside {
                    b0 * z + b1 * z.conj()
                } else {
                    b0 * z + b1 / z
                }
            }
            PrincipalMapSpec::RadialStretch { k } => {
                if !inside || z == Complex64::new(0.0, 0.0) {
                    z
                } else {
                    z * z.norm().powf(1.0 / k - 1.0)
                }
            }
            PrincipalMapSpec::QuadTail { t } => {
                if inside {
                    z + t * z.conj() * z.conj()
                } else {
                    z + t / (z * z)
                }
            }
        }
    }

    /// `Df(z) = (f_z, f_z̄)` for `|z| < 1`.
    pub fn grad(&self, z: Complex64) -> Result<Mat2C> {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDomain(format!(
                "gradient requested at |z| = {} >= 1",
                z.norm()
            )));
        }
        Ok(match *self {
            PrincipalMapSpec::LinearBeltrami { b0, b1 } => Mat2C::new(b0, b1),
            PrincipalMapSpec::RadialStretch { k } => {
                if z == Complex64::new(0.0, 0.0) {
                    return Err(Error::OutsideDomain("radial stretch gradient at z = 0".into()));
                }
                let scale = z.norm().powf(1.0 / k - 1.0);
                let phase = z / z.conj();
                Mat2C::new(
                    Complex64::new(0.5 * (1.0 / k + 1.0) * scale, 0.0),
                    phase * (0.5 * (1.0 / k - 1.0) * scale),
                )
            }
            PrincipalMapSpec::QuadTail { t } => Mat2C::new(Complex64::new(1.0, 0.0), 2.0 * t * z.conj()),
        })
    }

    pub fn laurent_tail(&self) -> LaurentTail {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            PrincipalMapSpec::LinearBeltrami { b0, b1 } => LaurentTail { b0, b1, higher: vec![] },
            PrincipalMapSpec::RadialStretch { .. } => LaurentTail {
                b0: one,
                b1: zero,
                higher: vec![],
            },
            PrincipalMapSpec::QuadTail { t } => LaurentTail {
                b0: one,
                b1: zero,
                higher: vec![(2, Complex64::new(t, 0.0))],
            },
        }
    }

    pub fn linear_part(&self) -> Mat2C {
        self.laurent_tail().linear_part()
    }

    pub fn name(&self) -> &'static str {
        match self {
            PrincipalMapSpec::LinearBeltrami { .. } => "linear-beltrami",
            PrincipalMapSpec::RadialStretch { .. } => "radial-stretch",
            PrincipalMapSpec::QuadTail { .. } => "quad-tail",
        }
    }
}

impl fmt::Display for PrincipalMapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrincipalMapSpec::LinearBeltrami { b0, b1 } => write!(f, "linear-beltrami(b0={b0}, b1={b1})"),
            PrincipalMapSpec::RadialStretch { k } => write!(f, "radial-stretch(K={k})"),
            PrincipalMapSpec::QuadTail { t } => write!(f, "quad-tail(t={t})"),
        }
    }
}

fn disk_mean_matrix(f: &PrincipalMapSpec, grid: &DiskGrid) -> Result<Mat2C> {
    let grads = grid.map_nodes(|z| f.grad(z)).into_iter().collect::<Result<Vec<_>>>()?;
    let weights = grid.weights();
    let component = |pick: fn(&Mat2C) -> f64| {
        let terms: Vec<f64> = grads.iter().zip(&weights).map(|(g, w)| pick(g) * w).collect();
        pairwise_sum(&terms) / PI
    };
    Ok(Mat2C::new(
        Complex64::new(component(|g| g.a_plus.re), component(|g| g.a_plus.im)),
        Complex64::new(component(|g| g.a_minus.re), component(|g| g.a_minus.im)),
    ))
}

/// Disk mean of `Df`, which converges to `A_f`.
pub fn center_of_mass(f: &PrincipalMapSpec, grid: &DiskGrid) -> Result<Mat2C> {
    disk_mean_matrix(f, grid)
}

/// Area inequality `⨍_𝔻 J_f ≤ det A_f − Σ_{n≥2} n|b_n|²`.
///
/// `margin = rhs − lhs`; the check passes when `margin ≥ −(tol + quadrature error)`.
pub fn area_check(f: &PrincipalMapSpec, grid: &DiskGrid, tol: f64) -> Result<CheckReport> {
    let tail = f.laurent_tail();
    let rhs = tail.linear_part().det() - tail.area_defect();
    let mean_j = mean_over_disk(|z| Ok(ExtReal::from_f64(f.grad(z)?.det())), grid)?;
    let err = mean_j.error_estimate;
    let allowance = tol + err.unwrap_or(0.0);
    let report = CheckReport::new("area", format!("area/{}", f), "mean(J_f) <= det A_f - sum n|b_n|^2")
        .with_subject(f)
        .at_most(mean_j.value, ExtReal::Finite(rhs), err, allowance)
        .detail("mean_jacobian", mean_j.value)
        .detail("det_linear_part", tail.linear_part().det())
        .detail("area_defect", tail.area_defect())
        .verdict("area inequality holds", "area inequality violated");
    Ok(report)
}

/// Jensen test `⨍_𝔻 E(Df) ≥ E(A_f)`; `margin = ⨍ E(Df) − E(A_f)`.
pub fn jensen_test(e: &FunctionalSpec, f: &PrincipalMapSpec, grid: &DiskGrid, tol: f64) -> Result<CheckReport> {
    let mean = mean_over_disk(|z| e.evaluate(&f.grad(z)?), grid)?;
    let at_linear = e.evaluate(&f.linear_part())?;
    let mut report = CheckReport::new("jensen", format!("jensen/{}/{}", e, f), "mean E(Df) >= E(A_f)")
        .with_functional(e)
        .with_subject(f)
        .inequality(mean.value, at_linear, mean.error_estimate, tol)
        .detail("pos_mass", mean.pos_mass)
        .detail("neg_mass", mean.neg_mass)
        .verdict(
            "consistent with principal quasiconvexity on this map",
            "Jensen inequality violated: not principal quasiconvex",
        );
    if !mean.value.is_finite() {
        report = report.note("integrand takes infinite values; no quadrature error estimate");
    }
    Ok(report)
}

/// Compares `∫_𝔻 K_f` with `∫_{f(𝔻)} |Df⁻¹|²` for families with a closed-form inverse.
/// Passes when the two sides agree to `rel_tol` relative to the right-hand side.
pub fn inverse_distortion_identity_check(f: &PrincipalMapSpec, grid: &DiskGrid, rel_tol: f64) -> Result<CheckReport> {
    let coarse = grid.coarsened();
    let sides = |g: &DiskGrid| -> Result<(ExtReal, ExtReal)> {
        let lhs = g.integrate(|z| Ok(f.grad(z)?.distortion()))?.value;
        let rhs = match *f {
            PrincipalMapSpec::RadialStretch { k } => {
                // f(𝔻) = 𝔻 and f⁻¹(w) = |w|^{K−1}w.
                g.integrate(|w| {
                    let scale = w.norm().powf(k - 1.0);
                    let dinv = Mat2C::new(
                        Complex64::new(0.5 * (k + 1.0) * scale, 0.0),
                        (w / w.conj()) * (0.5 * (k - 1.0) * scale),
                    );
                    Ok(ExtReal::from_f64(dinv.opnorm().powi(2)))
                })?
                .value
            }
            PrincipalMapSpec::LinearBeltrami { b0, b1 } => {
                // Push the disk rule forward: nodes A z, weights J_A · w.
                let a = Mat2C::new(b0, b1);
                let inv = a.inverse().expect("|b1| < |b0| gives det > 0");
                let terms: Vec<f64> = g
                    .nodes
                    .iter()
                    .map(|n| inv.opnorm().powi(2) * a.det() * n.weight)
                    .collect();
                ExtReal::from_f64(pairwise_sum(&terms))
            }
            PrincipalMapSpec::QuadTail { .. } => {
                return Err(Error::InvalidParameter(
                    "inverse-distortion identity needs a closed-form inverse (radial-stretch or linear-beltrami)"
                        .into(),
                ))
            }
        };
        Ok((lhs, rhs))
    };
    let (lhs, rhs) = sides(grid)?;
    let err = match (coarse.map(|c| sides(&c)).transpose()?, lhs, rhs) {
        (Some((ExtReal::Finite(cl), ExtReal::Finite(cr))), ExtReal::Finite(l), ExtReal::Finite(r)) => {
            Some(richardson_error(cl, l, 2) + richardson_error(cr, r, 2))
        }
        _ => None,
    };
    let scale = rhs.finite().map(f64::abs).unwrap_or(1.0);
    let report = CheckReport::new("identity", format!("identity/{}", f), "int_D K_f = int_f(D) |Df^-1|^2")
        .with_subject(f)
        .identity(lhs, rhs, err, rel_tol * scale)
        .detail("rel_tol", rel_tol)
        .verdict("identity holds within tolerance", "identity violated");
    Ok(report)
}
