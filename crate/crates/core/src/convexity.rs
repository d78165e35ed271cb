//! Pointwise convexity-type checks: rank-one convexity along segments, the isochoric
//! characterization, the superharmonicity ODE, mean-value superharmonicity and the
//! growth conditions.
//!
//! Convexity is tested with midpoint inequalities on consecutive triples. Triples with
//! an infinite endpoint are skipped rather than compared, which keeps the test
//! meaningful for extended-real functionals.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::extreal::ExtReal;
use crate::functionals::FunctionalSpec;
use crate::mat2::Mat2C;
use crate::quadrature::circle_average;
use crate::sampling::{random_unit_vector, SampleScheme};

/// Relative tolerance for midpoint margins, which are normalized by `1 + local scale`.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Relative finite-difference step `h = SH_ISO_STEP_REL · t`.
pub const SH_ISO_STEP_REL: f64 = 1e-4;
pub const DEFAULT_SH_ISO_TOL: f64 = 1e-6;
/// Points per segment in [`rank_one_scan`].
pub const SCAN_SEGMENT_POINTS: usize = 9;
pub const MAX_WITNESSES: usize = 16;

const GROWTH_LABEL: &str = "sampled lower bound on the true C";

/// A sampled input at which a check failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub point: Vec<f64>,
    pub margin: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub condition: String,
    pub n_samples: usize,
    pub skipped: usize,
    pub n_violations: usize,
    pub witnesses: Vec<Witness>,
    /// `+∞` when nothing was compared.
    pub worst_margin: ExtReal,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// One compared quantity before aggregation.
#[derive(Debug, Clone)]
struct Sample {
    margin: ExtReal,
    label: String,
    point: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    samples: Vec<Sample>,
    skipped: usize,
}

impl Tally {
    fn extend(&mut self, other: Tally) {
        self.samples.extend(other.samples);
        self.skipped += other.skipped;
    }
}

impl ConvexityReport {
    fn from_tally(condition: impl Into<String>, tally: Tally, tolerance: f64) -> Self {
        let threshold = ExtReal::Finite(-tolerance);
        let worst_margin = tally.samples.iter().map(|s| s.margin).min().unwrap_or(ExtReal::PosInf);
        let mut bad: Vec<(usize, &Sample)> = tally
            .samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.margin < threshold)
            .collect();
        let n_violations = bad.len();
        bad.sort_by(|(i, a), (j, b)| a.margin.cmp(&b.margin).then(i.cmp(j)));
        let witnesses = bad
            .into_iter()
            .take(MAX_WITNESSES)
            .map(|(_, s)| Witness {
                label: s.label.clone(),
                point: s.point.clone(),
                margin: s.margin,
            })
            .collect();
        ConvexityReport {
            condition: condition.into(),
            n_samples: tally.samples.len(),
            skipped: tally.skipped,
            n_violations,
            witnesses,
            worst_margin,
            tolerance,
            passed: worst_margin >= threshold,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn mat_point(a: &Mat2C) -> Vec<f64> {
    let m = a.to_real();
    vec![m[0][0], m[0][1], m[1][0], m[1][1]]
}

/// Midpoint margin `(left + right)/2 − mid` normalized by `1 + max |value|`.
/// `None` when an endpoint is infinite.
fn midpoint_margin(left: ExtReal, mid: ExtReal, right: ExtReal) -> Option<ExtReal> {
    let (l, r) = (left.finite()?, right.finite()?);
    Some(match mid {
        ExtReal::Finite(m) => {
            let scale = 1.0 + l.abs().max(r.abs()).max(m.abs());
            ExtReal::from_f64((0.5 * (l + r) - m) / scale)
        }
        ExtReal::PosInf => ExtReal::NegInf,
        ExtReal::NegInf => ExtReal::PosInf,
    })
}

fn segment_tally(e: &FunctionalSpec, a0: &Mat2C, a: [f64; 2], n: [f64; 2], points: usize) -> Result<Tally> {
    let dir = Mat2C::outer(a, n);
    let ts: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let values = ts
        .iter()
        .map(|&t| e.evaluate(&(*a0 + dir.scale(t))))
        .collect::<Result<Vec<_>>>()?;
    let mut tally = Tally::default();
    for i in 1..points - 1 {
        match midpoint_margin(values[i - 1], values[i], values[i + 1]) {
            None => tally.skipped += 1,
            Some(margin) => {
                let mut point = mat_point(a0);
                point.extend([a[0], a[1], n[0], n[1], ts[i]]);
                tally.samples.push(Sample {
                    margin,
                    label: format!("midpoint t={}", ts[i]),
                    point,
                });
            }
        }
    }
    Ok(tally)
}

fn check_segment_args(a: [f64; 2], n: [f64; 2], points: usize) -> Result<()> {
    if a == [0.0, 0.0] || n == [0.0, 0.0] {
        return Err(Error::DegenerateDirection(format!(
            "rank-one direction a = {a:?}, n = {n:?}"
        )));
    }
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "segment grid needs an odd count >= 3, got {points}"
        )));
    }
    Ok(())
}

/// Midpoint convexity of `t ↦ E(A + t·a⊗n)` on `points` equispaced `t ∈ [0, 1]`.
///
/// Witness points are `[a11, a12, a21, a22, a1, a2, n1, n2, t]`.
pub fn rank_one_segment_check(
    e: &FunctionalSpec,
    a0: &Mat2C,
    a: [f64; 2],
    n: [f64; 2],
    points: usize,
    tol: f64,
) -> Result<ConvexityReport> {
    check_segment_args(a, n, points)?;
    let tally = segment_tally(e, a0, a, n, points)?;
    Ok(ConvexityReport::from_tally(
        format!("rank-one convexity of {e}"),
        tally,
        tol,
    ))
}

/// Draws `(A, a, n)` from `scheme` and runs [`rank_one_segment_check`] on each segment.
///
/// `|a|` is drawn up to `|A|`. When the scheme is restricted to `det > 0`, `a` is halved
/// until `det(A + a⊗n) > 0`; since the determinant is affine along rank-one lines the
/// whole segment then stays in `det > 0`.
pub fn rank_one_scan(e: &FunctionalSpec, scheme: &SampleScheme, tol: f64) -> Result<ConvexityReport> {
    let segments = sample_segments(scheme)?;
    let tallies = segments
        .par_iter()
        .map(|(a0, a, n)| segment_tally(e, a0, *a, *n, SCAN_SEGMENT_POINTS))
        .collect::<Result<Vec<_>>>()?;
    let mut total = Tally::default();
    for t in tallies {
        total.extend(t);
    }
    Ok(
        ConvexityReport::from_tally(format!("rank-one convexity of {e}"), total, tol).note(format!(
            "{} segments, {} points each",
            segments.len(),
            SCAN_SEGMENT_POINTS
        )),
    )
}

/// A base point `A` with a rank-one direction `a ⊗ n`.
pub type Segment = (Mat2C, [f64; 2], [f64; 2]);

/// The `(A, a, n)` triples used by [`rank_one_scan`].
pub fn sample_segments(scheme: &SampleScheme) -> Result<Vec<Segment>> {
    scheme.validate()?;
    let mut rng = scheme.rng();
    let mut out = Vec::with_capacity(scheme.count);
    while out.len() < scheme.count {
        let a0 = scheme.sample_matrix(&mut rng);
        let n = random_unit_vector(&mut rng);
        let u = random_unit_vector(&mut rng);
        let len = a0.opnorm() * rng.random_range(0.05..1.0);
        let mut a = [len * u[0], len * u[1]];
        if scheme.positive_det {
            let mut tries = 0;
            while (a0 + Mat2C::outer(a, n)).det() <= 0.0 && tries < 64 {
                a = [0.5 * a[0], 0.5 * a[1]];
                tries += 1;
            }
            if (a0 + Mat2C::outer(a, n)).det() <= 0.0 {
                continue;
            }
        }
        out.push((a0, a, n));
    }
    Ok(out)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Checks that `H` is midpoint convex and nondecreasing on `count` points of `[1, k_max]`.
/// `H` is an expression in `s`.
pub fn isochoric_characterization_check(h: &Expr, k_max: f64, count: usize, tol: f64) -> Result<ConvexityReport> {
    if !(k_max > 1.0) || count < 3 {
        return Err(Error::InvalidParameter(format!(
            "isochoric check needs k_max > 1 and count >= 3, got {k_max}, {count}"
        )));
    }
    if h.uses_var(crate::expr::Var::T) {
        return Err(Error::InvalidParameter(format!("H must depend on s only, got {h}")));
    }
    let s = linspace(1.0, k_max, count);
    let v: Vec<f64> = s.iter().map(|&x| h.eval(x, f64::NAN)).collect();
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::OutsideDomain(format!("H({}) = {} is not finite", s[i], v[i])));
    }
    let mut tally = Tally::default();
    for i in 1..count - 1 {
        let margin = midpoint_margin(
            ExtReal::Finite(v[i - 1]),
            ExtReal::Finite(v[i]),
            ExtReal::Finite(v[i + 1]),
        )
        .expect("finite values");
        tally.samples.push(Sample {
            margin,
            label: "convexity".into(),
            point: vec![s[i]],
        });
    }
    for i in 0..count - 1 {
        let scale = 1.0 + v[i].abs().max(v[i + 1].abs());
        tally.samples.push(Sample {
            margin: ExtReal::from_f64((v[i + 1] - v[i]) / scale),
            label: "monotonicity".into(),
            point: vec![s[i], s[i + 1]],
        });
    }
    Ok(ConvexityReport::from_tally(
        format!("H(s) = {h} convex and nondecreasing on [1, {k_max}]"),
        tally,
        tol,
    ))
}

/// Residual `r = t·∂²_t E + ∂_t E` of `E(s, t)` by central differences with step
/// `h = step_rel · t` at the interior nodes of the grid. Passes iff `r ≤ tol`;
/// margins are `−r`.
pub fn sh_iso_check(e: &Expr, s_grid: &[f64], t_grid: &[f64], step_rel: f64, tol: f64) -> Result<ConvexityReport> {
    if s_grid.len() < 3 || t_grid.len() < 3 {
        return Err(Error::GridTooSmall(format!(
            "sh-iso grid needs >= 3 nodes per axis, got {} x {}",
            s_grid.len(),
            t_grid.len()
        )));
    }
    if !(step_rel > 0.0 && step_rel < 1.0) || t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter(
            "sh-iso needs t > 0 and 0 < step_rel < 1".into(),
        ));
    }
    let nodes: Vec<(f64, f64)> = s_grid[1..s_grid.len() - 1]
        .iter()
        .flat_map(|&s| t_grid[1..t_grid.len() - 1].iter().map(move |&t| (s, t)))
        .collect();
    let samples = nodes
        .par_iter()
        .map(|&(s, t)| {
            let h = step_rel * t;
            let (em, e0, ep) = (e.eval(s, t - h), e.eval(s, t), e.eval(s, t + h));
            if !(em.is_finite() && e0.is_finite() && ep.is_finite()) {
                return Err(Error::OutsideDomain(format!("E({s}, t) not finite near t = {t}")));
            }
            let d1 = (ep - em) / (2.0 * h);
            let d2 = (ep - 2.0 * e0 + em) / (h * h);
            let r = t * d2 + d1;
            Ok(Sample {
                margin: ExtReal::from_f64(-r),
                label: "residual".into(),
                point: vec![s, t],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ConvexityReport::from_tally(
        format!("t*E_tt + E_t <= 0 for E(s,t) = {e}"),
        Tally { samples, skipped: 0 },
        tol,
    );
    if e.has_kinks() {
        report = report
            .note("E is non-smooth; the pointwise grid test is weaker than the distributional condition at kinks");
    }
    Ok(report)
}

/// Mean-value form of superharmonicity of `w ↦ E(wA)`: margins
/// `E(w₀A) − ⨍_{|w − w₀| = r} E(wA)` for each radius.
pub fn mean_value_superharmonicity_check(
    e: &FunctionalSpec,
    a: &Mat2C,
    w0: Complex64,
    radii: &[f64],
    circle_nodes: usize,
    tol: f64,
) -> Result<ConvexityReport> {
    if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r < w0.norm())) {
        return Err(Error::InvalidParameter(format!(
            "circle of radius {r} around {w0} must have 0 < r < |w0| (it may not touch 0)"
        )));
    }
    let at = |w: Complex64| e.evaluate(&(Mat2C::conformal(w) * *a));
    let center = at(w0)?;
    let mut tally = Tally::default();
    for &r in radii {
        let avg = circle_average(at, w0, r, circle_nodes)?;
        tally.samples.push(Sample {
            margin: center.upper_sub(avg),
            label: "mean value".into(),
            point: vec![w0.re, w0.im, r],
        });
    }
    Ok(ConvexityReport::from_tally(
        format!("w -> {e}(wA) superharmonic near w0 = {w0}"),
        tally,
        tol,
    ))
}

/// An empirical growth constant. It is a sampled lower bound on the true constant,
/// never a proof of a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConstant {
    pub constant: ExtReal,
    pub n_samples: usize,
    /// The sample attaining the constant.
    pub argmax: Option<[[f64; 2]; 2]>,
    pub label: String,
}

fn check_growth_p(p: f64) -> Result<()> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "growth exponent must lie in [1, 2), got {p}"
        )));
    }
    Ok(())
}

/// Smallest `C` with `|E(A)| ≤ C·max{|A|^p, −log det A, K_A} + C` over `samples`.
pub fn growth_constant_of(e: &FunctionalSpec, p: f64, samples: &[Mat2C]) -> Result<GrowthConstant> {
    check_growth_p(p)?;
    let ratios = samples
        .par_iter()
        .map(|a| {
            let j = a.det();
            if !(j > 0.0) {
                return Err(Error::OutsideDomain(format!("growth samples need det > 0, got {j}")));
            }
            let k = a.distortion().finite().unwrap_or(f64::INFINITY);
            let envelope = a.opnorm().powf(p).max(-j.ln()).max(k) + 1.0;
            Ok(match e.evaluate(a)? {
                ExtReal::Finite(v) => ExtReal::from_f64(v.abs() / envelope),
                _ => ExtReal::PosInf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = ratios
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)));
    Ok(GrowthConstant {
        constant: best.map(|(_, c)| *c).unwrap_or(ExtReal::ZERO),
        n_samples: samples.len(),
        argmax: best.map(|(i, _)| samples[i].to_real()),
        label: GROWTH_LABEL.into(),
    })
}

/// [`growth_constant_of`] over the matrices of `scheme`.
pub fn growth_check_basic(e: &FunctionalSpec, p: f64, scheme: &SampleScheme) -> Result<GrowthConstant> {
    check_growth_p(p)?;
    growth_constant_of(e, p, &scheme.matrices()?)
}

/// Per-bin growth constant with `|E(A)| ≤ C(K_A)(|A|² + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthBin {
    pub k_lo: f64,
    /// `+∞` for the overflow bin.
    pub k_hi: ExtReal,
    pub n_samples: usize,
    /// `None` for an empty bin.
    pub constant: Option<ExtReal>,
    /// Running maximum of the bin constants, an increasing envelope.
    pub envelope: ExtReal,
}

/// Bins the samples of `scheme` by `K_A` at the ascending edges `k_bins` (the first
/// edge must be `1`; an overflow bin collects `K_A ≥` the last edge) and reports the
/// per-bin constants with their increasing envelope.
pub fn growth_check_distortion_weighted(
    e: &FunctionalSpec,
    scheme: &SampleScheme,
    k_bins: &[f64],
) -> Result<Vec<GrowthBin>> {
    if k_bins.first() != Some(&1.0) || k_bins.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(format!(
            "distortion bins must start at 1 and increase strictly, got {k_bins:?}"
        )));
    }
    let samples = scheme.matrices()?;
    let rows = samples
        .par_iter()
        .map(|a| {
            let k = a.distortion();
            let bin = match k {
                ExtReal::Finite(k) => k_bins.partition_point(|&edge| edge <= k) - 1,
                _ => k_bins.len() - 1,
            };
            let ratio = match e.evaluate(a)? {
                ExtReal::Finite(v) => ExtReal::from_f64(v.abs() / (a.opnorm().powi(2) + 1.0)),
                _ => ExtReal::PosInf,
            };
            Ok((bin, ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bins: Vec<GrowthBin> = (0..k_bins.len())
        .map(|i| GrowthBin {
            k_lo: k_bins[i],
            k_hi: k_bins
                .get(i + 1)
                .map(|&x| ExtReal::Finite(x))
                .unwrap_or(ExtReal::PosInf),
            n_samples: 0,
            constant: None,
            envelope: ExtReal::ZERO,
        })
        .collect();
    for (bin, ratio) in rows {
        let b = &mut bins[bin];
        b.n_samples += 1;
        b.constant = Some(b.constant.map_or(ratio, |c| c.max(ratio)));
    }
    let mut running = ExtReal::ZERO;
    for b in &mut bins {
        if let Some(c) = b.constant {
            running = running.max(c);
        }
        b.envelope = running;
    }
    Ok(bins)
}
