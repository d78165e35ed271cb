//! Burkholder functional with a complex exponent `𝚙`.
//!
//! For `|𝚙 − 1| ≥ 1, 𝚙 ≠ 0` the exponent `β` is the point of the ellipse with foci 0
//! and 2 and semi-major axis `|𝚙 − 1|` that lies on the line `Re(β/𝚙) = 1`. That line is
//! tangent to the ellipse, so `Re(β(φ)/𝚙) − 1` touches zero without changing sign;
//! `β` is therefore located through the sign change of the derivative of
//! `φ ↦ Re(β(φ)𝚙̄)` along the parametrization `β(φ) = 1 + a cos φ + i b sin φ`.
//!
//! The phase `η` with `|η| = 1` solves `arg(𝚙η) = arg(1 + η|μ|)`; it has a closed form,
//! see [`solve_eta`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::mat2::Mat2C;

pub const BETA_SCAN_POINTS: usize = 256;
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Solved exponent and phase for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEta {
    pub beta: Complex64,
    pub eta: Complex64,
}

/// Checks `1 ≤ |𝚙 − 1|` and `𝚙 ≠ 0`.
pub fn check_exponent(p: Complex64) -> Result<()> {
    if p == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("complex exponent must be nonzero".into()));
    }
    let a = (p - 1.0).norm();
    if a < 1.0 - 1e-14 || a.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "complex exponent {p} violates |p - 1| >= 1 (|p - 1| = {a})"
        )));
    }
    Ok(())
}

/// Ellipse residual `|β| + |β − 2| − 2|𝚙 − 1|` and line residual `Re(β/𝚙) − 1`.
pub fn beta_residuals(p: Complex64, beta: Complex64) -> (f64, f64) {
    let ellipse = beta.norm() + (beta - 2.0).norm() - 2.0 * (p - 1.0).norm();
    let line = (beta / p).re - 1.0;
    (ellipse, line)
}

/// `arg(𝚙η) − arg(1 + η|μ|)` wrapped into `(−π, π]`.
pub fn eta_residual(p: Complex64, mu_abs: f64, eta: Complex64) -> f64 {
    wrap_angle((p * eta).arg() - (1.0 + eta * mu_abs).arg())
}

fn wrap_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves for `β(𝚙)`.
pub fn solve_beta(p: Complex64) -> Result<Complex64> {
    check_exponent(p)?;
    let a = (p - 1.0).norm().max(1.0);
    let b = (a * a - 1.0).max(0.0).sqrt();
    let on_ellipse = |phi: f64| Complex64::new(1.0 + a * phi.cos(), b * phi.sin());
    // d/dφ Re(β(φ) 𝚙̄); its +→− crossing is the maximum of Re(β/𝚙) on the ellipse.
    let slope = |phi: f64| -a * p.re * phi.sin() + b * p.im * phi.cos();

    let n = BETA_SCAN_POINTS;
    let nodes: Vec<f64> = (0..=n).map(|k| -PI + 2.0 * PI * k as f64 / n as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&phi| slope(phi)).collect();
    let mut maxima = Vec::new();
    for k in 0..n {
        let (g0, g1) = (values[k], values[k + 1]);
        if g0 == 0.0 {
            if values[(k + n - 1) % n] > 0.0 || g1 < 0.0 {
                maxima.push(nodes[k]);
            }
        } else if g0 > 0.0 && g1 < 0.0 {
            maxima.push(bisect(nodes[k], nodes[k + 1], slope, 1e-16));
        }
    }
    if maxima.len() != 1 {
        return Err(Error::RootFinding(format!(
            "beta({p}): expected one tangency bracket on the ellipse, found {}",
            maxima.len()
        )));
    }
    let beta = on_ellipse(maxima[0]);
    let (r_ellipse, r_line) = beta_residuals(p, beta);
    if r_ellipse.abs() > RESIDUAL_TOL || r_line.abs() > RESIDUAL_TOL {
        return Err(Error::RootFinding(format!(
            "beta({p}) = {beta}: residuals {r_ellipse:e}, {r_line:e} exceed {RESIDUAL_TOL:e}"
        )));
    }
    Ok(beta)
}

/// Solves for the unimodular phase `η(𝚙, |μ|)`.
///
/// With `|η| = 1`, `𝚙η·conj(1 + η|μ|) = 𝚙(η + |μ|)`, so the equation says that
/// `η + |μ|` lies on the ray `r/𝚙, r > 0`. Starting inside the unit circle (`|μ| < 1`),
/// that ray meets the circle exactly once, at the positive root `r` of `|r/𝚙 − |μ||² = 1`.
pub fn solve_eta(p: Complex64, mu_abs: f64) -> Result<Complex64> {
    check_exponent(p)?;
    if !(0.0..1.0).contains(&mu_abs) {
        return Err(Error::InvalidParameter(format!(
            "|mu| must lie in [0, 1), got {mu_abs}"
        )));
    }
    let q = p.inv();
    let (qq, b) = (q.norm_sqr(), mu_abs * q.re);
    let r = (b + (b * b + qq * (1.0 - mu_abs * mu_abs)).sqrt()) / qq;
    let w = q * r - mu_abs;
    let eta = w / w.norm();
    let res = eta_residual(p, mu_abs, eta);
    if res.abs() > RESIDUAL_TOL {
        return Err(Error::RootFinding(format!(
            "eta({p}, {mu_abs}) residual {res:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    Ok(eta)
}

/// `|w^β| = |w|^{Re β} e^{−Im β · arg w}` on the principal branch `arg ∈ (−π, π]`.
pub fn abs_complex_power(w: Complex64, beta: Complex64) -> f64 {
    if w == Complex64::new(0.0, 0.0) {
        return if beta.re > 0.0 { 0.0 } else { f64::INFINITY };
    }
    w.norm().powf(beta.re) * (-beta.im * w.arg()).exp()
}

/// Evaluator with `β` solved once for a fixed exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexBurkholder {
    pub p: Complex64,
    pub beta: Complex64,
}

impl ComplexBurkholder {
    pub fn new(p: Complex64) -> Result<Self> {
        Ok(ComplexBurkholder {
            p,
            beta: solve_beta(p)?,
        })
    }

    /// Distortion bound `(|𝚙 − 1| + 1)/(|𝚙 − 1| − 1)` of the zero set (`+∞` on the circle).
    pub fn well_distortion(&self) -> f64 {
        let a = (self.p - 1.0).norm();
        if a <= 1.0 {
            f64::INFINITY
        } else {
            (a + 1.0) / (a - 1.0)
        }
    }

    /// Value and solved `(β, η)` at a matrix with `det > 0`. Returns `None` for the
    /// pair when the matrix is off `ℝ²ˣ²₊`.
    pub fn evaluate_with(&self, a: &Mat2C) -> Result<(ExtReal, Option<BetaEta>)> {
        if a.is_zero() {
            return Ok((ExtReal::ZERO, None));
        }
        if a.distortion().is_pos_inf() {
            return Ok((ExtReal::PosInf, None));
        }
        let mu_abs = a.a_minus.norm() / a.a_plus.norm();
        let eta = solve_eta(self.p, mu_abs)?;
        let one_plus = 1.0 + eta * mu_abs;
        let prefactor = self.p * eta * mu_abs / one_plus - 1.0;
        let magnitude = abs_complex_power(one_plus * a.a_plus, self.beta);
        // arg(𝚙η) = arg(1 + η|μ|) makes the prefactor real up to rounding.
        let value = prefactor.re * magnitude;
        Ok((ExtReal::from_f64(value), Some(BetaEta { beta: self.beta, eta })))
    }

    pub fn evaluate(&self, a: &Mat2C) -> Result<ExtReal> {
        Ok(self.evaluate_with(a)?.0)
    }

    /// The local variant: the value where it is `≤ 0`, `+∞` elsewhere.
    pub fn evaluate_local(&self, a: &Mat2C) -> Result<ExtReal> {
        let v = self.evaluate(a)?;
        Ok(if v > ExtReal::ZERO { ExtReal::PosInf } else { v })
    }
}

/// `B_𝚙(A)`; solves `β` on every call. Prefer [`ComplexBurkholder`] in loops.
pub fn complex_burkholder(p: Complex64, a: &Mat2C) -> Result<ExtReal> {
    ComplexBurkholder::new(p)?.evaluate(a)
}

/// Local complex Burkholder functional.
pub fn local_complex_burkholder(p: Complex64, a: &Mat2C) -> Result<ExtReal> {
    ComplexBurkholder::new(p)?.evaluate_local(a)
}
