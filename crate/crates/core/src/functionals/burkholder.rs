//! Real-exponent Burkholder functionals and the isotropic energies built from `K_A`, `J_A`.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::extreal::ExtReal;
use crate::mat2::Mat2C;

/// Critical distortion `K = p/(p − 2)` paired with the exponent `p > 2`.
pub fn critical_distortion(p: f64) -> f64 {
    p / (p - 2.0)
}

/// Exponent `p = 2K/(K − 1)` paired with the distortion bound `K > 1`.
pub fn exponent_for_distortion(k: f64) -> f64 {
    2.0 * k / (k - 1.0)
}

/// `((p/2 − 1)|A|² − (p/2) det A)·|A|^{p−2}`, finite on all of ℝ²ˣ².
pub fn burkholder_real(p: f64, a: &Mat2C) -> f64 {
    let norm = a.opnorm();
    ((0.5 * p - 1.0) * norm * norm - 0.5 * p * a.det()) * norm.powf(p - 2.0)
}

/// `((p − 1)|a₋| − |a₊|)(|a₊| + |a₋|)^{p−1}`.
pub fn burkholder_complexform(p: f64, a: &Mat2C) -> f64 {
    let (ap, am) = (a.a_plus.norm(), a.a_minus.norm());
    ((p - 1.0) * am - ap) * (ap + am).powf(p - 1.0)
}

/// `B_p` in terms of distortion `k` and Jacobian `j`:
/// `((p − 2)/2)·(k − K)·k^{(p−2)/2}·j^{p/2}` with `K = p/(p − 2)`.
pub fn burkholder_isotropic(p: f64, k: f64, j: f64) -> Result<f64> {
    if p <= 2.0 {
        return Err(Error::InvalidParameter(format!("isotropic form needs p > 2, got {p}")));
    }
    if k < 1.0 {
        return Err(Error::InvalidParameter(format!("distortion must be >= 1, got {k}")));
    }
    if j <= 0.0 {
        return Err(Error::InvalidParameter(format!("Jacobian must be > 0, got {j}")));
    }
    Ok(isochoric_factor(p, k) * j.powf(0.5 * p))
}

/// `Φ(s) = ((p − 2)/2)(s − K)s^{(p−2)/2}`.
pub fn isochoric_factor(p: f64, s: f64) -> f64 {
    let half = 0.5 * (p - 2.0);
    half * (s - critical_distortion(p)) * s.powf(half)
}

/// Local Burkholder functional for the well `Q₂(K)`: `B_p` inside, `+∞` outside,
/// with `p = 2K/(K − 1)`.
pub fn local_burkholder(k: f64, a: &Mat2C) -> ExtReal {
    if !a.in_well(k) {
        return ExtReal::PosInf;
    }
    ExtReal::from_f64(burkholder_real(exponent_for_distortion(k), a))
}

/// `W(A) = K_A − log K_A + log J_A` on `det > 0`, `−∞` at 0, `+∞` elsewhere.
pub fn w_functional(a: &Mat2C) -> ExtReal {
    if a.is_zero() {
        return ExtReal::NegInf;
    }
    match a.distortion() {
        ExtReal::Finite(k) => ExtReal::from_f64(k - k.ln() + a.det().ln()),
        _ => ExtReal::PosInf,
    }
}

/// `I₂(A) = K_A + 1/K_A` on `ℝ²ˣ²₊ ∪ {0}`, `+∞` elsewhere.
pub fn second_invariant(a: &Mat2C) -> ExtReal {
    match a.distortion() {
        ExtReal::Finite(k) => ExtReal::from_f64(k + 1.0 / k),
        _ => ExtReal::PosInf,
    }
}

/// Distortion with the same extension convention as the other catalog entries.
pub fn distortion_functional(a: &Mat2C) -> ExtReal {
    a.distortion()
}

/// `L_p(A) = −log(−Φ(K_A)) − log(Ψ(J_A))`, finite exactly on `{det > 0, K_A < K}`.
pub fn log_burkholder(p: f64, a: &Mat2C) -> ExtReal {
    if a.is_zero() {
        return ExtReal::PosInf;
    }
    let k = match a.distortion() {
        ExtReal::Finite(k) if k < critical_distortion(p) => k,
        _ => return ExtReal::PosInf,
    };
    let phi = isochoric_factor(p, k);
    let psi = a.det().powf(0.5 * p);
    ExtReal::from_f64(-(-phi).ln() - psi.ln())
}

/// `θ(B_p(A))` on `{det > 0, K_A < K}`, `+∞` at 0 and on `K_A ≥ K`.
///
/// `theta` is written in the variable `t`. It must be defined on `(−∞, 0)`.
pub fn theta_burkholder(p: f64, theta: &Expr, a: &Mat2C) -> Result<ExtReal> {
    if a.is_zero() {
        return Ok(ExtReal::PosInf);
    }
    match a.distortion() {
        ExtReal::Finite(k) if k < critical_distortion(p) => {}
        _ => return Ok(ExtReal::PosInf),
    }
    let b = burkholder_real(p, a);
    let v = theta.eval(0.0, b);
    if v.is_nan() {
        return Err(Error::OutsideDomain(format!(
            "theta({b}) with theta = {theta} is undefined"
        )));
    }
    Ok(ExtReal::from_f64(v))
}

/// `H(K_A) + G(J_A)` on `det > 0`, `+∞` off `ℝ²ˣ²₊ ∪ {0}`; `H` uses `s`, `G` uses `t`.
/// The value at 0 is left to the caller.
pub fn isochoric_volumetric(h: &Expr, g: &Expr, a: &Mat2C) -> Result<ExtReal> {
    match a.distortion() {
        ExtReal::Finite(k) if !a.is_zero() => {
            let j = a.det();
            let v = h.eval(k, j) + g.eval(k, j);
            if v.is_nan() {
                return Err(Error::OutsideDomain(format!(
                    "H + G undefined at K = {k}, J = {j} (H = {h}, G = {g})"
                )));
            }
            Ok(ExtReal::from_f64(v))
        }
        _ => Ok(ExtReal::PosInf),
    }
}
