//! Real 2×2 matrices in conformal–anticonformal coordinates.
//!
//! A matrix `A` acts on `ω ∈ ℂ ≅ ℝ²` as `Aω = a₊ω + a₋ω̄`. In these coordinates the
//! operator norm, Jacobian, distortion and complex dilatation are all closed-form in
//! `|a₊|` and `|a₋|`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::extreal::ExtReal;

/// Below this value `|a₊| − |a₋|` is treated as zero and the distortion as `+∞`.
pub const DISTORTION_DENOM_FLOOR: f64 = 1e-300;

/// A real 2×2 matrix stored as its conformal part `a₊` and anticonformal part `a₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2C {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
}

/// Complex dilatation and distortion of a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilatationInfo {
    /// `a₋/a₊`; absent when `a₊ = 0`.
    pub mu: Option<Complex64>,
    pub k_distortion: ExtReal,
}

impl Mat2C {
    pub const ZERO: Mat2C = Mat2C {
        a_plus: Complex64::new(0.0, 0.0),
        a_minus: Complex64::new(0.0, 0.0),
    };

    pub const IDENTITY: Mat2C = Mat2C {
        a_plus: Complex64::new(1.0, 0.0),
        a_minus: Complex64::new(0.0, 0.0),
    };

    pub const fn new(a_plus: Complex64, a_minus: Complex64) -> Self {
        Mat2C { a_plus, a_minus }
    }

    /// The matrix `ω ↦ zω`, i.e. `ρR_θ` for `z = ρe^{iθ}`.
    pub fn conformal(z: Complex64) -> Self {
        Mat2C::new(z, Complex64::new(0.0, 0.0))
    }

    /// Anticlockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        Mat2C::conformal(Complex64::from_polar(1.0, theta))
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Mat2C::from_real(d1, 0.0, 0.0, d2)
    }

    /// Converts from row-major real entries `[[a11, a12], [a21, a22]]`.
    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2C {
            a_plus: Complex64::new(0.5 * (a11 + a22), 0.5 * (a21 - a12)),
            a_minus: Complex64::new(0.5 * (a11 - a22), 0.5 * (a21 + a12)),
        }
    }

    pub fn from_rows(m: [[f64; 2]; 2]) -> Self {
        Mat2C::from_real(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    /// Row-major real entries.
    pub fn to_real(&self) -> [[f64; 2]; 2] {
        let (p, m) = (self.a_plus, self.a_minus);
        [[p.re + m.re, m.im - p.im], [p.im + m.im, p.re - m.re]]
    }

    /// The rank-one matrix `a ⊗ n` (entries `a_i n_j`).
    pub fn outer(a: [f64; 2], n: [f64; 2]) -> Self {
        Mat2C::from_real(a[0] * n[0], a[0] * n[1], a[1] * n[0], a[1] * n[1])
    }

    /// `Aω` for `ω ∈ ℂ`.
    pub fn apply(&self, w: Complex64) -> Complex64 {
        self.a_plus * w + self.a_minus * w.conj()
    }

    pub fn is_zero(&self) -> bool {
        self.a_plus == Complex64::new(0.0, 0.0) && self.a_minus == Complex64::new(0.0, 0.0)
    }

    /// Operator norm `|A| = |a₊| + |a₋|`.
    pub fn opnorm(&self) -> f64 {
        self.a_plus.norm() + self.a_minus.norm()
    }

    /// `J_A = |a₊|² − |a₋|²`.
    pub fn det(&self) -> f64 {
        self.a_plus.norm_sqr() - self.a_minus.norm_sqr()
    }

    /// Smallest singular value `| |a₊| − |a₋| |`.
    pub fn min_singular(&self) -> f64 {
        (self.a_plus.norm() - self.a_minus.norm()).abs()
    }

    /// Frobenius norm squared, `2(|a₊|² + |a₋|²)`.
    pub fn frobenius_sqr(&self) -> f64 {
        2.0 * (self.a_plus.norm_sqr() + self.a_minus.norm_sqr())
    }

    /// Outer distortion `K_A`: `|A|²/J_A` on `det > 0`, `1` at `A = 0`, `+∞` otherwise.
    pub fn distortion(&self) -> ExtReal {
        if self.is_zero() {
            return ExtReal::Finite(1.0);
        }
        let (p, m) = (self.a_plus.norm(), self.a_minus.norm());
        let denom = p - m;
        if denom < DISTORTION_DENOM_FLOOR || self.det() <= 0.0 {
            return ExtReal::PosInf;
        }
        ExtReal::from_f64((p + m) / denom)
    }

    pub fn dilatation(&self) -> DilatationInfo {
        let mu = (self.a_plus.norm() > 0.0).then(|| self.a_minus / self.a_plus);
        DilatationInfo {
            mu,
            k_distortion: self.distortion(),
        }
    }

    /// Membership in the `K`-quasiconformal well `{K_A ≤ K}`.
    pub fn in_well(&self, k: f64) -> bool {
        debug_assert!(k >= 1.0);
        self.distortion() <= ExtReal::Finite(k)
    }

    pub fn scale(&self, c: f64) -> Self {
        Mat2C::new(self.a_plus * c, self.a_minus * c)
    }

    /// Transpose; in these coordinates `(a₊, a₋)ᵀ = (ā₊, a₋)`.
    pub fn transpose(&self) -> Self {
        Mat2C::new(self.a_plus.conj(), self.a_minus)
    }

    /// `A⁻¹ = (ā₊, −a₋)/J_A`; `None` when `det A = 0`.
    pub fn inverse(&self) -> Option<Self> {
        let j = self.det();
        (j != 0.0).then(|| Mat2C::new(self.a_plus.conj() / j, -self.a_minus / j))
    }

    /// Largest absolute difference of real entries.
    pub fn max_abs_diff(&self, other: &Mat2C) -> f64 {
        let (a, b) = (self.to_real(), other.to_real());
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((a[i][j] - b[i][j]).abs());
            }
        }
        d
    }
}

/// Membership in the `K`-quasiconformal well. The zero matrix belongs to every well.
pub fn well_membership(a: &Mat2C, k: f64) -> bool {
    a.in_well(k)
}

impl Mul for Mat2C {
    type Output = Mat2C;

    fn mul(self, b: Mat2C) -> Mat2C {
        Mat2C {
            a_plus: self.a_plus * b.a_plus + self.a_minus * b.a_minus.conj(),
            a_minus: self.a_plus * b.a_minus + self.a_minus * b.a_plus.conj(),
        }
    }
}

impl Add for Mat2C {
    type Output = Mat2C;

    fn add(self, b: Mat2C) -> Mat2C {
        Mat2C::new(self.a_plus + b.a_plus, self.a_minus + b.a_minus)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;

    fn sub(self, b: Mat2C) -> Mat2C {
        Mat2C::new(self.a_plus - b.a_plus, self.a_minus - b.a_minus)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;

    fn neg(self) -> Mat2C {
        Mat2C::new(-self.a_plus, -self.a_minus)
    }
}

impl fmt::Display for Mat2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.to_real();
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coordinates_of_basic_matrices() {
        assert_eq!(
            Mat2C::from_real(1.0, 0.0, 0.0, 1.0),
            Mat2C::new(c(1.0, 0.0), c(0.0, 0.0))
        );
        assert_eq!(
            Mat2C::from_real(1.0, 0.0, 0.0, -1.0),
            Mat2C::new(c(0.0, 0.0), c(1.0, 0.0))
        );
        let th: f64 = 0.7;
        let r = Mat2C::from_real(th.cos(), -th.sin(), th.sin(), th.cos());
        assert!((r.a_plus - Complex64::from_polar(1.0, th)).norm() < 1e-15);
        assert!(r.a_minus.norm() < 1e-15);
    }

    #[test]
    fn action_matches_real_matrix_on_basis() {
        let a = Mat2C::from_real(1.5, -2.0, 0.25, 3.0);
        let m = a.to_real();
        let e1 = a.apply(c(1.0, 0.0));
        let e2 = a.apply(c(0.0, 1.0));
        assert!((e1 - c(m[0][0], m[1][0])).norm() < 1e-15);
        assert!((e2 - c(m[0][1], m[1][1])).norm() < 1e-15);
    }

    #[test]
    fn reflection_squared_is_identity() {
        let r = Mat2C::new(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(r * r, Mat2C::IDENTITY);
        let a = Mat2C::from_real(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a * Mat2C::IDENTITY, a);
    }

    #[test]
    fn distortion_cases() {
        assert_eq!(Mat2C::IDENTITY.distortion(), ExtReal::Finite(1.0));
        assert_eq!(Mat2C::ZERO.distortion(), ExtReal::Finite(1.0));
        assert_eq!(Mat2C::diag(2.0, 1.0).distortion(), ExtReal::Finite(2.0));
        assert_eq!(Mat2C::diag(1.0, -1.0).distortion(), ExtReal::PosInf);
        assert_eq!(Mat2C::diag(1.0, 0.0).distortion(), ExtReal::PosInf);
    }

    #[test]
    fn near_degenerate_distortion_is_infinite() {
        let a = Mat2C::new(c(1e-301, 0.0), c(0.0, 0.0));
        assert!(a.det() >= 0.0);
        assert_eq!(a.distortion(), ExtReal::PosInf);
    }

    #[test]
    fn well_membership_cases() {
        assert!(well_membership(&Mat2C::IDENTITY, 1.0));
        assert!(!well_membership(&Mat2C::diag(2.0, 1.0), 1.5));
        assert!(well_membership(&Mat2C::ZERO, 1.0));
        assert!(well_membership(&Mat2C::ZERO, 7.0));
    }

    #[test]
    fn dilatation_only_with_nonzero_conformal_part() {
        let a = Mat2C::new(c(0.0, 0.0), c(1.0, 0.0));
        assert!(a.dilatation().mu.is_none());
        let b = Mat2C::new(c(2.0, 0.0), c(0.0, 1.0));
        let info = b.dilatation();
        assert_eq!(info.mu, Some(c(0.0, 0.5)));
        let k = info.k_distortion.finite().unwrap();
        assert!((k - 3.0).abs() < 1e-15);
        assert!((k - (1.0 + 0.5) / (1.0 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn rotation_composes() {
        let r = Mat2C::rotation(PI / 3.0) * Mat2C::rotation(PI / 6.0);
        assert!(r.max_abs_diff(&Mat2C::rotation(PI / 2.0)) < 1e-15);
    }

    #[test]
    fn transpose_matches_real() {
        let a = Mat2C::from_real(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a.transpose().to_real(), [[1.0, 3.0], [2.0, 4.0]]);
    }
}
