//! Deterministic random matrix samplers.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2C;

/// Matrices `R(α) diag(σ₁, ±σ₂) R(β)` with log-uniform singular values in
/// `[sigma_min, sigma_max]` and uniform angles. With `positive_det` every sample has
/// `det > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleScheme {
    pub count: usize,
    pub seed: u64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub positive_det: bool,
}

impl Default for SampleScheme {
    fn default() -> Self {
        SampleScheme {
            count: 1000,
            seed: 0x5eed,
            sigma_min: 0.1,
            sigma_max: 10.0,
            positive_det: true,
        }
    }
}

impl SampleScheme {
    pub fn new(count: usize, seed: u64, sigma_min: f64, sigma_max: f64) -> Self {
        SampleScheme {
            count,
            seed,
            sigma_min,
            sigma_max,
            positive_det: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma_max && self.sigma_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample scheme needs 0 < sigma_min <= sigma_max < inf, got [{}, {}]",
                self.sigma_min, self.sigma_max
            )));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn sample_matrix(&self, rng: &mut impl Rng) -> Mat2C {
        let (lo, hi) = (self.sigma_min.ln(), self.sigma_max.ln());
        let mut draw_sigma = || {
            if hi > lo {
                rng.random_range(lo..hi).exp()
            } else {
                self.sigma_min
            }
        };
        let s1 = draw_sigma();
        let mut s2 = draw_sigma();
        if !self.positive_det && rng.random_bool(0.5) {
            s2 = -s2;
        }
        let alpha = rng.random_range(-PI..PI);
        let beta = rng.random_range(-PI..PI);
        Mat2C::rotation(alpha) * Mat2C::diag(s1, s2) * Mat2C::rotation(beta)
    }

    pub fn matrices(&self) -> Result<Vec<Mat2C>> {
        self.validate()?;
        let mut rng = self.rng();
        Ok((0..self.count).map(|_| self.sample_matrix(&mut rng)).collect())
    }
}

pub fn random_unit_vector(rng: &mut impl Rng) -> [f64; 2] {
    let phi = rng.random_range(-PI..PI);
    [phi.cos(), phi.sin()]
}
