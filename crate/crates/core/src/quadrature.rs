//! Disk and circle quadrature with upper-integral semantics.
//!
//! The disk rule is the midpoint tensor rule in polar coordinates. No node sits at
//! `r = 0` or `r = 1`. Sums use fixed-order pairwise summation so results do not depend
//! on how node evaluation was scheduled.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// A quadrature node `z` with its area weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub z: Complex64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub nodes: Vec<Node>,
}

/// Result of an upper integral. `error_estimate` is `None` unless the value is finite
/// and a second resolution was available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperIntegralResult {
    pub value: ExtReal,
    pub pos_mass: ExtReal,
    pub neg_mass: ExtReal,
    pub error_estimate: Option<f64>,
}

/// Midpoint polar grid `r_i = (i − ½)/n_r`, `θ_j = 2π(j − ½)/n_θ`,
/// weight `r_i · (1/n_r) · (2π/n_θ)`.
pub fn disk_grid(n_r: usize, n_theta: usize) -> Result<DiskGrid> {
    if n_r < 4 || n_theta < 4 {
        return Err(Error::GridTooSmall(format!(
            "disk grid needs n_r, n_theta >= 4, got {n_r} x {n_theta}"
        )));
    }
    let dr = 1.0 / n_r as f64;
    let dtheta = 2.0 * PI / n_theta as f64;
    let mut nodes = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let r = (i as f64 + 0.5) * dr;
        for j in 0..n_theta {
            let theta = (j as f64 + 0.5) * dtheta;
            nodes.push(Node {
                z: Complex64::from_polar(r, theta),
                weight: r * dr * dtheta,
            });
        }
    }
    Ok(DiskGrid { n_r, n_theta, nodes })
}

impl DiskGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        disk_grid(n_r, n_theta)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.nodes.iter().map(|n| n.weight).collect::<Vec<_>>())
    }

    /// The half-resolution companion used for Richardson estimates, if it is still
    /// a valid grid.
    pub fn coarsened(&self) -> Option<DiskGrid> {
        disk_grid(self.n_r / 2, self.n_theta / 2).ok()
    }

    /// Evaluates `f` at every node in parallel, preserving node order.
    pub fn map_nodes<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Complex64) -> T + Sync + Send,
    {
        self.nodes.par_iter().map(|n| f(n.z)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    /// Upper integral of `f` over the disk on this grid alone.
    pub fn integrate<F>(&self, f: F) -> Result<UpperIntegralResult>
    where
        F: Fn(Complex64) -> Result<ExtReal> + Sync + Send,
    {
        let values = self.map_nodes(&f).into_iter().collect::<Result<Vec<_>>>()?;
        Ok(upper_integral(&values, &self.weights()))
    }
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Weighted upper integral of extended-real node values.
///
/// Positive and negative parts accumulate separately. A `+∞` node makes the positive
/// mass infinite, a `−∞` node the negative mass. When both masses are infinite the
/// integral is `+∞`.
pub fn upper_integral(values: &[ExtReal], weights: &[f64]) -> UpperIntegralResult {
    assert_eq!(
        values.len(),
        weights.len(),
        "values and weights must have matched lengths"
    );
    let mut pos = Vec::with_capacity(values.len());
    let mut neg = Vec::with_capacity(values.len());
    let (mut pos_inf, mut neg_inf) = (false, false);
    for (v, &w) in values.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        match *v {
            ExtReal::PosInf => pos_inf = true,
            ExtReal::NegInf => neg_inf = true,
            ExtReal::Finite(x) if x >= 0.0 => pos.push(x * w),
            ExtReal::Finite(x) => neg.push(-x * w),
        }
    }
    let pos_mass = if pos_inf {
        ExtReal::PosInf
    } else {
        ExtReal::from_f64(pairwise_sum(&pos))
    };
    let neg_mass = if neg_inf {
        ExtReal::PosInf
    } else {
        ExtReal::from_f64(pairwise_sum(&neg))
    };
    UpperIntegralResult {
        value: pos_mass.upper_sub(neg_mass),
        pos_mass,
        neg_mass,
        error_estimate: None,
    }
}

impl UpperIntegralResult {
    /// Divides value and masses by a positive constant.
    pub fn normalized(self, area: f64) -> Self {
        let scale = |v: ExtReal| match v {
            ExtReal::Finite(x) => ExtReal::Finite(x / area),
            other => other,
        };
        UpperIntegralResult {
            value: scale(self.value),
            pos_mass: scale(self.pos_mass),
            neg_mass: scale(self.neg_mass),
            error_estimate: self.error_estimate.map(|e| e / area),
        }
    }
}

/// `|fine − coarse| / (2^order − 1)`.
pub fn richardson_error(coarse: f64, fine: f64, order: u32) -> f64 {
    (fine - coarse).abs() / (2f64.powi(order as i32) - 1.0)
}

/// Disk mean `(1/π)∫_𝔻 f` as an upper integral, with a Richardson error estimate
/// from the half-resolution grid when the value is finite.
pub fn mean_over_disk<F>(f: F, grid: &DiskGrid) -> Result<UpperIntegralResult>
where
    F: Fn(Complex64) -> Result<ExtReal> + Sync + Send,
{
    let mut fine = grid.integrate(&f)?.normalized(PI);
    if let (ExtReal::Finite(v), Some(coarse_grid)) = (fine.value, grid.coarsened()) {
        let coarse = coarse_grid.integrate(&f)?.normalized(PI);
        if let ExtReal::Finite(c) = coarse.value {
            fine.error_estimate = Some(richardson_error(c, v, 2));
        }
    }
    Ok(fine)
}

/// Trapezoidal average of `f` over `n ≥ 16` equispaced points of `|w − center| = r`,
/// with upper-integral semantics.
pub fn circle_average<F>(f: F, center: Complex64, r: f64, n: usize) -> Result<ExtReal>
where
    F: Fn(Complex64) -> Result<ExtReal> + Sync + Send,
{
    if n < 16 {
        return Err(Error::GridTooSmall(format!("circle average needs n >= 16, got {n}")));
    }
    let values = (0..n)
        .into_par_iter()
        .map(|k| f(center + Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64)))
        .collect::<Result<Vec<_>>>()?;
    let weights = vec![1.0 / n as f64; n];
    Ok(upper_integral(&values, &weights).value)
}
