//! Numerical laboratory for planar energy functionals on 2×2 matrices.
//!
//! The crate evaluates quasiconformal-flavoured energies (Burkholder functionals,
//! the `W` functional, the second invariant, …) on matrices written in
//! conformal–anticonformal coordinates, integrates them over the unit disk, and checks
//! convexity-type inequalities (rank-one convexity, Jensen inequalities for principal
//! maps, superharmonicity, growth bounds, laminate lower semicontinuity) on explicit,
//! closed-form test objects.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexity;
pub mod error;
pub mod experiments;
pub mod expr;
pub mod extreal;
pub mod functionals;
pub mod mat2;
pub mod principal;
pub mod quadrature;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
pub use expr::Expr;
pub use extreal::ExtReal;
pub use functionals::{FunctionalKind, FunctionalSpec};
pub use mat2::{well_membership, DilatationInfo, Mat2C};
pub use num_complex::Complex64;
pub use principal::PrincipalMapSpec;
pub use quadrature::{DiskGrid, UpperIntegralResult};
pub use report::CheckReport;
pub use sampling::SampleScheme;
