//! Principal-map families: seams, injectivity, center of mass and Jensen laws.

use std::f64::consts::PI;

use planarqc::functionals::FunctionalKind;
use planarqc::principal::{area_check, center_of_mass, inverse_distortion_identity_check, jensen_test};
use planarqc::{Complex64, DiskGrid, ExtReal, FunctionalSpec, Mat2C, PrincipalMapSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Families whose Jacobian is bounded on the disk (radial stretches with `K ≤ 2`).
fn bounded_jacobian_families() -> Vec<PrincipalMapSpec> {
    families()
        .into_iter()
        .filter(|f| !matches!(f, PrincipalMapSpec::RadialStretch { k } if *k > 2.0))
        .collect()
}

fn families() -> Vec<PrincipalMapSpec> {
    vec![
        PrincipalMapSpec::linear_beltrami(c(1.0, 0.0), c(0.5, 0.0)).unwrap(),
        PrincipalMapSpec::linear_beltrami(c(0.8, -0.6), c(0.1, 0.4)).unwrap(),
        PrincipalMapSpec::radial_stretch(1.0).unwrap(),
        PrincipalMapSpec::radial_stretch(2.0).unwrap(),
        PrincipalMapSpec::radial_stretch(5.0).unwrap(),
        PrincipalMapSpec::quad_tail(0.3).unwrap(),
        PrincipalMapSpec::quad_tail(-0.45).unwrap(),
    ]
}

#[test]
fn continuous_across_the_unit_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for f in families() {
        for _ in 0..1000 {
            let z = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
            let (inside, outside) = (z.scale(1.0 - 1e-15), z.scale(1.0 + 1e-13));
            let at = f.eval(z);
            assert!((f.eval(inside) - at).norm() <= 1e-12, "{f} at {z}");
            assert!((f.eval(outside) - at).norm() <= 1e-12, "{f} at {z}");
        }
    }
}

#[test]
fn jacobian_positive_at_every_node() {
    let grid = DiskGrid::new(128, 128).unwrap();
    for f in families() {
        assert!(grid.nodes.iter().all(|n| f.grad(n.z).unwrap().det() > 0.0), "{f}");
    }
}

proptest! {
    #[test]
    fn quad_tail_is_bi_lipschitz_on_the_closed_disk(
        t in -0.49f64..0.49,
        r1 in 0.0f64..=1.0, a1 in -3.2f64..3.2,
        r2 in 0.0f64..=1.0, a2 in -3.2f64..3.2,
    ) {
        let f = PrincipalMapSpec::quad_tail(t).unwrap();
        let (z1, z2) = (Complex64::from_polar(r1, a1), Complex64::from_polar(r2, a2));
        let lower = (1.0 - 2.0 * t.abs()) * (z1 - z2).norm();
        prop_assert!((f.eval(z1) - f.eval(z2)).norm() >= lower - 1e-14);
    }

    #[test]
    fn linear_beltrami_tail_is_its_gradient(b0r in 0.5f64..2.0, b0i in -1.0f64..1.0, s in 0.0f64..0.95, phi in -3.2f64..3.2) {
        let b0 = c(b0r, b0i);
        let b1 = Complex64::from_polar(s * b0.norm(), phi);
        let f = PrincipalMapSpec::linear_beltrami(b0, b1).unwrap();
        prop_assert_eq!(f.linear_part(), Mat2C::new(b0, b1));
        prop_assert!(f.linear_part().det() > 0.0);
    }
}

#[test]
fn center_of_mass_matches_linear_part() {
    let grid = DiskGrid::new(256, 256).unwrap();
    for f in families() {
        let m = center_of_mass(&f, &grid).unwrap();
        assert!(m.max_abs_diff(&f.linear_part()) < 1e-3, "{f}: {m}");
    }
    // Constant and z̄-linear gradients are integrated exactly by the symmetric rule.
    let grid = DiskGrid::new(16, 16).unwrap();
    for f in [families()[1], families()[5]] {
        assert!(center_of_mass(&f, &grid).unwrap().max_abs_diff(&f.linear_part()) < 1e-14);
    }
}

/// Observed convergence order of the center of mass between `n` and `2n`.
fn observed_order(f: &PrincipalMapSpec, n: usize) -> f64 {
    let err = |n: usize| {
        let g = DiskGrid::new(n, n).unwrap();
        center_of_mass(f, &g).unwrap().max_abs_diff(&f.linear_part())
    };
    (err(n) / err(2 * n)).log2()
}

#[test]
fn center_of_mass_order_for_radial_stretch() {
    // The radial integrand r^{1/K} is singular at 0, so the midpoint rule converges at
    // order 1 + 1/K rather than 2: second order only for K = 1.
    for k in [1.25, 2.0, 4.0] {
        let f = PrincipalMapSpec::radial_stretch(k).unwrap();
        let order = observed_order(&f, 64);
        assert!((order - (1.0 + 1.0 / k)).abs() < 0.1, "K = {k}: order {order}");
    }
}

#[test]
fn neg_det_margin_is_area_defect() {
    let grid = DiskGrid::new(256, 256).unwrap();
    for f in bounded_jacobian_families() {
        let r = jensen_test(&FunctionalSpec::neg_det(), &f, &grid, 1e-6).unwrap();
        let defect = f.laurent_tail().area_defect();
        let m = r.margin.finite().unwrap();
        assert!(
            (m - defect).abs() <= 3.0 * r.error.unwrap() + 1e-12,
            "{f}: {m} vs {defect}"
        );
    }
}

#[test]
fn convex_functionals_pass_jensen() {
    let grid = DiskGrid::new(128, 128).unwrap();
    let convex = [
        FunctionalSpec::sq_norm(),
        FunctionalSpec::new(FunctionalKind::Linear {
            coeffs: [1.0, 0.0, 0.0, 1.0],
        })
        .unwrap(),
        FunctionalSpec::new(FunctionalKind::Linear {
            coeffs: [0.3, -2.0, 1.5, 0.7],
        })
        .unwrap(),
    ];
    for e in &convex {
        for f in families() {
            let r = jensen_test(e, &f, &grid, 0.0).unwrap();
            let err = r.error.unwrap_or(0.0);
            assert!(r.margin >= ExtReal::Finite(-err - 1e-12), "{e} on {f}: {:?}", r.margin);
        }
    }
}

#[test]
fn area_formula_is_an_equality_for_every_family() {
    let grid = DiskGrid::new(256, 256).unwrap();
    for f in bounded_jacobian_families() {
        let r = area_check(&f, &grid, 1e-6).unwrap();
        assert!(r.passed, "{f}: {r:?}");
        let m = r.margin.finite().unwrap();
        assert!(m.abs() <= r.error.unwrap() + 1e-12, "{f}: {m}");
    }
}

#[test]
fn singular_jacobian_undershoots_but_keeps_the_inequality() {
    // J = |z|^{2/K − 2}/K is not integrable by the midpoint rule at order 2 for K > 2;
    // the integrand r^{2/K − 1} is decreasing, so the computed mean stays below 1.
    let grid = DiskGrid::new(256, 256).unwrap();
    let f = PrincipalMapSpec::radial_stretch(5.0).unwrap();
    let r = area_check(&f, &grid, 1e-6).unwrap();
    assert!(r.passed);
    assert!(r.lhs < ExtReal::Finite(1.0) && r.lhs > ExtReal::Finite(0.9));
}

#[test]
fn inverse_distortion_identity_examples() {
    let grid = DiskGrid::new(256, 256).unwrap();
    for k in [1.0, 2.0, 3.0] {
        let r = inverse_distortion_identity_check(&PrincipalMapSpec::radial_stretch(k).unwrap(), &grid, 5e-3).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.lhs.finite().unwrap() - k * PI).abs() < 1e-9);
    }
    let (b0, b1) = (c(1.0, 0.3), c(0.2, -0.4));
    let f = PrincipalMapSpec::linear_beltrami(b0, b1).unwrap();
    let r = inverse_distortion_identity_check(&f, &grid, 1e-12).unwrap();
    let want = PI * (b0.norm() + b1.norm()) / (b0.norm() - b1.norm());
    assert!(r.passed);
    assert!((r.lhs.finite().unwrap() - want).abs() < 1e-11);
    assert!((r.rhs.finite().unwrap() - want).abs() < 1e-11);
}

#[test]
fn jensen_verdicts_never_claim_proof() {
    let grid = DiskGrid::new(32, 32).unwrap();
    let f = PrincipalMapSpec::quad_tail(0.3).unwrap();
    for e in [FunctionalSpec::neg_det(), FunctionalSpec::det()] {
        let r = jensen_test(&e, &f, &grid, 1e-6).unwrap();
        assert!(!r.verdict.contains("prove"));
    }
    let ok = jensen_test(&FunctionalSpec::neg_det(), &f, &grid, 1e-6).unwrap();
    assert!(ok.verdict.starts_with("consistent with"));
}
