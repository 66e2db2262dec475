use std::f64::consts::PI;

use approx::assert_relative_eq;
use bwpinch::curvature::{conformal_cylinder_curvature, ricci_decompose, Factor};
use bwpinch::linalg::sym_eigenvalues;
use bwpinch::warped::*;
use proptest::prelude::*;

fn form(c2: f64) -> HarmonicRadialForm {
    HarmonicRadialForm { c1: 0.5, c2 }
}

#[test]
fn flat_cylinder_has_linear_potential() {
    let w = WarpedCylinder::over_sphere(4, Warp::Constant { c: 1.0 }).unwrap();
    let f = form(2.0);
    for t in [-3.0, 0.0, 1.7] {
        assert_relative_eq!(f.phi(&w, t), 0.5 + 2.0 * t, epsilon = 1e-13);
        let h = hessian_structure(&w, &f, t);
        assert_eq!(h.a, 0.0);
        assert!(h.eigenvalues.iter().all(|l| *l == 0.0));
    }
    let grid = Grid::new(-1.0, 1.0, 101).unwrap();
    let k = kato_ratio(&w, &f, &grid).unwrap();
    assert!(k.undefined && k.ratios.is_empty() && k.skipped == 101);
}

#[test]
fn hessian_values() {
    let w = WarpedCylinder::over_sphere(4, Warp::Cosh).unwrap();
    assert_eq!(hessian_structure(&w, &form(1.0), 0.0).a, 0.0);

    let w = WarpedCylinder::over_sphere(5, Warp::Sine { offset: 2.0, amplitude: 1.0 }).unwrap();
    let h = hessian_structure(&w, &form(1.0), PI / 2.0);
    assert!(h.a.abs() < 1e-16);
    let h = hessian_structure(&w, &form(1.0), 0.0);
    // η(0) = 2, η'(0) = 1
    assert_relative_eq!(h.a, 2f64.powi(-5), max_relative = 1e-15);
}

#[test]
fn hessian_spectrum_and_trace() {
    for n in 3..=9 {
        let w = WarpedCylinder::over_sphere(n, Warp::Sine { offset: 2.0, amplitude: 1.0 }).unwrap();
        for t in [-2.0, 0.3, 1.1, 4.0] {
            let h = hessian_structure(&w, &form(-1.3), t);
            let mut expected = vec![h.a; n - 1];
            expected.push(-(n as f64 - 1.0) * h.a);
            expected.sort_by(f64::total_cmp);
            for (x, y) in h.eigenvalues.iter().zip(&expected) {
                assert_relative_eq!(x, y, epsilon = 1e-14);
            }
            assert!(h.trace.abs() < 1e-15);
        }
    }
}

#[test]
fn potential_is_harmonic() {
    let w = WarpedCylinder::over_sphere(5, Warp::Sine { offset: 2.0, amplitude: 1.0 }).unwrap();
    let f = form(1.0);
    let grid = Grid::new(-3.0, 3.0, 601).unwrap();
    for t in grid.iter() {
        assert!(f.flux_residual(&w, t).abs() < 1e-12);
    }
    let values: Vec<f64> = grid.iter().map(|t| f.phi(&w, t)).collect();
    let lap = radial_laplacian_fd(&w, &grid, &values).unwrap();
    let worst = lap.iter().map(|(_, l)| l.abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn laplacian_sign_convention() {
    let w = WarpedCylinder::over_sphere(4, Warp::Constant { c: 1.0 }).unwrap();
    let grid = Grid::new(-2.0, 2.0, 41).unwrap();
    let ones = vec![1.0; 41];
    assert!(radial_laplacian_fd(&w, &grid, &ones).unwrap().iter().all(|(_, l)| *l == 0.0));
    let sq: Vec<f64> = grid.iter().map(|t| t * t).collect();
    for (_, l) in radial_laplacian_fd(&w, &grid, &sq).unwrap() {
        assert_relative_eq!(l, -2.0, epsilon = 1e-10);
    }
}

#[test]
fn kato_ratio_is_equality_case() {
    for (n, expected) in [(4, 0.75), (10, 0.9)] {
        let w = WarpedCylinder::over_sphere(n, Warp::Sine { offset: 2.0, amplitude: 1.0 }).unwrap();
        // π/2 lies on the grid and is critical for η
        let grid = Grid::new(-PI / 2.0, 3.0 * PI / 2.0, 401).unwrap();
        let k = kato_ratio(&w, &form(0.8), &grid).unwrap();
        assert!(!k.undefined && k.skipped >= 1);
        assert_eq!(k.expected, expected);
        assert!(k.max_deviation < 1e-10);
    }
    let w = WarpedCylinder::over_sphere(4, Warp::Cosh).unwrap();
    assert!(kato_ratio(&w, &form(0.0), &Grid::new(0.0, 1.0, 5).unwrap()).is_err());
}

#[test]
fn warped_curvature_matches_conformal_cylinder() {
    // α cosh²s (h + ds²) is η(t)²h + dt² with η = √(α + t²), t = √α sinh s
    let alpha = 1.7;
    for base in [
        vec![Factor::Sphere { m: 4, kappa: 3.0 }],
        vec![Factor::Sphere { m: 2, kappa: 3.0 }, Factor::Sphere { m: 2, kappa: 3.0 }],
        vec![Factor::Sphere { m: 2, kappa: 1.0 }, Factor::Sphere { m: 2, kappa: 5.0 }],
    ] {
        let w = WarpedCylinder::new(base.clone(), Warp::Hyperbolic { alpha }).unwrap();
        for s in [-1.2, 0.0, 0.5, 2.0] {
            let t = alpha.sqrt() * f64::sinh(s);
            let a = ricci_decompose(&w.curvature(t).unwrap()).unwrap();
            let b = ricci_decompose(&conformal_cylinder_curvature(&base, alpha, s).unwrap()).unwrap();
            assert_relative_eq!(a.scalar, b.scalar, max_relative = 1e-12, epsilon = 1e-13);
            let ea = sym_eigenvalues(&a.ric0);
            let eb = sym_eigenvalues(&b.ric0);
            for (x, y) in ea.iter().zip(&eb) {
                assert_relative_eq!(x, y, epsilon = 1e-12);
            }
            assert_relative_eq!(a.weyl.norm_sq(), b.weyl.norm_sq(), epsilon = 1e-12);
        }
    }
}

#[test]
fn basineq_near_equality_on_cosh_cylinder() {
    // round base normalized to R_h = (n−2)(n−1)
    let n = 6;
    let w = WarpedCylinder::new(vec![Factor::Sphere { m: 5, kappa: 1.0 }], Warp::Hyperbolic { alpha: 1.0 }).unwrap();
    let grid = Grid::new(-10.0, 10.0, 10_000).unwrap();
    let r = basineq_verify(&w, &form(1.0), 1e-3, &grid).unwrap();
    assert_eq!(r.n, n);
    assert!(r.max_violation <= 1e-6, "{}", r.max_violation);
    // equality up to the ε correction where |ξ| ≫ ε
    let near = basineq_verify(&w, &form(1.0), 1e-3, &Grid::new(-1.0, 1.0, 2001).unwrap()).unwrap();
    assert!(near.min_slack.abs() < 1e-4 * near.scale, "{} {}", near.min_slack, near.scale);
}

#[test]
fn basineq_flat_cylinder() {
    // ξ = dt is parallel and Ric(∂t, ∂t) = 0 is the lowest Ricci eigenvalue for
    // any base with Ric_h ≥ 0, so every step of the estimate is an equality
    let grid = Grid::new(-2.0, 2.0, 201).unwrap();
    for base in [
        vec![Factor::Sphere { m: 4, kappa: 1.0 }],
        vec![Factor::Sphere { m: 2, kappa: 1.0 }, Factor::Sphere { m: 2, kappa: 3.0 }],
    ] {
        let w = WarpedCylinder::new(base, Warp::Constant { c: 1.0 }).unwrap();
        let r = basineq_verify(&w, &form(1.0), 1e-3, &grid).unwrap();
        assert!(r.max_violation.abs() < 1e-10 && r.min_slack.abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn basineq_strict_away_from_equality() {
    // a non-umbilic warp with ε comparable to |ξ| leaves a definite gap
    let w = WarpedCylinder::over_sphere(5, Warp::Sine { offset: 2.0, amplitude: 1.0 }).unwrap();
    let grid = Grid::new(-2.0, 2.0, 401).unwrap();
    let r = basineq_verify(&w, &form(1.0), 1.0, &grid).unwrap();
    assert!(r.max_violation < 0.0);
    assert!(r.min_slack < -0.1 * r.scale, "{r:?}");
}

#[test]
fn basineq_large_epsilon() {
    let w = WarpedCylinder::over_sphere(5, Warp::Sine { offset: 2.0, amplitude: 1.0 }).unwrap();
    let grid = Grid::new(0.0, 2.0 * PI, 801).unwrap();
    let small = basineq_verify(&w, &form(1.0), 1e-2, &grid).unwrap();
    let large = basineq_verify(&w, &form(1.0), 1e3, &grid).unwrap();
    // equality at the critical point of η, up to discretization
    assert!(large.max_violation <= 1e-5 * large.scale, "{large:?}");
    assert!(large.scale < 1e-2 * small.scale);
    assert!(basineq_verify(&w, &form(1.0), 0.0, &grid).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kato_ratio_any_warp(n in 3usize..12, offset in 1.5f64..5.0, amp in 0.1f64..1.0, c2 in 0.1f64..3.0) {
        let w = WarpedCylinder::over_sphere(n, Warp::Sine { offset, amplitude: amp }).unwrap();
        let k = kato_ratio(&w, &form(c2), &Grid::new(0.1, 6.0, 37).unwrap()).unwrap();
        prop_assert!(k.max_deviation < 1e-10);
    }

    #[test]
    fn basineq_holds_on_sine_warps(offset in 1.5f64..4.0, amp in 0.1f64..1.0, eps in 1e-3f64..1.0) {
        let w = WarpedCylinder::over_sphere(4, Warp::Sine { offset, amplitude: amp }).unwrap();
        let grid = Grid::new(0.0, 2.0 * PI, 1001).unwrap();
        let r = basineq_verify(&w, &form(1.0), eps, &grid).unwrap();
        prop_assert!(r.max_violation <= 1e-7 * r.scale.max(1.0), "{}", r.max_violation);
    }
}
