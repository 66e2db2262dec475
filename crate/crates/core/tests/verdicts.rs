use std::f64::consts::PI;

use approx::assert_relative_eq;
use bwpinch::bw::Verdict;
use bwpinch::curvature::{Factor, ModelSpace};
use bwpinch::verdicts::*;
use bwpinch::yamabe::Provenance;
use bwpinch::Error;

const TOL: f64 = 1e-8;

fn sphere(m: usize, kappa: f64) -> Factor {
    Factor::Sphere { m, kappa }
}

fn product(f: Vec<Factor>) -> ModelSpace {
    ModelSpace::product(f).unwrap()
}

fn check(r: &PinchReport) {
    assert_eq!(r.ratio, r.lhs / r.rhs);
    assert!(r.betti_consistent, "{r:?}");
}

#[test]
fn s3_times_s3_degree_three() {
    let m = product(vec![sphere(3, 1.0), sphere(3, 1.0)]);
    let r = evaluate_theorem(TheoremId::Degre3Compact, &m, TOL).unwrap();
    check(&r);
    assert_eq!(r.verdict, Verdict::Equality);
    assert!((r.ratio - 1.0).abs() < 1e-9, "{}", r.ratio);
    assert_eq!(r.betti[0].name, "b_3");
    assert_eq!(r.betti[0].value, 2);
    // independent value: Ric° = 0, so W = Rm − (R/30)·Id on Λ², with Rm = 1 on the
    // six factor planes and 0 on the nine mixed ones
    let shift: f64 = 12.0 / 30.0;
    let w_sq = 6.0 * (1.0 - shift).powi(2) + 9.0 * shift * shift;
    let y = 12.0 * (4.0 * PI.powi(4)).powf(1.0 / 3.0);
    assert_relative_eq!(r.lhs, w_sq.sqrt() * (4.0 * PI.powi(4)).powf(1.0 / 3.0), max_relative = 1e-12);
    assert_relative_eq!(r.rhs, y / (2.0 * 10f64.sqrt()), max_relative = 1e-12);
}

#[test]
fn complex_projective_plane() {
    let cp = product(vec![Factor::ComplexProjective { m: 2, c: 4.0 }]);
    for id in [TheoremId::Gursky2, TheoremId::WPlus4D] {
        let r = evaluate_theorem(id, &cp, TOL).unwrap();
        check(&r);
        assert_eq!(r.verdict, Verdict::Equality, "{id}");
        assert!((r.ratio - 1.0).abs() < 1e-9);
    }
    let r = evaluate_theorem(TheoremId::WPlus4D, &cp, TOL).unwrap();
    let get = |name: &str| r.pointwise.iter().find(|v| v.name == name).unwrap().value;
    assert_relative_eq!(get("w_plus"), 4.0, epsilon = 1e-12);
    assert!(get("w_minus_norm_sq") < 1e-20);
    assert_eq!(r.betti[0].name, "b_2^+");
    assert_eq!(r.betti[0].value, 1);
    let g2 = evaluate_theorem(TheoremId::Gursky2, &cp, TOL).unwrap();
    assert_eq!(g2.betti[0].value, 1);
    let ch = evaluate_theorem(TheoremId::PinchingChang, &cp, TOL).unwrap();
    assert_eq!(ch.verdict, Verdict::Equality);
    assert!(ch.yamabe.is_none());
}

#[test]
fn sphere_times_circle_degree_one() {
    for n in 4..=10 {
        let t = 2.0 * PI / ((n - 2) as f64).sqrt();
        let m = product(vec![sphere(n - 1, 1.0), Factor::Circle { length: t }]);
        for id in [TheoremId::Degre1CompactNorm, TheoremId::Gallot] {
            let r = evaluate_theorem(id, &m, TOL).unwrap();
            check(&r);
            assert_eq!(r.verdict, Verdict::Equality, "n={n} {id}: {r:?}");
            assert!((r.ratio - 1.0).abs() < 1e-9);
            assert_eq!(r.yamabe.as_ref().unwrap().provenance, Provenance::CscMinimizerClosedForm);
            // Gallot covers degree 1 only from n = 5 on
            if id == TheoremId::Degre1CompactNorm || n >= 5 {
                assert_eq!(r.betti[0].name, "b_1");
                assert_eq!(r.betti[0].value, 1);
            }
        }
    }
    let m = product(vec![sphere(3, 1.0), Factor::Circle { length: PI }]);
    for id in [TheoremId::Gursky1, TheoremId::PinchingChang] {
        assert_eq!(evaluate_theorem(id, &m, TOL).unwrap().verdict, Verdict::Equality, "{id}");
    }
}

#[test]
fn long_circle_has_no_certificate() {
    let m = product(vec![sphere(4, 1.0), Factor::Circle { length: 10.0 }]);
    let r = evaluate_theorem(TheoremId::Degre1CompactNorm, &m, TOL).unwrap();
    assert_eq!(r.verdict, Verdict::YamabeUnavailable);
    assert_eq!(r.yamabe.as_ref().unwrap().provenance, Provenance::TestFunctionUpperBound);
    assert!(!r.notes.is_empty());
}

#[test]
fn round_sphere_is_strict_and_acyclic() {
    for n in 4..=8 {
        let m = ModelSpace::sphere(n, 1.0).unwrap();
        for id in TheoremId::closed_for(n) {
            let r = evaluate_theorem(id, &m, TOL).unwrap();
            check(&r);
            assert_eq!(r.verdict, Verdict::Strict, "n={n} {id}");
            assert!(r.betti.iter().all(|b| b.value == 0));
            assert!(r.homogeneity_deviation.unwrap() <= HOMOGENEITY_TOL);
        }
    }
}

#[test]
fn degree_two_equality_model_readings() {
    for n in 7..=10 {
        let m = product(vec![sphere(2, (n - 5) as f64), sphere(n - 2, 1.0)]);
        let r = evaluate_theorem(TheoremId::NormPinch(2), &m, TOL).unwrap();
        assert_eq!(r.notes.iter().filter(|s| s.contains("reading")).count(), 2);
        let eq: Vec<_> = r.notes.iter().filter(|s| s.contains("Equality")).collect();
        assert_eq!(eq.len(), 1, "{:?}", r.notes);
        assert!(eq[0].contains("S^2 curvature n-5"));
        // not Einstein: the upper bound leaves the verdict open, but is met exactly
        assert_eq!(r.verdict, Verdict::YamabeUnavailable);
        assert!((r.ratio - 1.0).abs() < 1e-9, "n={n} ratio {}", r.ratio);
    }
}

#[test]
fn theorem_ids_round_trip() {
    let mut ids = TheoremId::closed_for(6);
    ids.extend([TheoremId::Degre1CompleteEigen, TheoremId::DegreKCompact(3), TheoremId::NormPinch(2)]);
    for id in ids {
        assert_eq!(id.to_string().parse::<TheoremId>().unwrap(), id);
        let json = serde_json::to_string(&id).unwrap();
        assert_eq!(serde_json::from_str::<TheoremId>(&json).unwrap(), id);
    }
    assert_eq!("normpinch:3".parse::<TheoremId>().unwrap(), TheoremId::NormPinch(3));
    assert!("NormPinch(x)".parse::<TheoremId>().is_err());
    assert!("nonsense".parse::<TheoremId>().is_err());
}

#[test]
fn unsupported_pairings() {
    let s4 = ModelSpace::sphere(4, 1.0).unwrap();
    assert!(matches!(evaluate_theorem(TheoremId::Degre3Compact, &s4, TOL), Err(Error::Unsupported(_))));
    assert!(matches!(evaluate_theorem(TheoremId::NormPinch(3), &s4, TOL), Err(Error::Unsupported(_))));
    let s5 = ModelSpace::sphere(5, 1.0).unwrap();
    assert!(evaluate_theorem(TheoremId::NormPinch(2), &s5, TOL).is_err());
    assert!(evaluate_theorem(TheoremId::Degre1CompleteEigen, &s5, TOL).is_err());
    let cyl = ModelSpace::cosh_cylinder(vec![sphere(4, 1.0)], 1.0).unwrap();
    assert!(evaluate_theorem(TheoremId::Gallot, &cyl, TOL).is_err());
    let flat = product(vec![Factor::Circle { length: 1.0 }; 4]);
    assert!(evaluate_theorem(TheoremId::Gallot, &flat, TOL).is_err());
}

#[test]
fn cosh_cylinder_equality() {
    for n in 5..=8 {
        let cyl = ModelSpace::cosh_cylinder(vec![sphere(n - 1, 1.0)], 2.0).unwrap();
        let r = evaluate_theorem(TheoremId::Degre1CompleteEigen, &cyl, TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Equality, "{r:?}");
        assert!((r.ratio - 1.0).abs() < 1e-6);
    }
}

#[test]
fn betti_tables() {
    let t = betti_of(&product(vec![sphere(3, 1.0), sphere(3, 1.0)])).unwrap();
    assert_eq!(t.betti, vec![1, 0, 0, 2, 0, 0, 1]);
    let t = betti_of(&product(vec![Factor::ComplexProjective { m: 2, c: 4.0 }])).unwrap();
    assert_eq!(t.betti, vec![1, 0, 1, 0, 1]);
    assert_eq!((t.signature, t.b2_plus), (1, Some(1)));
    let t = betti_of(&product(vec![sphere(5, 1.0), Factor::Circle { length: 1.0 }])).unwrap();
    assert_eq!(t.betti[1], 1);
    let t = betti_of(&product(vec![sphere(2, 1.0), sphere(2, 1.0)])).unwrap();
    assert_eq!((t.betti[2], t.b2_plus), (2, Some(1)));
    assert!(betti_of(&ModelSpace::cosh_cylinder(vec![sphere(3, 1.0)], 1.0).unwrap()).is_err());
    // Poincaré duality
    for f in [
        vec![sphere(2, 1.0), Factor::ComplexProjective { m: 3, c: 1.0 }, Factor::Circle { length: 2.0 }],
        vec![sphere(4, 1.0), sphere(3, 2.0), sphere(2, 1.0)],
    ] {
        let b = betti_of(&product(f)).unwrap().betti;
        let n = b.len() - 1;
        assert!((0..=n).all(|k| b[k] == b[n - k]));
        assert_eq!(b[0], 1);
    }
}

#[test]
fn sweep_families() {
    let fam = equality_family(6, 3);
    let names: Vec<String> = fam.iter().map(|f| product(f.clone()).to_string()).collect();
    assert!(names.iter().any(|s| s == "S(3,2.5) x S(3,2.5)"), "{names:?}");
    assert!(!names.iter().any(|s| s.matches("S(2,").count() == 3));
    let fam = equality_family(4, 2);
    assert!(fam.contains(&vec![sphere(2, 3.0), sphere(2, 3.0)]));

    for (n, k) in [(4, 1), (4, 2), (6, 2), (6, 3), (7, 3), (8, 4)] {
        let reps = sweep_equality_family(n, k, TOL).unwrap();
        for r in &reps {
            check(r);
            assert!((r.ratio - 1.0).abs() < 1e-9, "n={n} k={k} {} {}: {}", r.model, r.theorem, r.ratio);
            assert_eq!(r.verdict, Verdict::Equality);
            if let TheoremId::DegreKCompact(k) = r.theorem {
                assert!(r.betti.iter().any(|b| b.name == format!("b_{k}") && b.value >= 1));
            }
        }
    }
    assert!(sweep_equality_family(13, 2, TOL).is_err());
}
