use std::f64::consts::PI;

use approx::assert_relative_eq;
use bwpinch::curvature::*;
use bwpinch::linalg::sym_eigenvalues;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Full 4-index tensor `R[i][j][k][l]`, the independent oracle.
type Tensor4 = Vec<Vec<Vec<Vec<f64>>>>;

fn zeros4(n: usize) -> Tensor4 {
    vec![vec![vec![vec![0.0; n]; n]; n]; n]
}

fn d(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn oracle_tensor(factors: &[Factor]) -> Tensor4 {
    let n: usize = factors.iter().map(|f| f.dim()).sum();
    let mut r = zeros4(n);
    let mut off = 0;
    for f in factors {
        let m = f.dim();
        let jmat = |a: usize, b: usize| -> f64 {
            if a / 2 == b / 2 && a != b {
                if a.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        };
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = match *f {
                            Factor::Sphere { kappa, .. } => kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k)),
                            Factor::ComplexProjective { c, .. } => {
                                c / 4.0
                                    * (d(i, k) * d(j, l) - d(i, l) * d(j, k) + jmat(i, k) * jmat(j, l)
                                        - jmat(i, l) * jmat(j, k)
                                        + 2.0 * jmat(i, j) * jmat(k, l))
                            }
                            Factor::Circle { .. } => 0.0,
                        };
                        r[off + i][off + j][off + k][off + l] = v;
                    }
                }
            }
        }
        off += m;
    }
    r
}

fn oracle_ricci(r: &Tensor4) -> DMatrix<f64> {
    let n = r.len();
    DMatrix::from_fn(n, n, |j, l| (0..n).map(|i| r[i][j][i][l]).sum())
}

fn tensor_of(rm: &AlgCurvature) -> Tensor4 {
    let n = rm.n();
    let mut t = zeros4(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    t[i][j][k][l] = rm.r(i, j, k, l);
                }
            }
        }
    }
    t
}

fn quarter_full_norm(t: &Tensor4) -> f64 {
    let mut s = 0.0;
    for a in t {
        for b in a {
            for c in b {
                for v in c {
                    s += v * v;
                }
            }
        }
    }
    s / 4.0
}

fn model(factors: Vec<Factor>) -> ModelSpace {
    ModelSpace::product(factors).unwrap()
}

fn s(m: usize, kappa: f64) -> Factor {
    Factor::Sphere { m, kappa }
}

fn cp(m: usize, c: f64) -> Factor {
    Factor::ComplexProjective { m, c }
}

#[test]
fn model_tensors_match_index_oracle() {
    let cases = vec![
        vec![s(4, 1.0)],
        vec![s(3, 1.0), s(3, 1.0)],
        vec![cp(2, 4.0)],
        vec![cp(2, 1.0), s(2, 0.5), Factor::Circle { length: 2.0 }],
        vec![cp(3, 4.0)],
    ];
    for f in cases {
        let rm = curvature_of_model(&model(f.clone())).unwrap();
        let ours = tensor_of(&rm);
        let oracle = oracle_tensor(&f);
        let n = rm.n();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        assert!((ours[i][j][k][l] - oracle[i][j][k][l]).abs() < 1e-14);
                    }
                }
            }
        }
        assert!((rm.ricci() - oracle_ricci(&oracle)).amax() < 1e-12);
        assert_relative_eq!(rm.norm_sq(), quarter_full_norm(&oracle), max_relative = 1e-12);
    }
}

#[test]
fn round_sphere_is_identity_operator() {
    let rm = curvature_of_model(&ModelSpace::sphere(4, 1.0).unwrap()).unwrap();
    assert_eq!(rm.operator(), DMatrix::identity(6, 6));
    assert_eq!(rm.scalar(), 12.0);
    for n in 2..=9 {
        let kappa = 0.3 + n as f64 / 7.0;
        let rm = curvature_of_model(&ModelSpace::sphere(n, kappa).unwrap()).unwrap();
        let dec = ricci_decompose(&rm).unwrap();
        assert!(dec.ric0.amax() < 1e-13);
        assert!(dec.weyl.max_abs() < 1e-13);
        assert_relative_eq!(dec.scalar, (n * (n - 1)) as f64 * kappa, max_relative = 1e-13);
        assert!(rho_of(&rm).abs() < 1e-13);
    }
}

#[test]
fn curvature_contracts_twice_to_scalar() {
    let rm = curvature_of_model(&ModelSpace::sphere(5, 1.0).unwrap()).unwrap();
    let cc = rm.form().contraction().unwrap().contraction().unwrap();
    assert_relative_eq!(cc.get(0, 0), 20.0, max_relative = 1e-14);
}

#[test]
fn s3_times_s3_is_einstein_on_the_pinching_boundary() {
    let rm = curvature_of_model(&model(vec![s(3, 1.0), s(3, 1.0)])).unwrap();
    let dec = ricci_decompose(&rm).unwrap();
    assert_relative_eq!(dec.scalar, 12.0, max_relative = 1e-14);
    assert!(dec.is_einstein());
    assert_relative_eq!(rho_of(&rm), 12.0 / 30.0, max_relative = 1e-12);
}

#[test]
fn complex_projective_is_einstein() {
    for m in 1..=4 {
        for c in [1.0, 4.0] {
            let rm = curvature_of_model(&model(vec![cp(m, c)])).unwrap();
            let expect = DMatrix::identity(2 * m, 2 * m) * ((m + 1) as f64 * c / 2.0);
            assert!((rm.ricci() - expect).amax() < 1e-12, "m={m} c={c}");
        }
    }
}

#[test]
fn s2_times_s2_has_weyl() {
    let rm = curvature_of_model(&model(vec![s(2, 1.0), s(2, 1.0)])).unwrap();
    let dec = ricci_decompose(&rm).unwrap();
    assert!(dec.is_einstein());
    assert!(dec.weyl.norm() > 0.5);
    // index oracle for |W|²
    let n = 4;
    let wt = |i: usize, j: usize, k: usize, l: usize| -> f64 {
        let (lo, hi, sa) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let (lo2, hi2, sb) = if k < l { (k, l, 1.0) } else { (l, k, -1.0) };
        if lo == hi || lo2 == hi2 {
            return 0.0;
        }
        let rank = |a: usize, b: usize| (0..a).map(|x| n - 1 - x).sum::<usize>() + b - a - 1;
        sa * sb * dec.weyl.get(rank(lo, hi), rank(lo2, hi2))
    };
    let mut full = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    full += wt(i, j, k, l).powi(2);
                }
            }
        }
    }
    assert_relative_eq!(dec.weyl.norm_sq(), full / 4.0, max_relative = 1e-12);
}

#[test]
fn sphere_times_circle_traceless_ricci() {
    for n in 3..=8 {
        let rm = curvature_of_model(&model(vec![s(n - 1, 1.0), Factor::Circle { length: 1.0 }])).unwrap();
        let dec = ricci_decompose(&rm).unwrap();
        let nf = n as f64;
        let ev = sym_eigenvalues(&dec.ric0);
        assert_relative_eq!(ev[0], -(nf - 1.0) * (nf - 2.0) / nf, max_relative = 1e-12);
        for v in &ev[1..] {
            assert_relative_eq!(*v, (nf - 2.0) / nf, max_relative = 1e-12);
        }
        assert_relative_eq!(
            dec.ric0_norm_sq(),
            (nf - 1.0) * (nf - 2.0).powi(2) / nf,
            max_relative = 1e-12
        );
    }
}

#[test]
fn three_dimensional_weyl_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let rm = random_curvature(3, &mut rng).unwrap();
        let dec = ricci_decompose(&rm).unwrap();
        assert!(dec.weyl.max_abs() < 1e-12);
    }
}

#[test]
fn volumes() {
    let v = |f: Vec<Factor>| volume_of(&model(f)).unwrap();
    assert_relative_eq!(v(vec![s(2, 1.0)]), 4.0 * PI, max_relative = 1e-14);
    assert_relative_eq!(v(vec![cp(1, 4.0)]), PI, max_relative = 1e-14);
    assert_relative_eq!(v(vec![s(2, 4.0)]), PI, max_relative = 1e-14);
    assert_relative_eq!(v(vec![s(3, 1.0), s(3, 1.0)]), (2.0 * PI * PI).powi(2), max_relative = 1e-13);
    assert_relative_eq!(v(vec![Factor::Circle { length: 3.5 }]), 3.5);
    let cyl = ModelSpace::cosh_cylinder(vec![s(3, 1.0)], 1.0).unwrap();
    assert!(volume_of(&cyl).is_err());
}

#[test]
fn random_curvature_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..500 {
        let n = 3 + trial % 6;
        let rm = random_curvature(n, &mut rng).unwrap();
        let dec = ricci_decompose(&rm).unwrap();
        let scale = rm.form().max_abs();
        assert!(dec.ric0.trace().abs() < 1e-12 * scale * n as f64);
        assert!(dec.weyl.contraction().unwrap().max_abs() < 1e-10 * scale);
        assert!(dec.reassemble().sub(rm.form()).unwrap().max_abs() < 1e-10 * scale);
    }
}

#[test]
fn bianchi_projection_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 4..=8 {
        let rm = random_curvature(n, &mut rng).unwrap();
        let scale = rm.form().max_abs();
        assert!(bianchi_residual(rm.form()) <= 1e-12 * scale);
        let again = bianchi_project(rm.form()).unwrap();
        assert!(again.sub(rm.form()).unwrap().max_abs() <= 1e-12 * scale);
    }
}

#[test]
fn negative_part_raises_rho() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = 0;
    for _ in 0..50 {
        let rm = random_curvature(5, &mut rng).unwrap();
        let ev = sym_eigenvalues(&rm.operator());
        if ev[0] < 0.0 {
            seen += 1;
            assert!(rho_of(&rm) > rm.scalar() / 20.0);
        }
    }
    assert!(seen > 0);
}

#[test]
fn rotation_preserves_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rm = random_curvature(6, &mut rng).unwrap();
    let q = nalgebra::linalg::QR::new(DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) as f64).sin())).q();
    let rot = rm.rotated(&q).unwrap();
    assert_relative_eq!(rot.scalar(), rm.scalar(), max_relative = 1e-11);
    assert_relative_eq!(rot.norm_sq(), rm.norm_sq(), max_relative = 1e-11);
    assert_relative_eq!(rho_of(&rot), rho_of(&rm), max_relative = 1e-10);
}

#[test]
fn cosh_cylinder_closed_forms() {
    let cyl = ModelSpace::cosh_cylinder(vec![s(5, 1.0)], 1.0).unwrap();
    let p = cosh_cylinder_curvature(&cyl, 0.0).unwrap();
    assert_eq!(p.n, 6);
    assert_relative_eq!(p.scalar, 10.0, max_relative = 1e-14);
    assert_relative_eq!(p.r1, 20.0 / 3.0, max_relative = 1e-14);
    assert_relative_eq!(p.curvature.scalar(), 10.0, max_relative = 1e-12);
    assert_relative_eq!(-p.ric0_eigenvalues[0], p.r1, max_relative = 1e-12);

    let far = cosh_cylinder_curvature(&cyl, 30.0).unwrap();
    assert!(far.scalar.abs() < 1e-40 && far.curvature.scalar().abs() < 1e-40);

    let four = ModelSpace::cosh_cylinder(vec![s(3, 2.0)], 0.7).unwrap();
    for t in [-1.3, 0.0, 0.4, 2.0] {
        let p = cosh_cylinder_curvature(&four, t).unwrap();
        assert_eq!(p.scalar, 0.0);
        assert!(p.curvature.scalar().abs() < 1e-12);
    }
}

#[test]
fn cosh_cylinder_full_curvature_agrees_with_closed_forms() {
    let bases = vec![
        vec![s(3, 1.0)],
        vec![s(2, 1.0), s(2, 1.0)],
        vec![cp(2, 4.0)],
        vec![s(3, 1.0), s(3, 1.0)],
    ];
    for base in bases {
        for alpha in [0.5, 1.0, 3.0] {
            let cyl = ModelSpace::cosh_cylinder(base.clone(), alpha).unwrap();
            for t in [-0.8, 0.0, 0.3, 1.7] {
                let p = cosh_cylinder_curvature(&cyl, t).unwrap();
                let nf = p.n as f64;
                assert_relative_eq!(p.curvature.scalar(), p.scalar, epsilon = 1e-11, max_relative = 1e-11);
                assert_relative_eq!(-p.ric0_eigenvalues[0], p.r1, max_relative = 1e-10);
                // base directions: (2(n−2)/n) sech² / (α cosh² t)
                let base_ev = 2.0 * (nf - 2.0) / nf / (alpha * t.cosh().powi(4));
                for v in &p.ric0_eigenvalues[1..] {
                    assert_relative_eq!(*v, base_ev, max_relative = 1e-10);
                }
                // the tensor form agrees with the g-frame eigenvalues at t = 0
                if t == 0.0 {
                    let ev = sym_eigenvalues(&(p.ric0_tensor.clone() / alpha));
                    for (a, b) in ev.iter().zip(&p.ric0_eigenvalues) {
                        assert_relative_eq!(a, b, max_relative = 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn conformal_cylinder_over_non_einstein_base() {
    // the tensor formula gains a sech² factor on the shift; for a
    // non-Einstein base the closed-form r_1 is not exact away from t = 0
    let base = vec![s(2, 1.5), s(2, 4.5)];
    let (_, scale) = normalize_base(&base).unwrap();
    assert_relative_eq!(scale, 1.0, max_relative = 1e-14);
    let rm = conformal_cylinder_curvature(&base, 1.0, 0.9).unwrap();
    let dec = ricci_decompose(&rm).unwrap();
    let n = 5.0;
    let c = 0.9_f64.cosh();
    let mut expected = vec![-1.5, -1.5, 1.5, 1.5]
        .into_iter()
        .map(|l: f64| (l + 2.0 * (n - 2.0) / n / (c * c)) / (c * c))
        .collect::<Vec<_>>();
    expected.push(-2.0 * (n - 2.0) * (n - 1.0) / (n * c.powi(4)));
    expected.sort_by(f64::total_cmp);
    let ev = sym_eigenvalues(&dec.ric0);
    for (a, b) in ev.iter().zip(&expected) {
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_pass_invariants(
        dims in proptest::collection::vec(2usize..5, 1..4),
        kappas in proptest::collection::vec(0.1f64..5.0, 3),
    ) {
        let factors: Vec<Factor> = dims.iter().zip(&kappas).map(|(&m, &k)| s(m, k)).collect();
        let rm = curvature_of_model(&model(factors)).unwrap();
        let dec = ricci_decompose(&rm).unwrap();
        prop_assert!(dec.reassemble().sub(rm.form()).unwrap().max_abs() < 1e-10 * rm.form().max_abs());
        prop_assert!(bianchi_residual(rm.form()) < 1e-12);
        // product of positive factors has nonnegative operator
        prop_assert!(rho_of(&rm) <= rm.scalar() / ((rm.n() * (rm.n() - 1)) as f64) + 1e-12);
    }
}
