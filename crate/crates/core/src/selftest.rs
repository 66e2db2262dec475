//! The acceptance property suite, runnable from the library and the CLI.

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bw::{
    build_bw, degree_factor, equality_spectrum_check, gallot_meyer_slack, lemma_eigenendo_check, lemma_rk_check,
    middle_degree_split, pinch_constants_exact, r_k_of, Verdict,
};
use crate::curvature::{curvature_of_model, random_curvature, ricci_decompose, Factor, ModelSpace};
use crate::error::Result;
use crate::exterior::binomial;
use crate::verdicts::{evaluate_theorem, PinchReport, TheoremId};
use crate::warped::{basineq_verify, kato_ratio, Grid, HarmonicRadialForm, Warp, WarpedCylinder};
use crate::yamabe::{
    cosh_cylinder_c, cylinder_yamabe_quadrature, phi_first_integral_drift, yamabe_ode_check, yamabe_sphere,
    RadialProfile,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    /// Random trial count override; `None` runs the standard counts.
    pub trials: Option<usize>,
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestConfig {
    pub seed: u64,
    pub trials: Option<usize>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self { seed: 42, trials: None }
    }
}

impl SelftestConfig {
    fn count(&self, standard: usize) -> usize {
        self.trials.unwrap_or(standard)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

type Outcome = Result<(bool, String)>;

/// A criterion: `(id, name, check)`.
pub type Criterion = (u32, &'static str, fn(&SelftestConfig) -> Outcome);

pub const CRITERIA: [Criterion; 11] = [
    (1, "constant chain", constant_chain),
    (2, "trace identity", trace_identity),
    (3, "traceless endomorphism lemma", eigen_endo),
    (4, "r_k lemma and Gallot-Meyer", rk_lemma),
    (5, "product curvature spectrum", product_spectrum),
    (6, "model equalities", model_equalities),
    (7, "cylinder Yamabe", cylinder_yamabe),
    (8, "Yamabe ODE", yamabe_ode),
    (9, "cosh cylinder constant", cosh_cylinder),
    (10, "Kato equality", kato),
    (11, "degree-one Bochner inequality", basineq),
];

pub fn run_criterion(c: &Criterion, cfg: &SelftestConfig) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match (c.2)(cfg) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id: c.0,
        name: c.1.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_selftest(cfg: &SelftestConfig) -> SelftestReport {
    let start = Instant::now();
    let criteria: Vec<_> = CRITERIA.iter().map(|c| run_criterion(c, cfg)).collect();
    SelftestReport {
        seed: cfg.seed,
        trials: cfg.trials,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn constant_chain(_: &SelftestConfig) -> Outcome {
    let sq = |n: usize, k: usize| degree_factor(n, k) * degree_factor(n, k);
    let mut bad = Vec::new();
    for n in 5..=12 {
        let (_, b, _) = pinch_constants_exact(n, 1)?;
        if sq(n, 1) / b != Ratio::new(1, (n * (n - 1)) as i64) {
            bad.push(format!("n={n} k=1"));
        }
    }
    let (_, b, _) = pinch_constants_exact(4, 1)?;
    if sq(4, 1) / b != Ratio::new(1, 12) {
        bad.push("1/12".into());
    }
    let (_, _, a) = pinch_constants_exact(4, 2)?;
    if a.map(|a| sq(4, 2) / a) != Some(Ratio::new(1, 24)) {
        bad.push("1/(2√6)".into());
    }
    // r₂⁺ = 2w⁺ on CP², so the middle-degree constant halves
    if degree_factor(4, 2) / 2 != Ratio::new(1, 6) {
        bad.push("1/6".into());
    }
    let cp = curvature_of_model(&ModelSpace::product(vec![Factor::ComplexProjective { m: 2, c: 4.0 }])?)?;
    let mid = middle_degree_split(&build_bw(&ricci_decompose(&cp)?, 2)?)?;
    if let (Some(rp), Some(wp)) = (mid.r_plus, mid.w_plus) {
        if (rp - 2.0 * wp).abs() > 1e-12 * wp.abs() {
            bad.push(format!("r+ = {rp}, w+ = {wp}"));
        }
    }
    let (_, _, a) = pinch_constants_exact(6, 3)?;
    if a.map(|a| sq(6, 3) / a) != Some(Ratio::new(1, 40)) {
        bad.push("1/(2√10)".into());
    }
    Ok((bad.is_empty(), if bad.is_empty() { "all exact".into() } else { bad.join("; ") }))
}

fn trace_identity(cfg: &SelftestConfig) -> Outcome {
    let mut rng = cfg.rng(2);
    let trials = cfg.count(500);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let n = 3 + trial % 8;
        let rm = random_curvature(n, &mut rng)?;
        let dec = ricci_decompose(&rm)?;
        for k in 1..n {
            let op = build_bw(&dec, k)?;
            let expected = binomial(n, k) as f64 * (k * (n - k)) as f64 / (n * (n - 1)) as f64 * dec.scalar;
            let scale = expected.abs().max(op.matrix.amax());
            worst = worst.max((op.matrix.trace() - expected).abs() / scale);
        }
    }
    Ok((worst <= 1e-10, format!("{trials} tensors, n = 3..10, max relative error {worst:.2e}")))
}

fn eigen_endo(cfg: &SelftestConfig) -> Outcome {
    let mut rng = cfg.rng(3);
    let trials = cfg.count(1000);
    let mut violations = 0;
    let mut extremal: f64 = 0.0;
    for d in 2..=20 {
        let r = lemma_eigenendo_check(d, trials, &mut rng)?;
        violations += r.violations;
        extremal = extremal.max(r.extremal_residual);
    }
    Ok((
        violations == 0 && extremal <= 1e-12,
        format!("{trials} per d = 2..20, {violations} violations, extremal slack {extremal:.1e}"),
    ))
}

fn rk_lemma(cfg: &SelftestConfig) -> Outcome {
    let mut rng = cfg.rng(4);
    let trials = cfg.count(500);
    let mut violations = 0;
    let mut gm_violations = 0;
    let mut checks = 0;
    for n in 4..=8 {
        for _ in 0..trials {
            let rm = random_curvature(n, &mut rng)?;
            let dec = ricci_decompose(&rm)?;
            let scale = rm.form().max_abs();
            for k in 1..=n / 2 {
                if 2 * k + 1 > n && 2 * k != n {
                    continue;
                }
                let rep = lemma_rk_check(&dec, k)?;
                if rep.slack < -1e-9 * rep.rhs.max(rep.lhs).max(scale * scale) {
                    violations += 1;
                }
                if gallot_meyer_slack(&rm, k)? < -1e-9 * scale {
                    gm_violations += 1;
                }
                checks += 1;
            }
        }
    }
    Ok((
        violations == 0 && gm_violations == 0,
        format!("{checks} checks ({trials} per (n,k), n = 4..8), {violations} lemma and {gm_violations} Gallot-Meyer violations"),
    ))
}

fn product_spectrum(cfg: &SelftestConfig) -> Outcome {
    let mut rng = cfg.rng(5);
    let trials = cfg.count(100);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for trial in 0..trials {
        let (a, b, g): (f64, f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let k = 1 + trial % 4;
        let n = k + 1 + (trial / 4) % (10 - k);
        let r = equality_spectrum_check(a, b, g, n, k)?;
        worst = worst.max(r.max_abs_error);
        if !r.formula_holds && failures.len() < 5 {
            failures.push(format!(
                "n={n} k={k} (α,β,γ)=({a:.4},{b:.4},{g:.4}): predicted {:?}, computed {:?}",
                r.predicted, r.computed
            ));
        }
    }
    let detail = if failures.is_empty() {
        format!("{trials} triples, n ≤ 10, k ≤ 4, max error {worst:.2e}")
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

fn ratio_ok(bad: &mut Vec<String>, label: &str, r: &PinchReport, betti: Option<(&str, u64)>) {
    let mut ok = (r.ratio - 1.0).abs() <= 1e-9 && r.verdict == Verdict::Equality && r.betti_consistent;
    if let Some((name, v)) = betti {
        ok &= r.betti.iter().any(|b| b.name == name && b.value == v);
    }
    if !ok {
        bad.push(format!("{label}: ratio {} {:?}", r.ratio, r.verdict));
    }
}

fn model_equalities(_: &SelftestConfig) -> Outcome {
    let tol = 1e-8;
    let mut bad = Vec::new();
    let s3s3 = ModelSpace::product(vec![Factor::Sphere { m: 3, kappa: 1.0 }; 2])?;
    ratio_ok(&mut bad, "S3xS3", &evaluate_theorem(TheoremId::Degre3Compact, &s3s3, tol)?, Some(("b_3", 2)));
    let cp = ModelSpace::product(vec![Factor::ComplexProjective { m: 2, c: 4.0 }])?;
    ratio_ok(&mut bad, "CP2", &evaluate_theorem(TheoremId::Gursky2, &cp, tol)?, Some(("b_2", 1)));
    let w = evaluate_theorem(TheoremId::WPlus4D, &cp, tol)?;
    ratio_ok(&mut bad, "CP2 w+", &w, Some(("b_2^+", 1)));
    let w_minus = w.pointwise.iter().find(|v| v.name == "w_minus_norm_sq").map_or(f64::NAN, |v| v.value);
    if !(w_minus.abs() <= 1e-20) {
        bad.push(format!("CP2 |W-|^2 = {w_minus}"));
    }
    for n in 4..=10 {
        let t = 2.0 * PI / ((n - 2) as f64).sqrt();
        for length in [t, 0.5 * t] {
            let m = ModelSpace::product(vec![Factor::Sphere { m: n - 1, kappa: 1.0 }, Factor::Circle { length }])?;
            ratio_ok(&mut bad, &format!("n={n} degree 1"), &evaluate_theorem(TheoremId::Degre1CompactNorm, &m, tol)?, Some(("b_1", 1)));
            let g = evaluate_theorem(TheoremId::Gallot, &m, tol)?;
            ratio_ok(&mut bad, &format!("n={n} Gallot"), &g, if n >= 5 { Some(("b_1", 1)) } else { None });
        }
    }
    for n in 7..=10 {
        let m = ModelSpace::product(vec![
            Factor::Sphere { m: 2, kappa: (n - 5) as f64 },
            Factor::Sphere { m: n - 2, kappa: 1.0 },
        ])?;
        let dec = ricci_decompose(&curvature_of_model(&m)?)?;
        let rep = lemma_rk_check(&dec, 2)?;
        let spec = r_k_of(&build_bw(&dec, 2)?);
        if rep.verdict != Verdict::Equality || spec.clusters.len() != 2 || spec.clusters[0].multiplicity != 1 {
            bad.push(format!("n={n} S2xS{}: {:?}, {} clusters", n - 2, rep.verdict, spec.clusters.len()));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "all ratios 1".into() } else { bad.join("; ") }))
}

fn cylinder_yamabe(_: &SelftestConfig) -> Outcome {
    let s = |m: usize, kappa: f64| Factor::Sphere { m, kappa };
    let bases: Vec<Vec<Factor>> = vec![
        vec![s(3, 1.0)],
        vec![s(4, 1.0)],
        vec![s(5, 1.0)],
        vec![s(6, 1.0)],
        vec![s(7, 1.0)],
        vec![s(2, 1.0), s(2, 1.0)],
        vec![Factor::ComplexProjective { m: 2, c: 4.0 }],
        vec![s(2, 2.0), s(3, 1.0)],
        vec![s(3, 1.0), s(3, 1.0)],
        vec![s(2, 3.0), s(4, 1.0)],
    ];
    let mut bad = Vec::new();
    let mut slowest: f64 = 0.0;
    for base in bases {
        let start = Instant::now();
        let c = cylinder_yamabe_quadrature(&base)?;
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let rel = (c.quadrature - c.closed_form).abs() / c.closed_form;
        let round = base.len() == 1 && matches!(base[0], Factor::Sphere { .. });
        let ys = yamabe_sphere(c.n);
        if rel > 1e-6 || (!round && c.quadrature >= ys) {
            bad.push(format!("n={} quadrature {} closed {} Y(S^n) {}", c.n, c.quadrature, c.closed_form, ys));
        }
    }
    Ok((
        bad.is_empty() && slowest < 10.0,
        if bad.is_empty() { format!("10 bases, slowest {slowest:.2} s") } else { bad.join("; ") },
    ))
}

fn yamabe_ode(_: &SelftestConfig) -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_fi: f64 = 0.0;
    let grid: Vec<f64> = (0..10_000).map(|i| -6.0 + 12.0 * i as f64 / 9_999.0).collect();
    for n in 4..=8 {
        let nf = n as f64;
        let a = (nf - 2.0) / 2.0;
        let p = RadialProfile::sample(|s| s.cosh().powf(-a), -6.0, 6.0, 10_000)?;
        let r = yamabe_ode_check(&p, n, (nf - 2.0) * (nf - 1.0), nf * (nf - 1.0))?;
        worst_res = worst_res.max(r.max_ode_residual);
        worst_fi = worst_fi.max(phi_first_integral_drift(n, nf * (nf - 1.0), 0.3, &grid));
    }
    Ok((
        worst_res <= 1e-6 && worst_fi <= 1e-12,
        format!("ODE residual {worst_res:.2e}, first integral {worst_fi:.2e}"),
    ))
}

fn cosh_cylinder(_: &SelftestConfig) -> Outcome {
    let mut bad = Vec::new();
    let mut cs = Vec::new();
    for base in [
        vec![Factor::Sphere { m: 4, kappa: 1.0 }],
        vec![Factor::Sphere { m: 5, kappa: 1.0 }],
        vec![Factor::Sphere { m: 7, kappa: 1.0 }],
        vec![Factor::Sphere { m: 2, kappa: 1.0 }; 2],
    ] {
        let r = cosh_cylinder_c(&base, 1.0)?;
        cs.push(r.c);
        if (r.c - 1.0).abs() > 1e-6 {
            bad.push(format!("n={} C = {}", r.n, r.c));
        }
    }
    let r = cosh_cylinder_c(&[Factor::Sphere { m: 2, kappa: 1.0 }, Factor::Sphere { m: 2, kappa: 3.0 }], 1.0)?;
    if !(r.r1_base > 0.0 && r.c > 1.0 + 1e-6) {
        bad.push(format!("non-Einstein C = {}", r.c));
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("Einstein C = {cs:.9?}, non-Einstein C ≥ {:.6}", r.c)
        } else {
            bad.join("; ")
        },
    ))
}

fn kato(_: &SelftestConfig) -> Outcome {
    let f = HarmonicRadialForm { c1: 0.0, c2: 1.0 };
    let grid = Grid::new(-3.0, 3.0, 601)?;
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for warp in [Warp::Sine { offset: 2.0, amplitude: 1.0 }, Warp::Cosh] {
        for n in 4..=10 {
            let w = WarpedCylinder::over_sphere(n, warp)?;
            let r = kato_ratio(&w, &f, &grid)?;
            if r.undefined {
                return Ok((false, format!("undefined for n={n} {warp:?}")));
            }
            points += r.ratios.len();
            worst = worst.max(r.max_deviation);
        }
    }
    Ok((worst <= 1e-10, format!("{points} points, max deviation {worst:.2e}")))
}

fn basineq(_: &SelftestConfig) -> Outcome {
    let f = HarmonicRadialForm { c1: 0.0, c2: 1.0 };
    let grid = Grid::new(-10.0, 10.0, 10_000)?;
    let mut worst = f64::NEG_INFINITY;
    for n in 4..=8 {
        let w = WarpedCylinder::new(vec![Factor::Sphere { m: n - 1, kappa: 1.0 }], Warp::Hyperbolic { alpha: 1.0 })?;
        let r = basineq_verify(&w, &f, 1e-3, &grid)?;
        worst = worst.max(r.max_violation);
    }
    Ok((worst <= 1e-6, format!("n = 4..8, ε = 1e-3, max(LHS − RHS) = {worst:.2e}")))
}
