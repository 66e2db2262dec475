//! Versioned reports: builders plus JSON, Markdown and CSV emission.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bw::{
    build_bw, degree_factor, gallot_meyer_slack, lemma_rk_check, middle_degree_split, pinch_constants,
    pinch_constants_exact, r_k_of, MiddleDegree, PinchConstants, RkLemmaReport, RkSpectrum, Q,
};
use crate::curvature::{curvature_of_model, ricci_decompose, ModelSpace};
use crate::dsl::ModelExpr;
use crate::error::{Error, Result};
use crate::selftest::SelftestReport;
use crate::verdicts::PinchReport;
use crate::yamabe::{
    concavity_defect, cosh_cylinder_c, cylinder_radial_upper_bound, cylinder_yamabe_quadrature,
    modified_yamabe_probe, yamabe_of, yamabe_upper_bound, CoshCylinderC, CylinderYamabe, TestFamily, YamabeValue,
};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub report: ReportBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Constants(ConstantsReport),
    Spectrum(SpectrumReport),
    Pinch { reports: Vec<PinchReport> },
    Yamabe(YamabeReport),
    Selftest(SelftestReport),
}

impl Report {
    pub fn new(report: ReportBody) -> Self {
        Self { schema: SCHEMA, report }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConstant {
    pub name: String,
    /// Exact rational form where one exists.
    pub exact: Option<String>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub constants: PinchConstants,
    pub theorem_constants: Vec<NamedConstant>,
}

fn q_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn named(name: &str, q: Q) -> NamedConstant {
    NamedConstant {
        name: name.into(),
        exact: Some(q.to_string()),
        value: q_f64(q),
    }
}

/// Pinching constants for `(n, k)` and the single-term theorem constants they
/// induce. Squared coefficients are exact; their square roots are floats.
pub fn constants_report(n: usize, k: usize) -> Result<ConstantsReport> {
    let constants = pinch_constants(n, k)?;
    let (a, b, a_mid) = pinch_constants_exact(n, k)?;
    let f = degree_factor(n, k);
    let mut out = vec![
        named("degree_factor k(n-k)/(n(n-1))", f),
        named("gallot 1/(n(n-1))", Q::new(1, (n * (n - 1)) as i64)),
    ];
    if *b.numer() != 0 {
        let c2 = f * f / b;
        out.push(named("ric0 coefficient squared", c2));
        out.push(NamedConstant {
            name: "ric0 coefficient".into(),
            exact: None,
            value: q_f64(c2).sqrt(),
        });
    }
    let a_used = a_mid.unwrap_or(a);
    if *a_used.numer() != 0 {
        let c2 = f * f / a_used;
        out.push(named("weyl coefficient squared", c2));
        out.push(NamedConstant {
            name: "weyl coefficient".into(),
            exact: None,
            value: q_f64(c2).sqrt(),
        });
    }
    if n == 4 && k == 2 {
        out.push(named("w_plus coefficient", f / Q::from_integer(2)));
    }
    Ok(ConstantsReport {
        constants,
        theorem_constants: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub model: String,
    pub scalar_shift: f64,
    pub spectrum: RkSpectrum,
    pub lemma: Option<RkLemmaReport>,
    pub middle: Option<MiddleDegree>,
    /// `k(n−k)ρ − r_k`.
    pub gallot_meyer_slack: f64,
}

pub fn spectrum_report(model: &ModelSpace, k: usize) -> Result<SpectrumReport> {
    let rm = curvature_of_model(model)?;
    let dec = ricci_decompose(&rm)?;
    let op = build_bw(&dec, k)?;
    let n = rm.n();
    let lemma = if k >= 1 && 2 * k <= n {
        Some(lemma_rk_check(&dec, k)?)
    } else {
        None
    };
    let middle = if 2 * k == n { Some(middle_degree_split(&op)?) } else { None };
    Ok(SpectrumReport {
        model: model.to_string(),
        scalar_shift: op.scalar_shift(),
        spectrum: r_k_of(&op),
        lemma,
        middle,
        gallot_meyer_slack: gallot_meyer_slack(&rm, k)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub beta: f64,
    pub family_size: usize,
    pub sampled_min: f64,
    pub beta_y: f64,
    /// Every sampled value is at least `βY − 1e-8`.
    pub bound_holds: bool,
    pub concavity_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YamabeReport {
    pub model: String,
    pub yamabe: Option<YamabeValue>,
    pub unavailable: Option<String>,
    pub upper_bound: Option<YamabeValue>,
    pub probe: Option<ProbeSummary>,
    pub cylinder: Option<CylinderYamabe>,
    pub cosh: Option<CoshCylinderC>,
}

/// Probe settings for [`yamabe_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub beta: f64,
    pub count: usize,
    pub seed: u64,
}

pub fn yamabe_report(expr: &ModelExpr, probe: Option<ProbeSettings>) -> Result<YamabeReport> {
    if let Some(alpha) = expr.alpha {
        let base = ModelSpace::product(expr.factors.clone())?;
        let cosh = cosh_cylinder_c(&expr.factors, alpha)?;
        let cylinder = match cylinder_yamabe_quadrature(&expr.factors) {
            Ok(c) => c,
            Err(Error::NotEinstein(_)) => cylinder_radial_upper_bound(&expr.factors)?,
            Err(e) => return Err(e),
        };
        let exact = cylinder.value.provenance.is_exact();
        return Ok(YamabeReport {
            model: format!("CoshCyl({base}, alpha={alpha})"),
            yamabe: exact.then(|| cylinder.value.clone()),
            unavailable: (!exact).then(|| "base is not Einstein; radial value is an upper bound".to_string()),
            upper_bound: (!exact).then(|| cylinder.value.clone()),
            probe: None,
            cylinder: Some(cylinder),
            cosh: Some(cosh),
        });
    }
    let model = expr.build()?;
    let (yamabe, unavailable) = match yamabe_of(&model) {
        Ok(y) => (Some(y), None),
        Err(Error::YamabeUnavailable(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let upper_bound = Some(yamabe_upper_bound(&model)?);
    let probe = match (probe, &yamabe) {
        (Some(p), Some(y)) => {
            let fam = TestFamily::Perturbations {
                count: p.count,
                max_degree: 4,
                amplitude: 0.5,
                seed: p.seed,
            };
            let r = modified_yamabe_probe(&model, p.beta, &fam)?;
            let beta_y = p.beta * y.value;
            Some(ProbeSummary {
                beta: p.beta,
                family_size: r.values.len(),
                sampled_min: r.sampled_min,
                beta_y,
                bound_holds: r.values.iter().all(|v| *v >= beta_y - 1e-8),
                concavity_defect: concavity_defect(&r.functionals, 11),
            })
        }
        _ => None,
    };
    Ok(YamabeReport {
        model: model.to_string(),
        yamabe,
        unavailable,
        upper_bound,
        probe,
        cylinder: None,
        cosh: None,
    })
}

pub fn to_json(r: &Report) -> Result<String> {
    serde_json::to_string_pretty(r).map_err(|e| Error::Decode(e.to_string()))
}

/// Decodes a JSON report, rejecting unknown schema versions.
pub fn decode_json(s: &str) -> Result<Report> {
    let r: Report = serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))?;
    if r.schema != SCHEMA {
        return Err(Error::Decode(format!("unsupported schema {}", r.schema)));
    }
    Ok(r)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.10}"))
}

pub fn to_markdown(r: &Report) -> String {
    let mut s = String::new();
    match &r.report {
        ReportBody::Constants(c) => {
            let k = &c.constants;
            let _ = writeln!(s, "# Pinching constants n = {}, k = {}\n", k.n, k.k);
            let _ = writeln!(s, "| constant | exact | value |\n|---|---|---|");
            let _ = writeln!(s, "| a_{{n,k}} | {} | {:.12} |", k.a_exact, k.a);
            let _ = writeln!(s, "| b_{{n,k}} | {} | {:.12} |", k.b_exact, k.b);
            if let (Some(e), Some(v)) = (&k.a_mid_exact, k.a_mid) {
                let _ = writeln!(s, "| a_{{n,n/2}} | {e} | {v:.12} |");
            }
            for t in &c.theorem_constants {
                let _ = writeln!(s, "| {} | {} | {:.12} |", t.name, t.exact.as_deref().unwrap_or("-"), t.value);
            }
            if k.excluded_from_norm_pinch {
                let _ = writeln!(s, "\nk = (n-1)/2 is excluded from the norm pinching.");
            }
        }
        ReportBody::Spectrum(sp) => {
            let _ = writeln!(s, "# R_{} on {}\n", sp.spectrum.k, sp.model);
            let _ = writeln!(s, "- r_k = {:.12}", sp.spectrum.r_k);
            let _ = writeln!(s, "- scalar shift k(n-k)R/(n(n-1)) = {:.12}", sp.scalar_shift);
            let _ = writeln!(s, "- Gallot-Meyer slack k(n-k)rho - r_k = {:.3e}", sp.gallot_meyer_slack);
            if let Some(l) = &sp.lemma {
                let _ = writeln!(
                    s,
                    "- r_k^2 = {:.12} vs a|W|^2 + b|Ric0|^2 = {:.12}: {:?}",
                    l.lhs, l.rhs, l.verdict
                );
            }
            if let Some(m) = &sp.middle {
                if let Some(w) = m.w_plus {
                    let _ = writeln!(s, "- w+ = {w:.12}, |W-|^2 = {}", fmt_opt(m.w_minus_norm_sq));
                }
                if let (Some(p), Some(q)) = (m.r_plus, m.r_minus) {
                    let _ = writeln!(s, "- r+ = {p:.12}, r- = {q:.12}");
                }
            }
            let _ = writeln!(s, "\n| eigenvalue | multiplicity |\n|---|---|");
            for c in &sp.spectrum.clusters {
                let _ = writeln!(s, "| {:.12} | {} |", c.value, c.multiplicity);
            }
        }
        ReportBody::Pinch { reports } => {
            let _ = writeln!(s, "# Pinching verdicts\n");
            let _ = writeln!(
                s,
                "| theorem | model | lhs | rhs | ratio | verdict | Yamabe | Betti |\n|---|---|---|---|---|---|---|---|"
            );
            for p in reports {
                let y = p
                    .yamabe
                    .as_ref()
                    .map_or("-".to_string(), |y| format!("{:.10} ({:?})", y.value, y.provenance));
                let b = p
                    .betti
                    .iter()
                    .map(|b| format!("{}={}", b.name, b.value))
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(
                    s,
                    "| {} | {} | {:.10} | {:.10} | {:.10} | {:?} | {} | {}{} |",
                    p.theorem,
                    p.model,
                    p.lhs,
                    p.rhs,
                    p.ratio,
                    p.verdict,
                    y,
                    b,
                    if p.betti_consistent { "" } else { " CONTRADICTION" }
                );
            }
            for p in reports {
                for note in &p.notes {
                    let _ = writeln!(s, "\n- {} on {}: {}", p.theorem, p.model, note);
                }
            }
        }
        ReportBody::Yamabe(y) => {
            let _ = writeln!(s, "# Yamabe data for {}\n", y.model);
            match (&y.yamabe, &y.unavailable) {
                (Some(v), _) => {
                    let _ = writeln!(s, "- Y = {:.12} ({:?})", v.value, v.provenance);
                }
                (None, Some(msg)) => {
                    let _ = writeln!(s, "- Y unavailable: {msg}");
                }
                _ => {}
            }
            if let Some(u) = &y.upper_bound {
                let _ = writeln!(s, "- upper bound {:.12} ({:?})", u.value, u.provenance);
            }
            if let Some(p) = &y.probe {
                let _ = writeln!(
                    s,
                    "- beta = {}: sampled min {:.12} over {} test functions, beta*Y = {:.12}, bound holds: {}, concavity defect {:.2e}",
                    p.beta, p.sampled_min, p.family_size, p.beta_y, p.bound_holds, p.concavity_defect
                );
            }
            if let Some(c) = &y.cylinder {
                let _ = writeln!(
                    s,
                    "- cylinder: quadrature {:.12}, closed form {:.12}, lambda_opt {:.6}",
                    c.quadrature, c.closed_form, c.lambda_opt
                );
            }
            if let Some(c) = &y.cosh {
                let _ = writeln!(
                    s,
                    "- cosh cylinder: C = {:.12}{}, lhs {:.12}, Y/4 {:.12}",
                    c.c,
                    if c.c_is_lower_bound { " (lower bound)" } else { "" },
                    c.lhs,
                    c.rhs
                );
            }
        }
        ReportBody::Selftest(t) => {
            let trials = t.trials.map_or("standard".to_string(), |n| n.to_string());
            let _ = writeln!(s, "# Selftest (seed {}, {trials} trials)\n", t.seed);
            let _ = writeln!(s, "| # | criterion | result | seconds | detail |\n|---|---|---|---|---|");
            for c in &t.criteria {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {:.2} | {} |",
                    c.id,
                    c.name,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.seconds,
                    c.detail
                );
            }
            let _ = writeln!(s, "\noverall: {}", if t.passed { "PASS" } else { "FAIL" });
        }
    }
    s
}

pub fn to_csv(r: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |e: csv::Error| Error::Decode(e.to_string());
    match &r.report {
        ReportBody::Constants(c) => {
            w.write_record(["name", "exact", "value"]).map_err(e)?;
            let k = &c.constants;
            w.write_record(["a_nk", &k.a_exact, &k.a.to_string()]).map_err(e)?;
            w.write_record(["b_nk", &k.b_exact, &k.b.to_string()]).map_err(e)?;
            if let (Some(x), Some(v)) = (&k.a_mid_exact, k.a_mid) {
                w.write_record(["a_mid", x, &v.to_string()]).map_err(e)?;
            }
            for t in &c.theorem_constants {
                w.write_record([&t.name, t.exact.as_deref().unwrap_or(""), &t.value.to_string()])
                    .map_err(e)?;
            }
        }
        ReportBody::Spectrum(sp) => {
            w.write_record(["eigenvalue", "multiplicity"]).map_err(e)?;
            for c in &sp.spectrum.clusters {
                w.write_record([c.value.to_string(), c.multiplicity.to_string()]).map_err(e)?;
            }
        }
        ReportBody::Pinch { reports } => {
            w.write_record([
                "theorem",
                "model",
                "n",
                "lhs",
                "rhs",
                "ratio",
                "verdict",
                "yamabe",
                "provenance",
                "betti_consistent",
            ])
            .map_err(e)?;
            for p in reports {
                w.write_record([
                    p.theorem.to_string(),
                    p.model.clone(),
                    p.n.to_string(),
                    p.lhs.to_string(),
                    p.rhs.to_string(),
                    p.ratio.to_string(),
                    format!("{:?}", p.verdict),
                    p.yamabe.as_ref().map_or(String::new(), |y| y.value.to_string()),
                    p.yamabe.as_ref().map_or(String::new(), |y| format!("{:?}", y.provenance)),
                    p.betti_consistent.to_string(),
                ])
                .map_err(e)?;
            }
        }
        ReportBody::Yamabe(y) => {
            w.write_record(["key", "value"]).map_err(e)?;
            let mut row = |k: &str, v: String| w.write_record([k, &v]);
            row("model", y.model.clone()).map_err(e)?;
            if let Some(v) = &y.yamabe {
                row("yamabe", v.value.to_string()).map_err(e)?;
                row("provenance", format!("{:?}", v.provenance)).map_err(e)?;
            }
            if let Some(u) = &y.upper_bound {
                row("upper_bound", u.value.to_string()).map_err(e)?;
            }
            if let Some(p) = &y.probe {
                row("beta", p.beta.to_string()).map_err(e)?;
                row("sampled_min", p.sampled_min.to_string()).map_err(e)?;
                row("beta_y", p.beta_y.to_string()).map_err(e)?;
            }
            if let Some(c) = &y.cosh {
                row("C", c.c.to_string()).map_err(e)?;
                row("lhs", c.lhs.to_string()).map_err(e)?;
                row("rhs", c.rhs.to_string()).map_err(e)?;
            }
        }
        ReportBody::Selftest(t) => {
            w.write_record(["id", "name", "passed", "seconds", "detail"]).map_err(e)?;
            for c in &t.criteria {
                w.write_record([
                    c.id.to_string(),
                    c.name.clone(),
                    c.passed.to_string(),
                    format!("{:.3}", c.seconds),
                    c.detail.clone(),
                ])
                .map_err(e)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Decode(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Decode(e.to_string()))
}
