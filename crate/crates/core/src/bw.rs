//! The Bochner–Weitzenböck curvature `R_k` on `k`-forms, the pinching
//! constants `a_{n,k}`, `b_{n,k}`, and the eigenvalue/norm comparison lemmas.

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::curvature::{AlgCurvature, RicciDecomposition};
use crate::double_form::DoubleForm;
use crate::error::{Error, Result};
use crate::exterior::{basis_masks, binomial, hodge_matrix};
use crate::linalg::{cluster, sym_eigenvalues, Cluster};

/// Relative cluster tolerance for multiplicity counting.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Relative slack below which an inequality is reported as an equality.
pub const EQUALITY_TOL: f64 = 1e-8;

/// `R_k` as a symmetric matrix on `Λ^k` together with the norms it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct BWOperator {
    pub n: usize,
    pub k: usize,
    pub matrix: DMatrix<f64>,
    pub scalar: f64,
    pub ric0_norm_sq: f64,
    pub weyl_norm_sq: f64,
    /// `W` itself, kept for the self-dual split in dimension 4.
    pub weyl: DoubleForm,
}

impl BWOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `k(n−k)/(n(n−1))·R`, the coefficient of the identity part.
    pub fn scalar_shift(&self) -> f64 {
        let (n, k) = (self.n as f64, self.k as f64);
        k * (n - k) / (n * (n - 1.0)) * self.scalar
    }

    pub fn expected_trace(&self) -> f64 {
        self.dim() as f64 * self.scalar_shift()
    }

    pub fn traceless(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mean = self.matrix.trace() / d as f64;
        &self.matrix - DMatrix::identity(d, d) * mean
    }
}

/// `R_1 = Ric`; for `k ≥ 2`,
/// `R_k = −2 (g^{k−2}/(k−2)!)·W + ((n−2k)/(n−2)) (g^{k−1}/(k−1)!)·Ric° + (k(n−k)/(n(n−1))) R Id`.
pub fn build_bw(dec: &RicciDecomposition, k: usize) -> Result<BWOperator> {
    let n = dec.n;
    if k == 0 || k >= n {
        return Err(Error::InvalidDegree { k, n });
    }
    let nf = n as f64;
    let matrix = if k == 1 {
        &dec.ric0 + DMatrix::identity(n, n) * (dec.scalar / nf)
    } else {
        let wk = DoubleForm::identity(n, k - 2)?.kn_product(&dec.weyl)?.scale(-2.0);
        let zk = DoubleForm::identity(n, k - 1)?
            .kn_product(&ric0_form(&dec.ric0))?
            .scale((nf - 2.0 * k as f64) / (nf - 2.0));
        let sum = wk.add(&zk)?;
        let d = binomial(n, k);
        let shift = (k * (n - k)) as f64 / (nf * (nf - 1.0)) * dec.scalar;
        let m = DMatrix::from_row_slice(d, d, sum.coeffs()) + DMatrix::identity(d, d) * shift;
        (&m + m.transpose()) * 0.5
    };
    Ok(BWOperator {
        n,
        k,
        matrix,
        scalar: dec.scalar,
        ric0_norm_sq: dec.ric0_norm_sq(),
        weyl_norm_sq: dec.weyl.norm_sq(),
        weyl: dec.weyl.clone(),
    })
}

fn ric0_form(ric0: &DMatrix<f64>) -> DoubleForm {
    let n = ric0.nrows();
    DoubleForm::from_coeffs(n, 1, 1, ric0.transpose().iter().copied().collect()).expect("square")
}

/// Spectrum of `R_k` and `r_k = −λ_min` of its traceless part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkSpectrum {
    pub n: usize,
    pub k: usize,
    pub r_k: f64,
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<Cluster>,
}

pub fn r_k_of(op: &BWOperator) -> RkSpectrum {
    let eigenvalues = sym_eigenvalues(&op.matrix);
    let mean = op.matrix.trace() / op.dim() as f64;
    RkSpectrum {
        n: op.n,
        k: op.k,
        r_k: -(eigenvalues[0] - mean),
        clusters: cluster(&eigenvalues, CLUSTER_TOL),
        eigenvalues,
    }
}

/// Exact and floating-point values of the pinching constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinchConstants {
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    /// Middle-degree constant, present when `k = n/2`.
    pub a_mid: Option<f64>,
    pub a_exact: String,
    pub b_exact: String,
    pub a_mid_exact: Option<String>,
    /// `k = (n−1)/2`: the norm pinching statement does not cover this degree.
    pub excluded_from_norm_pinch: bool,
}

pub type Q = Ratio<i64>;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// `(a_{n,k}, b_{n,k}, a_{n,n/2})` as exact rationals.
pub fn pinch_constants_exact(n: usize, k: usize) -> Result<(Q, Q, Option<Q>)> {
    if n < 4 || k == 0 || 2 * k > n {
        return Err(Error::InvalidArgument(format!(
            "pinching constants need n ≥ 4 and 1 ≤ k ≤ n/2, got n={n}, k={k}"
        )));
    }
    let (ni, ki) = (n as i64, k as i64);
    let c = binomial(n, k) as i64;
    let base = q(c - 1) * Q::new(ki * (ni - ki), ni * (ni - 1));
    let a = base * Q::new(4 * (ki - 1) * (ni - ki - 1), (ni - 2) * (ni - 3));
    let b = base * Q::new((ni - 2 * ki).pow(2), (ni - 2).pow(2));
    let a_mid = (2 * k == n).then(|| {
        let denom = if (n / 2).is_multiple_of(2) { 4 } else { 8 };
        Q::new(ni * (ni - 2), denom * (ni - 1) * (ni - 3)) * q(c - 2)
    });
    Ok((a, b, a_mid))
}

pub fn pinch_constants(n: usize, k: usize) -> Result<PinchConstants> {
    let (a, b, a_mid) = pinch_constants_exact(n, k)?;
    let f = |r: Q| *r.numer() as f64 / *r.denom() as f64;
    Ok(PinchConstants {
        n,
        k,
        a: f(a),
        b: f(b),
        a_mid: a_mid.map(f),
        a_exact: a.to_string(),
        b_exact: b.to_string(),
        a_mid_exact: a_mid.map(|r| r.to_string()),
        excluded_from_norm_pinch: 2 * k + 1 == n,
    })
}

/// `k(n−k)/(n(n−1))` as an exact rational.
pub fn degree_factor(n: usize, k: usize) -> Q {
    Q::new((k * (n - k)) as i64, (n * (n - 1)) as i64)
}

/// Three-valued comparison outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Strict,
    Equality,
    Violated,
    BoundaryIndeterminate,
    /// No certified Yamabe value, and the upper bound does not decide.
    YamabeUnavailable,
}

impl Verdict {
    /// Classifies `rhs − lhs` relative to `scale`.
    pub fn from_slack(slack: f64, scale: f64, tol: f64) -> Self {
        let rel = slack / scale.max(f64::MIN_POSITIVE);
        if rel.abs() <= tol {
            Verdict::Equality
        } else if rel < -tol {
            Verdict::Violated
        } else if rel > tol {
            Verdict::Strict
        } else {
            // NaN slack: the comparison is undecidable
            Verdict::BoundaryIndeterminate
        }
    }
}

/// Outcome of the traceless-endomorphism lemma on random inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenEndoReport {
    pub d: usize,
    pub trials: usize,
    /// Smallest `((d−1)/d)|A|² − a²` over the random trials, relative to `|A|²`.
    pub min_relative_slack: f64,
    pub violations: usize,
    /// Relative gap at the extremal matrix `diag(−ν, ν/(d−1), …)`.
    pub extremal_residual: f64,
}

/// `a² ≤ ((d−1)/d)|A|²` for the lowest eigenvalue `a` of a traceless symmetric `A`.
pub fn eigen_endo_slack(a: &DMatrix<f64>) -> (f64, f64) {
    let d = a.nrows() as f64;
    let lowest = sym_eigenvalues(a)[0];
    let norm_sq: f64 = a.iter().map(|x| x * x).sum();
    ((d - 1.0) / d * norm_sq - lowest * lowest, norm_sq)
}

pub fn lemma_eigenendo_check<R: rand::Rng + ?Sized>(
    d: usize,
    trials: usize,
    rng: &mut R,
) -> Result<EigenEndoReport> {
    if d < 2 {
        return Err(Error::InvalidArgument("need d ≥ 2".into()));
    }
    let mut min_rel = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..trials {
        let raw = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let sym = (&raw + raw.transpose()) * 0.5;
        let a = &sym - DMatrix::identity(d, d) * (sym.trace() / d as f64);
        let (slack, norm_sq) = eigen_endo_slack(&a);
        let rel = slack / norm_sq;
        min_rel = min_rel.min(rel);
        if slack < -1e-9 * norm_sq {
            violations += 1;
        }
    }
    let nu = 1.0;
    let mut diag = vec![nu / (d as f64 - 1.0); d];
    diag[0] = -nu;
    let extremal = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    let (slack, norm_sq) = eigen_endo_slack(&extremal);
    Ok(EigenEndoReport {
        d,
        trials,
        min_relative_slack: min_rel,
        violations,
        extremal_residual: slack.abs() / norm_sq,
    })
}

/// `r_k² ≤ a_{n,k}|W|² + b_{n,k}|Ric°|²` (or `a_{n,n/2}|W|²` in middle degree).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkLemmaReport {
    pub n: usize,
    pub k: usize,
    pub r_k: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub relative_slack: f64,
    pub verdict: Verdict,
}

pub fn lemma_rk_check(dec: &RicciDecomposition, k: usize) -> Result<RkLemmaReport> {
    let n = dec.n;
    let middle = 2 * k == n;
    if k == 0 || (2 * k + 1 > n && !middle) {
        return Err(Error::InvalidDegree { k, n });
    }
    let pc = pinch_constants(n, k)?;
    let op = build_bw(dec, k)?;
    let spec = r_k_of(&op);
    let w2 = dec.weyl.norm_sq();
    let rhs = match pc.a_mid {
        Some(am) => am * w2,
        None => pc.a * w2 + pc.b * dec.ric0_norm_sq(),
    };
    let lhs = spec.r_k * spec.r_k;
    let slack = rhs - lhs;
    let size = lhs.max(rhs);
    // both sides are rounding noise relative to the curvature scale
    let floor = 1e-20 * op.scalar_shift().powi(2);
    let verdict = if size <= floor {
        Verdict::Equality
    } else {
        Verdict::from_slack(slack, size, EQUALITY_TOL)
    };
    Ok(RkLemmaReport {
        n,
        k,
        r_k: spec.r_k,
        lhs,
        rhs,
        slack,
        relative_slack: slack / size.max(floor).max(f64::MIN_POSITIVE),
        verdict,
    })
}

/// Check of the spectrum of `R_k` for `α g_V²/2 + β g_{V⊥}²/2 + γ g²/2`, `dim V = k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualitySpectrumReport {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `(eigenvalue, multiplicity)` predicted for `j = 0..=k`.
    pub predicted: Vec<(f64, usize)>,
    pub computed: Vec<Cluster>,
    pub max_abs_error: f64,
    pub formula_holds: bool,
    /// Exactly two distinct eigenvalues and the lowest is simple.
    pub two_values_lowest_simple: bool,
    /// `k = 2` and `α = (n−5)β`.
    pub split_condition: bool,
}

/// Curvature `α g_V²/2 + β g_{V⊥}²/2 + γ g²/2` with `V` spanned by the first `dim_v` vectors.
pub fn split_curvature(n: usize, dim_v: usize, alpha: f64, beta: f64, gamma: f64) -> Result<AlgCurvature> {
    if dim_v > n {
        return Err(Error::InvalidArgument("dim V exceeds n".into()));
    }
    let masks = basis_masks(n, 2);
    let v_mask: u32 = (1u32 << dim_v) - 1;
    let diag: Vec<f64> = masks
        .iter()
        .map(|&m| {
            if m & v_mask == m {
                alpha + gamma
            } else if m & v_mask == 0 {
                beta + gamma
            } else {
                gamma
            }
        })
        .collect();
    AlgCurvature::from_operator(n, &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

pub fn equality_spectrum_check(
    alpha: f64,
    beta: f64,
    gamma: f64,
    n: usize,
    k: usize,
) -> Result<EqualitySpectrumReport> {
    if k == 0 || k >= n {
        return Err(Error::InvalidDegree { k, n });
    }
    let rm = split_curvature(n, k, alpha, beta, gamma)?;
    let dec = crate::curvature::ricci_decompose(&rm)?;
    let op = build_bw(&dec, k)?;
    let ev = sym_eigenvalues(&op.matrix);
    let mut predicted = Vec::new();
    let mut flat = Vec::new();
    for j in 0..=k.min(n - k) {
        let (jf, kf, nf) = (j as f64, k as f64, n as f64);
        let value = alpha * jf * (kf - jf) + beta * jf * (nf - kf - jf) + gamma * kf * (nf - kf);
        let mult = binomial(k, j) * binomial(n - k, j);
        predicted.push((value, mult));
        flat.extend(std::iter::repeat_n(value, mult));
    }
    flat.sort_by(f64::total_cmp);
    let scale = ev.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let max_abs_error = if flat.len() == ev.len() {
        flat.iter().zip(&ev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let computed = cluster(&ev, CLUSTER_TOL);
    let two_values_lowest_simple = computed.len() == 2 && computed[0].multiplicity == 1;
    let split_condition = k == 2 && (alpha - (n as f64 - 5.0) * beta).abs() <= 1e-9 * scale;
    Ok(EqualitySpectrumReport {
        n,
        k,
        alpha,
        beta,
        gamma,
        predicted,
        computed,
        max_abs_error,
        formula_holds: max_abs_error <= 1e-10 * scale,
        two_values_lowest_simple,
        split_condition,
    })
}

/// Middle-degree data for `k = n/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiddleDegree {
    pub n: usize,
    pub r_mid: f64,
    pub clusters: Vec<Cluster>,
    /// `n/2` odd: every multiplicity of the spectrum is even.
    pub all_multiplicities_even: Option<bool>,
    /// `n/2` even: spectra of `R_{n/2}` on the `±1` eigenspaces of `*`.
    pub plus: Option<Vec<Cluster>>,
    pub minus: Option<Vec<Cluster>>,
    pub r_plus: Option<f64>,
    pub r_minus: Option<f64>,
    /// `n = 4`: largest eigenvalue of `W` on self-dual 2-forms.
    pub w_plus: Option<f64>,
    /// `n = 4`: `|W^-|` (operator norm squared).
    pub w_minus_norm_sq: Option<f64>,
}

/// Orthonormal bases (as columns) of the `±1` eigenspaces of `*` on `Λ^{n/2}`, `n/2` even.
pub fn self_dual_bases(n: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let k = n / 2;
    if !n.is_multiple_of(2) || !k.is_multiple_of(2) {
        return Err(Error::InvalidArgument("self-dual split needs n/2 even".into()));
    }
    let star = hodge_matrix(n, k);
    let masks = basis_masks(n, k);
    let d = masks.len();
    let half = d / 2;
    let mut plus = DMatrix::zeros(d, half);
    let mut minus = DMatrix::zeros(d, half);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut col = 0;
    for (i, &m) in masks.iter().enumerate() {
        if m & 1 == 0 {
            continue;
        }
        // *e_i as a column of the star matrix
        for r in 0..d {
            let v = star[r][i];
            plus[(r, col)] += s * v;
            minus[(r, col)] -= s * v;
        }
        plus[(i, col)] += s;
        minus[(i, col)] += s;
        col += 1;
    }
    Ok((plus, minus))
}

pub fn middle_degree_split(op: &BWOperator) -> Result<MiddleDegree> {
    let n = op.n;
    if 2 * op.k != n {
        return Err(Error::InvalidArgument(format!("k = {} is not n/2", op.k)));
    }
    let spec = r_k_of(op);
    let mut out = MiddleDegree {
        n,
        r_mid: spec.r_k,
        clusters: spec.clusters.clone(),
        all_multiplicities_even: None,
        plus: None,
        minus: None,
        r_plus: None,
        r_minus: None,
        w_plus: None,
        w_minus_norm_sq: None,
    };
    if (n / 2) % 2 == 1 {
        out.all_multiplicities_even = Some(spec.clusters.iter().all(|c| c.multiplicity % 2 == 0));
        return Ok(out);
    }
    let (p, m) = self_dual_bases(n)?;
    let shift = op.scalar_shift();
    let restrict = |basis: &DMatrix<f64>| {
        let block = basis.transpose() * &op.matrix * basis;
        let ev = sym_eigenvalues(&((&block + block.transpose()) * 0.5));
        let r = -(ev[0] - shift);
        (cluster(&ev, CLUSTER_TOL), r)
    };
    let (cp, rp) = restrict(&p);
    let (cm, rm) = restrict(&m);
    out.plus = Some(cp);
    out.minus = Some(cm);
    out.r_plus = Some(rp);
    out.r_minus = Some(rm);
    if n == 4 {
        let w = DMatrix::from_row_slice(6, 6, op.weyl.coeffs());
        let wp = p.transpose() * &w * &p;
        let wm = m.transpose() * &w * &m;
        out.w_plus = Some(*sym_eigenvalues(&((&wp + wp.transpose()) * 0.5)).last().expect("3x3"));
        out.w_minus_norm_sq = Some(wm.iter().map(|x| x * x).sum());
    }
    Ok(out)
}

/// `r_k ≤ k(n−k)ρ`.
pub fn gallot_meyer_slack(rm: &AlgCurvature, k: usize) -> Result<f64> {
    let dec = crate::curvature::ricci_decompose(rm)?;
    let op = build_bw(&dec, k)?;
    let rho = crate::curvature::rho_of(rm);
    Ok((k * (rm.n() - k)) as f64 * rho - r_k_of(&op).r_k)
}
