//! Yamabe invariants of model spaces: closed forms for Einstein and
//! constant-scalar-curvature minimizers, radial quadrature on cylinders, the
//! modified Yamabe functional, and the radial Yamabe equation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    conformal_cylinder_curvature, curvature_of_model, normalize_base, ricci_decompose, unit_sphere_volume,
    volume_of, Factor, ModelSpace,
};
use crate::error::{Error, Result};
use crate::linalg::sym_eigenvalues;
use crate::quadrature::{cosh_power_integral, cosh_tail_cutoff, golden_min, integrate};

/// How a Yamabe value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    EinsteinClosedForm,
    CscMinimizerClosedForm,
    CylinderClosedForm,
    /// Value of the functional at explicit test functions: only an upper bound.
    TestFunctionUpperBound,
}

impl Provenance {
    pub fn is_exact(self) -> bool {
        self != Provenance::TestFunctionUpperBound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YamabeValue {
    pub value: f64,
    pub provenance: Provenance,
    pub model: String,
}

/// `Y(S^n) = n(n−1) vol(S^n)^{2/n}`.
pub fn yamabe_sphere(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) * unit_sphere_volume(n).powf(2.0 / nf)
}

fn scalar_and_einstein(model: &ModelSpace) -> Result<(f64, bool)> {
    let dec = ricci_decompose(&curvature_of_model(model)?)?;
    Ok((dec.scalar, dec.is_einstein()))
}

/// `Y = R vol^{2/n}` for a closed Einstein product.
pub fn yamabe_einstein(model: &ModelSpace) -> Result<YamabeValue> {
    let n = model.dim();
    if n < 3 {
        return Err(Error::Unsupported("Yamabe invariant needs n ≥ 3".into()));
    }
    let (r, einstein) = scalar_and_einstein(model)?;
    if !einstein {
        let dec = ricci_decompose(&curvature_of_model(model)?)?;
        return Err(Error::NotEinstein(dec.ric0.amax()));
    }
    if r <= 0.0 {
        return Err(Error::YamabeUnavailable("non-positive scalar curvature".into()));
    }
    Ok(YamabeValue {
        value: r * volume_of(model)?.powf(2.0 / n as f64),
        provenance: Provenance::EinsteinClosedForm,
        model: model.to_string(),
    })
}

/// `S^{n−1}(κ) × S¹(T)` is a Yamabe minimizer iff `κT² ≤ 4π²/(n−2)`.
pub fn yamabe_csc_minimizer(model: &ModelSpace) -> Result<YamabeValue> {
    let (m, kappa, length) = match model.factors() {
        [Factor::Sphere { m, kappa }, Factor::Circle { length }]
        | [Factor::Circle { length }, Factor::Sphere { m, kappa }]
            if !model.is_cylinder() =>
        {
            (*m, *kappa, *length)
        }
        _ => {
            return Err(Error::Unsupported(
                "constant scalar curvature minimizer needs S(m,k) x Circ(T)".into(),
            ))
        }
    };
    let n = m + 1;
    let threshold = 4.0 * PI * PI / (n as f64 - 2.0);
    if kappa * length * length > threshold {
        return Err(Error::YamabeUnavailable(format!(
            "κT² = {} exceeds 4π²/(n−2) = {threshold}",
            kappa * length * length
        )));
    }
    let r = (m * (m - 1)) as f64 * kappa;
    Ok(YamabeValue {
        value: r * volume_of(model)?.powf(2.0 / n as f64),
        provenance: Provenance::CscMinimizerClosedForm,
        model: model.to_string(),
    })
}

/// Certified Yamabe invariant where a closed form applies.
pub fn yamabe_of(model: &ModelSpace) -> Result<YamabeValue> {
    match model {
        ModelSpace::CoshCylinder { base, .. } => Ok(cylinder_yamabe_quadrature(base)?.value),
        ModelSpace::Product { .. } => match yamabe_einstein(model) {
            Ok(v) => Ok(v),
            Err(Error::NotEinstein(dev)) => match yamabe_csc_minimizer(model) {
                Err(Error::Unsupported(_)) => Err(Error::YamabeUnavailable(format!(
                    "model is not Einstein (|Ric°| = {dev:e}) and no minimizer certificate applies"
                ))),
                other => other,
            },
            Err(e) => Err(e),
        },
    }
}

/// Value of the Yamabe functional at the constant function, an upper bound
/// for any closed product (all have constant scalar curvature).
pub fn yamabe_upper_bound(model: &ModelSpace) -> Result<YamabeValue> {
    let n = model.dim() as f64;
    let r = curvature_of_model(model)?.scalar();
    Ok(YamabeValue {
        value: r * volume_of(model)?.powf(2.0 / n),
        provenance: Provenance::TestFunctionUpperBound,
        model: model.to_string(),
    })
}

/// Radial data on `N × ℝ` with the base normalized to `R_h = (n−2)(n−1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderYamabe {
    pub n: usize,
    pub base_scale: f64,
    /// Volume of the normalized base.
    pub base_volume: f64,
    /// Minimum of the radial functional over `cosh(λs)^{−(n−2)/2}`.
    pub quadrature: f64,
    pub lambda_opt: f64,
    /// `Y(S^n)·(vol N / vol S^{n−1})^{2/n}`.
    pub closed_form: f64,
    /// `n(n−1)·(vol N · ∫cosh^{−n})^{2/n}`, the value of the spherical suspension.
    pub suspension: f64,
    pub value: YamabeValue,
}

/// Radial Yamabe functional of `φ_λ(s) = cosh(λs)^{−(n−2)/2}` on `N × ℝ`.
pub fn radial_functional(n: usize, r_h: f64, base_volume: f64, lambda: f64, tol: f64) -> f64 {
    let nf = n as f64;
    let a = (nf - 2.0) / 2.0;
    let s_max = cosh_tail_cutoff(nf - 2.0, lambda, 0.1 * tol);
    let grad = integrate(
        |s| {
            let x = lambda * s;
            let t = x.tanh();
            a * a * lambda * lambda * t * t * x.cosh().powf(-(nf - 2.0))
        },
        -s_max,
        s_max,
        0.1 * tol,
        0.1 * tol,
    );
    let mass = integrate(|s| (lambda * s).cosh().powf(-(nf - 2.0)), -s_max, s_max, 0.1 * tol, 0.1 * tol);
    let crit = integrate(|s| (lambda * s).cosh().powf(-nf), -s_max, s_max, 0.1 * tol, 0.1 * tol);
    let num = base_volume * (4.0 * (nf - 1.0) / (nf - 2.0) * grad.value + r_h * mass.value);
    num / (base_volume * crit.value).powf((nf - 2.0) / nf)
}

/// Upper bound for `Y(N × ℝ, [h + ds²])` from the radial family; valid for
/// any base of constant positive scalar curvature.
pub fn cylinder_radial_upper_bound(base: &[Factor]) -> Result<CylinderYamabe> {
    let (normalized, base_scale) = normalize_base(base)?;
    let b = ModelSpace::product(normalized)?;
    let n = b.dim() + 1;
    let nf = n as f64;
    let base_volume = volume_of(&b)?;
    let r_h = (nf - 2.0) * (nf - 1.0);
    let tol = 1e-12;
    let (lambda_opt, quadrature) =
        golden_min(|l| radial_functional(n, r_h, base_volume, l, tol), 0.25, 4.0, 1e-7);
    let closed_form = yamabe_sphere(n) * (base_volume / unit_sphere_volume(n - 1)).powf(2.0 / nf);
    let suspension = nf * (nf - 1.0) * (base_volume * cosh_power_integral(n)).powf(2.0 / nf);
    Ok(CylinderYamabe {
        n,
        base_scale,
        base_volume,
        quadrature,
        lambda_opt,
        closed_form,
        suspension,
        value: YamabeValue {
            value: quadrature,
            provenance: Provenance::TestFunctionUpperBound,
            model: format!("{} x R", ModelSpace::product(base.to_vec())?),
        },
    })
}

/// `Y(N × ℝ, [h + ds²])` for an Einstein base.
pub fn cylinder_yamabe_quadrature(base: &[Factor]) -> Result<CylinderYamabe> {
    let b = ModelSpace::product(base.to_vec())?;
    let dec = ricci_decompose(&curvature_of_model(&b)?)?;
    if !dec.is_einstein() {
        return Err(Error::NotEinstein(dec.ric0.amax()));
    }
    let mut out = cylinder_radial_upper_bound(base)?;
    out.value.value = out.closed_form;
    out.value.provenance = Provenance::CylinderClosedForm;
    Ok(out)
}

/// Perturbations used by [`modified_yamabe_probe`].
#[derive(Debug, Clone, PartialEq)]
pub enum TestFamily {
    Constants,
    /// Constants plus `count` random smooth perturbations of the first sphere
    /// (zonal harmonics) or circle (Fourier modes) factor.
    Perturbations { count: usize, max_degree: usize, amplitude: f64, seed: u64 },
}

/// `(A, B, D)` with `F_β(φ) = (A + βB)/D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFunctional {
    pub gradient: f64,
    pub potential: f64,
    pub denominator: f64,
}

impl AffineFunctional {
    pub fn at(&self, beta: f64) -> f64 {
        (self.gradient + beta * self.potential) / self.denominator
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub beta: f64,
    pub yamabe: YamabeValue,
    pub values: Vec<f64>,
    pub sampled_min: f64,
    /// The sampled minimum is an upper bound for `Y_g(β)`.
    pub provenance: Provenance,
    pub functionals: Vec<AffineFunctional>,
}

/// Gegenbauer `C_l^{(λ)}(x)` and its derivative.
pub fn gegenbauer(l: usize, lambda: f64, x: f64) -> (f64, f64) {
    let eval = |l: usize, lam: f64| -> f64 {
        if l == 0 {
            return 1.0;
        }
        let (mut p0, mut p1) = (1.0, 2.0 * lam * x);
        for k in 2..=l {
            let kf = k as f64;
            let p2 = (2.0 * x * (kf + lam - 1.0) * p1 - (kf + 2.0 * lam - 2.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let d = if l == 0 { 0.0 } else { 2.0 * lambda * eval(l - 1, lambda + 1.0) };
    (eval(l, lambda), d)
}

fn perturbed_factor(model: &ModelSpace) -> Option<(usize, Factor)> {
    model
        .factors()
        .iter()
        .enumerate()
        .find(|(_, f)| matches!(f, Factor::Sphere { .. } | Factor::Circle { .. }))
        .map(|(i, f)| (i, *f))
}

/// `(A, B, D)` for `φ` depending on one coordinate of one factor.
/// `profile(x) = (φ, dφ/dx)`; for spheres `x = θ ∈ [0, π]`, for circles `x ∈ [0, T]`.
fn affine_for_profile<P: Fn(f64) -> (f64, f64)>(
    model: &ModelSpace,
    idx: usize,
    scalar: f64,
    profile: P,
) -> Result<AffineFunctional> {
    let n = model.dim() as f64;
    let p = 2.0 * n / (n - 2.0);
    let factor = model.factors()[idx];
    let rest: f64 = model
        .factors()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, f)| f.volume())
        .product();
    let (lo, hi, weight, grad_scale): (f64, f64, Box<dyn Fn(f64) -> f64>, f64) = match factor {
        Factor::Sphere { m, kappa } => {
            let c = unit_sphere_volume(m - 1) * kappa.powf(-(m as f64) / 2.0);
            (0.0, PI, Box::new(move |t: f64| c * t.sin().powi(m as i32 - 1)), kappa)
        }
        Factor::Circle { length } => (0.0, length, Box::new(|_| 1.0), 1.0),
        Factor::ComplexProjective { .. } => unreachable!("only spheres and circles are perturbed"),
    };
    let q = |g: &dyn Fn(f64) -> f64| integrate(|x| g(x) * weight(x), lo, hi, 1e-15, 1e-13).value * rest;
    let grad = q(&|x| {
        let d = profile(x).1;
        grad_scale * d * d
    });
    let mass = q(&|x| profile(x).0.powi(2));
    let crit = q(&|x| profile(x).0.abs().powf(p));
    Ok(AffineFunctional {
        gradient: 4.0 * (n - 1.0) / (n - 2.0) * grad,
        potential: scalar * mass,
        denominator: crit.powf((n - 2.0) / n),
    })
}

/// `(A, B, D)` for a function of one coordinate of the first sphere or circle
/// factor: `θ ∈ [0, π]` on a sphere, arclength on a circle.
/// `profile(x) = (φ(x), φ'(x))`.
pub fn profile_functional<P: Fn(f64) -> (f64, f64)>(model: &ModelSpace, profile: P) -> Result<AffineFunctional> {
    if model.is_cylinder() || model.dim() < 3 {
        return Err(Error::Unsupported("profile functional needs a closed model with n ≥ 3".into()));
    }
    let (idx, _) = perturbed_factor(model)
        .ok_or_else(|| Error::Unsupported("no sphere or circle factor to perturb".into()))?;
    let scalar = curvature_of_model(model)?.scalar();
    affine_for_profile(model, idx, scalar, profile)
}

/// Affine functionals of the test family on a closed product model.
pub fn family_functionals(model: &ModelSpace, family: &TestFamily) -> Result<Vec<AffineFunctional>> {
    if model.is_cylinder() {
        return Err(Error::Unsupported("probe needs a closed model".into()));
    }
    let n = model.dim() as f64;
    if n < 3.0 {
        return Err(Error::Unsupported("probe needs n ≥ 3".into()));
    }
    let scalar = curvature_of_model(model)?.scalar();
    let vol = volume_of(model)?;
    let constant = AffineFunctional {
        gradient: 0.0,
        potential: scalar * vol,
        denominator: vol.powf((n - 2.0) / n),
    };
    let mut out = vec![constant];
    let (count, max_degree, amplitude, seed) = match *family {
        TestFamily::Constants => return Ok(out),
        TestFamily::Perturbations {
            count,
            max_degree,
            amplitude,
            seed,
        } => (count, max_degree, amplitude, seed),
    };
    if max_degree == 0 {
        return Err(Error::InvalidArgument("perturbations need max_degree ≥ 1".into()));
    }
    let (idx, factor) = perturbed_factor(model)
        .ok_or_else(|| Error::Unsupported("no sphere or circle factor to perturb".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let coeffs: Vec<f64> = (1..=max_degree)
            .map(|l| amplitude * rng.random_range(-1.0..1.0) / l as f64)
            .collect();
        let phases: Vec<f64> = (0..max_degree).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let f = match factor {
            Factor::Sphere { m, .. } => {
                let lam = (m as f64 - 1.0) / 2.0;
                let norms: Vec<f64> = (1..=max_degree).map(|l| gegenbauer(l, lam, 1.0).0).collect();
                affine_for_profile(model, idx, scalar, |t| {
                    let (x, s) = (t.cos(), t.sin());
                    let mut v = 1.0;
                    let mut dv = 0.0;
                    for (l, (c, nrm)) in coeffs.iter().zip(&norms).enumerate() {
                        let (g, dg) = gegenbauer(l + 1, lam, x);
                        v += c * g / nrm;
                        dv += -c * dg * s / nrm;
                    }
                    (v, dv)
                })?
            }
            Factor::Circle { length } => affine_for_profile(model, idx, scalar, |x| {
                let mut v = 1.0;
                let mut dv = 0.0;
                for (l, (c, ph)) in coeffs.iter().zip(&phases).enumerate() {
                    let w = 2.0 * PI * (l + 1) as f64 / length;
                    v += c * (w * x + ph).cos();
                    dv -= c * w * (w * x + ph).sin();
                }
                (v, dv)
            })?,
            Factor::ComplexProjective { .. } => unreachable!(),
        };
        out.push(f);
    }
    Ok(out)
}

/// Samples the modified functional `F_β` over a test family.
pub fn modified_yamabe_probe(model: &ModelSpace, beta: f64, family: &TestFamily) -> Result<ProbeResult> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("β must lie in [0,1], got {beta}")));
    }
    let yamabe = yamabe_of(model)?;
    let functionals = family_functionals(model, family)?;
    let values: Vec<f64> = functionals.iter().map(|f| f.at(beta)).collect();
    let sampled_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ProbeResult {
        beta,
        yamabe,
        values,
        sampled_min,
        provenance: Provenance::TestFunctionUpperBound,
        functionals,
    })
}

/// Largest midpoint-concavity defect of `β ↦ min_φ F_β(φ)` on a uniform grid
/// of `[0, 1]` (non-positive for a concave function).
pub fn concavity_defect(functionals: &[AffineFunctional], points: usize) -> f64 {
    let m = |b: f64| functionals.iter().map(|f| f.at(b)).fold(f64::INFINITY, f64::min);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..points {
        for j in (i + 1)..points {
            let (b1, b2) = (i as f64 / (points - 1) as f64, j as f64 / (points - 1) as f64);
            worst = worst.max(0.5 * (m(b1) + m(b2)) - m(0.5 * (b1 + b2)));
        }
    }
    worst
}

/// Samples of a function on a uniform grid of `[s_min, s_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub s_min: f64,
    pub step: f64,
    pub values: Vec<f64>,
    /// Exact first derivatives when known.
    pub derivatives: Option<Vec<f64>>,
}

impl RadialProfile {
    pub fn sample<F: Fn(f64) -> f64>(f: F, s_min: f64, s_max: f64, points: usize) -> Result<Self> {
        if points < 5 || !(s_max > s_min) {
            return Err(Error::InvalidArgument("profile needs ≥ 5 points on a non-empty interval".into()));
        }
        let step = (s_max - s_min) / (points - 1) as f64;
        let values: Vec<f64> = (0..points).map(|i| f(s_min + i as f64 * step)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("profile samples must be finite".into()));
        }
        Ok(Self {
            s_min,
            step,
            values,
            derivatives: None,
        })
    }

    pub fn with_derivative<F: Fn(f64) -> f64>(mut self, df: F) -> Self {
        self.derivatives = Some((0..self.values.len()).map(|i| df(self.s(i))).collect());
        self
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s_min + i as f64 * self.step
    }

    fn derivative(&self, i: usize) -> Option<f64> {
        if let Some(d) = &self.derivatives {
            return Some(d[i]);
        }
        let v = &self.values;
        if i < 2 || i + 2 >= v.len() {
            return None;
        }
        Some((v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * self.step))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeResiduals {
    /// `max |−4(n−1)/(n−2) w'' + R_h w − μ w^{(n+2)/(n−2)}|` over interior
    /// points, relative to `max |R_h w|`.
    pub max_ode_residual: f64,
    /// Mean of `−4(n−1)/(n−2) w'² + R_h w² − ((n−2)/n) μ w^{2n/(n−2)}`.
    pub first_integral: f64,
    /// Spread of the first integral over the grid, relative to `max R_h w²`.
    pub first_integral_drift: f64,
    pub step: f64,
}

/// Residuals of the radial Yamabe equation and of its first integral, with
/// fourth-order central differences.
pub fn yamabe_ode_check(profile: &RadialProfile, n: usize, r_h: f64, mu: f64) -> Result<OdeResiduals> {
    if n < 3 {
        return Err(Error::InvalidArgument("need n ≥ 3".into()));
    }
    let nf = n as f64;
    let c = 4.0 * (nf - 1.0) / (nf - 2.0);
    let v = &profile.values;
    let h = profile.step;
    let scale = v.iter().fold(0.0_f64, |m, w| m.max((r_h * w).abs())).max(f64::MIN_POSITIVE);
    let mut max_res: f64 = 0.0;
    for i in 2..v.len() - 2 {
        let d2 = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h * h);
        let res = -c * d2 + r_h * v[i] - mu * v[i].powf((nf + 2.0) / (nf - 2.0));
        max_res = max_res.max(res.abs());
    }
    let mut e = Vec::new();
    for i in 0..v.len() {
        if let Some(d) = profile.derivative(i) {
            e.push(-c * d * d + r_h * v[i] * v[i] - (nf - 2.0) / nf * mu * v[i].powf(2.0 * nf / (nf - 2.0)));
        }
    }
    let mean = e.iter().sum::<f64>() / e.len() as f64;
    let (lo, hi) = e.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let e_scale = v.iter().fold(0.0_f64, |m, w| m.max((r_h * w * w).abs())).max(f64::MIN_POSITIVE);
    Ok(OdeResiduals {
        max_ode_residual: max_res / scale,
        first_integral: mean,
        first_integral_drift: (hi - lo) / e_scale,
        step: h,
    })
}

/// `φ = √(μ/(n(n−1))) cosh(s − s₀)`, the profile with `w = φ^{−(n−2)/2}`
/// solving the radial equation with `R_h = (n−2)(n−1)` and vanishing first
/// integral; returns `max |−φ'² + φ² − μ/(n(n−1))|` on the grid.
pub fn phi_first_integral_drift(n: usize, mu: f64, s0: f64, grid: &[f64]) -> f64 {
    let nf = n as f64;
    let a = (mu / (nf * (nf - 1.0))).sqrt();
    grid.iter()
        .map(|&s| {
            let (c, sh) = ((s - s0).cosh(), (s - s0).sinh());
            let phi = a * c;
            let dphi = a * sh;
            (-dphi * dphi + phi * phi - a * a).abs() / (a * a * c * c)
        })
        .fold(0.0, f64::max)
}

/// Outcome of the cosh-cylinder pinching evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoshCylinderC {
    pub n: usize,
    pub alpha: f64,
    pub base_einstein: bool,
    /// `r_1(h)` of the normalized base.
    pub r1_base: f64,
    /// `∫ cosh^{−n}` by quadrature and by recurrence.
    pub cosh_integral_quadrature: f64,
    pub cosh_integral_recurrence: f64,
    pub yamabe: YamabeValue,
    /// `(n(n−1) + 4 r_1(h)) (vol N ∫cosh^{−n})^{2/n} / Y`; a lower bound when
    /// `Y` is only an upper bound.
    pub c: f64,
    pub c_is_lower_bound: bool,
    /// `‖r_1‖_{n/2} + ((n−4)/(4n))‖R‖_{n/2}` by quadrature along `t`, with
    /// `r_1` the exact lowest eigenvalue of the full curvature.
    pub lhs: f64,
    /// `Y / 4`.
    pub rhs: f64,
}

/// `r_1(t)` and `R(t)` of `α cosh²t (h + dt²)` from the exact eigenvalues of
/// the traceless Ricci tensor (valid for any base).
pub fn cylinder_r1_and_scalar(
    n: usize,
    ric0_h_eigs: &[f64],
    alpha: f64,
    t: f64,
) -> (f64, f64) {
    let nf = n as f64;
    let c2 = t.cosh().powi(2);
    let sech2 = 1.0 / c2;
    let t_dir = -2.0 * (nf - 2.0) * (nf - 1.0) / (nf * alpha * c2 * c2);
    let base_min = ric0_h_eigs
        .iter()
        .map(|l| (l + 2.0 * (nf - 2.0) / nf * sech2) / (alpha * c2))
        .fold(f64::INFINITY, f64::min);
    let r1 = -(t_dir.min(base_min));
    let scalar = (nf - 1.0) * (nf - 4.0) / (alpha * c2 * c2);
    (r1, scalar)
}

pub fn cosh_cylinder_c(base: &[Factor], alpha: f64) -> Result<CoshCylinderC> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    let (normalized, _) = normalize_base(base)?;
    let b = ModelSpace::product(normalized.clone())?;
    let n = b.dim() + 1;
    let nf = n as f64;
    let dec = ricci_decompose(&curvature_of_model(&b)?)?;
    let eigs = sym_eigenvalues(&dec.ric0);
    let r1_base = -eigs[0];
    let einstein = dec.is_einstein();
    let cyl = if einstein {
        cylinder_yamabe_quadrature(base)?
    } else {
        cylinder_radial_upper_bound(base)?
    };
    let vol_n = cyl.base_volume;
    let s = cosh_tail_cutoff(nf, 1.0, 1e-14);
    let cosh_q = integrate(|t: f64| t.cosh().powf(-nf), -s, s, 1e-15, 1e-14).value;
    let cosh_r = cosh_power_integral(n);
    let y = cyl.value.value;
    let c = (nf * (nf - 1.0) + 4.0 * r1_base) * (vol_n * cosh_q).powf(2.0 / nf) / y;
    // L^{n/2} norms along t; dv_g = (α cosh²t)^{n/2} dv_h dt
    let s_t = cosh_tail_cutoff(nf, 1.0, 1e-14);
    let density = |t: f64| (alpha * t.cosh().powi(2)).powf(nf / 2.0) * vol_n;
    let r1_norm = integrate(
        |t| cylinder_r1_and_scalar(n, &eigs, alpha, t).0.abs().powf(nf / 2.0) * density(t),
        -s_t,
        s_t,
        1e-15,
        1e-13,
    )
    .value
    .powf(2.0 / nf);
    let r_norm = integrate(
        |t| cylinder_r1_and_scalar(n, &eigs, alpha, t).1.abs().powf(nf / 2.0) * density(t),
        -s_t,
        s_t,
        1e-15,
        1e-13,
    )
    .value
    .powf(2.0 / nf);
    // sanity: the full curvature agrees with the eigenvalue formula at t = 0.3
    let probe = conformal_cylinder_curvature(&normalized, alpha, 0.3)?;
    let probe_r1 = -sym_eigenvalues(&ricci_decompose(&probe)?.ric0)[0];
    let formula_r1 = cylinder_r1_and_scalar(n, &eigs, alpha, 0.3).0;
    if (probe_r1 - formula_r1).abs() > 1e-9 * formula_r1.abs().max(1.0) {
        return Err(Error::InvalidModel(format!(
            "cylinder curvature mismatch: {probe_r1} vs {formula_r1}"
        )));
    }
    Ok(CoshCylinderC {
        n,
        alpha,
        base_einstein: einstein,
        r1_base,
        cosh_integral_quadrature: cosh_q,
        cosh_integral_recurrence: cosh_r,
        yamabe: cyl.value,
        c,
        c_is_lower_bound: !einstein,
        lhs: r1_norm + (nf - 4.0) / (4.0 * nf) * r_norm,
        rhs: y / 4.0,
    })
}
