//! Warped cylinders `η(t)²h + dt²`, radial harmonic functions on them and
//! the pointwise inequality satisfied by `f_ε^p` for harmonic 1-forms.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_of_model, ricci_decompose, AlgCurvature, Factor, ModelSpace};
use crate::double_form::DoubleForm;
use crate::error::{Error, Result};
use crate::exterior::{basis_masks, RankTable};
use crate::linalg::sym_eigenvalues;
use crate::quadrature::integrate;

/// Closed-form warping functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warp {
    /// `η ≡ c`.
    Constant { c: f64 },
    /// `η = offset + amplitude·sin t`.
    Sine { offset: f64, amplitude: f64 },
    /// `η = cosh t`.
    Cosh,
    /// `η = √(α + t²)`: the cosh cylinder `α cosh²s (h + ds²)` in arclength
    /// `t = √α sinh s`.
    Hyperbolic { alpha: f64 },
}

impl Warp {
    /// `(η, η', η'')` at `t`.
    pub fn jet(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            Warp::Constant { c } => (c, 0.0, 0.0),
            Warp::Sine { offset, amplitude } => {
                (offset + amplitude * t.sin(), amplitude * t.cos(), -amplitude * t.sin())
            }
            Warp::Cosh => (t.cosh(), t.sinh(), t.cosh()),
            Warp::Hyperbolic { alpha } => {
                let e = (alpha + t * t).sqrt();
                (e, t / e, alpha / (e * e * e))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Warp::Constant { c } => c > 0.0,
            Warp::Sine { offset, amplitude } => offset > amplitude.abs(),
            Warp::Cosh => true,
            Warp::Hyperbolic { alpha } => alpha > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("warp {self:?} is not positive")))
        }
    }
}

/// Uniform grid on `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if points < 5 || !(t_max > t_min) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(Error::InvalidArgument("grid needs ≥ 5 points on a finite interval".into()));
        }
        Ok(Self { t_min, t_max, points })
    }

    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.points - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.step()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.t(i))
    }
}

/// `η(t)²h + dt²` over a product base `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedCylinder {
    pub base: Vec<Factor>,
    pub warp: Warp,
}

impl WarpedCylinder {
    pub fn new(base: Vec<Factor>, warp: Warp) -> Result<Self> {
        let b = ModelSpace::product(base.clone())?;
        crate::exterior::check_dim(b.dim() + 1)?;
        warp.validate()?;
        Ok(Self { base, warp })
    }

    /// Warped cylinder over the unit round `S^{n−1}`.
    pub fn over_sphere(n: usize, warp: Warp) -> Result<Self> {
        Self::new(vec![Factor::Sphere { m: n - 1, kappa: 1.0 }], warp)
    }

    pub fn dim(&self) -> usize {
        self.base.iter().map(Factor::dim).sum::<usize>() + 1
    }

    /// Curvature operator in the frame `(ε_i/η, ∂_t)`: base planes carry
    /// `(Rm_h − η'²)/η²`, mixed planes `−η''/η`.
    pub fn curvature(&self, t: f64) -> Result<AlgCurvature> {
        let n = self.dim();
        let m = n - 1;
        let (e, e1, e2) = self.warp.jet(t);
        let rm_h = curvature_of_model(&ModelSpace::product(self.base.clone())?)?;
        let table = RankTable::new(n);
        let base_masks = basis_masks(m, 2);
        let mut form = DoubleForm::zero(n, 2, 2)?;
        for (a, &ma) in base_masks.iter().enumerate() {
            for (b, &mb) in base_masks.iter().enumerate() {
                let mut v = rm_h.form().get(a, b);
                if a == b {
                    v -= e1 * e1;
                }
                form.set(table.rank(ma), table.rank(mb), v / (e * e));
            }
        }
        for i in 0..m {
            let r = table.rank((1 << i) | (1 << m));
            form.set(r, r, -e2 / e);
        }
        AlgCurvature::new(form)
    }

    /// `(R_g, r_1)` at `t`, with `r_1 = −λ_min(Ric°)`.
    pub fn scalar_and_r1(&self, t: f64) -> Result<(f64, f64)> {
        let dec = ricci_decompose(&self.curvature(t)?)?;
        Ok((dec.scalar, -sym_eigenvalues(&dec.ric0)[0]))
    }
}

/// `Φ(t) = c₁ + c₂∫₀ᵗ η^{1−n}`, harmonic on the warped cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicRadialForm {
    pub c1: f64,
    pub c2: f64,
}

impl HarmonicRadialForm {
    pub fn phi(&self, w: &WarpedCylinder, t: f64) -> f64 {
        let p = 1.0 - w.dim() as f64;
        let i = integrate(|r| w.warp.jet(r).0.powf(p), 0.0, t, 1e-15, 1e-14).value;
        self.c1 + self.c2 * i
    }

    /// `Φ' = c₂η^{1−n}`.
    pub fn dphi(&self, w: &WarpedCylinder, t: f64) -> f64 {
        self.c2 * w.warp.jet(t).0.powf(1.0 - w.dim() as f64)
    }

    /// `|ξ|` for `ξ = dΦ`.
    pub fn norm(&self, w: &WarpedCylinder, t: f64) -> f64 {
        self.dphi(w, t).abs()
    }

    /// `η^{n−1}Φ' − c₂`.
    pub fn flux_residual(&self, w: &WarpedCylinder, t: f64) -> f64 {
        w.warp.jet(t).0.powf(w.dim() as f64 - 1.0) * self.dphi(w, t) - self.c2
    }
}

/// `Δu = −u'' − (n−1)(η'/η)u'` with fourth-order central differences, at
/// interior points `2..points−2`.
pub fn radial_laplacian_fd(w: &WarpedCylinder, grid: &Grid, values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.len() != grid.points {
        return Err(Error::LengthMismatch {
            expected: grid.points,
            got: values.len(),
        });
    }
    let h = grid.step();
    let nm1 = w.dim() as f64 - 1.0;
    Ok((2..grid.points - 2)
        .map(|i| {
            let v = values;
            let d1 = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
            let d2 = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h * h);
            let t = grid.t(i);
            let (e, e1, _) = w.warp.jet(t);
            (t, -d2 - nm1 * e1 / e * d1)
        })
        .collect())
}

/// Hessian of a radial harmonic function at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianStructure {
    pub t: f64,
    /// `a = c₂η'η^{−n}`, the eigenvalue on the base directions.
    pub a: f64,
    /// Ascending eigenvalues: `−(n−1)a` once and `a` with multiplicity `n−1`.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
}

/// `∇dΦ` in the frame `(ε_i/η, ∂_t)`: `Φ'η'/η` on the base, `Φ''` on `∂_t`.
pub fn hessian_structure(w: &WarpedCylinder, f: &HarmonicRadialForm, t: f64) -> HessianStructure {
    let n = w.dim();
    let nf = n as f64;
    let (e, e1, _) = w.warp.jet(t);
    let dphi = f.c2 * e.powf(1.0 - nf);
    let ddphi = f.c2 * (1.0 - nf) * e.powf(-nf) * e1;
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        hess[(i, i)] = dphi * e1 / e;
    }
    hess[(n - 1, n - 1)] = ddphi;
    HessianStructure {
        t,
        a: f.c2 * e1 * e.powf(-nf),
        trace: hess.trace(),
        eigenvalues: sym_eigenvalues(&hess),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KatoReport {
    pub n: usize,
    /// `(t, |d|ξ||²/|∇ξ|²)` where `η'(t) ≠ 0`.
    pub ratios: Vec<(f64, f64)>,
    /// Critical points of `η`, where both sides vanish.
    pub skipped: usize,
    /// Every grid point was critical.
    pub undefined: bool,
    pub expected: f64,
    pub max_deviation: f64,
}

/// `|d|ξ||²/|∇ξ|²` for `ξ = dΦ`, which equals `(n−1)/n` wherever defined.
pub fn kato_ratio(w: &WarpedCylinder, f: &HarmonicRadialForm, grid: &Grid) -> Result<KatoReport> {
    if f.c2 == 0.0 {
        return Err(Error::InvalidArgument("c₂ = 0 gives ξ = 0".into()));
    }
    let nf = w.dim() as f64;
    let expected = (nf - 1.0) / nf;
    let mut ratios = Vec::new();
    let mut skipped = 0;
    for t in grid.iter() {
        let (e, e1, _) = w.warp.jet(t);
        if e1.abs() <= 1e-12 * e {
            skipped += 1;
            continue;
        }
        // d|ξ|/dt = |c₂|(1−n)η^{−n}η'
        let dnorm = f.c2.abs() * (1.0 - nf) * e.powf(-nf) * e1;
        let hs = hessian_structure(w, f, t);
        let hess_sq: f64 = hs.eigenvalues.iter().map(|l| l * l).sum();
        ratios.push((t, dnorm * dnorm / hess_sq));
    }
    let max_deviation = ratios.iter().map(|(_, r)| (r - expected).abs()).fold(0.0, f64::max);
    Ok(KatoReport {
        n: w.dim(),
        undefined: ratios.is_empty(),
        ratios,
        skipped,
        expected,
        max_deviation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasineqReport {
    pub n: usize,
    pub epsilon: f64,
    pub exponent: f64,
    /// `max (LHS − RHS)` over interior grid points.
    pub max_violation: f64,
    pub t_at_max: f64,
    /// `max |RHS|`, the scale against which the violation is read.
    pub scale: f64,
    /// `min (LHS − RHS)`.
    pub min_slack: f64,
    pub step: f64,
}

/// Evaluates `Δf_ε^p + (n−2)/(n(n−1)) R f_ε^{p−2}|ξ|² − (n−2)/(n−1) r_1 f_ε^{p−2}|ξ|²`
/// for `ξ = dΦ`, `f_ε = √(|ξ|² + ε²)`, `p = (n−2)/(n−1)` (degree 1).
pub fn basineq_verify(w: &WarpedCylinder, f: &HarmonicRadialForm, epsilon: f64, grid: &Grid) -> Result<BasineqReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("ε must be positive".into()));
    }
    let n = w.dim();
    if n < 3 {
        return Err(Error::Unsupported("needs n ≥ 3".into()));
    }
    let nf = n as f64;
    let p = (nf - 2.0) / (nf - 1.0);
    let fe = |t: f64| {
        let x = f.norm(w, t);
        (x * x + epsilon * epsilon).sqrt()
    };
    let samples: Vec<f64> = grid.iter().map(|t| fe(t).powf(p)).collect();
    let lap = radial_laplacian_fd(w, grid, &samples)?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut t_at_max = f64::NAN;
    let mut min_slack = f64::INFINITY;
    let mut scale: f64 = 0.0;
    for (t, l) in lap {
        let (r, r1) = w.scalar_and_r1(t)?;
        let x = f.norm(w, t);
        let weight = fe(t).powf(p - 2.0) * x * x;
        let lhs = l + (nf - 2.0) / (nf * (nf - 1.0)) * r * weight;
        let rhs = (nf - 2.0) / (nf - 1.0) * r1 * weight;
        let d = lhs - rhs;
        scale = scale.max(rhs.abs()).max(l.abs());
        min_slack = min_slack.min(d);
        if d > max_violation {
            max_violation = d;
            t_at_max = t;
        }
    }
    Ok(BasineqReport {
        n,
        epsilon,
        exponent: p,
        max_violation,
        t_at_max,
        scale,
        min_slack,
        step: grid.step(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jets_match_finite_differences() {
        let h = 1e-5;
        for warp in [
            Warp::Sine { offset: 2.0, amplitude: 1.0 },
            Warp::Cosh,
            Warp::Hyperbolic { alpha: 0.7 },
        ] {
            for t in [-1.3, 0.0, 0.4, 2.0] {
                let (_, d1, d2) = warp.jet(t);
                let f = |s| warp.jet(s).0;
                assert!((d1 - (f(t + h) - f(t - h)) / (2.0 * h)).abs() < 1e-8);
                assert!((d2 - (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn rejects_non_positive_warps() {
        assert!(WarpedCylinder::over_sphere(4, Warp::Sine { offset: 1.0, amplitude: 1.0 }).is_err());
        assert!(WarpedCylinder::over_sphere(4, Warp::Constant { c: 0.0 }).is_err());
        assert!(Grid::new(0.0, 1.0, 4).is_err());
    }
}
