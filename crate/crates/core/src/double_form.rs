//! Double forms: elements of `Λ^p ⊗ Λ^q` with the product induced by the
//! wedge product on both factors (the Kulkarni–Nomizu product when both
//! arguments are `(1,1)`).
//!
//! The normalization is pinned by calibration rather than by convention:
//! `g^k / k!` acts as the identity on `Λ^k`, and a curvature tensor of constant
//! sectional curvature `κ` is `κ g² / 2`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exterior::{basis_masks, binomial, check_dim, wedge_sign, RankTable};

/// Coefficients of a `(p,q)` double form over `θ^I ⊗ θ^J`, row-major with
/// rows indexed by `I` and columns by `J`, both in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleForm {
    n: usize,
    p: usize,
    q: usize,
    coeffs: Vec<f64>,
}

impl DoubleForm {
    pub fn zero(n: usize, p: usize, q: usize) -> Result<Self> {
        check_dim(n)?;
        if p > n || q > n {
            return Err(Error::InvalidDegree { k: p.max(q), n });
        }
        Ok(Self {
            n,
            p,
            q,
            coeffs: vec![0.0; binomial(n, p) * binomial(n, q)],
        })
    }

    pub fn from_coeffs(n: usize, p: usize, q: usize, coeffs: Vec<f64>) -> Result<Self> {
        let mut out = Self::zero(n, p, q)?;
        if coeffs.len() != out.coeffs.len() {
            return Err(Error::LengthMismatch {
                expected: out.coeffs.len(),
                got: coeffs.len(),
            });
        }
        out.coeffs = coeffs;
        Ok(out)
    }

    /// A `(k,k)` double form from an operator matrix on `Λ^k`.
    pub fn from_operator(n: usize, k: usize, m: &DMatrix<f64>) -> Result<Self> {
        let d = binomial(n, k);
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: m.nrows(),
            });
        }
        let mut out = Self::zero(n, k, k)?;
        for i in 0..d {
            for j in 0..d {
                out.coeffs[i * d + j] = m[(i, j)];
            }
        }
        Ok(out)
    }

    /// The metric `g = Σ θ^i ⊗ θ^i` as a `(1,1)` form.
    pub fn metric(n: usize) -> Result<Self> {
        Self::identity(n, 1)
    }

    /// The `(k,k)` form acting as the identity on `Λ^k`; equal to `g^k / k!`.
    pub fn identity(n: usize, k: usize) -> Result<Self> {
        let mut out = Self::zero(n, k, k)?;
        let d = binomial(n, k);
        for i in 0..d {
            out.coeffs[i * d + i] = 1.0;
        }
        Ok(out)
    }

    /// `g^j / j!` computed as an honest product of metrics.
    pub fn metric_power(n: usize, j: usize) -> Result<Self> {
        let g = Self::metric(n)?;
        let mut acc = Self::identity(n, 0)?;
        for i in 1..=j {
            acc = acc.kn_product(&g)?.scale(1.0 / i as f64);
        }
        Ok(acc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn rows(&self) -> usize {
        binomial(self.n, self.p)
    }

    pub fn cols(&self) -> usize {
        binomial(self.n, self.q)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.coeffs[row * self.cols() + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        let c = self.cols();
        self.coeffs[row * c + col] = v;
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::InvalidArgument(format!(
                "bidegree ({},{}) vs ({},{})",
                self.p, self.q, other.p, other.q
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a *= s);
        out
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.rows(), self.cols());
        let mut coeffs = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..c {
                coeffs[j * r + i] = self.coeffs[i * c + j];
            }
        }
        Self {
            n: self.n,
            p: self.q,
            q: self.p,
            coeffs,
        }
    }

    /// Inner product induced by the orthonormal bases of `Λ^p` and `Λ^q`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// `|A − Aᵀ|_max / max(|A|_max, tiny)`; `INFINITY` for `p ≠ q`.
    pub fn asymmetry(&self) -> f64 {
        if self.p != self.q {
            return f64::INFINITY;
        }
        let d = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst / self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    /// Product of double forms: `(α⊗β)·(γ⊗δ) = (α∧γ) ⊗ (β∧δ)`.
    pub fn kn_product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        if self.p + other.p > n {
            return Err(Error::DegreeOverflow {
                p: self.p,
                q: other.p,
                n,
            });
        }
        if self.q + other.q > n {
            return Err(Error::DegreeOverflow {
                p: self.q,
                q: other.q,
                n,
            });
        }
        let table = RankTable::new(n);
        let left = nonzeros(self);
        let right = nonzeros(other);
        let mut out = Self::zero(n, self.p + other.p, self.q + other.q)?;
        let oc = out.cols();
        for &(a_row, a_col, va) in &left {
            for &(b_row, b_col, vb) in &right {
                if a_row & b_row != 0 || a_col & b_col != 0 {
                    continue;
                }
                let sign = wedge_sign(a_row, b_row) * wedge_sign(a_col, b_col);
                let idx = table.rank(a_row | b_row) * oc + table.rank(a_col | b_col);
                out.coeffs[idx] += sign * va * vb;
            }
        }
        Ok(out)
    }

    /// Contraction `ctr`, the adjoint of `b ↦ g·b`:
    /// `(ctr a)(K, L) = Σ_{i ∉ K ∪ L} ε(i,K) ε(i,L) a(K∪i, L∪i)`.
    pub fn contraction(&self) -> Result<Self> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::InvalidDegree { k: 0, n: self.n });
        }
        let n = self.n;
        let table = RankTable::new(n);
        let rows = basis_masks(n, self.p - 1);
        let cols = basis_masks(n, self.q - 1);
        let mut out = Self::zero(n, self.p - 1, self.q - 1)?;
        let oc = out.cols();
        for (r, &k_mask) in rows.iter().enumerate() {
            for (c, &l_mask) in cols.iter().enumerate() {
                let mut acc = 0.0;
                for i in 0..n {
                    let bit = 1u32 << i;
                    if k_mask & bit != 0 || l_mask & bit != 0 {
                        continue;
                    }
                    let s = wedge_sign(bit, k_mask) * wedge_sign(bit, l_mask);
                    acc += s * self.get(table.rank(k_mask | bit), table.rank(l_mask | bit));
                }
                out.coeffs[r * oc + c] = acc;
            }
        }
        Ok(out)
    }

    /// `ctr` applied `times` times.
    pub fn contract_n(&self, times: usize) -> Result<Self> {
        let mut acc = self.clone();
        for _ in 0..times {
            acc = acc.contraction()?;
        }
        Ok(acc)
    }

    /// Symmetric operator on `Λ^k` represented by a symmetric `(k,k)` form.
    pub fn as_operator(&self) -> Result<DMatrix<f64>> {
        if self.p != self.q {
            return Err(Error::InvalidArgument(format!(
                "operator view needs bidegree (k,k), got ({},{})",
                self.p, self.q
            )));
        }
        let asym = self.asymmetry();
        if asym > 1e-12 {
            return Err(Error::NotSymmetric(asym));
        }
        let d = self.rows();
        Ok(DMatrix::from_row_slice(d, d, &self.coeffs))
    }

    /// Orthogonal projection of a symmetric `(k,k)` form onto the kernel of
    /// `ctr` (the "totally traceless" part), computed as `a − g·s` where `s`
    /// solves `ctr(g·s) = ctr(a)` by conjugate gradients.
    pub fn traceless_part(&self) -> Result<Self> {
        if self.p != self.q {
            return Err(Error::InvalidArgument("traceless part needs (k,k)".into()));
        }
        if self.p == 0 {
            return Self::zero(self.n, 0, 0);
        }
        let g = Self::metric(self.n)?;
        let rhs = self.contraction()?;
        let apply = |s: &Self| -> Result<Self> { g.kn_product(s)?.contraction() };
        let scale = rhs.norm().max(f64::MIN_POSITIVE);
        let mut x = Self::zero(self.n, self.p - 1, self.q - 1)?;
        let mut r = rhs.clone();
        let mut d = r.clone();
        let mut rr = r.norm_sq();
        for _ in 0..500 {
            if rr.sqrt() <= 1e-15 * scale {
                break;
            }
            let ad = apply(&d)?;
            let alpha = rr / d.inner(&ad)?;
            x = x.add(&d.scale(alpha))?;
            r = r.sub(&ad.scale(alpha))?;
            let rr_new = r.norm_sq();
            d = r.add(&d.scale(rr_new / rr))?;
            rr = rr_new;
        }
        self.sub(&g.kn_product(&x)?)
    }
}

fn nonzeros(a: &DoubleForm) -> Vec<(u32, u32, f64)> {
    let rows = basis_masks(a.n, a.p);
    let cols = basis_masks(a.n, a.q);
    let mut out = Vec::new();
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            let v = a.get(i, j);
            if v != 0.0 {
                out.push((r, c, v));
            }
        }
    }
    out
}

/// Outcome of [`norm_identity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormIdentity {
    /// `⟨ctr^j (g^j/j!)·T | T⟩ / j!`
    pub computed: f64,
    /// `binom(n − 2k, j) |T|²`
    pub expected: f64,
    /// `|computed − expected| / |T|²`
    pub residual: f64,
}

/// Checks `⟨ctr^j (g^j/j!)·T | T⟩ / j! = binom(n−2k, j) |T|²` for a
/// symmetric `(k,k)` form `T` with `ctr T = 0`.
pub fn norm_identity_check(t: &DoubleForm, j: usize) -> Result<NormIdentity> {
    let (k, q) = t.bidegree();
    let n = t.n();
    if k != q {
        return Err(Error::InvalidArgument("T must have bidegree (k,k)".into()));
    }
    if 2 * k > n || j > n - 2 * k {
        return Err(Error::InvalidArgument(format!(
            "need j ≤ n − 2k, got n={n}, k={k}, j={j}"
        )));
    }
    let t_sq = t.norm_sq();
    if t_sq == 0.0 {
        return Err(Error::InvalidArgument("T must be non-zero".into()));
    }
    if k > 0 {
        let trace = t.contraction()?.norm() / t.norm();
        if trace > 1e-9 {
            return Err(Error::NotTraceless(trace));
        }
    }
    let lifted = DoubleForm::metric_power(n, j)?.kn_product(t)?;
    let factorial: f64 = (1..=j).map(|i| i as f64).product();
    let computed = lifted.contract_n(j)?.inner(t)? / factorial;
    let expected = binomial(n - 2 * k, j) as f64 * t_sq;
    Ok(NormIdentity {
        computed,
        expected,
        residual: (computed - expected).abs() / t_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random_form(n: usize, p: usize, q: usize, seed: &mut u64) -> DoubleForm {
        let len = binomial(n, p) * binomial(n, q);
        DoubleForm::from_coeffs(n, p, q, (0..len).map(|_| lcg(seed)).collect()).unwrap()
    }

    fn random_symmetric(n: usize, k: usize, seed: &mut u64) -> DoubleForm {
        let a = random_form(n, k, k, seed);
        a.add(&a.transpose()).unwrap().scale(0.5)
    }

    #[test]
    fn metric_powers_calibrate_to_identity() {
        for n in 1..=12 {
            for k in 0..=n.min(6) {
                let gk = DoubleForm::metric_power(n, k).unwrap();
                assert_eq!(gk, DoubleForm::identity(n, k).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn g_squared_is_twice_identity() {
        let g = DoubleForm::metric(4).unwrap();
        let g2 = g.kn_product(&g).unwrap();
        assert_eq!(g2, DoubleForm::identity(4, 2).unwrap().scale(2.0));
    }

    #[test]
    fn contraction_of_metric_square() {
        for n in 2..=8 {
            let half_g2 = DoubleForm::metric_power(n, 2).unwrap();
            let c = half_g2.contraction().unwrap();
            let expected = DoubleForm::metric(n).unwrap().scale((n - 1) as f64);
            assert!(c.sub(&expected).unwrap().max_abs() < 1e-14);
            // a second contraction gives the scalar n(n−1)
            let cc = c.contraction().unwrap();
            assert!((cc.get(0, 0) - (n * (n - 1)) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_is_adjoint_to_metric_product() {
        let mut seed = 7;
        let g = DoubleForm::metric(6).unwrap();
        for trial in 0..200 {
            let n = 6;
            let p = 1 + trial % 3;
            let q = 1 + (trial / 3) % 3;
            let a = random_form(n, p, q, &mut seed);
            let b = random_form(n, p - 1, q - 1, &mut seed);
            let lhs = a.contraction().unwrap().inner(&b).unwrap();
            let rhs = a.inner(&g.kn_product(&b).unwrap()).unwrap();
            assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn kn_product_is_associative() {
        let mut seed = 11;
        for trial in 0..100 {
            let n = 3 + trial % 4;
            let a = random_form(n, 1, 1, &mut seed);
            let b = random_form(n, 1, if n > 4 { 2 } else { 1 }, &mut seed);
            let c = random_form(n, 1, 1, &mut seed);
            let left = a.kn_product(&b).unwrap().kn_product(&c);
            let right = a.kn_product(&b.kn_product(&c).unwrap());
            match (left, right) {
                (Ok(l), Ok(r)) => assert!(l.sub(&r).unwrap().max_abs() < 1e-10),
                (Err(_), Err(_)) => {}
                other => panic!("associativity shape mismatch: {other:?}"),
            }
        }
    }

    #[test]
    fn kn_product_commutes_on_even_symmetric_forms() {
        let mut seed = 3;
        let a = random_symmetric(6, 1, &mut seed);
        let b = random_symmetric(6, 1, &mut seed);
        let ab = a.kn_product(&b).unwrap();
        let ba = b.kn_product(&a).unwrap();
        assert!(ab.sub(&ba).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn overflow_is_rejected() {
        let a = DoubleForm::identity(3, 2).unwrap();
        assert!(matches!(a.kn_product(&a), Err(Error::DegreeOverflow { .. })));
        let s = DoubleForm::identity(3, 0).unwrap();
        assert!(s.contraction().is_err());
    }

    #[test]
    fn lifted_traceless_one_form_has_zero_trace() {
        let mut seed = 5;
        let n = 7;
        let t = random_symmetric(n, 1, &mut seed).traceless_part().unwrap();
        for k in 2..=4 {
            let lifted = DoubleForm::metric_power(n, k - 1).unwrap().kn_product(&t).unwrap();
            let op = lifted.as_operator().unwrap();
            assert!(op.trace().abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn traceless_projection_is_idempotent() {
        let mut seed = 9;
        for (n, k) in [(5, 1), (6, 2), (8, 3)] {
            let t = random_symmetric(n, k, &mut seed).traceless_part().unwrap();
            assert!(t.contraction().unwrap().max_abs() < 1e-12 * t.max_abs().max(1.0));
            let again = t.traceless_part().unwrap();
            assert!(again.sub(&t).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn norm_identity_cases() {
        let mut seed = 13;
        for (n, k, j) in [(6, 2, 1), (6, 1, 0), (10, 3, 4), (9, 2, 3), (7, 1, 4)] {
            let t = random_symmetric(n, k, &mut seed).traceless_part().unwrap();
            let res = norm_identity_check(&t, j).unwrap();
            assert!(res.residual <= 1e-10, "n={n} k={k} j={j}: {res:?}");
            if j == 0 {
                assert_eq!(res.residual, 0.0);
            }
        }
        let t = random_symmetric(6, 2, &mut seed).traceless_part().unwrap();
        assert!(norm_identity_check(&t, 3).is_err());
        let not_traceless = DoubleForm::identity(6, 2).unwrap();
        assert!(matches!(
            norm_identity_check(&not_traceless, 1),
            Err(Error::NotTraceless(_))
        ));
    }

    #[test]
    fn constant_curvature_operator() {
        let kappa = 0.7;
        let r = DoubleForm::metric_power(4, 2).unwrap().scale(kappa);
        let op = r.as_operator().unwrap();
        assert_eq!(op, DMatrix::identity(6, 6) * kappa);
    }

    #[test]
    fn asymmetric_operator_rejected() {
        let mut a = DoubleForm::identity(4, 2).unwrap();
        a.set(0, 1, 1.0);
        assert!(matches!(a.as_operator(), Err(Error::NotSymmetric(_))));
    }
}
