//! Pointwise exterior algebra of an oriented Euclidean space in an orthonormal
//! coframe `θ^0, …, θ^{n-1}`.
//!
//! Basis `k`-forms `θ^I` are indexed by strictly increasing multi-indices and
//! stored in lexicographic order. Internally a multi-index is also carried as
//! a bit mask (bit `i` set iff `i ∈ I`), which makes the sign bookkeeping of
//! wedge products a matter of popcounts.

use itertools::Itertools;

use crate::error::{Error, Result};

/// Default cap on the ambient dimension.
pub const DEFAULT_MAX_DIM: usize = 12;

/// Hard limit imposed by the `u32` mask representation.
pub const HARD_MAX_DIM: usize = 24;

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > HARD_MAX_DIM {
        return Err(Error::DimensionCap { n, cap: HARD_MAX_DIM });
    }
    Ok(())
}

/// Bit masks of the basis `k`-subsets of `{0..n}` in lexicographic order.
pub fn basis_masks(n: usize, k: usize) -> Vec<u32> {
    if k > n {
        return Vec::new();
    }
    (0..n)
        .combinations(k)
        .map(|c| c.iter().fold(0u32, |m, &i| m | (1 << i)))
        .collect()
}

/// Sign of the permutation sorting the concatenation `(a, b)` of two disjoint
/// increasing index sets, i.e. `θ^a ∧ θ^b = sign · θ^{a ∪ b}`.
#[inline]
pub fn wedge_sign(a: u32, b: u32) -> f64 {
    debug_assert_eq!(a & b, 0);
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        rest &= rest - 1;
        // elements of `a` larger than `y`
        let above = if y >= 31 { 0 } else { a >> (y + 1) };
        inversions += above.count_ones();
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Lookup table from a mask to its lexicographic rank among masks of the
/// same popcount.
#[derive(Debug, Clone)]
pub struct RankTable {
    n: usize,
    rank: Vec<u32>,
}

impl RankTable {
    pub fn new(n: usize) -> Self {
        let mut rank = vec![0u32; 1 << n];
        for k in 0..=n {
            for (r, m) in basis_masks(n, k).into_iter().enumerate() {
                rank[m as usize] = r as u32;
            }
        }
        Self { n, rank }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn rank(&self, mask: u32) -> usize {
        self.rank[mask as usize] as usize
    }
}

/// Strictly increasing list of frame indices in `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: usize,
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        check_dim(n)?;
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndex(format!(
                "{indices:?} is not strictly increasing"
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidIndex(format!("{bad} is out of range 0..{n}")));
        }
        Ok(Self { n, indices })
    }

    pub fn from_mask(n: usize, mask: u32) -> Self {
        let indices = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        Self { n, indices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn mask(&self) -> u32 {
        self.indices.iter().fold(0, |m, &i| m | (1 << i))
    }

    /// Complementary multi-index `I^c`.
    pub fn complement(&self) -> Self {
        let full = if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 };
        Self::from_mask(self.n, full & !self.mask())
    }

    /// Lexicographic position among the `binom(n, k)` basis multi-indices.
    pub fn rank(&self) -> usize {
        let k = self.degree();
        let mut rank = 0;
        let mut start = 0;
        for (i, &c) in self.indices.iter().enumerate() {
            for j in start..c {
                rank += binomial(self.n - 1 - j, k - 1 - i);
            }
            start = c + 1;
        }
        rank
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn unrank(n: usize, k: usize, mut rank: usize) -> Result<Self> {
        check_dim(n)?;
        if k > n {
            return Err(Error::InvalidDegree { k, n });
        }
        if rank >= binomial(n, k) {
            return Err(Error::InvalidIndex(format!(
                "rank {rank} out of range for binom({n},{k})"
            )));
        }
        let mut indices = Vec::with_capacity(k);
        let mut j = 0;
        for i in 0..k {
            loop {
                let block = binomial(n - 1 - j, k - 1 - i);
                if rank < block {
                    break;
                }
                rank -= block;
                j += 1;
            }
            indices.push(j);
            j += 1;
        }
        Ok(Self { n, indices })
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // one-based, the way frames are usually written
        let parts: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A `k`-form with dense coefficients over the lexicographic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    n: usize,
    k: usize,
    coeffs: Vec<f64>,
}

impl KForm {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        check_dim(n)?;
        if k > n {
            return Err(Error::InvalidDegree { k, n });
        }
        Ok(Self {
            n,
            k,
            coeffs: vec![0.0; binomial(n, k)],
        })
    }

    pub fn from_coeffs(n: usize, k: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if k > n {
            return Err(Error::InvalidDegree { k, n });
        }
        let expected = binomial(n, k);
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Self { n, k, coeffs })
    }

    /// The basis element `θ^I`.
    pub fn basis(index: &MultiIndex) -> Self {
        let n = index.n();
        let k = index.degree();
        let mut coeffs = vec![0.0; binomial(n, k)];
        coeffs[index.rank()] = 1.0;
        Self { n, k, coeffs }
    }

    /// The 1-form `v♭ = Σ v_i θ^i`.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        Self::from_coeffs(v.len(), 1, v.to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, index: &MultiIndex) -> f64 {
        self.coeffs[index.rank()]
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.k != other.k {
            return Err(Error::InvalidDegree {
                k: other.k,
                n: other.n,
            });
        }
        Ok(())
    }

    /// Orthonormal-frame inner product.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { n: self.n, k: self.k, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { n: self.n, k: self.k, coeffs })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let (n, p, q) = (self.n, self.k, other.k);
        if p + q > n {
            return Err(Error::DegreeOverflow { p, q, n });
        }
        let left = basis_masks(n, p);
        let right = basis_masks(n, q);
        let table = RankTable::new(n);
        let mut out = vec![0.0; binomial(n, p + q)];
        for (&a, &ca) in left.iter().zip(&self.coeffs) {
            if ca == 0.0 {
                continue;
            }
            for (&b, &cb) in right.iter().zip(&other.coeffs) {
                if cb == 0.0 || a & b != 0 {
                    continue;
                }
                out[table.rank(a | b)] += wedge_sign(a, b) * ca * cb;
            }
        }
        Ok(Self {
            n,
            k: p + q,
            coeffs: out,
        })
    }

    /// Interior product `v ⌟ a`, the adjoint of `b ↦ v♭ ∧ b`.
    pub fn interior(v: &[f64], a: &Self) -> Result<Self> {
        if v.len() != a.n {
            return Err(Error::DimensionMismatch(v.len(), a.n));
        }
        if a.k == 0 {
            return Err(Error::InvalidDegree { k: 0, n: a.n });
        }
        let n = a.n;
        let table = RankTable::new(n);
        let mut out = vec![0.0; binomial(n, a.k - 1)];
        for (&m, &c) in basis_masks(n, a.k).iter().zip(&a.coeffs) {
            if c == 0.0 {
                continue;
            }
            let mut rest = m;
            while rest != 0 {
                let i = rest.trailing_zeros();
                rest &= rest - 1;
                let reduced = m & !(1 << i);
                // θ^i ∧ θ^{I∖i} = sign · θ^I
                let sign = wedge_sign(1 << i, reduced);
                out[table.rank(reduced)] += sign * v[i as usize] * c;
            }
        }
        Ok(Self {
            n,
            k: a.k - 1,
            coeffs: out,
        })
    }

    /// Hodge star for the orientation `θ^0 ∧ … ∧ θ^{n-1}`.
    pub fn hodge_star(&self) -> Self {
        let n = self.n;
        let full = (1u32 << n) - 1;
        let table = RankTable::new(n);
        let mut out = vec![0.0; binomial(n, n - self.k)];
        for (&m, &c) in basis_masks(n, self.k).iter().zip(&self.coeffs) {
            let comp = full & !m;
            out[table.rank(comp)] += wedge_sign(m, comp) * c;
        }
        Self {
            n,
            k: n - self.k,
            coeffs: out,
        }
    }
}

/// Matrix of the Hodge star on `Λ^k` in the lexicographic bases, as a dense
/// row-major `binom(n,n-k) × binom(n,k)` array.
pub fn hodge_matrix(n: usize, k: usize) -> Vec<Vec<f64>> {
    let rows = binomial(n, n - k);
    let cols = binomial(n, k);
    let full = (1u32 << n) - 1;
    let table = RankTable::new(n);
    let mut m = vec![vec![0.0; cols]; rows];
    for (j, &mask) in basis_masks(n, k).iter().enumerate() {
        let comp = full & !mask;
        m[table.rank(comp)][j] = wedge_sign(mask, comp);
    }
    m
}
