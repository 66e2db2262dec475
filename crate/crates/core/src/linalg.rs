//! Dense symmetric eigen-solves and eigenvalue clustering.

use nalgebra::{DMatrix, SymmetricEigen};

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, vectors as columns.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// A run of numerically equal eigenvalues.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Groups sorted eigenvalues whose consecutive gaps are within
/// `rel_tol · max(spectral radius, 1e-300)`.
pub fn cluster(sorted: &[f64], rel_tol: f64) -> Vec<Cluster> {
    let radius = sorted.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = rel_tol * radius.max(1e-300);
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((sum, count, last)) if (v - *last).abs() <= tol => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter()
        .map(|(sum, count, _)| Cluster {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}

/// `Λ^k Q`: the matrix of `Q` acting on `k`-vectors, entries are `k×k` minors.
pub fn compound_matrix(q: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = q.nrows();
    let masks = crate::exterior::basis_masks(n, k);
    let d = masks.len();
    let idx: Vec<Vec<usize>> = masks
        .iter()
        .map(|&m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let mut out = DMatrix::zeros(d, d);
    for (a, rows) in idx.iter().enumerate() {
        for (b, cols) in idx.iter().enumerate() {
            out[(a, b)] = if k == 0 {
                1.0
            } else {
                DMatrix::from_fn(k, k, |i, j| q[(rows[i], cols[j])]).determinant()
            };
        }
    }
    out
}
