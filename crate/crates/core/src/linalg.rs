//! Small dense helpers over nalgebra.

use nalgebra::DMatrix;

/// Relative singular-value cutoff used for every rank decision.
pub const RANK_TOL: f64 = 1e-8;

pub fn matrix_from_rows(rows: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

/// Numerical rank: singular values above `RANK_TOL · σ_max`.
pub fn rank(rows: &[Vec<f64>], ncols: usize) -> usize {
    if rows.is_empty() || ncols == 0 {
        return 0;
    }
    let a = matrix_from_rows(rows, ncols);
    let sv = if a.nrows() >= a.ncols() {
        a.singular_values()
    } else {
        a.transpose().singular_values()
    };
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max).count()
}

/// Orthonormal basis (as rows) of the row space of `a`.
pub fn row_space_basis(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    // row space of A = column space of Aᵀ
    let at = a.transpose();
    let svd = at.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Vec::new();
    }
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOL * max)
        .map(|(k, _)| u.column(k).iter().copied().collect())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
