use nalgebra::{DMatrix, SymmetricEigen};

use super::{finish, residual_norm, EigenPair, LinearOperator};
use crate::error::Result;

/// Materializes `op` column by column and diagonalizes it densely.
pub fn dense_eigenpairs(op: &dyn LinearOperator, k: usize) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let pairs = order
        .into_iter()
        .take(k)
        .map(|j| {
            let v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
            let energy = eig.eigenvalues[j];
            let residual = residual_norm(op, &v, energy);
            EigenPair { energy, vector: v, residual }
        })
        .collect();
    Ok(finish(pairs))
}
