//! Dense symmetric eigensolve for grid Hamiltonians.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lowest `count` eigenpairs of a symmetric matrix, eigenvalues ascending,
/// eigenvectors unit-norm columns.
pub fn lowest_eigenpairs<T: Real + nalgebra::RealField>(
    h: DMatrix<T>,
    count: usize,
) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = h.nrows();
    if count > n {
        return Err(Error::SizeMismatch(count, n));
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("non-finite eigenvalue")
    });
    let mut values = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        values.push(eig.eigenvalues[idx]);
        vectors.push(eig.eigenvectors.column(idx).iter().copied().collect());
    }
    Ok((values, vectors))
}
