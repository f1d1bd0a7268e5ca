//! Spectral routines: eigenvalues, Schatten norms and trace distance.
//!
//! Decompositions are delegated to `nalgebra`; Hermitian inputs are
//! hermitized before the eigensolver sees them.

use nalgebra::SymmetricEigen;

use super::matrix::{canonical_pair, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues of the Hermitian part of `a`, sorted ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.square_dim()?;
    let h = a.hermitian_part().to_nalgebra();
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigen-decomposition of the Hermitian part of `a`: `(eigenvalues, eigenvectors
/// as columns)`, unsorted.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    a.square_dim()?;
    let eig = SymmetricEigen::new(a.hermitian_part().to_nalgebra());
    let vals = eig.eigenvalues.iter().copied().collect();
    Ok((vals, ComplexMatrix::from_nalgebra(&eig.eigenvectors)))
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    a.to_nalgebra().singular_values().iter().copied().collect()
}

/// Schatten p-norm for `p ∈ {1, 2}`.
///
/// `p = 2` is `√Tr[a†a]`; `p = 1` sums singular values.
pub fn schatten_norm(a: &ComplexMatrix, p: u32) -> Result<f64> {
    match p {
        1 => Ok(singular_values(a).iter().sum()),
        2 => Ok(a.hs_norm()),
        _ => Err(Error::InvalidArgument(format!("unsupported Schatten index p = {p}"))),
    }
}

/// Trace norm of the Hermitian part of `a` via its eigenvalues.
pub fn hermitian_trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|x| x.abs()).sum())
}

/// Normalized trace distance `½‖a − b‖₁` of two Hermitian matrices of equal shape.
pub fn trace_distance_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (x, y) = canonical_pair(a, b);
    Ok(0.5 * hermitian_trace_norm(&(x - y))?)
}

/// Solves `a · x = b` by LU decomposition.
pub(crate) fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = a.to_nalgebra().lu();
    let x = lu
        .solve(&b.to_nalgebra())
        .ok_or_else(|| Error::InvalidArgument("singular linear system".into()))?;
    Ok(ComplexMatrix::from_nalgebra(&x))
}

/// Inner product `⟨a|b⟩`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schatten_examples() {
        let id = ComplexMatrix::identity(3);
        assert!((schatten_norm(&id, 2).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let r1 = ComplexMatrix::unit(2, 0, 1);
        assert!((schatten_norm(&r1, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((schatten_norm(&r1, 1).unwrap() - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::real_diag(&[3.0, -4.0]);
        assert!((schatten_norm(&d, 1).unwrap() - 7.0).abs() < 1e-13);
        assert!(matches!(schatten_norm(&d, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn eigenvalues_sorted() {
        let z = ComplexMatrix::pauli_z();
        assert_eq!(hermitian_eigenvalues(&z).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn trace_distance_shape_check() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(trace_distance_matrices(&a, &b).is_err());
    }
}
