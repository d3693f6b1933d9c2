//! Dense complex-matrix kernel: arithmetic, Jacobi decompositions and the
//! structural predicates (projection, unitary, isometry) used by every
//! other module.

mod eig;
mod matrix;
mod svd;

pub use eig::{herm_eig, EigDecomposition};
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};
pub(crate) use svd::complete_orthonormal;
pub use svd::{op_norm, polar, svd, Svd};

use crate::error::Result;
use crate::tolerance::RANK_REL;

/// `max(‖A − A*‖_∞, ‖A² − A‖_∞)`; infinite for non-square input.
pub fn projection_defect(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let sq = a.matmul(a);
    a.hermitian_defect().max(sq.dist_max(a))
}

/// Rank of `a` if it is a projection within `tol`, counting eigenvalues
/// above one half.
pub fn projection_rank(a: &ComplexMatrix, tol: f64) -> Option<usize> {
    if projection_defect(a) > tol {
        return None;
    }
    let e = herm_eig(&a.hermitian_part()).ok()?;
    Some(e.values.iter().filter(|&&v| v > 0.5).count())
}

/// True iff `a` is hermitian and idempotent within `tol`.
pub fn is_projection(a: &ComplexMatrix, tol: f64) -> bool {
    projection_defect(a) <= tol
}

/// `‖A*A − I‖_∞`; infinite for non-square input.
pub fn unitary_defect(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    isometry_defect(a)
}

pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> bool {
    unitary_defect(a) <= tol
}

/// `‖A*A − I‖_∞` for a (possibly rectangular) matrix.
pub fn isometry_defect(a: &ComplexMatrix) -> f64 {
    a.adjoint_mul(a).dist_max(&ComplexMatrix::identity(a.cols()))
}

/// Numerical rank with the uniform `tol_rank` policy.
pub fn rank(a: &ComplexMatrix) -> Result<usize> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0);
    }
    Ok(svd(a)?.rank(RANK_REL))
}

/// Orthonormal basis of the column space (columns of `U` for the nonzero
/// singular values).
pub fn column_space(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols() == 0 {
        return Ok(ComplexMatrix::zeros(a.rows(), 0));
    }
    let s = svd(a)?;
    let r = s.rank(RANK_REL);
    let idx: Vec<usize> = (0..r).collect();
    Ok(s.u.select_cols(&idx))
}
