//! Dense real linear algebra at desk scale.
//!
//! Everything here is written against plain row-major storage: a cyclic
//! Jacobi eigensolver for symmetric matrices, a one-sided Jacobi SVD, and
//! the pseudo-inverse / range / kernel / pencil routines built on them.

mod eigen;
mod matrix;
mod pencil;
mod svd;
mod vector;

pub use eigen::{sym_eigen, SymEigen};
pub use matrix::{Matrix, Space};
pub use pencil::{pencil_min_eigen, pencil_min_eigen_with_witness, PencilMin};
pub use svd::{
    kernel_basis, orthonormal_complement, pinv, range_basis, range_inclusion_residual, rank,
    singular_values, solve_lstsq, svd, Svd,
};
pub use vector::Vector;

/// Threshold below which a singular value counts as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankTol {
    /// Multiple of the largest singular value.
    Relative(f64),
    /// Fixed cut-off.
    Absolute(f64),
}

impl RankTol {
    pub fn threshold(self, sigma_max: f64) -> f64 {
        match self {
            RankTol::Relative(r) => r * sigma_max,
            RankTol::Absolute(a) => a,
        }
    }
}

impl Default for RankTol {
    fn default() -> Self {
        RankTol::Relative(1e-10)
    }
}

/// Smallest eigenvalue test `lambda_min >= -tol * max(1, lambda_max)`.
pub fn is_psd_spectrum(eigenvalues: &[f64], tol: f64) -> bool {
    match (eigenvalues.first(), eigenvalues.last()) {
        (Some(&lo), Some(&hi)) => lo >= -tol * hi.abs().max(1.0),
        _ => true,
    }
}
