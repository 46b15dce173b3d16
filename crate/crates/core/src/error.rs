use crate::linalg::Space;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("space dimensions must be positive")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("space mismatch: operator expects {expected:?}, got {found:?}")]
    SpaceMismatch { expected: Space, found: Space },
    #[error("family has {found} elements, expected {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("families are not compatible: {0}")]
    ShapeMismatch(&'static str),
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("invalid frame bounds A={lower}, B={upper}")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("family is not b-complete")]
    NotComplete,
    #[error("family is not b-orthonormal (pair ({i}, {j}), residual {residual:e})")]
    NotBOrthonormal { i: usize, j: usize, residual: f64 },
    #[error("family does not span Z")]
    NotSpanning,
    #[error("family is not a K-b-frame for the given bounds")]
    NotKFrame,
    #[error("frame operator is singular on the range of K")]
    SingularOnRange,
    #[error("synthesis operator is not surjective onto the range of K")]
    NotSurjectiveOnRange,
    #[error("range of Q is not contained in the range of K (residual {residual:e})")]
    RangeNotIncluded { residual: f64 },
}
