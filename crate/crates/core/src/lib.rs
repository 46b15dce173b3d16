//! Finite-dimensional b-frame and K-b-frame calculus.
//!
//! A bounded bilinear map `b: H x B -> Z` between real coordinate spaces is
//! stored as a structure tensor. Frame operators, bounds and reconstruction
//! live in [`frames`]; the b-adjoint of an operator on `B` in [`badjoint`];
//! transfers between families in [`stability`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod badjoint;
pub mod bilinear;
mod error;
pub mod family;
pub mod frames;
pub mod golden;
pub mod linalg;
pub(crate) mod rng;
pub mod stability;

pub use badjoint::{OperatorOnB, OperatorOnZ, Uniqueness};
pub use bilinear::{BilinearMap, BoundConstants};
pub use error::Error;
pub use family::{CoefficientFamily, VectorFamily};
pub use frames::{Bounds, Domain, FrameFamily, FrameReport};
pub use linalg::{Matrix, RankTol, Space, Vector};
pub use stability::StabilityReport;

pub type Result<T> = core::result::Result<T, Error>;

/// Relative threshold used by every positive-semidefiniteness verdict.
pub const PSD_TOL: f64 = 1e-9;

/// Relative threshold for calling two frame bounds equal.
pub const TIGHT_TOL: f64 = 1e-8;
