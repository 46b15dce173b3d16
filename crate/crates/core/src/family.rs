//! Finite families of vectors and of coefficient vectors.

use alloc::vec::Vec;

use crate::linalg::{Space, Vector};
use crate::{Error, Result};

/// An ordered family of vectors of one space, all of dimension `dim`.
///
/// Empty families are legal; they keep their ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    space: Space,
    dim: usize,
    vectors: Vec<Vector>,
}

impl VectorFamily {
    pub fn new(space: Space, dim: usize, vectors: Vec<Vector>) -> Result<Self> {
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(VectorFamily {
            space,
            dim,
            vectors,
        })
    }

    /// Family in `B` built from coordinate slices.
    pub fn in_b<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        Self::new(
            Space::B,
            dim,
            rows.iter()
                .map(|r| Vector::from_slice(r.as_ref()))
                .collect(),
        )
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &Vector {
        &self.vectors[i]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Vector> {
        self.vectors.iter()
    }

    pub fn map(&self, f: impl FnMut(&Vector) -> Vector) -> Self {
        VectorFamily {
            space: self.space,
            dim: self.dim,
            vectors: self.vectors.iter().map(f).collect(),
        }
    }
}

/// One `H`-vector per family element, with the `l2(H)` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    dim_h: usize,
    coeffs: Vec<Vector>,
}

impl CoefficientFamily {
    pub fn new(dim_h: usize, coeffs: Vec<Vector>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|v| v.len() != dim_h) {
            return Err(Error::DimMismatch {
                expected: dim_h,
                found: bad.len(),
            });
        }
        Ok(CoefficientFamily { dim_h, coeffs })
    }

    pub fn zeros(dim_h: usize, n: usize) -> Self {
        CoefficientFamily {
            dim_h,
            coeffs: (0..n).map(|_| Vector::zeros(dim_h)).collect(),
        }
    }

    /// Splits a stacked vector of length `n * dim_h` into `n` blocks.
    pub fn from_stacked(dim_h: usize, stacked: &Vector) -> Self {
        let coeffs = if dim_h == 0 {
            Vec::new()
        } else {
            stacked
                .as_slice()
                .chunks(dim_h)
                .map(Vector::from_slice)
                .collect()
        };
        CoefficientFamily { dim_h, coeffs }
    }

    pub fn stacked(&self) -> Vector {
        self.coeffs.iter().flat_map(|c| c.iter().copied()).collect()
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Vector] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(Vector::norm_sq).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    /// `l2(H)` inner product.
    pub fn dot(&self, other: &CoefficientFamily) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: family size mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.dot(b))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_families() {
        let err = VectorFamily::in_b(2, &[&[1.0, 0.0][..], &[1.0][..]]).unwrap_err();
        assert_eq!(
            err,
            Error::DimMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn stacking_round_trips() {
        let c = CoefficientFamily::new(
            2,
            alloc::vec![
                Vector::from_slice(&[1.0, 2.0]),
                Vector::from_slice(&[3.0, 4.0])
            ],
        )
        .unwrap();
        assert_eq!(CoefficientFamily::from_stacked(2, &c.stacked()), c);
        assert_eq!(c.norm_sq(), 30.0);
    }
}
