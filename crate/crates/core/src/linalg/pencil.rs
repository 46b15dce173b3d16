use alloc::vec::Vec;

use super::{is_psd_spectrum, kernel_basis, pinv, range_basis, sym_eigen, Matrix, RankTol, Vector};
use crate::{Error, Result, PSD_TOL};

/// Result of [`pencil_min_eigen_with_witness`].
#[derive(Debug, Clone)]
pub struct PencilMin {
    /// `inf <s z, z> / <m z, z>` over `z` with `m z != 0`; `+inf` when `m = 0`.
    pub value: f64,
    /// A minimiser, when the constraint set is non-empty.
    pub witness: Option<Vector>,
}

/// `inf_{z : <m z, z> > 0} <s z, z> / <m z, z>` for symmetric PSD `s`, `m`.
pub fn pencil_min_eigen(s: &Matrix, m: &Matrix, tol: RankTol) -> Result<f64> {
    pencil_min_eigen_with_witness(s, m, tol).map(|p| p.value)
}

/// Same as [`pencil_min_eigen`] but also returns a vector attaining the infimum.
///
/// With `P` spanning range(m) and `W` spanning ker(m), every `z = P a + W b`.
/// Minimising over `b` leaves the Schur complement
/// `S^ = P^T (s - s W (W^T s W)^+ W^T s) P`, and the answer is the smallest
/// eigenvalue of the definite pencil `(S^, P^T m P)`.
pub fn pencil_min_eigen_with_witness(s: &Matrix, m: &Matrix, tol: RankTol) -> Result<PencilMin> {
    for a in [s, m] {
        if !a.is_square() {
            return Err(Error::NonSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
    }
    if s.rows() != m.rows() {
        return Err(Error::DimMismatch {
            expected: s.rows(),
            found: m.rows(),
        });
    }
    for a in [s, m] {
        let e = sym_eigen(a)?;
        if !is_psd_spectrum(&e.values, PSD_TOL) {
            return Err(Error::NotPsd {
                eigenvalue: e.min(),
            });
        }
    }
    let s = s
        .symmetrized()
        .with_spaces(crate::Space::Any, crate::Space::Any);
    let m = m
        .symmetrized()
        .with_spaces(crate::Space::Any, crate::Space::Any);

    let p = range_basis(&m, tol).with_spaces(crate::Space::Any, crate::Space::Any);
    if p.cols() == 0 {
        return Ok(PencilMin {
            value: f64::INFINITY,
            witness: None,
        });
    }
    let w = kernel_basis(&m, tol).with_spaces(crate::Space::Any, crate::Space::Any);
    let pt = p.transpose();

    let s_pp = pt.matmul(&s).matmul(&p);
    let (schur, eliminate) = if w.cols() > 0 {
        let wt = w.transpose();
        let s_ww = wt.matmul(&s).matmul(&w).symmetrized();
        let s_wp = wt.matmul(&s).matmul(&p);
        let s_ww_pinv = pinv(&s_ww, RankTol::default());
        let elim = s_ww_pinv.matmul(&s_wp);
        (s_pp.sub(&s_wp.transpose().matmul(&elim)), Some(elim))
    } else {
        (s_pp, None)
    };

    // (P^T m P)^{-1/2} via its eigen-decomposition; positive definite by construction.
    let m_hat = pt.matmul(&m).matmul(&p).symmetrized();
    let me = sym_eigen(&m_hat)?;
    let inv_sqrt: Vec<f64> = me.values.iter().map(|&mu| 1.0 / libm::sqrt(mu)).collect();
    let q = &me.vectors;
    let mut q_scaled = q.clone();
    for j in 0..q.cols() {
        for i in 0..q.rows() {
            q_scaled[(i, j)] *= inv_sqrt[j];
        }
    }
    let m_inv_sqrt = q_scaled.matmul(&q.transpose());
    let c = m_inv_sqrt.matmul(&schur).matmul(&m_inv_sqrt).symmetrized();
    let ce = sym_eigen(&c)?;

    let a = m_inv_sqrt.mul_vec(&ce.vectors.column(0));
    let mut z = p.mul_vec(&a);
    if let Some(elim) = eliminate {
        let b = elim.mul_vec(&a).scaled(-1.0);
        z.axpy(1.0, &w.mul_vec(&b));
    }
    Ok(PencilMin {
        value: ce.min(),
        witness: Some(z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e4_frame_operator() -> Matrix {
        Matrix::from_rows(&[
            [4.0, 0.0, 0.0, 0.0],
            [0.0, 4.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 1.0, 1.0],
        ])
    }

    #[test]
    fn identity_constraint_reduces_to_min_eigenvalue() {
        let s = Matrix::diag(&[4.0, 4.0, 2.0, 2.0]);
        let v = pencil_min_eigen(&s, &Matrix::identity(4), RankTol::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn projection_constraint_uses_schur_complement() {
        // minimise (4 z1^2 + 4 z2^2 + (z3 + z4)^2) / (z1^2 + z2^2): z3 = -z4 gives 4
        let m = Matrix::diag(&[1.0, 1.0, 0.0, 0.0]);
        let r =
            pencil_min_eigen_with_witness(&e4_frame_operator(), &m, RankTol::default()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-12);
        let z = r.witness.unwrap();
        let ratio = e4_frame_operator().mul_vec(&z).dot(&z) / m.mul_vec(&z).dot(&z);
        assert!((ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_constraint_is_infinite() {
        let v = pencil_min_eigen(
            &e4_frame_operator(),
            &Matrix::zeros(4, 4),
            RankTol::default(),
        )
        .unwrap();
        assert!(v.is_infinite() && v > 0.0);
    }

    #[test]
    fn rejects_indefinite_input() {
        let s = Matrix::diag(&[1.0, -1.0]);
        assert!(matches!(
            pencil_min_eigen(&s, &Matrix::identity(2), RankTol::default()),
            Err(Error::NotPsd { .. })
        ));
    }
}
