use alloc::vec::Vec;

use super::{Matrix, RankTol, Vector};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;
// Columns of A*V below this fraction of the largest are re-generated by
// completion so that U stays orthonormal.
const NEGLIGIBLE: f64 = 1e-13;

/// Thin singular value decomposition `m = U diag(s) V^T`.
///
/// With `k = min(rows, cols)`, `u` is `rows x k`, `v` is `cols x k`, both with
/// orthonormal columns, and `singular_values` has length `k`, descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, tol: RankTol) -> usize {
        let thr = tol.threshold(self.sigma_max());
        self.singular_values.iter().filter(|&&s| s > thr).count()
    }
}

/// One-sided (Hestenes) Jacobi on the columns of `a`; returns the columns of
/// `a * V` and of `V`.
fn hestenes(a: &Matrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = a.cols();
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j).into_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| Vector::basis(n, j).into_vec()).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for (a, b) in w[p].iter().zip(&w[q]) {
                    alpha += a * a;
                    beta += b * b;
                    gamma += a * b;
                }
                if gamma == 0.0 || gamma.abs() <= ORTHO_EPS * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_pair(&mut w, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

fn norm(xs: &[f64]) -> f64 {
    libm::sqrt(xs.iter().map(|x| x * x).sum())
}

pub fn svd(m: &Matrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd(&m.transpose());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (rows, cols) = (m.rows(), m.cols());
    let (w, v) = hestenes(m);
    let sigma: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let singular_values: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();
    let smax = singular_values.first().copied().unwrap_or(0.0);

    let mut u = Matrix::zeros(rows, cols);
    let mut vm = Matrix::zeros(cols, cols);
    let mut missing = Vec::new();
    for (c, &j) in order.iter().enumerate() {
        for i in 0..cols {
            vm[(i, c)] = v[j][i];
        }
        let s = sigma[j];
        if s > 0.0 && s > NEGLIGIBLE * smax {
            for i in 0..rows {
                u[(i, c)] = w[j][i] / s;
            }
        } else {
            missing.push(c);
        }
    }
    if !missing.is_empty() {
        let kept: Vec<usize> = (0..cols).filter(|c| !missing.contains(c)).collect();
        let fill = orthonormal_complement(&u.select_columns(&kept), rows);
        for (n, &c) in missing.iter().enumerate() {
            for i in 0..rows {
                u[(i, c)] = fill[(i, n)];
            }
        }
    }
    Svd {
        u,
        singular_values,
        v: vm,
    }
}

pub fn singular_values(m: &Matrix) -> Vec<f64> {
    svd(m).singular_values
}

pub fn rank(m: &Matrix, tol: RankTol) -> usize {
    svd(m).rank(tol)
}

/// Orthonormal basis (as columns) of the complement in `R^n` of the span of
/// the orthonormal columns of `basis`.
pub fn orthonormal_complement(basis: &Matrix, n: usize) -> Matrix {
    assert_eq!(basis.rows(), n, "orthonormal_complement: row mismatch");
    let mut cols: Vec<Vector> = basis.columns();
    let start = cols.len();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut cand = Vector::basis(n, e);
        for _ in 0..2 {
            for q in &cols {
                let d = q.dot(&cand);
                cand.axpy(-d, q);
            }
        }
        let len = cand.norm();
        if len > 1e-8 {
            cols.push(cand.scaled(1.0 / len));
        }
    }
    Matrix::from_columns(n, &cols[start..])
}

/// Orthonormal basis of the column space; a `rows x 0` matrix when empty.
pub fn range_basis(m: &Matrix, tol: RankTol) -> Matrix {
    let s = svd(m);
    let r = s.rank(tol);
    let idx: Vec<usize> = (0..r).collect();
    s.u.select_columns(&idx)
        .with_spaces(crate::Space::Any, m.codomain())
}

/// Orthonormal basis of the null space; a `cols x 0` matrix when empty.
pub fn kernel_basis(m: &Matrix, tol: RankTol) -> Matrix {
    let c = m.cols();
    if c == 0 {
        return Matrix::zeros(0, 0);
    }
    let s = svd(m);
    let r = s.rank(tol);
    let out = if s.v.cols() == c {
        let idx: Vec<usize> = (r..c).collect();
        s.v.select_columns(&idx)
    } else {
        let idx: Vec<usize> = (0..r).collect();
        orthonormal_complement(&s.v.select_columns(&idx), c)
    };
    out.with_spaces(crate::Space::Any, m.domain())
}

/// Moore-Penrose pseudo-inverse.
pub fn pinv(m: &Matrix, tol: RankTol) -> Matrix {
    let s = svd(m);
    let thr = tol.threshold(s.sigma_max());
    let mut out = Matrix::zeros(m.cols(), m.rows());
    for (k, &sigma) in s.singular_values.iter().enumerate() {
        if sigma <= thr {
            break;
        }
        let inv = 1.0 / sigma;
        for i in 0..m.cols() {
            let vik = s.v[(i, k)] * inv;
            if vik == 0.0 {
                continue;
            }
            for j in 0..m.rows() {
                out[(i, j)] += vik * s.u[(j, k)];
            }
        }
    }
    out.with_spaces(m.codomain(), m.domain())
}

/// Minimum-norm least-squares solution of `a x = b` and the residual norm.
pub fn solve_lstsq(a: &Matrix, b: &Vector) -> Result<(Vector, f64)> {
    if a.rows() != b.len() {
        return Err(Error::DimMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let x = pinv(a, RankTol::default()).mul_vec(b);
    let residual = a.mul_vec(&x).sub(b).norm();
    Ok((x, residual))
}

/// `||q - P P^T q||_F / ||q||_F` where `P` spans the range of `k`; zero when
/// `q` vanishes.
pub fn range_inclusion_residual(q: &Matrix, k: &Matrix, tol: RankTol) -> f64 {
    assert_eq!(q.rows(), k.rows(), "range_inclusion_residual: row mismatch");
    let qn = q.frobenius_norm();
    if qn == 0.0 {
        return 0.0;
    }
    let p = range_basis(k, tol);
    let proj = p.matmul(&p.transpose().matmul(q));
    q.sub(&proj).frobenius_norm() / qn
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &Svd) -> Matrix {
        let k = s.singular_values.len();
        let mut us = s.u.clone();
        for j in 0..k {
            for i in 0..us.rows() {
                us[(i, j)] *= s.singular_values[j];
            }
        }
        us.matmul(&s.v.transpose())
    }

    #[test]
    fn zero_matrix_has_zero_singular_values() {
        let s = svd(&Matrix::zeros(3, 2));
        assert_eq!(s.singular_values, [0.0, 0.0]);
        let utu = s.u.transpose().matmul(&s.u);
        assert!(utu.max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn diag_singular_values() {
        let s = svd(&Matrix::diag(&[3.0, 0.0]));
        assert_eq!(s.singular_values, [3.0, 0.0]);
    }

    #[test]
    fn permutation_singular_values() {
        let s = svd(&Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]));
        assert!((s.singular_values[0] - 1.0).abs() < 1e-15);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wide_and_tall_reconstruct() {
        let m = Matrix::from_rows(&[[1.0, 2.0, 3.0, -1.0], [0.5, -2.0, 1.0, 4.0]]);
        for a in [m.clone(), m.transpose()] {
            let s = svd(&a);
            assert!(reconstruct(&s).max_abs_diff(&a) < 1e-13);
            assert_eq!(s.singular_values.len(), 2);
        }
    }

    #[test]
    fn pinv_examples() {
        let inv = pinv(
            &Matrix::from_rows(&[[2.0, 1.0], [1.0, 1.0]]),
            RankTol::default(),
        );
        let expect = Matrix::from_rows(&[[1.0, -1.0], [-1.0, 2.0]]);
        assert!(inv.max_abs_diff(&expect) < 1e-14);

        let d = pinv(&Matrix::diag(&[2.0, 0.0]), RankTol::default());
        assert!(d.max_abs_diff(&Matrix::diag(&[0.5, 0.0])) < 1e-15);

        // normal equations: (a^T a)^{-1} a^T = [1 1] / 2
        let col = Matrix::from_rows(&[[1.0], [1.0]]);
        let p = pinv(&col, RankTol::default());
        assert!(p.max_abs_diff(&Matrix::from_rows(&[[0.5, 0.5]])) < 1e-15);

        assert_eq!(
            pinv(&Matrix::zeros(2, 3), RankTol::default()),
            Matrix::zeros(3, 2)
        );
    }

    #[test]
    fn lstsq_examples() {
        let b = Vector::from_slice(&[0.3, -1.0, 2.0]);
        let (x, r) = solve_lstsq(&Matrix::identity(3), &b).unwrap();
        assert!(x.sub(&b).norm() < 1e-15 && r < 1e-15);

        // projection of (0, 2) onto span(1, 1) is (1, 1)
        let (x, r) = solve_lstsq(
            &Matrix::from_rows(&[[1.0], [1.0]]),
            &Vector::from_slice(&[0.0, 2.0]),
        )
        .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);

        let (x, r) = solve_lstsq(&Matrix::zeros(1, 1), &Vector::from_slice(&[1.0])).unwrap();
        assert_eq!(x[0], 0.0);
        assert_eq!(r, 1.0);

        assert!(matches!(
            solve_lstsq(&Matrix::zeros(2, 2), &Vector::zeros(3)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn range_and_kernel_examples() {
        let tol = RankTol::default();
        let i3 = Matrix::identity(3);
        assert_eq!(range_basis(&i3, tol).cols(), 3);
        assert_eq!(kernel_basis(&i3, tol).cols(), 0);

        let z = Matrix::zeros(3, 3);
        assert_eq!(range_basis(&z, tol).cols(), 0);
        assert_eq!(kernel_basis(&z, tol).cols(), 3);

        let ones = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        assert_eq!(range_basis(&ones, tol).cols(), 1);
        let k = kernel_basis(&ones, tol);
        assert_eq!(k.cols(), 1);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let v = k.column(0);
        // sign is free
        assert!((v[0].abs() - h).abs() < 1e-15 && (v[0] + v[1]).abs() < 1e-15);
    }

    #[test]
    fn wide_kernel_uses_complement() {
        let m = Matrix::from_rows(&[[1.0, 0.0, 1.0]]);
        let k = kernel_basis(&m, RankTol::default());
        assert_eq!(k.cols(), 2);
        assert!(m.matmul(&k).max_abs() < 1e-15);
        let ktk = k.transpose().matmul(&k);
        assert!(ktk.max_abs_diff(&Matrix::identity(2)) < 1e-15);
    }

    #[test]
    fn range_inclusion() {
        let k = Matrix::diag(&[1.0, 1.0, 0.0]);
        let inside = Matrix::from_rows(&[[1.0, 2.0, 0.0], [0.0, 3.0, 1.0], [0.0, 0.0, 0.0]]);
        let outside = Matrix::identity(3);
        let tol = RankTol::default();
        assert!(range_inclusion_residual(&inside, &k, tol) < 1e-15);
        assert!(range_inclusion_residual(&outside, &k, tol) > 0.5);
        assert_eq!(range_inclusion_residual(&Matrix::zeros(3, 3), &k, tol), 0.0);
    }
}
