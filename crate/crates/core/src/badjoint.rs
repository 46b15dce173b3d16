//! The b-adjoint: for `U` on `B`, the operator `V` on `Z` with
//! `<V z/x> = <z/U x>` for every `z` and `x`.

use alloc::vec::Vec;

use crate::bilinear::BilinearMap;
use crate::family::VectorFamily;
use crate::linalg::{pinv, svd, Matrix, RankTol, Space, Vector};
use crate::{Error, Result};

/// Tolerance on `B_{x_j}^T B_{x_i} - delta_ij I` accepted as b-orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// Default relative residual above which the reverse problem is infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOnB(Matrix);

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOnZ(Matrix);

macro_rules! square_operator {
    ($ty:ident, $space:expr) => {
        impl $ty {
            pub fn new(m: Matrix, dim: usize) -> Result<Self> {
                if !m.is_square() {
                    return Err(Error::NonSquare {
                        rows: m.rows(),
                        cols: m.cols(),
                    });
                }
                if m.rows() != dim {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        found: m.rows(),
                    });
                }
                for s in [m.domain(), m.codomain()] {
                    if !$space.compatible(s) {
                        return Err(Error::SpaceMismatch {
                            expected: $space,
                            found: s,
                        });
                    }
                }
                Ok($ty(m.with_spaces($space, $space)))
            }

            pub fn matrix(&self) -> &Matrix {
                &self.0
            }

            pub fn into_matrix(self) -> Matrix {
                self.0
            }

            pub fn apply(&self, v: &Vector) -> Result<Vector> {
                self.0.try_mul_vec(v)
            }
        }
    };
}

square_operator!(OperatorOnB, Space::B);
square_operator!(OperatorOnZ, Space::Z);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    /// The stacked system is rank deficient; the minimum-norm member is returned.
    AffineFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointSolution {
    pub v: OperatorOnZ,
    /// Frobenius norm of the stacked defect `A V - C`.
    pub residual: f64,
    pub uniqueness: Uniqueness,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReverseSolution {
    /// Minimum-norm least-squares `U`, reported even when infeasible.
    pub u: OperatorOnB,
    pub residual: f64,
    pub feasible: bool,
    pub uniqueness: Uniqueness,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCheck {
    /// `||V^*||`.
    pub lhs: f64,
    /// `beta_upper * ||U|| * sum ||x_i||`.
    pub rhs: f64,
    pub holds: bool,
}

fn require_orthonormal(bm: &BilinearMap, basis: &VectorFamily) -> Result<()> {
    let o = bm.is_b_orthonormal(basis, ORTHONORMAL_TOL)?;
    match o.violations.first() {
        Some(w) => Err(Error::NotBOrthonormal {
            i: w.i,
            j: w.j,
            residual: w.residual.max_abs(),
        }),
        None => Ok(()),
    }
}

fn check_u(bm: &BilinearMap, u: &OperatorOnB) -> Result<()> {
    if u.matrix().rows() != bm.dim_b() {
        return Err(Error::DimMismatch {
            expected: bm.dim_b(),
            found: u.matrix().rows(),
        });
    }
    Ok(())
}

/// `V = sum_i B_{x_i} B_{U x_i}^T` for a b-orthonormal spanning basis.
pub fn b_adjoint_from_basis(
    bm: &BilinearMap,
    basis: &VectorFamily,
    u: &OperatorOnB,
) -> Result<OperatorOnZ> {
    check_u(bm, u)?;
    require_orthonormal(bm, basis)?;
    if !bm.is_b_complete(basis, RankTol::default())? {
        return Err(Error::NotSpanning);
    }
    let mut v = Matrix::zeros(bm.dim_z(), bm.dim_z()).with_spaces(Space::Z, Space::Z);
    for x in basis.iter() {
        let ux = u.apply(x)?;
        v = v.add(&bm.slice(x)?.matmul(&bm.slice(&ux)?.transpose()));
    }
    OperatorOnZ::new(v, bm.dim_z())
}

/// `[B_{f_1}^T; ...; B_{f_n}^T]` over the canonical basis of `B`.
fn stacked_canonical(bm: &BilinearMap) -> Result<Matrix> {
    let mut a = Matrix::zeros(0, bm.dim_z());
    for j in 0..bm.dim_b() {
        a = a.vstack(
            &bm.slice(&Vector::basis(bm.dim_b(), j))?
                .transpose()
                .with_spaces(Space::Any, Space::Any),
        );
    }
    Ok(a)
}

/// Least-squares solution of `B_{f_j}^T V = B_{U f_j}^T` for every canonical `f_j`.
pub fn solve_b_adjoint(bm: &BilinearMap, u: &OperatorOnB, tol: f64) -> Result<AdjointSolution> {
    check_u(bm, u)?;
    let a = stacked_canonical(bm)?;
    let mut c = Matrix::zeros(0, bm.dim_z());
    for j in 0..bm.dim_b() {
        let uf = u.matrix().column(j);
        c = c.vstack(
            &bm.slice(&uf)?
                .transpose()
                .with_spaces(Space::Any, Space::Any),
        );
    }
    let v = pinv(&a, RankTol::default()).matmul(&c);
    let residual = a.matmul(&v).sub(&c).frobenius_norm();
    let uniqueness = if svd(&a).rank(RankTol::default()) == bm.dim_z() {
        Uniqueness::Unique
    } else {
        Uniqueness::AffineFamily
    };
    Ok(AdjointSolution {
        feasible: residual <= tol * c.frobenius_norm().max(1.0),
        v: OperatorOnZ::new(v, bm.dim_z())?,
        residual,
        uniqueness,
    })
}

/// Searches `U` with `B_{f_j}^T V = B_{U f_j}^T` for all `j`.
///
/// Column `j` of `U` only enters block `j`, so each column is an
/// independent least-squares problem against the vectorized canonical
/// slice adjoints. Infeasible when the residual exceeds
/// `tol * max(1, ||V||_F)`.
pub fn solve_reverse(bm: &BilinearMap, v: &OperatorOnZ, tol: f64) -> Result<ReverseSolution> {
    let (nb, nz) = (bm.dim_b(), bm.dim_z());
    if v.matrix().rows() != nz {
        return Err(Error::DimMismatch {
            expected: nz,
            found: v.matrix().rows(),
        });
    }
    let adj: Vec<Matrix> = (0..nb)
        .map(|l| bm.slice(&Vector::basis(nb, l)).map(|s| s.transpose()))
        .collect::<Result<_>>()?;
    let block = adj[0].rows() * adj[0].cols();
    let cols: Vec<Vector> = adj
        .iter()
        .map(|m| Vector::from_slice(m.as_slice()))
        .collect();
    let g = Matrix::from_columns(block, &cols);
    let g_pinv = pinv(&g, RankTol::default());

    let mut u = Matrix::zeros(nb, nb);
    let mut res_sq = 0.0;
    for (j, aj) in adj.iter().enumerate() {
        let rhs = Vector::from_slice(aj.matmul(v.matrix()).as_slice());
        let col = g_pinv.mul_vec(&rhs);
        res_sq += g.mul_vec(&col).sub(&rhs).norm_sq();
        for l in 0..nb {
            u[(l, j)] = col[l];
        }
    }
    let residual = libm::sqrt(res_sq);
    let uniqueness = if svd(&g).rank(RankTol::default()) == nb {
        Uniqueness::Unique
    } else {
        Uniqueness::AffineFamily
    };
    Ok(ReverseSolution {
        u: OperatorOnB::new(u, nb)?,
        residual,
        feasible: residual <= tol * v.matrix().frobenius_norm().max(1.0),
        uniqueness,
    })
}

/// Checks `||V^*|| <= beta_upper ||U|| sum ||x_i||` with
/// `V^* = sum_i B_{U x_i} B_{x_i}^T`.
pub fn v_star_norm_check(
    bm: &BilinearMap,
    basis: &VectorFamily,
    u: &OperatorOnB,
) -> Result<NormCheck> {
    check_u(bm, u)?;
    require_orthonormal(bm, basis)?;
    let mut vs = Matrix::zeros(bm.dim_z(), bm.dim_z()).with_spaces(Space::Z, Space::Z);
    for x in basis.iter() {
        vs = vs.add(&bm.slice(&u.apply(x)?)?.matmul(&bm.slice(x)?.transpose()));
    }
    let lhs = svd(&vs).sigma_max();
    let sum_x: f64 = basis.iter().map(Vector::norm).sum();
    let rhs = bm.bound_constants().beta_upper * svd(u.matrix()).sigma_max() * sum_x;
    Ok(NormCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12 * rhs.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    fn op_b(rows: &[[f64; 2]]) -> OperatorOnB {
        OperatorOnB::new(Matrix::from_rows(rows), 2).unwrap()
    }

    #[test]
    fn e6_from_basis() {
        let g = golden::e6();
        let f = g.family("f");
        let id = b_adjoint_from_basis(&g.map, f, &op_b(&[[1., 0.], [0., 1.]])).unwrap();
        assert!(id.matrix().max_abs_diff(&Matrix::identity(4)) < 1e-15);
        let zero = b_adjoint_from_basis(&g.map, f, &op_b(&[[0., 0.], [0., 0.]])).unwrap();
        assert_eq!(zero.matrix().max_abs(), 0.0);

        let swap = OperatorOnB::new(g.operator("U").unwrap().clone(), 2).unwrap();
        let v = b_adjoint_from_basis(&g.map, f, &swap).unwrap();
        let z = Vector::from_slice(&[1., 2., 3., 4.]);
        assert_eq!(v.apply(&z).unwrap().as_slice(), &[3., 4., 1., 2.]);
        for x in f.iter() {
            for k in 0..4 {
                let z = Vector::basis(4, k);
                let lhs = g.map.dual_product(&v.apply(&z).unwrap(), x).unwrap();
                let rhs = g.map.dual_product(&z, &swap.apply(x).unwrap()).unwrap();
                assert!(lhs.sub(&rhs).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn from_basis_rejects_non_orthonormal() {
        let g = golden::e1();
        let u = OperatorOnB::new(g.operator("U").unwrap().clone(), 2).unwrap();
        assert!(matches!(
            b_adjoint_from_basis(&g.map, g.family("X"), &u),
            Err(Error::NotBOrthonormal { .. })
        ));
    }

    #[test]
    fn from_basis_rejects_non_spanning() {
        let g = golden::e6();
        let half = VectorFamily::in_b(2, &[[1., 0.]]).unwrap();
        assert_eq!(
            b_adjoint_from_basis(&g.map, &half, &op_b(&[[1., 0.], [0., 1.]])),
            Err(Error::NotSpanning)
        );
    }

    #[test]
    fn e1_adjoint_satisfies_the_defining_relation() {
        // <z/Ux> = x1 (z1 + z2) e1 + x1 z3 e2 forces V z = (z1 + z2, 0, z3)
        let g = golden::e1();
        let u = OperatorOnB::new(g.operator("U").unwrap().clone(), 2).unwrap();
        let s = solve_b_adjoint(&g.map, &u, 1e-12).unwrap();
        let expect = Matrix::from_rows(&[[1., 1., 0.], [0., 0., 0.], [0., 0., 1.]]);
        assert!(s.v.matrix().max_abs_diff(&expect) < 1e-12);
        assert!(s.residual <= 1e-12 && s.feasible);
        assert_eq!(s.uniqueness, Uniqueness::Unique);
    }

    #[test]
    fn identity_round_trips() {
        for g in [
            golden::e1(),
            golden::e2(),
            golden::e4(),
            golden::e5(),
            golden::e6(),
        ] {
            let nb = g.map.dim_b();
            let nz = g.map.dim_z();
            let id = OperatorOnB::new(Matrix::identity(nb), nb).unwrap();
            let s = solve_b_adjoint(&g.map, &id, 1e-12).unwrap();
            assert!(s.residual < 1e-12);
            let vid = OperatorOnZ::new(Matrix::identity(nz), nz).unwrap();
            let r = solve_reverse(&g.map, &vid, FEASIBILITY_TOL).unwrap();
            assert!(r.feasible && r.residual < 1e-12, "{}", g.name);
        }
    }

    #[test]
    fn e6_solver_matches_basis_construction() {
        let g = golden::e6();
        let swap = OperatorOnB::new(g.operator("U").unwrap().clone(), 2).unwrap();
        let a = b_adjoint_from_basis(&g.map, g.family("f"), &swap).unwrap();
        let b = solve_b_adjoint(&g.map, &swap, 1e-12).unwrap();
        assert!(a.matrix().max_abs_diff(b.v.matrix()) < 1e-12);
        assert_eq!(b.uniqueness, Uniqueness::Unique);
    }

    #[test]
    fn e5_reverse_is_infeasible() {
        let g = golden::e5();
        let v = OperatorOnZ::new(g.operator("V").unwrap().clone(), 4).unwrap();
        let r = solve_reverse(&g.map, &v, FEASIBILITY_TOL).unwrap();
        assert!(!r.feasible);
        assert!(r.residual > 0.1);
    }

    #[test]
    fn v_star_bound() {
        let g = golden::e6();
        let swap = OperatorOnB::new(g.operator("U").unwrap().clone(), 2).unwrap();
        let c = v_star_norm_check(&g.map, g.family("f"), &swap).unwrap();
        assert!(c.holds && (c.lhs - 1.0).abs() < 1e-12 && (c.rhs - 2.0).abs() < 1e-10);
        let c = v_star_norm_check(&g.map, g.family("f"), &op_b(&[[0., 0.], [0., 0.]])).unwrap();
        assert!(c.holds && c.lhs == 0.0 && c.rhs == 0.0);
    }

    #[test]
    fn operator_shape_checks() {
        assert!(matches!(
            OperatorOnB::new(Matrix::zeros(2, 3), 2),
            Err(Error::NonSquare { .. })
        ));
        assert!(matches!(
            OperatorOnZ::new(Matrix::identity(2).with_spaces(Space::B, Space::B), 2),
            Err(Error::SpaceMismatch { .. })
        ));
    }
}
