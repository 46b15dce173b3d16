//! The bilinear map `b: H x B -> Z` and the b-dual product.
//!
//! In the canonical bases `e_i` of `H`, `f_j` of `B` and `u_k` of `Z` the map
//! is fixed by its structure tensor, `b(e_i, f_j) = sum_k c[i][j][k] u_k`.
//! The slice `B_x: h -> b(h, x)` is a `Z x H` matrix and the b-dual product
//! `<z/x>` is `B_x^T z`, the unique `H`-vector with
//! `<b(h, x), z>_Z = <h, <z/x>>_H` for every `h`.

use alloc::vec::Vec;

use crate::family::{CoefficientFamily, VectorFamily};
use crate::linalg::{pinv, svd, sym_eigen, Matrix, RankTol, Space, Vector};
use crate::{rng, Error, Result};

const RESTARTS: usize = 50;
const ITERATIONS: usize = 200;
const ALT_TOL: f64 = 1e-12;
const ALT_SEED: u64 = 0x5EED_B1F0;

/// Norm constants of a bilinear map.
///
/// The true constants `M = sup ||b(h,x)||` and `m = inf ||b(h,x)||` over unit
/// `h`, `x` sit inside `m_lower <= m <= m_upper` and
/// `beta_lower <= M <= beta_upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    /// Largest singular value of the flattening; a certified upper bound.
    pub beta_upper: f64,
    /// Best value reached by alternating maximisation; attained, so a lower bound.
    pub beta_lower: f64,
    /// Best value reached by alternating minimisation; attained, so an upper bound on `m`.
    pub m_upper: f64,
    /// Smallest singular value of the flattening when it is injective, else 0.
    pub m_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearMap {
    dim_h: usize,
    dim_b: usize,
    dim_z: usize,
    /// `c[i][j][k]` at `(i * dim_b + j) * dim_z + k`.
    coeffs: Vec<f64>,
    constants: BoundConstants,
}

/// A pair `(i, j)` violating `B_{x_j}^T B_{x_i} = delta_ij I`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalityViolation {
    pub i: usize,
    pub j: usize,
    /// `B_{x_j}^T B_{x_i} - delta_ij I`, so that `residual * h` is `<b(h, x_i)/x_j> - delta_ij h`.
    pub residual: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orthonormality {
    pub holds: bool,
    pub max_residual: f64,
    pub violations: Vec<OrthonormalityViolation>,
}

/// Coefficients of `z` against a b-complete family.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub coeffs: CoefficientFamily,
    /// `||z - sum_i b(h_i, x_i)||`.
    pub residual: f64,
    /// True when the coefficients came from the dual products of a b-orthonormal family.
    pub orthonormal: bool,
}

impl BilinearMap {
    /// Builds the map from its flat structure tensor and computes its
    /// [`BoundConstants`].
    pub fn new(dim_h: usize, dim_b: usize, dim_z: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim_h == 0 || dim_b == 0 || dim_z == 0 {
            return Err(Error::ZeroDimension);
        }
        if coeffs.len() != dim_h * dim_b * dim_z {
            return Err(Error::DimMismatch {
                expected: dim_h * dim_b * dim_z,
                found: coeffs.len(),
            });
        }
        let mut bm = BilinearMap {
            dim_h,
            dim_b,
            dim_z,
            coeffs,
            constants: BoundConstants {
                beta_upper: 0.0,
                beta_lower: 0.0,
                m_upper: 0.0,
                m_lower: 0.0,
            },
        };
        bm.constants = bm.compute_constants();
        Ok(bm)
    }

    /// Builds the map from the images `b(e_i, f_j)`.
    pub fn from_images(
        dim_h: usize,
        dim_b: usize,
        dim_z: usize,
        mut image: impl FnMut(usize, usize) -> Vector,
    ) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(dim_h * dim_b * dim_z);
        for i in 0..dim_h {
            for j in 0..dim_b {
                let v = image(i, j);
                if v.len() != dim_z {
                    return Err(Error::DimMismatch {
                        expected: dim_z,
                        found: v.len(),
                    });
                }
                coeffs.extend_from_slice(v.as_slice());
            }
        }
        Self::new(dim_h, dim_b, dim_z, coeffs)
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim_z(&self) -> usize {
        self.dim_z
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs[(i * self.dim_b + j) * self.dim_z + k]
    }

    fn image(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.dim_b + j) * self.dim_z;
        &self.coeffs[start..start + self.dim_z]
    }

    pub fn bound_constants(&self) -> BoundConstants {
        self.constants
    }

    fn check_len(expected: usize, v: &Vector) -> Result<()> {
        if v.len() != expected {
            return Err(Error::DimMismatch {
                expected,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, h: &Vector, x: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.dim_z);
        self.eval_add(h, x, &mut out)?;
        Ok(out)
    }

    /// `out += b(h, x)`.
    pub(crate) fn eval_add(&self, h: &Vector, x: &Vector, out: &mut Vector) -> Result<()> {
        Self::check_len(self.dim_h, h)?;
        Self::check_len(self.dim_b, x)?;
        Self::check_len(self.dim_z, out)?;
        for i in 0..self.dim_h {
            for j in 0..self.dim_b {
                let w = h[i] * x[j];
                if w == 0.0 {
                    continue;
                }
                for (o, c) in out.as_mut_slice().iter_mut().zip(self.image(i, j)) {
                    *o += w * c;
                }
            }
        }
        Ok(())
    }

    /// The `Z x H` matrix of `h -> b(h, x)`.
    pub fn slice(&self, x: &Vector) -> Result<Matrix> {
        Self::check_len(self.dim_b, x)?;
        let mut m = Matrix::zeros(self.dim_z, self.dim_h);
        for i in 0..self.dim_h {
            for j in 0..self.dim_b {
                let xj = x[j];
                if xj == 0.0 {
                    continue;
                }
                for (k, c) in self.image(i, j).iter().enumerate() {
                    m[(k, i)] += xj * c;
                }
            }
        }
        Ok(m.with_spaces(Space::H, Space::Z))
    }

    /// The `Z x B` matrix of `x -> b(h, x)`.
    pub fn slice_h(&self, h: &Vector) -> Result<Matrix> {
        Self::check_len(self.dim_h, h)?;
        let mut m = Matrix::zeros(self.dim_z, self.dim_b);
        for i in 0..self.dim_h {
            let hi = h[i];
            if hi == 0.0 {
                continue;
            }
            for j in 0..self.dim_b {
                for (k, c) in self.image(i, j).iter().enumerate() {
                    m[(k, j)] += hi * c;
                }
            }
        }
        Ok(m.with_spaces(Space::B, Space::Z))
    }

    /// The b-dual product `<z/x>`.
    pub fn dual_product(&self, z: &Vector, x: &Vector) -> Result<Vector> {
        Self::check_len(self.dim_z, z)?;
        Self::check_len(self.dim_b, x)?;
        // entry i is sum_j x_j <b(e_i, f_j), z>, without forming the slice
        let mut out = Vector::zeros(self.dim_h);
        for i in 0..self.dim_h {
            let mut acc = 0.0;
            for j in 0..self.dim_b {
                if x[j] != 0.0 {
                    let d: f64 = self
                        .image(i, j)
                        .iter()
                        .zip(z.iter())
                        .map(|(c, zk)| c * zk)
                        .sum();
                    acc += x[j] * d;
                }
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// `Z x (H*B)` matrix whose column `i * dim_b + j` is `b(e_i, f_j)`.
    pub fn flattening(&self) -> Matrix {
        let cols = self.dim_h * self.dim_b;
        let mut m = Matrix::zeros(self.dim_z, cols);
        for col in 0..cols {
            let start = col * self.dim_z;
            for k in 0..self.dim_z {
                m[(k, col)] = self.coeffs[start + k];
            }
        }
        m
    }

    fn check_family(&self, fam: &VectorFamily) -> Result<()> {
        if !Space::B.compatible(fam.space()) {
            return Err(Error::SpaceMismatch {
                expected: Space::B,
                found: fam.space(),
            });
        }
        if fam.dim() != self.dim_b {
            return Err(Error::DimMismatch {
                expected: self.dim_b,
                found: fam.dim(),
            });
        }
        Ok(())
    }

    /// `[B_{x_1} | ... | B_{x_n}]`, the synthesis matrix `l2(H) -> Z` of `fam`.
    pub fn stacked_slices(&self, fam: &VectorFamily) -> Result<Matrix> {
        self.check_family(fam)?;
        let n = fam.len();
        let mut t = Matrix::zeros(self.dim_z, n * self.dim_h);
        for (f, x) in fam.iter().enumerate() {
            let s = self.slice(x)?;
            for k in 0..self.dim_z {
                for i in 0..self.dim_h {
                    t[(k, f * self.dim_h + i)] = s[(k, i)];
                }
            }
        }
        Ok(t.with_spaces(Space::L2H, Space::Z))
    }

    /// Checks `<b(h, x_i)/x_j> = delta_ij h` for all `h` as the matrix identity
    /// `B_{x_j}^T B_{x_i} = delta_ij I`.
    pub fn is_b_orthonormal(&self, fam: &VectorFamily, tol: f64) -> Result<Orthonormality> {
        self.check_family(fam)?;
        let slices: Vec<Matrix> = fam.iter().map(|x| self.slice(x)).collect::<Result<_>>()?;
        let eye = Matrix::identity(self.dim_h).with_spaces(Space::H, Space::H);
        let mut out = Orthonormality {
            holds: true,
            max_residual: 0.0,
            violations: Vec::new(),
        };
        for (i, si) in slices.iter().enumerate() {
            for (j, sj) in slices.iter().enumerate() {
                let mut g = sj.transpose().matmul(si);
                if i == j {
                    g = g.sub(&eye);
                }
                let r = g.max_abs();
                out.max_residual = out.max_residual.max(r);
                if r > tol {
                    out.holds = false;
                    out.violations
                        .push(OrthonormalityViolation { i, j, residual: g });
                }
            }
        }
        Ok(out)
    }

    /// True iff `<z/x_i> = 0` for all `i` forces `z = 0`, i.e. the stacked
    /// slice adjoints have rank `dim_z`.
    pub fn is_b_complete(&self, fam: &VectorFamily, tol: RankTol) -> Result<bool> {
        let t = self.stacked_slices(fam)?;
        if t.cols() == 0 {
            return Ok(false);
        }
        Ok(svd(&t).rank(tol) == self.dim_z)
    }

    /// Coefficients `{h_i}` with `z = sum_i b(h_i, x_i)`.
    ///
    /// For a b-orthonormal family these are the dual products `<z/x_i>`;
    /// otherwise the minimum-norm least-squares solution through the
    /// synthesis matrix.
    pub fn expand_in_b_basis(
        &self,
        basis: &VectorFamily,
        z: &Vector,
        tol: f64,
    ) -> Result<Expansion> {
        Self::check_len(self.dim_z, z)?;
        if !self.is_b_complete(basis, RankTol::default())? {
            return Err(Error::NotComplete);
        }
        let t = self.stacked_slices(basis)?;
        let orthonormal = self.is_b_orthonormal(basis, tol)?.holds;
        let coeffs = if orthonormal {
            let cs = basis
                .iter()
                .map(|x| self.dual_product(z, x))
                .collect::<Result<Vec<_>>>()?;
            CoefficientFamily::new(self.dim_h, cs)?
        } else {
            let stacked = pinv(&t, RankTol::default()).mul_vec(z);
            CoefficientFamily::from_stacked(self.dim_h, &stacked)
        };
        let residual = t.mul_vec(&coeffs.stacked()).sub(z).norm();
        Ok(Expansion {
            coeffs,
            residual,
            orthonormal,
        })
    }

    fn compute_constants(&self) -> BoundConstants {
        let flat = svd(&self.flattening());
        let beta_upper = flat.sigma_max();
        let m_lower = if self.dim_h * self.dim_b <= self.dim_z {
            flat.singular_values.last().copied().unwrap_or(0.0)
        } else {
            0.0
        };
        let beta_lower = self.alternating(true);
        let m_upper = self.alternating(false);
        BoundConstants {
            beta_upper,
            beta_lower: beta_lower.min(beta_upper),
            m_upper: m_upper.max(m_lower),
            m_lower,
        }
    }

    /// Alternating optimisation of `||b(h, x)||` over unit `h`, `x`: each step
    /// is an exact extreme singular direction of one slice.
    fn alternating(&self, maximise: bool) -> f64 {
        let mut rng = rng::seeded(ALT_SEED);
        let mut best = if maximise { 0.0 } else { f64::INFINITY };
        for _ in 0..RESTARTS {
            let mut x = rng::unit_vector(&mut rng, self.dim_b);
            let mut prev = f64::NAN;
            for _ in 0..ITERATIONS {
                let h = extreme_direction(&self.slice(&x).expect("dims"), maximise);
                x = extreme_direction(&self.slice_h(&h).expect("dims"), maximise);
                let val = self.eval(&h, &x).expect("dims").norm();
                let done = (val - prev).abs() <= ALT_TOL * val.max(1.0);
                prev = val;
                if done {
                    break;
                }
            }
            best = if maximise {
                best.max(prev)
            } else {
                best.min(prev)
            };
        }
        best
    }
}

/// Unit right singular vector of `a` for its largest (or smallest, counting
/// the kernel) singular value.
fn extreme_direction(a: &Matrix, largest: bool) -> Vector {
    let gram = a.transpose().matmul(a);
    let e = sym_eigen(&gram.symmetrized()).expect("gram matrix is symmetric");
    let idx = if largest { e.values.len() - 1 } else { 0 };
    e.vectors.column(idx)
}
