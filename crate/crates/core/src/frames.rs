//! Synthesis, analysis and frame operators of a finite family, with
//! optimal and verified (K-)b-frame bounds.

use crate::bilinear::BilinearMap;
use crate::family::{CoefficientFamily, VectorFamily};
use crate::linalg::{
    is_psd_spectrum, pencil_min_eigen, pinv, range_basis, range_inclusion_residual, svd, sym_eigen,
    Matrix, RankTol, Space, Vector,
};
use crate::{Error, Result, PSD_TOL, TIGHT_TOL};

/// Where the K-frame inequality is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    FullSpace,
    RangeOfK,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }
}

/// Outcome of [`FrameFamily::verify_frame`] / [`FrameFamily::verify_k_frame`].
///
/// `is_tight` and `is_parseval` qualify the inequality that was checked: the
/// plain frame inequality when `K` is absent, the K-frame one otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub bessel_bound: f64,
    pub lower_bound: f64,
    pub is_bessel: bool,
    pub is_frame: bool,
    pub is_k_frame: bool,
    pub is_tight: bool,
    pub is_parseval: bool,
    pub domain: Domain,
    /// `lambda_min(S - A K K^T)` restricted to `domain`.
    pub lower_margin: f64,
    /// `lambda_min(B I - S)` restricted to `domain`.
    pub upper_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub z_hat: Vector,
    /// `||z_hat - z|| / ||z||`, zero for `z = 0`.
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SInverseCheck {
    /// `1 / lambda_min(P^T S P)` with `P` spanning range(K).
    pub s_inv_norm: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEquivalence {
    pub complete_on_range: bool,
    /// Smallest nonzero squared singular value of `T`, the lower constant on ker(T)^perp.
    pub sigma_min_sq: f64,
    pub sigma_max_sq: f64,
    /// `A / ||K^+||^2`.
    pub lower_constant: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// True when `T` has a kernel, so the lower inequality cannot hold on all of `l2(H)`.
    pub has_kernel: bool,
    pub holds: bool,
}

/// A finite family in `B` over a bilinear map, with an optional operator
/// `K` on `Z` (absent means the identity).
#[derive(Debug, Clone)]
pub struct FrameFamily<'a> {
    bm: &'a BilinearMap,
    family: VectorFamily,
    k: Option<Matrix>,
}

fn psd_min(m: &Matrix) -> Result<f64> {
    if m.rows() == 0 {
        return Ok(0.0);
    }
    Ok(sym_eigen(&m.symmetrized())?.min())
}

fn psd_scale(s: &Matrix) -> Result<f64> {
    if s.rows() == 0 {
        return Ok(1.0);
    }
    Ok(sym_eigen(&s.symmetrized())?.max().abs().max(1.0))
}

impl<'a> FrameFamily<'a> {
    pub fn new(bm: &'a BilinearMap, family: VectorFamily) -> Result<Self> {
        if !Space::B.compatible(family.space()) {
            return Err(Error::SpaceMismatch {
                expected: Space::B,
                found: family.space(),
            });
        }
        if family.dim() != bm.dim_b() {
            return Err(Error::DimMismatch {
                expected: bm.dim_b(),
                found: family.dim(),
            });
        }
        Ok(FrameFamily {
            bm,
            family,
            k: None,
        })
    }

    pub fn with_k(mut self, k: Matrix) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::NonSquare {
                rows: k.rows(),
                cols: k.cols(),
            });
        }
        if k.rows() != self.bm.dim_z() {
            return Err(Error::DimMismatch {
                expected: self.bm.dim_z(),
                found: k.rows(),
            });
        }
        for s in [k.domain(), k.codomain()] {
            if !Space::Z.compatible(s) {
                return Err(Error::SpaceMismatch {
                    expected: Space::Z,
                    found: s,
                });
            }
        }
        self.k = Some(k.with_spaces(Space::Z, Space::Z));
        Ok(self)
    }

    pub fn map(&self) -> &'a BilinearMap {
        self.bm
    }

    pub fn family(&self) -> &VectorFamily {
        &self.family
    }

    pub fn k(&self) -> Option<&Matrix> {
        self.k.as_ref()
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// `K`, or the identity on `Z` when absent.
    pub fn k_or_identity(&self) -> Matrix {
        self.k
            .clone()
            .unwrap_or_else(|| Matrix::identity(self.bm.dim_z()).with_spaces(Space::Z, Space::Z))
    }

    fn kkt(&self) -> Matrix {
        self.k_or_identity().gram_rows()
    }

    /// `T {h_i} = sum_i b(h_i, x_i)`.
    pub fn synthesis(&self, c: &CoefficientFamily) -> Result<Vector> {
        if c.len() != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: c.len(),
            });
        }
        let mut out = Vector::zeros(self.bm.dim_z());
        for (h, x) in c.coeffs().iter().zip(self.family.iter()) {
            self.bm.eval_add(h, x, &mut out)?;
        }
        Ok(out)
    }

    /// `T^* z = { <z/x_i> }`.
    pub fn analysis(&self, z: &Vector) -> Result<CoefficientFamily> {
        let coeffs = self
            .family
            .iter()
            .map(|x| self.bm.dual_product(z, x))
            .collect::<Result<_>>()?;
        CoefficientFamily::new(self.bm.dim_h(), coeffs)
    }

    pub fn synthesis_matrix(&self) -> Matrix {
        self.bm
            .stacked_slices(&self.family)
            .expect("family validated at construction")
    }

    /// `S = T T^*`.
    pub fn frame_operator(&self) -> Matrix {
        self.synthesis_matrix().gram_rows()
    }

    /// `(lambda_min(S), lambda_max(S))`, the optimal plain b-frame bounds.
    pub fn optimal_bounds(&self) -> Bounds {
        let e = sym_eigen(&self.frame_operator()).expect("frame operator is symmetric");
        Bounds::new(e.min().max(0.0), e.max().max(0.0))
    }

    /// Largest `A` with `A K K^T <= S` on all of `Z`.
    pub fn optimal_k_lower_bound(&self) -> Result<f64> {
        pencil_min_eigen(&self.frame_operator(), &self.kkt(), RankTol::default())
    }

    /// Checks `A I <= S <= B I`, ignoring any `K`.
    pub fn verify_frame(&self, a: f64, b: f64) -> Result<FrameReport> {
        validate_bounds(a, b)?;
        let s = self.frame_operator();
        let eye = Matrix::identity(s.rows()).with_spaces(Space::Z, Space::Z);
        let mut r = sandwich(&s, &eye, a, b, None)?;
        r.is_k_frame = r.is_frame;
        r.is_tight = r.is_frame && is_tight(a, b);
        r.is_parseval = r.is_tight && is_tight(a, 1.0) && is_tight(b, 1.0);
        Ok(r)
    }

    /// Checks `A K K^T <= S <= B I` on all of `Z`.
    pub fn verify_k_frame(&self, a: f64, b: f64) -> Result<FrameReport> {
        self.verify_k_frame_on(a, b, Domain::FullSpace)
    }

    /// Same as [`FrameFamily::verify_k_frame`] with an explicit test domain.
    pub fn verify_k_frame_on(&self, a: f64, b: f64, domain: Domain) -> Result<FrameReport> {
        validate_bounds(a, b)?;
        let s = self.frame_operator();
        let p = match domain {
            Domain::FullSpace => None,
            Domain::RangeOfK => Some(range_basis(&self.k_or_identity(), RankTol::default())),
        };
        check_k_inequalities(&s, &self.kkt(), a, b, p.as_ref())
    }

    /// `S S^+ z`, i.e. `sum_i b(<S^+ z/x_i>, x_i)`.
    pub fn reconstruct(&self, z: &Vector) -> Result<Reconstruction> {
        if z.len() != self.bm.dim_z() {
            return Err(Error::DimMismatch {
                expected: self.bm.dim_z(),
                found: z.len(),
            });
        }
        let s_pinv = pinv(&self.frame_operator(), RankTol::default());
        let z_hat = self.synthesis(&self.analysis(&s_pinv.mul_vec(z))?)?;
        let zn = z.norm();
        let relative_residual = if zn == 0.0 {
            z_hat.norm()
        } else {
            z_hat.sub(z).norm() / zn
        };
        Ok(Reconstruction {
            z_hat,
            relative_residual,
        })
    }

    /// Checks `1/B <= ||S_r^{-1}|| <= ||K^+||^2 / A` where `S_r` is `S`
    /// compressed to range(K).
    pub fn s_inverse_bounds_check(&self, a: f64, b: f64) -> Result<SInverseCheck> {
        let report = self.verify_k_frame(a, b)?;
        if !report.is_k_frame {
            return Err(Error::NotKFrame);
        }
        let k = self.k_or_identity();
        let p = range_basis(&k, RankTol::default());
        if p.cols() == 0 {
            return Err(Error::SingularOnRange);
        }
        let s = self.frame_operator();
        let sr = p.transpose().matmul(&s).matmul(&p);
        let lmin = psd_min(&sr)?;
        if lmin <= PSD_TOL * psd_scale(&s)? {
            return Err(Error::SingularOnRange);
        }
        let s_inv_norm = 1.0 / lmin;
        let k_pinv_norm = svd(&pinv(&k, RankTol::default())).sigma_max();
        let lower = 1.0 / b;
        let upper = if a > 0.0 {
            k_pinv_norm * k_pinv_norm / a
        } else {
            f64::INFINITY
        };
        let slack = |x: f64| PSD_TOL * x.abs().max(1.0);
        let holds = s_inv_norm >= lower - slack(lower) && s_inv_norm <= upper + slack(s_inv_norm);
        Ok(SInverseCheck {
            s_inv_norm,
            lower,
            upper,
            holds,
        })
    }

    /// `||K||^-4 ||T^+||^-2 ||K^+||^-2`, a valid K-frame lower bound whenever
    /// `T` maps onto range(K). `+inf` when `K = 0`.
    pub fn lower_bound_certificate(&self) -> Result<f64> {
        let k = self.k_or_identity();
        let t = self.synthesis_matrix();
        if range_inclusion_residual(&k, &t, RankTol::default()) > 1e-8 {
            return Err(Error::NotSurjectiveOnRange);
        }
        let k_norm = svd(&k).sigma_max();
        if k_norm == 0.0 {
            return Ok(f64::INFINITY);
        }
        let t_pinv = svd(&pinv(&t, RankTol::default())).sigma_max();
        let k_pinv = svd(&pinv(&k, RankTol::default())).sigma_max();
        Ok(1.0 / (k_norm * k_norm * k_norm * k_norm * t_pinv * t_pinv * k_pinv * k_pinv))
    }

    /// Checks b-completeness on range(K) and
    /// `A/||K^+||^2 sum ||h_i||^2 <= ||T {h_i}||^2 <= B sum ||h_i||^2`,
    /// the left side on ker(T)^perp only.
    pub fn completeness_norm_equivalence(&self, a: f64, b: f64) -> Result<NormEquivalence> {
        let report = self.verify_k_frame(a, b)?;
        let k = self.k_or_identity();
        let p = range_basis(&k, RankTol::default());
        let t = self.synthesis_matrix();
        let complete_on_range = if p.cols() == 0 {
            true
        } else {
            svd(&t.transpose().matmul(&p)).rank(RankTol::default()) == p.cols()
        };
        let ts = svd(&t);
        let r = ts.rank(RankTol::default());
        let sigma_max_sq = ts.sigma_max() * ts.sigma_max();
        let sigma_min_sq = if r == 0 {
            0.0
        } else {
            ts.singular_values[r - 1] * ts.singular_values[r - 1]
        };
        let k_pinv = svd(&pinv(&k, RankTol::default())).sigma_max();
        let lower_constant = if k_pinv == 0.0 {
            0.0
        } else {
            a / (k_pinv * k_pinv)
        };
        let lower_holds =
            r > 0 && sigma_min_sq >= lower_constant - PSD_TOL * lower_constant.max(1.0);
        let upper_holds = sigma_max_sq <= b + PSD_TOL * b.max(1.0);
        Ok(NormEquivalence {
            complete_on_range,
            sigma_min_sq,
            sigma_max_sq,
            lower_constant,
            lower_holds,
            upper_holds,
            has_kernel: r < t.cols(),
            holds: report.is_k_frame && complete_on_range && lower_holds && upper_holds,
        })
    }
}

fn validate_bounds(a: f64, b: f64) -> Result<()> {
    if !(0.0 <= a && a <= b && b.is_finite()) {
        return Err(Error::InvalidBounds { lower: a, upper: b });
    }
    Ok(())
}

fn is_tight(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIGHT_TOL * b.abs().max(1.0)
}

/// Core sandwich test `A m <= s <= B I`, optionally compressed to the
/// columns of `p`. Does not require `A <= B`.
fn sandwich(s: &Matrix, m: &Matrix, a: f64, b: f64, p: Option<&Matrix>) -> Result<FrameReport> {
    let scale = psd_scale(s)?.max(b.abs()).max((a * psd_scale(m)?).abs());
    let n = s.rows();
    let eye = Matrix::identity(n).with_spaces(Space::Z, Space::Z);
    let s = s.clone().with_spaces(Space::Z, Space::Z);
    let m = m.clone().with_spaces(Space::Z, Space::Z);
    let compress = |x: Matrix| match p {
        Some(p) => p.transpose().matmul(&x).matmul(p),
        None => x,
    };
    let lower_margin = psd_min(&compress(s.sub(&m.scaled(a))))?;
    let upper_margin = psd_min(&compress(eye.scaled(b).sub(&s)))?;
    let tol = PSD_TOL * scale;
    let is_bessel = upper_margin >= -tol;
    let lower_ok = lower_margin >= -tol;
    let plain_lower = a > 0.0 && psd_min(&compress(s.sub(&eye.scaled(a))))? >= -tol;
    Ok(FrameReport {
        bessel_bound: b,
        lower_bound: a,
        is_bessel,
        is_frame: is_bessel && plain_lower,
        is_k_frame: is_bessel && lower_ok,
        is_tight: false,
        is_parseval: false,
        domain: if p.is_some() {
            Domain::RangeOfK
        } else {
            Domain::FullSpace
        },
        lower_margin,
        upper_margin,
    })
}

/// `A K K^T <= S <= B I` where `kkt = K K^T`, with tight/Parseval flags
/// referring to the K-frame inequality.
pub(crate) fn check_k_inequalities(
    s: &Matrix,
    kkt: &Matrix,
    a: f64,
    b: f64,
    p: Option<&Matrix>,
) -> Result<FrameReport> {
    let mut r = sandwich(s, kkt, a, b, p)?;
    r.is_tight = r.is_k_frame && is_tight(a, b);
    r.is_parseval = r.is_tight && is_tight(a, 1.0) && is_tight(b, 1.0);
    Ok(r)
}

/// True when `lambda_min(m) >= -PSD_TOL * max(1, lambda_max(m))`.
pub fn is_psd(m: &Matrix) -> Result<bool> {
    let e = sym_eigen(&m.symmetrized())?;
    Ok(is_psd_spectrum(&e.values, PSD_TOL))
}
