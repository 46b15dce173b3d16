//! Transfers of frame properties: summed families, range-inclusion
//! (Douglas) transfer, the intertwiner `Omega`, and families moved by an
//! operator on `B`.
//!
//! Every routine measures what actually happens and reports it next to the
//! bound it was expected to satisfy; none of them assume the claim.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::badjoint::{b_adjoint_from_basis, OperatorOnB, ORTHONORMAL_TOL};
use crate::bilinear::BilinearMap;
use crate::family::{CoefficientFamily, VectorFamily};
use crate::frames::{check_k_inequalities, Bounds, FrameFamily};
use crate::linalg::{
    pencil_min_eigen, pinv, range_basis, range_inclusion_residual, svd, sym_eigen, Matrix, RankTol,
    Space,
};
use crate::{rng, Error, Result, PSD_TOL};

/// Relative residual above which a range inclusion is rejected.
pub const RANGE_TOL: f64 = 1e-8;

/// Random samples used for identity checks.
pub const SAMPLES: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub derived_family: Option<VectorFamily>,
    pub operator: Option<Matrix>,
    pub claimed: Bounds,
    pub measured: Bounds,
    pub claim_holds: bool,
    /// The derived object still satisfies a lower frame bound.
    pub frame_retained: bool,
    pub notes: Vec<String>,
    /// Named scalar diagnostics, in a fixed order.
    pub metrics: Vec<(&'static str, f64)>,
}

impl StabilityReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
    }
}

fn same_k(a: Option<&Matrix>, b: Option<&Matrix>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => a.rows() == b.rows() && a.max_abs_diff(b) == 0.0,
        _ => false,
    }
}

fn random_coeffs<R: rand::Rng>(r: &mut R, dim_h: usize, n: usize) -> CoefficientFamily {
    let cs = (0..n).map(|_| rng::uniform_vector(r, dim_h)).collect();
    CoefficientFamily::new(dim_h, cs).expect("uniform dims")
}

/// Measured bounds of `ff`: the K-frame lower bound when `K` is present.
fn measured_bounds(ff: &FrameFamily<'_>) -> Result<Bounds> {
    let b = ff.optimal_bounds();
    let lower = match ff.k() {
        Some(_) => ff.optimal_k_lower_bound()?,
        None => b.lower,
    };
    Ok(Bounds::new(lower, b.upper))
}

fn has_lower_bound(lower: f64, upper: f64) -> bool {
    lower > PSD_TOL * upper.abs().max(1.0)
}

/// `{x_i + y_i}`: checks `T_{x+y} = T_x + T_y` on random coefficients and
/// `||T_{x+y}|| <= sqrt(B_x) + sqrt(B_y)`, then reports whether a lower
/// bound survived.
pub fn sum_family(
    ffx: &FrameFamily<'_>,
    ffy: &FrameFamily<'_>,
    seed: u64,
) -> Result<StabilityReport> {
    if ffx.map() != ffy.map() {
        return Err(Error::ShapeMismatch("families live over different maps"));
    }
    if ffx.len() != ffy.len() {
        return Err(Error::ShapeMismatch("families have different lengths"));
    }
    if !same_k(ffx.k(), ffy.k()) {
        return Err(Error::ShapeMismatch("families carry different K"));
    }
    let bm = ffx.map();
    let summed = VectorFamily::new(
        Space::B,
        bm.dim_b(),
        ffx.family()
            .iter()
            .zip(ffy.family().iter())
            .map(|(x, y)| x.add(y))
            .collect(),
    )?;
    let mut ffs = FrameFamily::new(bm, summed.clone())?;
    if let Some(k) = ffx.k() {
        ffs = ffs.with_k(k.clone())?;
    }

    let mut r = rng::seeded(seed);
    let mut additivity: f64 = 0.0;
    for _ in 0..SAMPLES.min(64) {
        let c = random_coeffs(&mut r, bm.dim_h(), ffx.len());
        let lhs = ffs.synthesis(&c)?;
        let rhs = ffx.synthesis(&c)?.add(&ffy.synthesis(&c)?);
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        additivity = additivity.max(lhs.sub(&rhs).norm() / scale);
    }

    let bx = ffx.optimal_bounds().upper;
    let by = ffy.optimal_bounds().upper;
    let t_norm = svd(&ffs.synthesis_matrix()).sigma_max();
    let norm_bound = libm::sqrt(bx) + libm::sqrt(by);
    let norm_ok = t_norm <= norm_bound + 1e-9;
    let additive_ok = additivity <= 1e-12;

    let measured = measured_bounds(&ffs)?;
    let frame_retained = has_lower_bound(measured.lower, measured.upper);
    let inputs_frames = has_lower_bound(measured_bounds(ffx)?.lower, bx)
        && has_lower_bound(measured_bounds(ffy)?.lower, by);
    let mut notes = Vec::new();
    if inputs_frames && !frame_retained {
        notes.push(String::from("lower frame bound lost under summation"));
    }
    Ok(StabilityReport {
        derived_family: Some(summed),
        operator: None,
        claimed: Bounds::new(0.0, norm_bound * norm_bound),
        measured,
        claim_holds: norm_ok && additive_ok,
        frame_retained,
        notes,
        metrics: alloc::vec![
            ("synthesis_norm", t_norm),
            ("norm_bound", norm_bound),
            ("additivity_defect", additivity),
        ],
    })
}

/// Moves the K-frame bounds `(A, B)` of `ff` to `Q` with `range(Q) <= range(K)`:
/// `{x_i}` is a Q-frame with bounds `(A / lambda^2, B)` where `lambda` is the
/// smallest constant with `Q Q^T <= lambda^2 K K^T`.
pub fn douglas_transfer(
    ff: &FrameFamily<'_>,
    q: &Matrix,
    bounds: Bounds,
) -> Result<StabilityReport> {
    let k = ff.k_or_identity();
    if q.rows() != k.rows() || !q.is_square() {
        return Err(Error::DimMismatch {
            expected: k.rows(),
            found: q.rows(),
        });
    }
    let q = q.clone().with_spaces(Space::Z, Space::Z);
    let inclusion = range_inclusion_residual(&q, &k, RankTol::default());
    if inclusion > RANGE_TOL {
        return Err(Error::RangeNotIncluded {
            residual: inclusion,
        });
    }
    let kkt = k.gram_rows();
    let qqt = q.gram_rows();
    // inf <KK^T z, z> / <QQ^T z, z> = 1 / lambda^2
    let mu = pencil_min_eigen(&kkt, &qqt, RankTol::default())?;
    let lambda = if mu.is_infinite() {
        0.0
    } else {
        1.0 / libm::sqrt(mu)
    };

    let x = pinv(&k, RankTol::default()).matmul(&q);
    let factor_defect =
        k.matmul(&x).sub(&q).frobenius_norm() / q.frobenius_norm().max(f64::MIN_POSITIVE);
    let x_norm = svd(&x).sigma_max();

    let a_q = if lambda == 0.0 {
        bounds.lower
    } else {
        bounds.lower / (lambda * lambda)
    };
    let s = ff.frame_operator();
    let report = check_k_inequalities(&s, &qqt, a_q, bounds.upper, None)?;
    let measured_lower = pencil_min_eigen(&s, &qqt, RankTol::default())?;
    let mut notes = Vec::new();
    if lambda == 0.0 {
        notes.push(String::from("Q = 0: lower inequality is vacuous"));
    }
    Ok(StabilityReport {
        derived_family: None,
        operator: Some(q.clone()),
        claimed: Bounds::new(a_q, bounds.upper),
        measured: Bounds::new(measured_lower, ff.optimal_bounds().upper),
        claim_holds: report.is_k_frame
            && factor_defect <= 1e-9
            && lambda <= x_norm + 1e-9 * x_norm.max(1.0),
        frame_retained: report.is_k_frame,
        notes,
        metrics: alloc::vec![
            ("lambda", lambda),
            ("douglas_factor_norm", x_norm),
            (
                "factor_defect",
                if q.frobenius_norm() == 0.0 {
                    0.0
                } else {
                    factor_defect
                }
            ),
            ("range_inclusion_residual", inclusion),
        ],
    })
}

/// `Omega = sum_i B_{x_i} B_{y_i}^T` for a b-orthonormal `{y_i}`, so that
/// `Omega b(h, y_i) = b(h, x_i)`. `{x_i}` is a K-frame exactly when
/// `Omega` maps onto range(K); both verdicts are computed and compared.
pub fn omega_from_bases(
    bm: &BilinearMap,
    y_basis: &VectorFamily,
    x_family: &VectorFamily,
    k: Option<&Matrix>,
) -> Result<StabilityReport> {
    let o = bm.is_b_orthonormal(y_basis, ORTHONORMAL_TOL)?;
    if let Some(w) = o.violations.first() {
        return Err(Error::NotBOrthonormal {
            i: w.i,
            j: w.j,
            residual: w.residual.max_abs(),
        });
    }
    if y_basis.len() != x_family.len() {
        return Err(Error::SizeMismatch {
            expected: y_basis.len(),
            found: x_family.len(),
        });
    }
    let mut omega = Matrix::zeros(bm.dim_z(), bm.dim_z()).with_spaces(Space::Z, Space::Z);
    let mut slices = Vec::with_capacity(y_basis.len());
    for (y, x) in y_basis.iter().zip(x_family.iter()) {
        let (sy, sx) = (bm.slice(y)?, bm.slice(x)?);
        omega = omega.add(&sx.matmul(&sy.transpose()));
        slices.push((sy, sx));
    }
    let intertwining = slices
        .iter()
        .map(|(sy, sx)| omega.matmul(sy).max_abs_diff(sx))
        .fold(0.0, f64::max);

    let mut ff = FrameFamily::new(bm, x_family.clone())?;
    if let Some(k) = k {
        ff = ff.with_k(k.clone())?;
    }
    let kk = ff.k_or_identity();
    let onto = range_inclusion_residual(&kk, &omega, RankTol::default()) <= RANGE_TOL;
    let measured = measured_bounds(&ff)?;
    let is_k_frame = has_lower_bound(measured.lower, measured.upper)
        || range_basis(&kk, RankTol::default()).cols() == 0;
    let scale = omega.max_abs().max(1.0);
    let mut notes = Vec::new();
    if onto != is_k_frame {
        notes.push(format!(
            "surjectivity of Omega ({onto}) disagrees with the K-frame verdict ({is_k_frame})"
        ));
    }
    Ok(StabilityReport {
        derived_family: None,
        operator: Some(omega),
        claimed: measured,
        measured,
        claim_holds: onto == is_k_frame && intertwining <= 1e-12 * scale,
        frame_retained: is_k_frame,
        notes,
        metrics: alloc::vec![
            ("intertwining_defect", intertwining),
            ("omega_onto_range_k", if onto { 1.0 } else { 0.0 }),
        ],
    })
}

/// `{U x_i}` for a b-orthonormal spanning `{x_i}` with K-frame bounds
/// `(A, B)` (its optimal ones when `bounds` is `None`).
///
/// Checks the transfer identity
/// `sum ||<z/U x_i>||^2 = sum ||<U^b z/x_i>||^2` on random `z`, that
/// `{U x_i}` is a `(U^b)^T K`-frame with bounds `(A, B ||U^b||^2)`, and,
/// without `K` and with `U^b` invertible, a plain frame with lower bound
/// `A / ||(U^b)^+||^2`.
pub fn transformed_family(
    bm: &BilinearMap,
    basis: &VectorFamily,
    u: &OperatorOnB,
    k: Option<&Matrix>,
    bounds: Option<Bounds>,
    seed: u64,
) -> Result<StabilityReport> {
    let ub = b_adjoint_from_basis(bm, basis, u)?.into_matrix();
    let mut base = FrameFamily::new(bm, basis.clone())?;
    if let Some(k) = k {
        base = base.with_k(k.clone())?;
    }
    let (a, b) = match bounds {
        Some(bd) => (bd.lower, bd.upper),
        None => {
            let m = measured_bounds(&base)?;
            (m.lower, m.upper)
        }
    };
    let moved = basis.map(|x| u.apply(x).expect("U validated"));
    let ffu = FrameFamily::new(bm, moved.clone())?;

    let mut r = rng::seeded(seed);
    let mut transfer: f64 = 0.0;
    for _ in 0..SAMPLES {
        let z = rng::uniform_vector(&mut r, bm.dim_z());
        let lhs = ffu.analysis(&z)?.norm_sq();
        let rhs = base.analysis(&ub.mul_vec(&z))?.norm_sq();
        transfer = transfer.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }

    // Q = (U^b)^T K, Q Q^T = (U^b)^T K K^T U^b
    let kk = base.k_or_identity();
    let q = ub.transpose().matmul(&kk);
    let qqt = q.gram_rows();
    let ub_svd = svd(&ub);
    let ub_norm = ub_svd.sigma_max();
    let upper = b * ub_norm * ub_norm;
    let su = ffu.frame_operator();
    let q_report = check_k_inequalities(&su, &qqt, a, upper, None)?;

    let measured = ffu.optimal_bounds();
    let full_rank = ub_svd.rank(RankTol::default()) == bm.dim_z();
    let mut claimed = Bounds::new(a, upper);
    let mut plain_ok = true;
    let mut notes = Vec::new();
    if k.is_none() && full_rank {
        let pinv_norm = svd(&pinv(&ub, RankTol::default())).sigma_max();
        claimed.lower = a / (pinv_norm * pinv_norm);
        plain_ok = measured.lower >= claimed.lower - PSD_TOL * upper.max(1.0);
    } else if k.is_none() {
        notes.push(String::from(
            "U^b is singular: only the (U^b)^T-frame bounds apply",
        ));
    }
    let smin = sym_eigen(&su)?.min();
    Ok(StabilityReport {
        derived_family: Some(moved),
        operator: Some(ub),
        claimed,
        measured,
        claim_holds: transfer <= 1e-10 && q_report.is_k_frame && plain_ok,
        frame_retained: has_lower_bound(smin, measured.upper),
        notes,
        metrics: alloc::vec![
            ("transfer_defect", transfer),
            ("ub_norm", ub_norm),
            ("q_lower_margin", q_report.lower_margin),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    #[test]
    fn doubling_scales_bounds_by_four() {
        let g = golden::e2();
        let y = g.frame("y", None).unwrap();
        let r = sum_family(&y, &y, 1).unwrap();
        assert!((r.measured.lower - 8.0).abs() < 1e-10 && (r.measured.upper - 16.0).abs() < 1e-10);
        assert!(r.claim_holds && r.frame_retained);
    }

    #[test]
    fn cancellation_loses_the_frame() {
        let g = golden::e2();
        let y = g.frame("y", None).unwrap();
        let neg = FrameFamily::new(&g.map, g.family("y").map(|v| v.scaled(-1.0))).unwrap();
        let r = sum_family(&y, &neg, 1).unwrap();
        assert!(r.claim_holds && !r.frame_retained);
        assert_eq!(r.measured.lower, 0.0);
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn sum_rejects_mismatched_lengths() {
        let g = golden::e2();
        let y = g.frame("y", None).unwrap();
        let one = FrameFamily::new(&g.map, VectorFamily::in_b(2, &[[1., 0.]]).unwrap()).unwrap();
        assert!(matches!(
            sum_family(&y, &one, 0),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn douglas_homogeneity() {
        let g = golden::e4();
        let x = g.frame("x", Some("K")).unwrap();
        let k = g.operator("K").unwrap();
        let r = douglas_transfer(&x, k, Bounds::new(1.0, 4.0)).unwrap();
        assert!(r.claim_holds && (r.metric("lambda").unwrap() - 1.0).abs() < 1e-12);
        let r = douglas_transfer(&x, &k.scaled(2.0), Bounds::new(1.0, 4.0)).unwrap();
        assert!(r.claim_holds && (r.metric("lambda").unwrap() - 2.0).abs() < 1e-12);
        assert!((r.claimed.lower - 0.25).abs() < 1e-12);
    }

    #[test]
    fn douglas_rejects_escaping_range() {
        let g = golden::e4();
        let x = g.frame("x", Some("K")).unwrap();
        assert!(matches!(
            douglas_transfer(&x, &Matrix::identity(4), Bounds::new(1.0, 4.0)),
            Err(Error::RangeNotIncluded { .. })
        ));
    }

    #[test]
    fn omega_examples() {
        let g = golden::e6();
        let f = g.family("f");
        let r = omega_from_bases(&g.map, f, f, None).unwrap();
        assert!(
            r.operator
                .as_ref()
                .unwrap()
                .max_abs_diff(&Matrix::identity(4))
                < 1e-15
        );
        assert!(r.claim_holds && r.frame_retained);

        let doubled = f.map(|v| v.scaled(2.0));
        let r = omega_from_bases(&g.map, f, &doubled, None).unwrap();
        assert!((r.measured.lower - 4.0).abs() < 1e-12 && (r.measured.upper - 4.0).abs() < 1e-12);

        let dropped = VectorFamily::in_b(2, &[[1., 0.], [0., 0.]]).unwrap();
        let r = omega_from_bases(&g.map, f, &dropped, None).unwrap();
        assert!(r.claim_holds && !r.frame_retained);
        assert_eq!(
            svd(r.operator.as_ref().unwrap()).rank(RankTol::default()),
            2
        );
    }

    #[test]
    fn transformed_examples() {
        let g = golden::e6();
        let f = g.family("f");
        let swap = OperatorOnB::new(g.operator("U").unwrap().clone(), 2).unwrap();
        let r = transformed_family(&g.map, f, &swap, None, None, 3).unwrap();
        assert!(r.claim_holds);
        assert!((r.measured.lower - 1.0).abs() < 1e-12 && (r.measured.upper - 1.0).abs() < 1e-12);

        let id = OperatorOnB::new(Matrix::identity(2), 2).unwrap();
        let r = transformed_family(&g.map, f, &id, None, None, 3).unwrap();
        assert!(r.claim_holds && (r.claimed.lower - 1.0).abs() < 1e-12);

        let zero = OperatorOnB::new(Matrix::zeros(2, 2), 2).unwrap();
        let r = transformed_family(&g.map, f, &zero, None, None, 3).unwrap();
        assert!(r.claim_holds && r.claimed.upper == 0.0 && !r.frame_retained);
    }
}
