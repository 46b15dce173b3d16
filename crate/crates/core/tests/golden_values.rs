//! Reference values computed outside this crate (normal equations, hand
//! expansion of the quadratic forms) and frozen here.

use bframe_core::badjoint::{solve_b_adjoint, solve_reverse, Uniqueness, FEASIBILITY_TOL};
use bframe_core::golden;
use bframe_core::{Matrix, OperatorOnB, OperatorOnZ, Vector};

/// Minimal residual of the E5 reverse problem, `sqrt(5) / 2`, from the
/// normal equations of the 24 x 4 stacked system.
const E5_REVERSE_RESIDUAL: f64 = 1.118033988749895;

#[test]
fn e5_reverse_residual_matches_normal_equations() {
    let g = golden::e5();
    let v = OperatorOnZ::new(g.operator("V").unwrap().clone(), 4).unwrap();
    let r = solve_reverse(&g.map, &v, FEASIBILITY_TOL).unwrap();
    assert!(!r.feasible);
    assert!(
        (r.residual - E5_REVERSE_RESIDUAL).abs() <= 1e-9,
        "{}",
        r.residual
    );
    let expect = Matrix::from_rows(&[[-0.25, 0.5], [-0.25, 0.25]]);
    assert!(r.u.matrix().max_abs_diff(&expect) < 1e-12);
}

#[test]
fn e1_adjoint_keeps_the_z2_contribution() {
    let g = golden::e1();
    let u = OperatorOnB::new(g.operator("U").unwrap().clone(), 2).unwrap();
    let s = solve_b_adjoint(&g.map, &u, 1e-12).unwrap();
    assert_eq!(s.uniqueness, Uniqueness::Unique);
    let z = Vector::from_slice(&[1.0, 2.0, 3.0]);
    assert_eq!(s.v.apply(&z).unwrap().as_slice(), &[3.0, 0.0, 3.0]);
}

#[test]
fn e2_and_e4_constants() {
    let c2 = golden::e2_map().bound_constants();
    let c4 = golden::e4_map().bound_constants();
    let r2 = std::f64::consts::SQRT_2;
    assert!((c2.beta_upper - r2).abs() < 1e-9 && (c2.beta_lower - r2).abs() < 1e-8);
    assert!((c4.beta_lower - r2).abs() < 1e-8 && c4.m_upper >= 1.0 - 1e-12);
    // E2 has h = (1, 0, -1) in the kernel of every slice
    assert_eq!(c2.m_lower, 0.0);
    assert!(c2.m_upper < 1e-8);
}
