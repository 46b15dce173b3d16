//! The shipped instance files against their `expected` blocks, and
//! serialization round trips on random instances.

use std::path::PathBuf;

use bframe::instance::{Instance, OperatorEntry, SpaceTag};
use bframe_core::badjoint::{solve_b_adjoint, solve_reverse, FEASIBILITY_TOL};
use bframe_core::{FrameFamily, Matrix, OperatorOnB, OperatorOnZ};
use proptest::prelude::*;
use serde_json::Value;

fn load(name: &str) -> Instance {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "instances", name]
        .iter()
        .collect();
    Instance::parse_file(&p).unwrap()
}

fn frame<'a>(inst: &Instance, bm: &'a bframe_core::BilinearMap, sel: &Value) -> FrameFamily<'a> {
    let ff = FrameFamily::new(bm, inst.family(sel["family"].as_str().unwrap()).unwrap()).unwrap();
    match sel.get("K").and_then(Value::as_str) {
        Some(k) => ff.with_k(inst.operator(k, SpaceTag::Z).unwrap()).unwrap(),
        None => ff,
    }
}

fn rows(v: &Value) -> Matrix {
    let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone()).unwrap();
    Matrix::from_rows(&rows)
}

#[test]
fn e2_dimensions() {
    assert_eq!(load("E2.json").dims, [3, 2, 4]);
}

#[test]
fn expected_blocks_hold() {
    for name in ["E1.json", "E2.json", "E4.json", "E5.json", "E6.json"] {
        let inst = load(name);
        let bm = inst.bilinear().unwrap();
        let expected = inst.expected.clone().unwrap();
        if let Some(e) = expected.get("bounds") {
            let ff = frame(&inst, &bm, e);
            let b = ff.optimal_bounds();
            let lower = if e.get("K").is_some() {
                ff.optimal_k_lower_bound().unwrap()
            } else {
                b.lower
            };
            assert!(
                (lower - e["A_opt"].as_f64().unwrap()).abs() < 1e-9,
                "{name}"
            );
            assert!(
                (b.upper - e["B_opt"].as_f64().unwrap()).abs() < 1e-9,
                "{name}"
            );
        }
        if let Some(e) = expected.get("frame") {
            let ff = frame(&inst, &bm, e);
            let r = ff
                .verify_k_frame(e["A"].as_f64().unwrap(), e["B"].as_f64().unwrap())
                .unwrap();
            assert!(r.is_k_frame, "{name}");
        }
        if let Some(e) = expected.get("b_adjoint") {
            let u = inst
                .operator(e["U"].as_str().unwrap(), SpaceTag::B)
                .unwrap();
            let sol =
                solve_b_adjoint(&bm, &OperatorOnB::new(u, bm.dim_b()).unwrap(), 1e-12).unwrap();
            assert!(
                sol.v.matrix().max_abs_diff(&rows(&e["V"])) < 1e-12,
                "{name}"
            );
        }
        if let Some(e) = expected.get("reverse") {
            let v = inst
                .operator(e["V"].as_str().unwrap(), SpaceTag::Z)
                .unwrap();
            let sol = solve_reverse(
                &bm,
                &OperatorOnZ::new(v, bm.dim_z()).unwrap(),
                FEASIBILITY_TOL,
            )
            .unwrap();
            assert_eq!(sol.feasible, e["feasible"].as_bool().unwrap());
            assert!((sol.residual - e["residual"].as_f64().unwrap()).abs() < 1e-9);
        }
    }
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(h, b, z)| {
        let tensor = prop::collection::vec(
            prop::collection::vec(
                prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), z),
                b,
            ),
            h,
        );
        let fam = prop::collection::vec(prop::collection::vec(-1e6..1e6f64, b), 0..4);
        let op = prop::collection::vec(
            prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL, z),
            z,
        );
        (tensor, fam, op).prop_map(move |(tensor, fam, op)| Instance {
            name: "random".into(),
            dims: [h, b, z],
            tensor,
            families: [("x".to_string(), fam)].into_iter().collect(),
            operators: [(
                "K".to_string(),
                OperatorEntry {
                    space: SpaceTag::Z,
                    matrix: op,
                },
            )]
            .into_iter()
            .collect(),
            expected: None,
        })
    })
}

proptest! {
    #[test]
    fn serialize_parse_is_identity(inst in arb_instance()) {
        let text = inst.to_json();
        let back = Instance::parse_str(&text).unwrap();
        // bit-for-bit, including signed zeros
        let bits = |i: &Instance| i.tensor.iter().flatten().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&inst));
        prop_assert_eq!(back, inst);
    }
}
