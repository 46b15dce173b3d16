//! JSON instance files.
//!
//! ```json
//! {
//!   "name": "E2",
//!   "dims": [3, 2, 4],
//!   "tensor": [[[1, 0, 0, 0], [0, 1, 0, 0]], ...],
//!   "families": { "y": [[1, 1], [1, -1]] },
//!   "operators": { "K": { "space": "Z", "matrix": [[...], ...] } },
//!   "expected": { "bounds": [2, 4] }
//! }
//! ```
//!
//! `tensor[i][j][k]` is the coefficient of `u_k` in `b(e_i, f_j)`. Matrices
//! are row-major lists of rows.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use bframe_core::golden::Golden;
use bframe_core::{BilinearMap, Matrix, Space, VectorFamily};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error in {field}: {message}")]
    Schema { field: String, message: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error(transparent)]
    Math(#[from] bframe_core::Error),
}

fn schema(field: impl Into<String>, message: impl fmt::Display) -> InstanceError {
    InstanceError::Schema {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceTag {
    H,
    B,
    Z,
}

impl SpaceTag {
    fn space(self) -> Space {
        match self {
            SpaceTag::H => Space::H,
            SpaceTag::B => Space::B,
            SpaceTag::Z => Space::Z,
        }
    }

    fn from_space(s: Space) -> Option<Self> {
        match s {
            Space::H => Some(SpaceTag::H),
            Space::B => Some(SpaceTag::B),
            Space::Z => Some(SpaceTag::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub space: SpaceTag,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub name: String,
    pub dims: [usize; 3],
    pub tensor: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub families: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<BTreeMap<String, serde_json::Value>>,
}

impl Instance {
    pub fn dim_h(&self) -> usize {
        self.dims[0]
    }

    pub fn dim_b(&self) -> usize {
        self.dims[1]
    }

    pub fn dim_z(&self) -> usize {
        self.dims[2]
    }

    fn dim_of(&self, tag: SpaceTag) -> usize {
        match tag {
            SpaceTag::H => self.dim_h(),
            SpaceTag::B => self.dim_b(),
            SpaceTag::Z => self.dim_z(),
        }
    }

    /// Checks every array shape against `dims`.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let [h, b, z] = self.dims;
        if h == 0 || b == 0 || z == 0 {
            return Err(schema("dims", "every dimension must be positive"));
        }
        if self.tensor.len() != h {
            return Err(schema(
                "c",
                format!("expected {h} rows, found {}", self.tensor.len()),
            ));
        }
        for (i, row) in self.tensor.iter().enumerate() {
            if row.len() != b {
                return Err(schema(
                    format!("c[{i}]"),
                    format!("expected {b} entries, found {}", row.len()),
                ));
            }
            for (j, v) in row.iter().enumerate() {
                if v.len() != z {
                    return Err(schema(
                        format!("c[{i}][{j}]"),
                        format!("expected {z} coefficients, found {}", v.len()),
                    ));
                }
                if let Some(k) = v.iter().position(|x| !x.is_finite()) {
                    return Err(schema(format!("c[{i}][{j}][{k}]"), "not a finite number"));
                }
            }
        }
        for (name, vs) in &self.families {
            for (n, v) in vs.iter().enumerate() {
                if v.len() != b {
                    return Err(schema(
                        format!("families.{name}[{n}]"),
                        format!("expected {b} coordinates, found {}", v.len()),
                    ));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(schema(
                        format!("families.{name}[{n}]"),
                        "not a finite number",
                    ));
                }
            }
        }
        for (name, op) in &self.operators {
            let n = self.dim_of(op.space);
            if op.matrix.len() != n {
                return Err(schema(
                    format!("operators.{name}.matrix"),
                    format!(
                        "expected {n} rows for space {:?}, found {}",
                        op.space,
                        op.matrix.len()
                    ),
                ));
            }
            for (r, row) in op.matrix.iter().enumerate() {
                if row.len() != n {
                    return Err(schema(
                        format!("operators.{name}.matrix[{r}]"),
                        format!("expected {n} columns, found {}", row.len()),
                    ));
                }
                if row.iter().any(|x| !x.is_finite()) {
                    return Err(schema(
                        format!("operators.{name}.matrix[{r}]"),
                        "not a finite number",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self, InstanceError> {
        let inst: Instance = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn parse_file(path: &Path) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_str(&text)
    }

    /// Pretty JSON with every innermost number list on one line.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("instances always serialize");
        let mut out = String::new();
        write_compact(&v, 0, &mut out);
        out
    }

    pub fn bilinear(&self) -> Result<BilinearMap, InstanceError> {
        let coeffs = self.tensor.iter().flatten().flatten().copied().collect();
        Ok(BilinearMap::new(
            self.dim_h(),
            self.dim_b(),
            self.dim_z(),
            coeffs,
        )?)
    }

    pub fn family(&self, name: &str) -> Result<VectorFamily, InstanceError> {
        let vs = self
            .families
            .get(name)
            .ok_or_else(|| InstanceError::Unknown {
                kind: "family",
                name: name.to_string(),
            })?;
        Ok(VectorFamily::in_b(self.dim_b(), vs)?)
    }

    /// Operator `name`, which must live on `space`.
    pub fn operator(&self, name: &str, space: SpaceTag) -> Result<Matrix, InstanceError> {
        let op = self
            .operators
            .get(name)
            .ok_or_else(|| InstanceError::Unknown {
                kind: "operator",
                name: name.to_string(),
            })?;
        if op.space != space {
            return Err(schema(
                format!("operators.{name}.space"),
                format!("expected {space:?}, found {:?}", op.space),
            ));
        }
        let s = space.space();
        Ok(Matrix::from_rows(&op.matrix).with_spaces(s, s))
    }

    pub fn from_golden(g: &Golden) -> Self {
        let bm = &g.map;
        let (h, b, z) = (bm.dim_h(), bm.dim_b(), bm.dim_z());
        let tensor = (0..h)
            .map(|i| {
                (0..b)
                    .map(|j| (0..z).map(|k| bm.coeff(i, j, k)).collect())
                    .collect()
            })
            .collect();
        let families = g
            .families
            .iter()
            .map(|(n, f)| (n.clone(), f.iter().map(|v| v.as_slice().to_vec()).collect()))
            .collect();
        let operators = g
            .operators
            .iter()
            .map(|(n, m)| {
                let space = SpaceTag::from_space(m.domain()).expect("golden operators are tagged");
                let rows = (0..m.rows()).map(|r| m.row(r).into_vec()).collect();
                (
                    n.clone(),
                    OperatorEntry {
                        space,
                        matrix: rows,
                    },
                )
            })
            .collect();
        Instance {
            name: g.name.clone(),
            dims: [h, b, z],
            tensor,
            families,
            operators,
            expected: None,
        }
    }
}

fn write_compact(v: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push_str(&serde_json::to_string(v).expect("scalars serialize"));
        }
        Value::Array(xs) => {
            out.push_str("[\n");
            for (n, x) in xs.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_compact(x, depth + 1, out);
                out.push_str(if n + 1 < xs.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(m) if !m.is_empty() => {
            out.push_str("{\n");
            for (n, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_compact(x, depth + 1, out);
                out.push_str(if n + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("scalars serialize")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bframe_core::golden;

    #[test]
    fn golden_round_trip() {
        for g in [
            golden::e1(),
            golden::e2(),
            golden::e4(),
            golden::e5(),
            golden::e6(),
        ] {
            let inst = Instance::from_golden(&g);
            let back = Instance::parse_str(&inst.to_json()).unwrap();
            assert_eq!(back, inst);
            assert_eq!(back.bilinear().unwrap(), g.map);
        }
    }

    #[test]
    fn wrong_tensor_row_names_the_index() {
        let mut inst = Instance::from_golden(&golden::e2());
        inst.tensor[1][0].pop();
        let err = Instance::parse_str(&inst.to_json()).unwrap_err();
        match err {
            InstanceError::Schema { field, .. } => assert_eq!(field, "c[1][0]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_text_reports_position() {
        let err = Instance::parse_str("{\n  \"name\": \"x\",\n  oops\n}").unwrap_err();
        assert!(
            matches!(err, InstanceError::Parse { line: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn empty_families_are_valid() {
        let mut inst = Instance::from_golden(&golden::e2());
        inst.families.clear();
        assert!(Instance::parse_str(&inst.to_json()).is_ok());
    }

    #[test]
    fn operator_space_is_enforced() {
        let inst = Instance::from_golden(&golden::e4());
        assert!(inst.operator("K", SpaceTag::Z).is_ok());
        assert!(matches!(
            inst.operator("K", SpaceTag::B),
            Err(InstanceError::Schema { .. })
        ));
        assert!(matches!(
            inst.operator("Q", SpaceTag::Z),
            Err(InstanceError::Unknown { .. })
        ));
    }

    #[test]
    fn operator_size_checked_against_space() {
        let mut inst = Instance::from_golden(&golden::e4());
        inst.operators.get_mut("K").unwrap().space = SpaceTag::B;
        let err = inst.validate().unwrap_err();
        assert!(
            matches!(err, InstanceError::Schema { ref field, .. } if field == "operators.K.matrix")
        );
    }
}
