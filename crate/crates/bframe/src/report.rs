//! Human and JSON reports.
//!
//! Both renderings come from the same [`Check`] list, so every number
//! printed to the terminal is also in the JSON file.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

/// A finite float as a JSON number; `inf`, `-inf` and `nan` as strings.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(fmt_num(x)))
}

pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x != 0.0 && !(1e-4..1e15).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    pub name: String,
    pub passed: bool,
    /// Ordered named values; numbers, vectors or matrices.
    pub values: serde_json::Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            id: None,
            name: name.into(),
            passed,
            values: serde_json::Map::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_id(mut self, id: u32) -> Self {
        self.id = Some(id);
        self
    }

    pub fn value(mut self, key: &str, x: f64) -> Self {
        self.values.insert(key.into(), num(x));
        self
    }

    pub fn flag(mut self, key: &str, b: bool) -> Self {
        self.values.insert(key.into(), Value::Bool(b));
        self
    }

    pub fn text(mut self, key: &str, s: impl Into<String>) -> Self {
        self.values.insert(key.into(), Value::String(s.into()));
        self
    }

    pub fn vector(mut self, key: &str, xs: &[f64]) -> Self {
        self.values.insert(
            key.into(),
            Value::Array(xs.iter().map(|&x| num(x)).collect()),
        );
        self
    }

    pub fn matrix(mut self, key: &str, m: &bframe_core::Matrix) -> Self {
        let rows = (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(|&x| num(x)).collect()))
            .collect();
        self.values.insert(key.into(), Value::Array(rows));
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub seed: u64,
    pub tol: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, instance: Option<String>, seed: u64, tol: f64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "bframe",
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            instance,
            seed,
            tol,
            passed: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }

    /// One line per check: `name: PASS key=value ...`, then indented notes.
    pub fn human(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            match c.id {
                Some(id) => write!(out, "[{id:>2}] {}: {verdict}", c.name),
                None => write!(out, "{}: {verdict}", c.name),
            }
            .unwrap();
            for (k, v) in &c.values {
                write!(out, " {k}={}", human_value(v)).unwrap();
            }
            out.push('\n');
            for n in &c.notes {
                writeln!(out, "    note: {n}").unwrap();
            }
        }
        out
    }
}

fn human_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
        Value::Array(xs) => {
            let inner: Vec<String> = xs.iter().map(human_value).collect();
            format!("[{}]", inner.join(","))
        }
        other => other.to_string(),
    }
}
