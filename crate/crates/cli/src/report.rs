//! Deterministic JSON reports.

use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub struct Report {
    pub task: String,
    pub inputs_echo: Value,
    pub results: Vec<Value>,
    /// Numerical steps that did not reach their refinement tolerance.
    pub warnings: usize,
}

impl Report {
    pub fn new(task: &str, inputs_echo: Value) -> Self {
        Report { task: task.to_string(), inputs_echo, results: Vec::new(), warnings: 0 }
    }

    /// A measured residual against its tolerance; NaN never passes.
    pub fn check(&mut self, name: &str, measured: f64, tolerance: f64) -> bool {
        let pass = measured <= tolerance;
        self.results.push(json!({
            "name": name,
            "measured": finite_or_null(measured),
            "tolerance": tolerance,
            "pass": pass,
        }));
        pass
    }

    /// An exact yes/no check.
    pub fn check_exact(&mut self, name: &str, holds: bool, detail: Value) -> bool {
        self.results.push(json!({ "name": name, "pass": holds, "detail": detail }));
        holds
    }

    /// Informational output that does not affect the verdict.
    pub fn info(&mut self, name: &str, value: Value) {
        self.results.push(json!({ "name": name, "value": value }));
    }

    pub fn warn(&mut self, name: &str, message: String) {
        self.warnings += 1;
        self.results.push(json!({ "name": name, "warning": message }));
    }

    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.get("pass").and_then(Value::as_bool).unwrap_or(true))
    }

    pub fn to_json(&self) -> String {
        let mut top = Map::new();
        top.insert("version".into(), json!(VERSION));
        top.insert("task".into(), json!(self.task));
        top.insert("inputsEcho".into(), self.inputs_echo.clone());
        top.insert("results".into(), Value::Array(self.results.clone()));
        top.insert("pass".into(), json!(self.pass()));
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("report values are serializable");
        text.push('\n');
        text
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}
