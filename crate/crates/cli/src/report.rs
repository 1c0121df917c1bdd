//! Output tables: TSV with a `#` header, or a JSON document.

use std::fmt::Write;

use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub checks: Vec<(String, Status, String)>,
}

impl Report {
    pub fn new(command: &'static str, config: Vec<(&'static str, String)>, columns: Vec<&'static str>) -> Self {
        Report { command, config, columns, rows: Vec::new(), checks: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push((name.into(), status, detail.into()));
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|(_, s, _)| *s == Status::Fail)
    }

    pub fn tsv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# hochloop {}", self.command).unwrap();
        for (k, v) in &self.config {
            writeln!(out, "# {k}\t{v}").unwrap();
        }
        if !self.columns.is_empty() {
            writeln!(out, "{}", self.columns.join("\t")).unwrap();
        }
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(cell).collect();
            writeln!(out, "{}", cells.join("\t")).unwrap();
        }
        for (name, s, detail) in &self.checks {
            writeln!(out, "{}\t{name}\t{detail}", s.as_str()).unwrap();
        }
        out
    }

    pub fn structured(&self) -> String {
        let config: Map<String, Value> = self.config.iter().map(|(k, v)| (k.to_string(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.clone())).collect()))
            .collect();
        let checks: Vec<Value> =
            self.checks.iter().map(|(n, s, d)| json!({"name": n, "status": s.as_str(), "detail": d})).collect();
        let doc = json!({
            "command": self.command,
            "config": config,
            "rows": rows,
            "checks": checks,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("plain values serialize");
        s.push('\n');
        s
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Bool(true) => "yes".into(),
        Value::Bool(false) => "no".into(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
