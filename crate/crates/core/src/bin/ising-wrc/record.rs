//! JSON-lines result records.

use std::io::Write;
use std::time::Instant;

use serde_json::{json, Map, Value};

use ising_wrc::report::Check;

pub const SCHEMA_VERSION: u32 = 1;

/// One output line. Everything except `timings` is deterministic given the
/// inputs and seed.
pub struct Record {
    command: &'static str,
    inputs: Map<String, Value>,
    outputs: Map<String, Value>,
    checks: Vec<Check>,
    timings: Map<String, Value>,
}

impl Record {
    pub fn new(command: &'static str) -> Self {
        Record { command, inputs: Map::new(), outputs: Map::new(), checks: Vec::new(), timings: Map::new() }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.into(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.into(), value.into());
        self
    }

    pub fn checks(&mut self, checks: impl IntoIterator<Item = Check>) -> &mut Self {
        self.checks.extend(checks);
        self
    }

    pub fn timing(&mut self, key: &str, start: Instant) -> &mut Self {
        self.timings.insert(key.into(), json!(start.elapsed().as_secs_f64()));
        self
    }

    pub fn timing_value(&mut self, key: &str, value: f64) -> &mut Self {
        self.timings.insert(key.into(), json!(value));
        self
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn emit(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut obj = Map::new();
        obj.insert("schema".into(), json!(SCHEMA_VERSION));
        obj.insert("command".into(), json!(self.command));
        obj.insert("inputs".into(), Value::Object(self.inputs.clone()));
        obj.insert("outputs".into(), Value::Object(self.outputs.clone()));
        if !self.checks.is_empty() {
            obj.insert("checks".into(), serde_json::to_value(&self.checks).expect("checks serialise"));
            obj.insert("pass".into(), json!(self.pass()));
        }
        obj.insert("timings".into(), Value::Object(self.timings.clone()));
        serde_json::to_writer(&mut *out, &Value::Object(obj))?;
        writeln!(out)
    }
}

/// Summary line closing a multi-record command.
pub fn emit_summary(out: &mut impl Write, command: &'static str, total: usize, failed: usize) -> std::io::Result<()> {
    let v = json!({
        "schema": SCHEMA_VERSION,
        "command": command,
        "summary": { "records": total, "failed": failed, "pass": failed == 0 },
    });
    serde_json::to_writer(&mut *out, &v)?;
    writeln!(out)
}
