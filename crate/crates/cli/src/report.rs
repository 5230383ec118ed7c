//! JSON reports. Every numeric entry carries the name of the operation
//! that produced it.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub op: String,
    pub name: String,
    /// Non-finite numbers serialise as `null`; see `note`.
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub op: String,
    pub name: String,
    pub pass: bool,
    pub value: Value,
    pub tolerance: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub parallel: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Value>,
    pub tolerances: Value,
    /// Seconds since the Unix epoch; the only nondeterministic field.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub config: Value,
    pub status: &'static str,
    pub entries: Vec<Entry>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: Vec<String>, config: Value) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            command,
            config,
            status: "ok",
            entries: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                parallel: fluidgeom::exec::is_parallel(),
                grid: None,
                tolerances: Value::Object(Default::default()),
                timestamp,
            },
        }
    }

    pub fn entry(&mut self, op: &str, name: &str, value: impl Serialize) -> &mut Self {
        self.entries.push(Entry { op: op.into(), name: name.into(), value: to_value(value), note: None });
        self
    }

    pub fn number(&mut self, op: &str, name: &str, value: f64) -> &mut Self {
        let note = (!value.is_finite()).then(|| format!("non-finite value {value}"));
        self.entries.push(Entry { op: op.into(), name: name.into(), value: to_value(value), note });
        self
    }

    pub fn check(&mut self, op: &str, name: &str, pass: bool, value: impl Serialize, tolerance: impl Serialize) -> &mut Self {
        self.checks.push(Check { op: op.into(), name: name.into(), pass, value: to_value(value), tolerance: to_value(tolerance) });
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn tolerance(&mut self, name: &str, value: f64) -> &mut Self {
        if let Value::Object(m) = &mut self.provenance.tolerances {
            m.insert(name.into(), to_value(value));
        }
        self
    }

    pub fn grid(&mut self, grid: &fluidgeom::fields::Grid3) -> &mut Self {
        self.provenance.grid = Some(serde_json::json!({
            "dims": grid.dims(),
            "spacing": grid.spacing(),
            "origin": grid.origin(),
            "boundary": grid.boundary().map(|b| format!("{b:?}").to_lowercase()),
        }));
        self
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
