//! Versioned JSON manifest describing every series an experiment wrote.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{LabError, LabResult};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn code_version() -> String {
    format!("echolab {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub code_version: String,
    pub experiment: String,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    #[serde(default)]
    pub summary: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub params: BTreeMap<String, Value>,
    /// Role (`echo`, `prediction`, …) → file name relative to the manifest.
    pub files: BTreeMap<String, String>,
    /// File name → SHA-256 of its contents.
    pub sha256: BTreeMap<String, String>,
    pub results: BTreeMap<String, Value>,
}

impl RunRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.into(), v.into());
    }

    /// Stores a float result; non-finite values become `null`.
    pub fn number(&mut self, key: &str, x: f64) {
        self.results.insert(key.into(), num(x));
    }

    pub fn result_f64(&self, key: &str) -> Option<f64> {
        self.results.get(key).and_then(Value::as_f64)
    }

    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

impl Manifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            code_version: code_version(),
            experiment: config.name.clone(),
            kind: config.kind,
            seed: config.seed(),
            config: config.clone(),
            runs: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn run(&self, id: &str) -> Option<&RunRecord> {
        self.runs.iter().find(|r| r.id == id)
    }

    pub fn write(&self, path: &Path) -> LabResult<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> LabResult<Self> {
        if !path.exists() {
            return Err(LabError::MissingInput(path.to_path_buf()));
        }
        let raw: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let version = raw.get("schema_version").and_then(Value::as_u64);
        if version != Some(MANIFEST_SCHEMA_VERSION as u64) {
            return Err(LabError::Format {
                path: path.to_path_buf(),
                reason: format!("unsupported manifest schema version {version:?}"),
            });
        }
        Ok(serde_json::from_value(raw)?)
    }
}

pub fn sha256_file(path: &Path) -> LabResult<String> {
    let bytes = std::fs::read(path)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// `config.<path>=<json>` lines for file headers, in key order.
pub fn provenance_lines(config: &ExperimentConfig) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    walk(&format!("{prefix}.{k}"), v, out);
                }
            }
            Value::Null => {}
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = vec![("echolab_version".to_string(), code_version())];
    let v = serde_json::to_value(config).expect("config serializes");
    walk("config", &v, &mut out);
    out
}
