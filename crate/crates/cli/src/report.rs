//! Report envelope, input digests and exit codes.

use std::time::Instant;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use parrep_core::Error;

pub const SCHEMA: &str = "v1";

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_CAP: u8 = 2;
pub const EXIT_INVALID: u8 = 3;

/// Failure of a command, with the exit code it maps to and optional structured detail.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    pub detail: Option<Value>,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
            detail: None,
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::invalid(format!("malformed JSON: {e}"))
    }
}

/// Collects the bytes every result depends on.
#[derive(Default)]
pub struct Inputs {
    hasher: Sha256,
    seeds: Vec<u64>,
}

impl Inputs {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update(label.as_bytes());
        self.hasher.update([0]);
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
        self.add("seed", &seed.to_le_bytes());
    }

    fn finish(self) -> (String, Vec<u64>) {
        (hex::encode(self.hasher.finalize()), self.seeds)
    }
}

pub fn envelope(command: &[String], inputs: Inputs, started: Instant, outcome: &Result<Value, Failure>) -> Value {
    let (digest, seeds) = inputs.finish();
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("command".into(), json!(command));
    out.insert("inputs_digest".into(), json!(digest));
    out.insert("seeds".into(), json!(seeds));
    match outcome {
        Ok(results) => {
            out.insert("status".into(), json!("ok"));
            out.insert("results".into(), results.clone());
        }
        Err(f) => {
            out.insert("status".into(), json!("error"));
            let mut err = Map::new();
            err.insert("exit_code".into(), json!(f.code));
            err.insert("message".into(), json!(f.message));
            if let Some(d) = &f.detail {
                err.insert("detail".into(), d.clone());
            }
            out.insert("error".into(), Value::Object(err));
        }
    }
    // the only field allowed to differ between identical runs
    out.insert(
        "timing".into(),
        json!({ "elapsed_ms": started.elapsed().as_secs_f64() * 1e3 }),
    );
    Value::Object(out)
}

/// One line per top-level result, nested values kept as compact JSON.
pub fn render_text(report: &Value) -> String {
    let mut lines = Vec::new();
    let status = report["status"].as_str().unwrap_or("?");
    lines.push(format!("status: {status}"));
    let body = if status == "ok" { &report["results"] } else { &report["error"] };
    if let Value::Object(map) = body {
        for (k, v) in map {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            lines.push(format!("{k}: {shown}"));
        }
    }
    lines.push(format!("inputs_digest: {}", report["inputs_digest"].as_str().unwrap_or("")));
    lines.join("\n")
}
