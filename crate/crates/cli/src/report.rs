//! Run reports and canonical JSON output.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Mismatch,
    /// Out of scope for the command (excluded type, precondition).
    Skipped,
    /// A budget was hit before a decision.
    Incomplete,
    Error,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Mismatch | Verdict::Incomplete | Verdict::Error)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub id: String,
    pub verdict: Verdict,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub descriptor: String,
    pub items: Vec<Item>,
    pub version: String,
    /// sha256 of every certificate or table file read or written.
    pub digests: BTreeMap<String, String>,
    /// Wall time, only recorded on request so that reports stay byte-stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: &[String], descriptor: impl Into<String>) -> Self {
        RunReport {
            command: command.to_vec(),
            descriptor: descriptor.into(),
            items: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            digests: BTreeMap::new(),
            timing_ms: None,
        }
    }

    pub fn push(&mut self, id: impl Into<String>, verdict: Verdict, detail: Value) {
        self.items.push(Item {
            id: id.into(),
            verdict,
            detail,
        });
    }

    pub fn digest(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.digests.insert(name.into(), sha256_hex(bytes));
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.items.iter().filter(|i| i.verdict == v).count()
    }

    pub fn failures(&self) -> usize {
        self.items.iter().filter(|i| i.verdict.is_failure()).count()
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failures() == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let summary: BTreeMap<&str, usize> = [
            ("verified", self.count(Verdict::Verified)),
            ("mismatch", self.count(Verdict::Mismatch)),
            ("skipped", self.count(Verdict::Skipped)),
            ("incomplete", self.count(Verdict::Incomplete)),
            ("error", self.count(Verdict::Error)),
        ]
        .into_iter()
        .collect();
        v["summary"] = serde_json::to_value(summary).expect("summary serializes");
        v
    }

    pub fn render(&self) -> String {
        canonical(&self.to_json())
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical(v: &Value) -> String {
    // serde_json's default map is ordered by key, so a round trip through
    // Value sorts every object
    let sorted: Value = serde_json::from_str(&v.to_string()).expect("valid json");
    let mut s = serde_json::to_string_pretty(&sorted).expect("json");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
