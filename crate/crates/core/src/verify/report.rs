//! Verification reports: named quantities with units, tolerances, and a
//! pass flag, serialized as JSON. Reports are reproducible bit for bit for
//! a fixed config and seed except for the wall-clock runtime field.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub units: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub inputs_digest: String,
    pub pass: bool,
    pub quantities: BTreeMap<String, Quantity>,
    pub tolerances: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, inputs_digest: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            inputs_digest: inputs_digest.into(),
            pass: true,
            quantities: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            notes: Vec::new(),
            runtime_seconds: 0.0,
        }
    }

    pub fn put(&mut self, name: &str, value: f64, units: &str) {
        self.quantities.insert(
            name.to_string(),
            Quantity {
                value,
                units: units.to_string(),
            },
        );
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Require `condition`; record it as a named boolean quantity.
    pub fn require(&mut self, name: &str, condition: bool) {
        self.put(name, if condition { 1.0 } else { 0.0 }, "bool");
        self.pass &= condition;
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).map(|q| q.value)
    }

    /// 0 = pass, 1 = a checked inequality failed.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    /// Everything except the runtime field, for reproducibility
    /// comparisons.
    pub fn stable_json(&self) -> String {
        let mut clone = self.clone();
        clone.runtime_seconds = 0.0;
        serde_json::to_string_pretty(&clone).expect("report serializes")
    }

    /// `name,value,units` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value,units\n");
        for (name, q) in &self.quantities {
            out.push_str(&format!("{name},{},{}\n", q.value, q.units));
        }
        out.push_str(&format!("pass,{},bool\n", if self.pass { 1 } else { 0 }));
        out
    }
}

/// SHA-256 digest of the canonical input description.
pub fn digest_inputs(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update([0u8]);
    }
    format!("sha256:{:x}", hasher.finalize())
}

/// Write a report to `path` atomically (temp file + rename).
pub fn write_report_atomic(report: &VerificationReport, path: &Path) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(
            serde_json::to_string_pretty(report)
                .expect("serializes")
                .as_bytes(),
        )?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn require_accumulates_and_exit_code() {
        let mut r = VerificationReport::new("demo", digest_inputs(&["a", "b"]));
        r.put("lhs", 1.0, "1");
        r.require("first", true);
        assert_eq!(r.exit_code(), 0);
        r.require("second", false);
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.value("first"), Some(1.0));
    }

    #[test]
    fn stable_json_strips_runtime() {
        let mut a = VerificationReport::new("demo", "sha256:x");
        let mut b = a.clone();
        a.runtime_seconds = 0.5;
        b.runtime_seconds = 1.5;
        assert_eq!(a.stable_json(), b.stable_json());
    }

    #[test]
    fn digest_is_stable_and_separates() {
        assert_eq!(digest_inputs(&["a"]), digest_inputs(&["a"]));
        assert_ne!(digest_inputs(&["ab"]), digest_inputs(&["a", "b"]));
    }

    #[test]
    fn atomic_write_roundtrip() {
        let dir = std::env::temp_dir().join("hfib-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("r.json");
        let mut r = VerificationReport::new("demo", "sha256:y");
        r.put("x", 2.5, "length");
        write_report_atomic(&r, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.value("x"), Some(2.5));
        std::fs::remove_dir_all(&dir).ok();
    }
}
