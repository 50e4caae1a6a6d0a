//! Machine-readable run reports.

use crate::config::RunConfig;
use mcld::Error;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
    SkippedCap,
}

/// One named check. `lhs` and `rhs` are rendered as strings so exact
/// rationals survive serialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub verdict: Verdict,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub config: RunConfig,
    /// Sorted by name when the report is finished.
    pub checks: Vec<CheckRecord>,
    /// Command-specific output.
    pub data: BTreeMap<String, Value>,
    /// Wall-clock milliseconds per phase; excluded from [`Report::canonical_json`].
    pub timings: BTreeMap<String, u128>,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            checks: Vec::new(),
            data: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, lhs: impl ToString, rhs: impl ToString, ok: bool, anchor: &str) {
        self.checks.push(CheckRecord {
            name: name.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            anchor: anchor.to_string(),
            note: None,
        });
    }

    pub fn record(&mut self, name: impl Into<String>, verdict: Verdict, anchor: &str, note: impl Into<String>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            lhs: String::new(),
            rhs: String::new(),
            verdict,
            anchor: anchor.to_string(),
            note: Some(note.into()),
        });
    }

    /// Records an error from a sub-computation: caps become `skipped-cap`,
    /// anything else is a failure.
    pub fn error(&mut self, name: impl Into<String>, anchor: &str, err: &Error) {
        let verdict = if err.is_cap() { Verdict::SkippedCap } else { Verdict::Fail };
        self.record(name, verdict, anchor, err.to_string());
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn time(&mut self, phase: &str, started: std::time::Instant) {
        self.timings.insert(phase.to_string(), started.elapsed().as_millis());
    }

    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == v).count()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    /// 0 all pass, 1 any fail, 3 nothing failed but something was skipped or undecided.
    pub fn exit_code(&self) -> i32 {
        if self.count(Verdict::Fail) > 0 {
            1
        } else if self.passed() {
            0
        } else {
            3
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// The report without timings, for reproducibility comparisons.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        v.as_object_mut().expect("object").remove("timings");
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}
