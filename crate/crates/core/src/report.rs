//! Machine-readable check reports, one JSON object per line.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::check::CheckOutcome;
use crate::fock::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "MEASURED")]
    Measured,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Measured => "MEASURED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowInfo {
    /// Exact rational, e.g. `"3/2"`.
    pub hmax: String,
    pub kmax: i64,
    pub mode_range: i64,
}

impl WindowInfo {
    pub fn new(hmax: Weight, kmax: i64, mode_range: i64) -> Self {
        WindowInfo {
            hmax: hmax.to_string(),
            kmax,
            mode_range,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub rank: u32,
    pub window: WindowInfo,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<BTreeMap<String, Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new(check: impl Into<String>, rank: u32, window: WindowInfo) -> Self {
        Report {
            check: check.into(),
            rank,
            window,
            status: Status::Pass,
            measured: None,
            counterexample: None,
            elapsed_ms: None,
        }
    }

    pub fn measure(&mut self, key: &str, value: impl Into<Value>) {
        self.measured
            .get_or_insert_with(BTreeMap::new)
            .insert(key.to_string(), value.into());
    }

    /// Marks the report failed with the given witness.
    pub fn fail(&mut self, counterexample: impl Into<String>) {
        self.status = Status::Fail;
        if self.counterexample.is_none() {
            self.counterexample = Some(counterexample.into());
        }
    }

    /// Folds a check outcome into the report.
    pub fn absorb(&mut self, label: &str, outcome: &CheckOutcome) {
        if let Some(cx) = &outcome.counterexample {
            self.fail(format!("{}: {}", label, cx.describe()));
        }
    }

    pub fn is_failure(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} rank={} hmax={} kmax={} mode_range={}",
            self.status,
            self.check,
            self.rank,
            self.window.hmax,
            self.window.kmax,
            self.window.mode_range
        );
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!(" ({} ms)", ms));
        }
        if let Some(m) = &self.measured {
            for (k, v) in m {
                match v {
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("\n  {}:", k));
                        for line in s.lines() {
                            out.push_str(&format!("\n    {}", line));
                        }
                    }
                    Value::String(s) => out.push_str(&format!("\n  {} = {}", k, s)),
                    other => out.push_str(&format!("\n  {} = {}", k, other)),
                }
            }
        }
        if let Some(cx) = &self.counterexample {
            out.push_str(&format!("\n  counterexample: {}", cx));
        }
        out
    }
}
