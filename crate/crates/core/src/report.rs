//! Check records and the machine-readable run report.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::submersion::Rejected;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "REPORT-ONLY")]
    ReportOnly,
}

/// One named check: per-sample residuals against a tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Formula text the check instantiates.
    pub anchor: String,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn max_of(residuals: &[f64]) -> f64 {
    residuals.iter().fold(0.0_f64, |m, r| {
        if r.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(r.abs())
        }
    })
}

impl CheckRecord {
    /// Verdict is PASS iff there is at least one residual and every
    /// residual is finite and within `tolerance` in absolute value.
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, tolerance: f64, residuals: Vec<f64>) -> Self {
        let max_residual = max_of(&residuals);
        let mut rec = Self {
            name: name.into(),
            anchor: anchor.into(),
            residuals,
            max_residual,
            tolerance,
            verdict: Verdict::Fail,
            notes: Vec::new(),
        };
        rec.verdict = if rec.within_tolerance() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        if rec.residuals.is_empty() {
            rec.notes.push("no accepted samples".into());
        }
        rec
    }

    pub fn within_tolerance(&self) -> bool {
        !self.residuals.is_empty() && self.max_residual.is_finite() && self.max_residual <= self.tolerance
    }

    pub fn report_only(mut self) -> Self {
        self.verdict = Verdict::ReportOnly;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub finite_difference_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geodesic_step: Option<f64>,
    /// Interpretations chosen for formulas that admit more than one reading.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub readings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RejectedSample {
    pub point: Vec<f64>,
    pub reason: String,
}

impl From<&Rejected> for RejectedSample {
    fn from(r: &Rejected) -> Self {
        Self {
            point: r.point.clone(),
            reason: r.reason.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckReport {
    #[serde(skip_serializing_if = "String::is_empty")]
    pub command: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub scenario: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub scenario_hash: String,
    pub environment: Environment,
    pub records: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<RejectedSample>,
    /// Tables and series that accompany the checks.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn reject_all(&mut self, rejected: &[Rejected]) {
        for r in rejected {
            if !self.rejected.iter().any(|x| x.point == r.point) {
                self.rejected.push(r.into());
            }
        }
    }

    pub fn detail(&mut self, key: impl Into<String>, value: serde_json::Value) {
        self.details.insert(key.into(), value);
    }

    /// Appends records, rejections and details of `other`. A record whose
    /// name is already present is dropped.
    pub fn merge(&mut self, other: CheckReport) {
        for rec in other.records {
            if !self.records.iter().any(|x| x.name == rec.name) {
                self.records.push(rec);
            }
        }
        for r in other.rejected {
            if !self.rejected.iter().any(|x| x.point == r.point) {
                self.rejected.push(r);
            }
        }
        self.details.extend(other.details);
        for r in other.environment.readings {
            if !self.environment.readings.contains(&r) {
                self.environment.readings.push(r);
            }
        }
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn any_failed(&self) -> bool {
        self.records.iter().any(|r| r.verdict == Verdict::Fail)
    }

    /// Turns REPORT-ONLY records into PASS/FAIL by their tolerance.
    pub fn promote_report_only(&mut self) {
        for r in &mut self.records {
            if r.verdict == Verdict::ReportOnly {
                r.verdict = if r.within_tolerance() {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
