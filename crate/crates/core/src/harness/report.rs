//! Verification reports.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One measured inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    /// Signed worst-case violation; the check passes when it is at most
    /// `tolerance`.
    pub violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// A NaN violation always fails and is stored as the largest float so
    /// the record stays representable in JSON.
    pub fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        violation: f64,
        tolerance: f64,
    ) -> Self {
        let violation = if violation.is_nan() {
            f64::MAX
        } else {
            violation.clamp(f64::MIN, f64::MAX)
        };
        Self {
            id: id.into(),
            anchor: anchor.into(),
            violation,
            tolerance,
            pass: violation <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub h: f64,
    pub dt: f64,
    pub halvings: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionSummary {
    pub k_list: Vec<f64>,
    pub r_obs: f64,
    /// `sup |u_{k_{j+1}} - u_{k_j}|` over the window, consecutive pairs.
    pub sup_differences: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<ExhaustionSummary>,
    /// Diagnostics of a run that could not complete.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>, checks: Vec<CheckRecord>) -> Self {
        let mut report = Self {
            scenario: scenario.into(),
            status: Status::Pass,
            checks,
            solver: None,
            exhaustion: None,
            error: None,
        };
        report.refresh_status();
        report
    }

    /// A report for a run that failed before any check could be evaluated.
    pub fn failed(scenario: impl Into<String>, error: impl std::fmt::Display) -> Self {
        let mut report = Self::new(scenario, Vec::new());
        report.error = Some(error.to_string());
        report.refresh_status();
        report
    }

    pub fn refresh_status(&mut self) {
        let ok = self.error.is_none() && self.checks.iter().all(|c| c.pass);
        self.status = if ok { Status::Pass } else { Status::Fail };
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
