use serde::Serialize;
use serde_json::Value;

use probmetric::Check;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// A failure the documentation predicts for this configuration.
    ExpectedFail,
    /// A predicted failure that did not happen; counts as a failure.
    UnexpectedPass,
}

impl Status {
    pub fn is_ok(self) -> bool {
        matches!(self, Status::Pass | Status::ExpectedFail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    pub fn from_check(check: &Check) -> Self {
        Record {
            name: check.name.clone(),
            status: if check.passed { Status::Pass } else { Status::Fail },
            witness: check.witness.clone(),
            margin: check.margin,
            note: None,
        }
    }

    pub fn new(name: impl Into<String>, passed: bool, witness: Option<String>) -> Self {
        Record {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            witness,
            margin: None,
            note: None,
        }
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}/{}", self.name);
        self
    }

    /// Applies a documented expectation of failure.
    pub fn expect_failure(mut self, reason: &str) -> Self {
        self.status = match self.status {
            Status::Fail => Status::ExpectedFail,
            Status::Pass => Status::UnexpectedPass,
            other => other,
        };
        self.note = Some(reason.to_string());
        self
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub expected_failures: usize,
}

/// The JSON document every command prints.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub checks: Vec<Record>,
    pub artifacts: Value,
    pub summary: Summary,
    pub exit_status: i32,
}

impl Report {
    pub fn new(command: Vec<String>, config: Value, seed: u64, checks: Vec<Record>, artifacts: Value) -> Self {
        let mut summary = Summary { total: checks.len(), ..Summary::default() };
        for c in &checks {
            match c.status {
                Status::Pass => summary.passed += 1,
                Status::ExpectedFail => summary.expected_failures += 1,
                Status::Fail | Status::UnexpectedPass => summary.failed += 1,
            }
        }
        let exit_status = if checks.iter().all(|c| c.status.is_ok()) { 0 } else { 2 };
        Report { command, config, seed, checks, artifacts, summary, exit_status }
    }
}
