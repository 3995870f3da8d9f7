//! Verification records shared by the checkers and the command line.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::qexpansion::Mismatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    WitnessFound,
    BudgetExceeded,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub params: serde_json::Value,
    pub status: Status,
    pub mismatches: Vec<serde_json::Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl CaseReport {
    pub fn new(case: impl Into<String>, params: serde_json::Value) -> Self {
        CaseReport {
            case: case.into(),
            params,
            status: Status::Pass,
            mismatches: Vec::new(),
            constants: BTreeMap::new(),
            notes: Vec::new(),
            witness: None,
            timing_ms: None,
        }
    }

    /// Status follows the mismatch list.
    pub fn with_mismatches(mut self, m: &[Mismatch]) -> Self {
        self.mismatches
            .extend(m.iter().map(|x| serde_json::to_value(x).expect("mismatch serializes")));
        self.status = if self.mismatches.is_empty() { Status::Pass } else { Status::Fail };
        self
    }

    pub fn add_mismatch(&mut self, v: serde_json::Value) {
        self.mismatches.push(v);
        self.status = Status::Fail;
    }

    pub fn constant(mut self, k: impl Into<String>, v: impl Into<String>) -> Self {
        self.constants.insert(k.into(), v.into());
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::WitnessFound)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<CaseReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed())
    }
}
