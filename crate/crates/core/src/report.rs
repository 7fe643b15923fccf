//! Structured pass/fail results for identity checks.

use serde::Serialize;

use crate::tensor::TensorOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// Location and values of the first entry where two operators disagree.
#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub equation: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_discrepancy: Option<Discrepancy>,
}

impl CheckResult {
    pub fn pass(check: &str, equation: &str) -> Self {
        CheckResult {
            check: check.into(),
            equation: equation.into(),
            status: CheckStatus::Pass,
            detail: None,
            first_discrepancy: None,
        }
    }

    pub fn fail(check: &str, equation: &str, detail: String) -> Self {
        CheckResult {
            check: check.into(),
            equation: equation.into(),
            status: CheckStatus::Fail,
            detail: Some(detail),
            first_discrepancy: None,
        }
    }

    pub fn skipped(check: &str, equation: &str, reason: String) -> Self {
        CheckResult {
            check: check.into(),
            equation: equation.into(),
            status: CheckStatus::Skipped,
            detail: Some(reason),
            first_discrepancy: None,
        }
    }

    /// Pass iff the operators agree entrywise; otherwise records the first
    /// differing entry.
    pub fn compare(
        check: &str,
        equation: &str,
        found: &TensorOperator,
        expected: &TensorOperator,
    ) -> Self {
        match found.first_discrepancy(expected) {
            None => CheckResult::pass(check, equation),
            Some((row, col, f, e)) => CheckResult {
                check: check.into(),
                equation: equation.into(),
                status: CheckStatus::Fail,
                detail: None,
                first_discrepancy: Some(Discrepancy {
                    row,
                    col,
                    expected: e.to_string(),
                    found: f.to_string(),
                }),
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(CheckResult::passed)
}
