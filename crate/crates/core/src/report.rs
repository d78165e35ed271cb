//! Structured results of verification runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::extreal::ExtReal;

/// Outcome of one inequality or identity check.
///
/// `margin` is oriented so that the checked statement predicts `margin ≥ 0`; the check
/// passes when `margin ≥ −tolerance` (or, for identities, `|margin| ≤ tolerance`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub id: String,
    pub condition: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub margin: ExtReal,
    pub error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl CheckReport {
    pub fn new(suite: &str, id: impl Into<String>, condition: impl Into<String>) -> Self {
        CheckReport {
            suite: suite.to_string(),
            id: id.into(),
            condition: condition.into(),
            functional: None,
            subject: None,
            lhs: ExtReal::ZERO,
            rhs: ExtReal::ZERO,
            margin: ExtReal::ZERO,
            error: None,
            tolerance: 0.0,
            passed: false,
            verdict: String::new(),
            notes: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn with_functional(mut self, f: impl ToString) -> Self {
        self.functional = Some(f.to_string());
        self
    }

    pub fn with_subject(mut self, s: impl ToString) -> Self {
        self.subject = Some(s.to_string());
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("report details serialize"),
        );
        self
    }

    /// Sets `lhs`, `rhs`, `margin = lhs − rhs` (upper convention) and the one-sided verdict.
    pub fn inequality(mut self, lhs: ExtReal, rhs: ExtReal, error: Option<f64>, tolerance: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.margin = lhs.upper_sub(rhs);
        self.error = error;
        self.tolerance = tolerance;
        self.passed = self.margin >= ExtReal::Finite(-tolerance);
        self
    }

    /// For statements `lhs ≤ rhs`: `margin = rhs − lhs`, one-sided verdict.
    pub fn at_most(mut self, lhs: ExtReal, rhs: ExtReal, error: Option<f64>, tolerance: f64) -> Self {
        self = self.inequality(rhs, lhs, error, tolerance);
        std::mem::swap(&mut self.lhs, &mut self.rhs);
        self
    }

    /// Sets `lhs`, `rhs`, `margin = lhs − rhs` and the two-sided verdict.
    pub fn identity(mut self, lhs: ExtReal, rhs: ExtReal, error: Option<f64>, tolerance: f64) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.margin = lhs.upper_sub(rhs);
        self.error = error;
        self.tolerance = tolerance;
        self.passed = match self.margin {
            ExtReal::Finite(m) => m.abs() <= tolerance,
            _ => lhs == rhs,
        };
        self
    }

    pub fn verdict(mut self, passed: &str, failed: &str) -> Self {
        self.verdict = if self.passed { passed } else { failed }.to_string();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_sense() {
        let r = CheckReport::new("jensen", "x", "c").inequality(ExtReal::Finite(1.0), ExtReal::Finite(1.5), None, 1e-6);
        assert!(!r.passed);
        assert_eq!(r.margin, ExtReal::Finite(-0.5));
        let r = CheckReport::new("jensen", "x", "c").inequality(ExtReal::PosInf, ExtReal::Finite(1.5), None, 1e-6);
        assert!(r.passed);
        let r = CheckReport::new("jensen", "x", "c").inequality(ExtReal::PosInf, ExtReal::PosInf, None, 1e-6);
        assert!(r.passed);
    }

    #[test]
    fn identity_sense() {
        let r = CheckReport::new("area", "x", "c").identity(
            ExtReal::Finite(0.82),
            ExtReal::Finite(0.82 + 1e-7),
            Some(1e-6),
            1e-6,
        );
        assert!(r.passed);
        let r = CheckReport::new("area", "x", "c").identity(ExtReal::Finite(0.8), ExtReal::Finite(0.82), None, 1e-6);
        assert!(!r.passed);
    }
}
