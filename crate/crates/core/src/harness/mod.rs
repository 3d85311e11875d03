//! Checks of the optimal rule's guarantees: exact one-step drifts by atom
//! enumeration, and Monte Carlo runs for the asymptotic claims.

use std::collections::BTreeMap;

use serde::Serialize;

pub mod audit;
pub mod decay;
pub mod drift;
pub mod gibbs;
pub mod growth;
pub mod markets;
pub mod suites;
pub mod summary;
pub mod wealth;

pub use audit::{dominance_test, submartingale_audit, survival_test};
pub use decay::{decay_oracle, DecayOracle};
pub use drift::{exact_drift, DriftRow};
pub use gibbs::gibbs_gap;
pub use growth::expected_log_growth;
pub use summary::{growth_rate_compare, ExperimentSummary, PathSummary};
pub use wealth::theorem4_audit;

/// Slack on every exact one-step inequality.
pub const DRIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub investor: Option<usize>,
    pub values: BTreeMap<String, f64>,
}

impl Witness {
    pub fn at(path: u64, step: usize, investor: usize) -> Self {
        Self {
            path: Some(path),
            step: Some(step),
            investor: Some(investor),
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }
}

/// Outcome of one named check.  `worst_margin` is the smallest observed
/// slack, tolerance included; the check passes iff it is non-negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub worst_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub detail: String,
}

/// Running minimum of margins with the first failing witness.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginTracker {
    pub checked: u64,
    pub worst_margin: f64,
    pub witness: Option<Witness>,
}

impl Default for MarginTracker {
    fn default() -> Self {
        Self {
            checked: 0,
            worst_margin: f64::INFINITY,
            witness: None,
        }
    }
}

impl MarginTracker {
    pub fn observe(&mut self, margin: f64, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if margin < self.worst_margin || margin.is_nan() {
            self.worst_margin = margin;
        }
        if !(margin >= 0.0) && self.witness.is_none() {
            self.witness = Some(witness().with("margin", margin));
        }
    }

    /// Fold `other` in after `self`, keeping the earliest witness.
    pub fn merge(&mut self, other: MarginTracker) {
        self.checked += other.checked;
        if other.worst_margin < self.worst_margin || other.worst_margin.is_nan() {
            self.worst_margin = other.worst_margin;
        }
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none() && !self.worst_margin.is_nan()
    }

    pub fn report(self, name: &str, detail: impl Into<String>) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            passed: self.passed(),
            checked: self.checked,
            worst_margin: self.worst_margin,
            witness: self.witness,
            detail: detail.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_keeps_first_witness() {
        let mut a = MarginTracker::default();
        a.observe(0.5, || Witness::at(0, 1, 0));
        let mut b = MarginTracker::default();
        b.observe(-1.0, || Witness::at(1, 3, 0));
        b.observe(-2.0, || Witness::at(1, 4, 0));
        a.merge(b);
        assert!(!a.passed());
        assert_eq!(a.worst_margin, -2.0);
        assert_eq!(a.witness.as_ref().unwrap().step, Some(3));
        assert_eq!(a.checked, 3);
    }
}
