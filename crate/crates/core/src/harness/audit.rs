//! Path-wise audits of relative wealth.

use serde::Serialize;

use super::drift::exact_drift;
use super::summary::{ExperimentSummary, PathSummary};
use super::{CheckReport, MarginTracker, Witness, DRIFT_TOL};
use crate::error::Result;
use crate::experiment::Experiment;
use crate::market::TrajectoryRecord;
use crate::payoff::PayoffModel;
use crate::strategy::StrategyRule;

#[derive(Debug, Clone, Serialize)]
pub struct SubmartingaleAudit {
    pub summary: ExperimentSummary,
    /// Drift of `ln r` is non-negative for every audited investor.
    pub drift: CheckReport,
    /// Drift dominates `¼(1 − r)²‖λ − λ̃‖²`.
    pub bound: CheckReport,
    /// `r` of the single non-optimal investor facing only optimal ones is a
    /// supermartingale.
    pub complement: CheckReport,
}

impl SubmartingaleAudit {
    pub fn passed(&self) -> bool {
        self.drift.passed && self.bound.passed && self.complement.passed
    }
}

#[derive(Default)]
struct PathChecks {
    drift: MarginTracker,
    bound: MarginTracker,
    complement: MarginTracker,
}

fn audit_record<P: PayoffModel + ?Sized>(
    model: &P,
    rules: &[StrategyRule],
    path: u64,
    rec: &TrajectoryRecord,
) -> Result<PathChecks> {
    let mut checks = PathChecks::default();
    let audited: Vec<usize> = (0..rules.len())
        .filter(|&m| rules[m].claims_optimal())
        .collect();
    // investors facing nothing but the optimal rule
    let lone: Vec<usize> = (0..rules.len())
        .filter(|&m| {
            !rules[m].is_gro() && rules.iter().enumerate().all(|(k, r)| k == m || r.is_gro())
        })
        .collect();

    for step in &rec.steps {
        let wealth = rec.wealth_at(step.t - 1);
        if wealth.iter().sum::<f64>() <= 0.0 {
            continue;
        }
        for &m in &audited {
            if wealth[m] <= 0.0 {
                continue;
            }
            let row = exact_drift(model, step.prior_state, wealth, &step.profile, m)?;
            let witness = || {
                Witness::at(path, step.t, m)
                    .with("drift", row.drift)
                    .with("lower_bound", row.lower_bound)
                    .with("relative", row.relative)
            };
            checks.drift.observe(row.drift + DRIFT_TOL, witness);
            checks
                .bound
                .observe(row.drift - row.lower_bound + DRIFT_TOL, witness);
        }
        for &m in &lone {
            if wealth[m] <= 0.0 {
                continue;
            }
            let row = exact_drift(model, step.prior_state, wealth, &step.profile, m)?;
            checks
                .complement
                .observe(DRIFT_TOL - row.relative_drift, || {
                    Witness::at(path, step.t, m)
                        .with("relative_drift", row.relative_drift)
                        .with("relative", row.relative)
                });
        }
    }
    Ok(checks)
}

/// Evaluate the exact drift at every step of every path for each investor
/// playing (or claiming to play) the optimal rule.
pub fn submartingale_audit<P: PayoffModel>(exp: &Experiment<P>) -> Result<SubmartingaleAudit> {
    let per_path = exp.map_paths(|path, rec| {
        let checks = audit_record(&exp.model, &exp.rules, path, &rec)?;
        Ok((PathSummary::from_record(path, &rec), checks))
    })?;
    let mut all = PathChecks::default();
    let mut summaries = Vec::with_capacity(per_path.len());
    for (s, c) in per_path {
        summaries.push(s);
        all.drift.merge(c.drift);
        all.bound.merge(c.bound);
        all.complement.merge(c.complement);
    }
    Ok(SubmartingaleAudit {
        summary: ExperimentSummary::from_paths(summaries),
        drift: all
            .drift
            .report("drift", "E(ln r_t - ln r_{t-1} | F_{t-1}) >= -1e-9"),
        bound: all.bound.report(
            "compensator_bound",
            "drift >= (1-r)^2 |lambda - lambda_rep|^2 / 4 - 1e-9",
        ),
        complement: all.complement.report(
            "supermartingale_complement",
            "E(r_t | F_{t-1}) - r_{t-1} <= 1e-9",
        ),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivalOutcome {
    pub summary: ExperimentSummary,
    /// Minimum over each path of the audited investor's relative wealth.
    pub minima: Vec<f64>,
    pub check: CheckReport,
}

pub fn survival_test<P: PayoffModel>(
    exp: &Experiment<P>,
    investor: usize,
) -> Result<SurvivalOutcome> {
    let paths = exp.map_paths(|path, rec| Ok(PathSummary::from_record(path, &rec)))?;
    survival_from_paths(paths, investor)
}

pub(crate) fn survival_from_paths(
    paths: Vec<PathSummary>,
    investor: usize,
) -> Result<SurvivalOutcome> {
    let mut tracker = MarginTracker::default();
    let minima: Vec<f64> = paths.iter().map(|p| p.min_relative[investor]).collect();
    for (p, &lo) in paths.iter().zip(&minima) {
        tracker.observe(if lo > 0.0 { lo } else { -1.0 }, || Witness {
            path: Some(p.path),
            step: None,
            investor: Some(investor),
            values: [("min_relative".to_string(), lo)].into(),
        });
    }
    Ok(SurvivalOutcome {
        summary: ExperimentSummary::from_paths(paths),
        minima,
        check: tracker.report("survival", "min over path of r > 0"),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceOutcome {
    pub summary: ExperimentSummary,
    pub terminal: Vec<f64>,
    pub threshold: f64,
    pub reached: usize,
}

impl DominanceOutcome {
    pub fn fraction(&self) -> f64 {
        self.reached as f64 / self.terminal.len() as f64
    }
}

/// Terminal relative wealth of investor `investor` on every path and how
/// many paths end at or above `threshold`.
pub fn dominance_test<P: PayoffModel>(
    exp: &Experiment<P>,
    investor: usize,
    threshold: f64,
) -> Result<DominanceOutcome> {
    let paths = exp.map_paths(|path, rec| Ok(PathSummary::from_record(path, &rec)))?;
    let terminal: Vec<f64> = paths
        .iter()
        .map(|p| p.terminal_relative[investor])
        .collect();
    let reached = terminal.iter().filter(|&&r| r >= threshold).count();
    Ok(DominanceOutcome {
        summary: ExperimentSummary::from_paths(paths),
        terminal,
        threshold,
        reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::{DiscreteDistribution, PayoffProcess};
    use crate::proportions::ProportionVector;

    fn two_point() -> PayoffProcess {
        let d = DiscreteDistribution::new(vec![(vec![0.5], 0.5), (vec![2.0], 0.5)]).unwrap();
        PayoffProcess::iid(d, 1.0).unwrap()
    }

    fn exp(rules: Vec<StrategyRule>, horizon: usize, paths: u64) -> Experiment<PayoffProcess> {
        Experiment {
            model: two_point(),
            initial_wealth: vec![1.0; rules.len()],
            rules,
            horizon,
            seed: 3,
            paths,
        }
    }

    #[test]
    fn all_gro_has_zero_drift() {
        let a = submartingale_audit(&exp(vec![StrategyRule::gro(); 3], 100, 2)).unwrap();
        assert!(a.passed());
        assert!(
            a.drift.worst_margin - DRIFT_TOL > -1e-12 && a.drift.worst_margin - DRIFT_TOL < 1e-12
        );
        for s in &a.summary.paths {
            assert!((s.min_relative[0] - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn miscomputed_rule_is_caught() {
        let rules = vec![
            StrategyRule::Miscomputed {
                factor: 0.5,
                tol: 1e-12,
            },
            StrategyRule::gro(),
        ];
        let a = submartingale_audit(&exp(rules, 20, 1)).unwrap();
        assert!(!a.drift.passed);
        let w = a.drift.witness.unwrap();
        assert_eq!((w.path, w.step), (Some(0), Some(1)));
        assert!(w.values["drift"] < 0.0);
    }

    #[test]
    fn complement_holds_against_gro() {
        let rules = vec![
            StrategyRule::Constant(ProportionVector::new(vec![0.8]).unwrap()),
            StrategyRule::gro(),
        ];
        let a = submartingale_audit(&exp(rules, 50, 2)).unwrap();
        assert!(a.complement.passed && a.complement.checked == 100);
    }

    #[test]
    fn dominance_and_survival() {
        let rules = vec![
            StrategyRule::gro(),
            StrategyRule::Shifted {
                eps: 0.2,
                decay: false,
                tol: 1e-12,
            },
        ];
        let e = exp(rules, 2000, 4);
        let d = dominance_test(&e, 0, 0.99).unwrap();
        assert_eq!(d.reached, 4);
        let s = survival_test(&e, 0).unwrap();
        assert!(s.check.passed);
        assert!(s.minima.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn zero_rate_market_uses_expected_relative_payoffs() {
        let d =
            DiscreteDistribution::new(vec![(vec![1.0, 3.0], 0.5), (vec![2.0, 0.0], 0.5)]).unwrap();
        let model = PayoffProcess::iid(d, 0.0).unwrap();
        let rules = vec![
            StrategyRule::gro(),
            StrategyRule::Constant(ProportionVector::new(vec![0.2, 0.3]).unwrap()),
        ];
        let e = Experiment {
            model,
            initial_wealth: vec![1.0, 1.0],
            rules,
            horizon: 50,
            seed: 1,
            paths: 2,
        };
        let rec = e.run_path(0).unwrap();
        for step in &rec.steps {
            let l = step.profile.row(0).as_slice();
            assert!((l[0] - 0.625).abs() < 1e-15 && (l[1] - 0.375).abs() < 1e-15);
        }
        let a = submartingale_audit(&e).unwrap();
        assert!(a.passed());
    }
}
