//! Strategy rules: maps from the observable market history to proportions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::DiscreteDistribution;
use crate::proportions::{ProportionProfile, ProportionVector};
use crate::zeta;

/// Market history as seen by the investors before they move at period `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub initial_wealth: Vec<f64>,
    pub past_profiles: Vec<ProportionProfile>,
    pub current_state: usize,
    pub current_wealth: Vec<f64>,
}

impl History {
    pub fn new(initial_wealth: Vec<f64>, state: usize) -> Self {
        Self {
            current_wealth: initial_wealth.clone(),
            initial_wealth,
            past_profiles: Vec::new(),
            current_state: state,
        }
    }

    pub fn elapsed(&self) -> usize {
        self.past_profiles.len()
    }

    pub fn total_wealth(&self) -> f64 {
        self.current_wealth.iter().sum()
    }

    pub fn relative_wealth(&self) -> Vec<f64> {
        relative(&self.current_wealth)
    }
}

/// `r^m = Y^m / W`, all zero when `W = 0`.
pub fn relative(wealth: &[f64]) -> Vec<f64> {
    let total: f64 = wealth.iter().sum();
    if total > 0.0 {
        wealth.iter().map(|y| y / total).collect()
    } else {
        vec![0.0; wealth.len()]
    }
}

/// Everything a rule may condition on when choosing proportions for period `t`.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    /// Period being decided, starting at 1.
    pub t: usize,
    pub state_label: &'a str,
    /// Interest factor for the coming period.
    pub rate: f64,
    /// Conditional law of the coming payoff.
    pub law: &'a DiscreteDistribution,
    pub history: &'a History,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub weights: ProportionVector,
}

/// Proportions looked up by `(t, state)`; first matching entry wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptTable {
    pub entries: Vec<ScriptEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<ProportionVector>,
}

impl ScriptTable {
    fn lookup(&self, t: usize, state: &str) -> Result<&ProportionVector> {
        self.entries
            .iter()
            .find(|e| e.t.is_none_or(|et| et == t) && e.state.as_deref().is_none_or(|s| s == state))
            .map(|e| &e.weights)
            .or(self.default.as_ref())
            .ok_or_else(|| {
                Error::Config(format!("script has no entry for t = {t}, state `{state}`"))
            })
    }
}

type ScheduleFn = dyn Fn(usize) -> Result<ProportionVector> + Send + Sync;

#[derive(Clone)]
pub enum Schedule {
    /// Entry `t − 1` is used at period `t`; the last entry repeats.
    Table(Vec<ProportionVector>),
    /// Single asset: `1/2` at `t = 1`, then `1/2 + 1/(2(t − 1))`.
    HalfPlusDecay,
    Func(Arc<ScheduleFn>),
}

impl Schedule {
    pub fn at(&self, t: usize) -> Result<ProportionVector> {
        match self {
            Schedule::Table(v) => v
                .get(t.saturating_sub(1))
                .or(v.last())
                .cloned()
                .ok_or_else(|| Error::Config("empty schedule table".into())),
            Schedule::HalfPlusDecay => {
                let w = if t <= 1 {
                    0.5
                } else {
                    0.5 + 0.5 / (t - 1) as f64
                };
                ProportionVector::new(vec![w])
            }
            Schedule::Func(f) => f(t),
        }
    }
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Table(v) => f.debug_tuple("Table").field(v).finish(),
            Schedule::HalfPlusDecay => f.write_str("HalfPlusDecay"),
            Schedule::Func(_) => f.write_str("Func(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum StrategyRule {
    /// The relative growth optimal rule.
    Gro {
        tol: f64,
    },
    Constant(ProportionVector),
    Schedule(Schedule),
    Scripted(ScriptTable),
    /// GRO proportions moved by `eps` in Euclidean norm (`eps / t` when
    /// `decay` is set).
    Shifted {
        eps: f64,
        decay: bool,
        tol: f64,
    },
    /// GRO proportions scaled by `factor`; used to check that the audits
    /// catch a wrong optimal rule.
    Miscomputed {
        factor: f64,
        tol: f64,
    },
}

impl StrategyRule {
    pub fn gro() -> Self {
        StrategyRule::Gro {
            tol: zeta::DEFAULT_TOL,
        }
    }

    pub fn is_gro(&self) -> bool {
        matches!(self, StrategyRule::Gro { .. })
    }

    /// Whether the rule presents itself as the optimal one; audits check
    /// these investors.
    pub fn claims_optimal(&self) -> bool {
        matches!(
            self,
            StrategyRule::Gro { .. } | StrategyRule::Miscomputed { .. }
        )
    }

    pub fn evaluate(&self, obs: &Observation<'_>) -> Result<ProportionVector> {
        match self {
            StrategyRule::Gro { tol } => gro_at(obs, *tol),
            StrategyRule::Constant(w) => Ok(w.clone()),
            StrategyRule::Schedule(s) => s.at(obs.t),
            StrategyRule::Scripted(table) => table.lookup(obs.t, obs.state_label).cloned(),
            StrategyRule::Shifted { eps, decay, tol } => {
                let eps = if *decay { eps / obs.t as f64 } else { *eps };
                shift(&gro_at(obs, *tol)?, eps)
            }
            StrategyRule::Miscomputed { factor, tol } => {
                let l = gro_at(obs, *tol)?;
                ProportionVector::new(l.as_slice().iter().map(|w| (w * factor).min(1.0)).collect())
            }
        }
    }
}

fn gro_at(obs: &Observation<'_>, tol: f64) -> Result<ProportionVector> {
    let w = obs.history.total_wealth();
    if !(w > 0.0) {
        return Err(Error::Ruin(w));
    }
    zeta::gro_proportions(w, obs.rate, obs.law, tol)
}

/// Move `l` by exactly `eps` in Euclidean norm, staying admissible: add to
/// the first asset when the cash allows it, otherwise take from the largest
/// holding.
fn shift(l: &ProportionVector, eps: f64) -> Result<ProportionVector> {
    let mut w = l.as_slice().to_vec();
    if l.cash() >= eps && w[0] + eps <= 1.0 {
        w[0] += eps;
    } else {
        let (i, &max) = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        if max < eps {
            return Err(Error::Config(format!("cannot shift proportions by {eps}")));
        }
        w[i] -= eps;
    }
    ProportionVector::new(w)
}

/// Rule that ignores the history and plays `values(t)`.
pub fn schedule_rule<F>(values: F) -> StrategyRule
where
    F: Fn(usize) -> Result<ProportionVector> + Send + Sync + 'static,
{
    StrategyRule::Schedule(Schedule::Func(Arc::new(values)))
}

pub fn gro_rule(tol: f64) -> StrategyRule {
    StrategyRule::Gro { tol }
}

/// Wealth-weighted average of every row except `excluded`.
pub fn representative(
    profile: &ProportionProfile,
    relative_wealth: &[f64],
    excluded: usize,
) -> ProportionVector {
    let others: f64 = relative_wealth
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != excluded)
        .map(|(_, r)| r)
        .sum();
    let n = profile.assets();
    if !(others > 0.0) {
        return ProportionVector::zeros(n);
    }
    let mut out = vec![0.0; n];
    for (k, row) in profile.rows().iter().enumerate() {
        if k == excluded {
            continue;
        }
        let weight = relative_wealth[k] / others;
        for (o, l) in out.iter_mut().zip(row.as_slice()) {
            *o += weight * l;
        }
    }
    ProportionVector::new(out).expect("convex combination of admissible rows")
}
