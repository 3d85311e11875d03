//! Discounted total wealth when every investor plays the optimal rule.

use serde::Serialize;

use super::summary::{ExperimentSummary, PathSummary};
use super::{CheckReport, MarginTracker, Witness, DRIFT_TOL};
use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::market::{step_wealth, TrajectoryRecord};
use crate::payoff::PayoffModel;
use crate::proportions::ProportionProfile;
use crate::zeta::gro_proportions;

#[derive(Debug, Clone, Serialize)]
pub struct Theorem4Audit {
    pub summary: ExperimentSummary,
    /// `E(1/W'_t | F_{t−1}) ≤ 1/W'_{t−1}`, exactly by enumeration.
    pub supermartingale: CheckReport,
    /// `W'_t = (1 − |λ̂_t|)W'_{t−1} + |X'_t|`.
    pub growth_equation: CheckReport,
    /// `W'_t` for `t = 0..=T`, per path.
    pub discounted: Vec<Vec<f64>>,
}

impl Theorem4Audit {
    pub fn terminal(&self) -> Vec<f64> {
        self.discounted
            .iter()
            .map(|w| *w.last().expect("non-empty"))
            .collect()
    }
}

pub fn theorem4_audit<P: PayoffModel>(exp: &Experiment<P>) -> Result<Theorem4Audit> {
    if !exp.rules.iter().all(|r| r.is_gro()) {
        return Err(Error::Config(
            "discounted wealth audit needs every investor on the optimal rule".into(),
        ));
    }
    let per_path = exp.map_paths(|path, rec| {
        let (sup, eq, series) = audit_record(&exp.model, path, &rec)?;
        Ok((PathSummary::from_record(path, &rec), sup, eq, series))
    })?;
    let mut sup = MarginTracker::default();
    let mut eq = MarginTracker::default();
    let mut summaries = Vec::new();
    let mut discounted = Vec::new();
    for (s, a, b, d) in per_path {
        summaries.push(s);
        sup.merge(a);
        eq.merge(b);
        discounted.push(d);
    }
    Ok(Theorem4Audit {
        summary: ExperimentSummary::from_paths(summaries),
        supermartingale: sup.report(
            "inverse_discounted_wealth_supermartingale",
            "E(1/W'_t | F_{t-1}) <= (1 + 1e-9)/W'_{t-1}",
        ),
        growth_equation: eq.report(
            "discounted_wealth_equation",
            "|W'_t - (1-|lambda_t|) W'_{t-1} - |X'_t|| <= 1e-9 W'_t",
        ),
        discounted,
    })
}

fn audit_record<P: PayoffModel + ?Sized>(
    model: &P,
    path: u64,
    rec: &TrajectoryRecord,
) -> Result<(MarginTracker, MarginTracker, Vec<f64>)> {
    let mut sup = MarginTracker::default();
    let mut eq = MarginTracker::default();
    let mut series = vec![rec.initial.total];
    let mut discount_prev = 1.0;
    for step in &rec.steps {
        if step.rate <= 0.0 {
            return Err(Error::Discounting(step.t));
        }
        let wealth = rec.wealth_at(step.t - 1);
        let total_prev: f64 = wealth.iter().sum();
        let disc_prev_w = total_prev / discount_prev;

        let mut expected_inverse = 0.0;
        for tr in model.transitions(step.prior_state, total_prev).iter() {
            let next: f64 = step_wealth(&step.profile, wealth, step.rate, &tr.payoff)
                .iter()
                .sum();
            expected_inverse += tr.prob * discount_prev * step.rate / next;
        }
        let inv_prev = 1.0 / disc_prev_w;
        sup.observe((inv_prev - expected_inverse) / inv_prev + DRIFT_TOL, || {
            Witness::at(path, step.t, 0)
                .with("expected_inverse", expected_inverse)
                .with("inverse_prev", inv_prev)
        });

        let disc_w = step.discounted_total();
        let invested = step.profile.row(0).invested();
        let payoff: f64 = step.payoff.iter().sum::<f64>() / step.discount;
        let predicted = (1.0 - invested) * disc_prev_w + payoff;
        let rel = (disc_w - predicted).abs() / disc_w;
        eq.observe(DRIFT_TOL - rel, || {
            Witness::at(path, step.t, 0)
                .with("discounted_wealth", disc_w)
                .with("predicted", predicted)
        });

        series.push(disc_w);
        discount_prev = step.discount;
    }
    Ok((sup, eq, series))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionGap {
    /// Largest distance between the optimal proportions of the two markets.
    pub proportions: f64,
    /// Largest relative gap between `W_t/D_t` and the undiscounted market's wealth.
    pub wealth: f64,
}

/// Replay an all-optimal trajectory in the market with payoffs `X_t/D_t`
/// and unit interest factor, and measure how far it strays from the
/// discounted original.
pub fn discount_reduction_gap<P: PayoffModel + ?Sized>(
    model: &P,
    record: &TrajectoryRecord,
    tol: f64,
) -> Result<ReductionGap> {
    let mut wealth = record.initial.wealth.clone();
    let mut gap = ReductionGap {
        proportions: 0.0,
        wealth: 0.0,
    };
    for step in &record.steps {
        if step.rate <= 0.0 {
            return Err(Error::Discounting(step.t));
        }
        let original_total: f64 = record.wealth_at(step.t - 1).iter().sum();
        let law = model
            .conditional(step.prior_state, original_total)
            .scaled(1.0 / step.discount)?;
        let total: f64 = wealth.iter().sum();
        let lambda = gro_proportions(total, 1.0, &law, tol)?;
        for row in step.profile.rows() {
            gap.proportions = gap.proportions.max(row.dist2(&lambda).sqrt());
        }
        let profile = ProportionProfile::new(vec![lambda; wealth.len()])?;
        let payoff: Vec<f64> = step.discounted_payoff();
        wealth = step_wealth(&profile, &wealth, 1.0, &payoff);
        let w: f64 = wealth.iter().sum();
        let target = step.discounted_total();
        gap.wealth = gap.wealth.max((w - target).abs() / target);
    }
    Ok(gap)
}
