//! The deterministic two-investor market whose total wealth vanishes even
//! though one investor plays the optimal rule.

use serde::Serialize;

use super::{CheckReport, MarginTracker, Witness};
use crate::error::Result;
use crate::market::{simulate, TrajectoryRecord};
use crate::payoff::WealthLinkedPayoff;
use crate::proportions::ProportionVector;
use crate::rng::path_rng;
use crate::strategy::{Schedule, StrategyRule};

/// Closed recursions for the example, indexed from `t = 1`: entry `t − 1`
/// holds `r²_t`, `W_t` and `α_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayOracle {
    pub r2: Vec<f64>,
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl DecayOracle {
    pub fn horizon(&self) -> usize {
        self.r2.len()
    }

    /// `max_t α_t·t²`.
    pub fn alpha_scaled_max(&self) -> f64 {
        self.alpha
            .iter()
            .enumerate()
            .map(|(i, a)| a * ((i + 1) as f64).powi(2))
            .fold(0.0, f64::max)
    }
}

/// Run the recursions `r²_{t+1} = r²_t(1 − α_t)`, `W_{t+1} = W_t(1 − r²_t/(2t))`
/// from `r²_1 = 1/2`, `W_1 = 2` up to `t = horizon`.
pub fn decay_oracle(horizon: usize) -> DecayOracle {
    let mut out = DecayOracle {
        r2: Vec::with_capacity(horizon),
        w: Vec::with_capacity(horizon),
        alpha: Vec::with_capacity(horizon),
    };
    let (mut r, mut w) = (0.5, 2.0);
    for t in 1..=horizon {
        let tf = t as f64;
        let alpha = r * (1.0 - r) / (2.0 * tf * tf + tf * r - r * r);
        out.r2.push(r);
        out.w.push(w);
        out.alpha.push(alpha);
        w *= 1.0 - r / (2.0 * tf);
        r *= 1.0 - alpha;
    }
    out
}

pub fn decay_market() -> WealthLinkedPayoff {
    WealthLinkedPayoff {
        fraction: 0.5,
        rate: 1.0,
    }
}

pub fn decay_rules() -> Vec<StrategyRule> {
    vec![
        StrategyRule::gro(),
        StrategyRule::Schedule(Schedule::HalfPlusDecay),
    ]
}

/// The example's engine trajectory: periods `1..=horizon` from `Y_0 = (1, 1)`.
pub fn decay_engine(horizon: usize) -> Result<TrajectoryRecord> {
    // the market is deterministic; the generator is never consulted
    let mut rng = path_rng(0, 0);
    simulate(
        &decay_market(),
        &decay_rules(),
        &[1.0, 1.0],
        horizon,
        &mut rng,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub horizon: usize,
    /// Engine against the recursions, relative, on `r²` and `W`.
    pub agreement: CheckReport,
    /// The optimal investor's proportion is `1/2` at every step.
    pub gro_half: CheckReport,
    /// A cash-only investor in place of the second one keeps `Y ≡ 1`.
    pub cash_only: CheckReport,
    pub terminal_r2: f64,
    pub terminal_w: f64,
}

pub fn decay_compare(horizon: usize, tol: f64) -> Result<DecayReport> {
    let oracle = decay_oracle(horizon);
    let rec = decay_engine(horizon)?;
    let mut agreement = MarginTracker::default();
    let mut gro_half = MarginTracker::default();
    for step in &rec.steps {
        let i = step.t - 1;
        let (r2, w) = (oracle.r2[i], oracle.w[i]);
        let err_r = (step.relative[1] - r2).abs() / r2;
        let err_w = (step.total - w).abs() / w;
        agreement.observe(tol - err_r.max(err_w), || Witness {
            path: None,
            step: Some(step.t),
            investor: Some(1),
            values: [
                ("engine_r2".to_string(), step.relative[1]),
                ("oracle_r2".to_string(), r2),
                ("engine_w".to_string(), step.total),
                ("oracle_w".to_string(), w),
            ]
            .into(),
        });
        let lambda = step.profile.row(0).as_slice()[0];
        gro_half.observe(tol - (lambda - 0.5).abs(), || {
            Witness::at(0, step.t, 0).with("lambda", lambda)
        });
    }

    let mut cash_only = MarginTracker::default();
    let rules = vec![
        StrategyRule::gro(),
        StrategyRule::Constant(ProportionVector::zeros(1)),
    ];
    let mut rng = path_rng(0, 0);
    let rec0 = simulate(&decay_market(), &rules, &[1.0, 1.0], horizon, &mut rng)?;
    for step in &rec0.steps {
        let y = step.wealth[1];
        cash_only.observe(if y == 1.0 { 0.0 } else { -(y - 1.0).abs() }, || {
            Witness::at(0, step.t, 1).with("wealth", y)
        });
    }

    let last = rec.steps.last().expect("horizon at least 1");
    Ok(DecayReport {
        horizon,
        agreement: agreement.report(
            "engine_matches_recursion",
            format!("relative error on r2 and W <= {tol:e}"),
        ),
        gro_half: gro_half.report(
            "gro_proportion_half",
            format!("|lambda_t - 1/2| <= {tol:e}"),
        ),
        cash_only: cash_only.report("cash_only_keeps_wealth", "Y_t = 1 exactly"),
        terminal_r2: last.relative[1],
        terminal_w: last.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_steps_by_hand() {
        let o = decay_oracle(3);
        assert_eq!(o.r2[0], 0.5);
        assert_eq!(o.w[0], 2.0);
        assert!((o.alpha[0] - 1.0 / 9.0).abs() < 1e-16);
        assert!((o.r2[1] - 4.0 / 9.0).abs() < 1e-15);
        assert!((o.w[1] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn engine_matches_oracle() {
        let r = decay_compare(2000, 1e-9).unwrap();
        assert!(r.agreement.passed, "{:?}", r.agreement);
        assert!(r.gro_half.passed, "{:?}", r.gro_half);
        assert!(r.cash_only.passed);
        let rec = decay_engine(2).unwrap();
        assert_eq!(rec.steps[0].wealth, vec![1.0, 1.0]);
    }

    #[test]
    fn alpha_is_small() {
        let o = decay_oracle(10_000);
        assert!(o.alpha.iter().all(|a| *a > 0.0 && *a < 1.0));
        assert!(o.alpha_scaled_max() < 1.0);
        assert!(o.w.windows(2).all(|w| w[1] < w[0]));
    }
}
