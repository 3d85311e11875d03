//! Market clearing, the wealth equation and trajectory simulation.

use std::io::Write;

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::PayoffModel;
use crate::proportions::{ProportionProfile, ProportionVector};
use crate::strategy::{relative, History, Observation, StrategyRule};

/// `pⁿ = Σ_m λ^{m,n} Y^m`.
pub fn clear_prices(profile: &ProportionProfile, wealth: &[f64]) -> Vec<f64> {
    let mut p = vec![0.0; profile.assets()];
    for (row, y) in profile.rows().iter().zip(wealth) {
        for (pn, l) in p.iter_mut().zip(row.as_slice()) {
            *pn += l * y;
        }
    }
    p
}

/// One application of the wealth equation.  Payoffs of assets nobody bought
/// are received by nobody.
pub fn step_wealth(
    profile: &ProportionProfile,
    wealth: &[f64],
    rate: f64,
    payoff: &[f64],
) -> Vec<f64> {
    let prices = clear_prices(profile, wealth);
    step_wealth_at(profile, wealth, &prices, rate, payoff)
}

pub(crate) fn step_wealth_at(
    profile: &ProportionProfile,
    wealth: &[f64],
    prices: &[f64],
    rate: f64,
    payoff: &[f64],
) -> Vec<f64> {
    profile
        .rows()
        .iter()
        .zip(wealth)
        .map(|(row, &y)| {
            let mut next = rate * row.cash() * y;
            for ((l, p), x) in row.as_slice().iter().zip(prices).zip(payoff) {
                if *p > 0.0 {
                    next += l * y / p * x;
                }
            }
            next
        })
        .collect()
}

/// Snapshot of the market after `t` periods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketState {
    pub t: usize,
    pub wealth: Vec<f64>,
    pub total: f64,
    pub relative: Vec<f64>,
    /// `D_t = ρ_1⋯ρ_t`.
    pub discount: f64,
    pub state: usize,
}

impl MarketState {
    pub fn initial(wealth: Vec<f64>, state: usize) -> Self {
        Self::new(0, wealth, 1.0, state)
    }

    fn new(t: usize, wealth: Vec<f64>, discount: f64, state: usize) -> Self {
        Self {
            t,
            total: wealth.iter().sum(),
            relative: relative(&wealth),
            wealth,
            discount,
            state,
        }
    }
}

/// Everything that happened in period `t` (from `t − 1` to `t`).
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    /// State occupied at `t − 1`; it set the rate and law of this period.
    pub prior_state: usize,
    /// State entered at `t`.
    pub state: usize,
    pub rate: f64,
    pub profile: ProportionProfile,
    pub prices: Vec<f64>,
    pub payoff: Vec<f64>,
    pub wealth: Vec<f64>,
    pub total: f64,
    pub relative: Vec<f64>,
    pub discount: f64,
}

impl StepRecord {
    /// `W'_t = W_t / D_t`.
    pub fn discounted_total(&self) -> f64 {
        self.total / self.discount
    }

    /// `X'_t = X_t / D_t`.
    pub fn discounted_payoff(&self) -> Vec<f64> {
        self.payoff.iter().map(|x| x / self.discount).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub initial: MarketState,
    pub state_labels: Vec<String>,
    pub steps: Vec<StepRecord>,
    /// First period at whose end total wealth was zero.
    pub ruined_at: Option<usize>,
}

impl TrajectoryRecord {
    pub fn investors(&self) -> usize {
        self.initial.wealth.len()
    }

    pub fn assets(&self) -> usize {
        self.steps.first().map_or(0, |s| s.payoff.len())
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    /// State after `t` periods (`t = 0` is the initial one).
    pub fn state_at(&self, t: usize) -> MarketState {
        if t == 0 {
            return self.initial.clone();
        }
        let s = &self.steps[t - 1];
        MarketState {
            t,
            wealth: s.wealth.clone(),
            total: s.total,
            relative: s.relative.clone(),
            discount: s.discount,
            state: s.state,
        }
    }

    pub fn wealth_at(&self, t: usize) -> &[f64] {
        if t == 0 {
            &self.initial.wealth
        } else {
            &self.steps[t - 1].wealth
        }
    }

    pub fn relative_at(&self, t: usize) -> &[f64] {
        if t == 0 {
            &self.initial.relative
        } else {
            &self.steps[t - 1].relative
        }
    }

    /// Write one CSV row per period, floats at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.assets();
        let mut header = vec!["t", "state", "rho", "D", "W", "Wprime"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        header.extend((1..=n).map(|i| format!("X_{i}")));
        header.extend((1..=n).map(|i| format!("p_{i}")));
        for m in 1..=self.investors() {
            header.push(format!("Y_{m}"));
            header.push(format!("r_{m}"));
            header.extend((1..=n).map(|i| format!("lambda_{m}_{i}")));
        }
        writeln!(out, "{}", header.join(","))?;
        for s in &self.steps {
            let mut row = vec![
                s.t.to_string(),
                self.state_labels[s.state].clone(),
                fmt_f64(s.rate),
                fmt_f64(s.discount),
                fmt_f64(s.total),
                fmt_f64(s.discounted_total()),
            ];
            row.extend(s.payoff.iter().copied().map(fmt_f64));
            row.extend(s.prices.iter().copied().map(fmt_f64));
            for (m, row_l) in s.profile.rows().iter().enumerate() {
                row.push(fmt_f64(s.wealth[m]));
                row.push(fmt_f64(s.relative[m]));
                row.extend(row_l.as_slice().iter().copied().map(fmt_f64));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Seventeen significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Run the market for `horizon` periods.
///
/// All rules see the same history before prices form.  If total wealth hits
/// zero the market stays at zero with every allocation zero and
/// `ruined_at` set.
pub fn simulate<P: PayoffModel + ?Sized>(
    model: &P,
    rules: &[StrategyRule],
    initial_wealth: &[f64],
    horizon: usize,
    rng: &mut dyn RngCore,
) -> Result<TrajectoryRecord> {
    if rules.len() != initial_wealth.len() || rules.is_empty() {
        return Err(Error::Config(format!(
            "{} strategies for {} investors",
            rules.len(),
            initial_wealth.len()
        )));
    }
    if let Some(y) = initial_wealth
        .iter()
        .find(|y| !(y.is_finite() && **y > 0.0))
    {
        return Err(Error::Config(format!(
            "initial wealth {y} must be positive"
        )));
    }
    if horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }

    let n = model.num_assets();
    let initial_state = model.initial_state();
    let mut history = History::new(initial_wealth.to_vec(), initial_state);
    let mut discount = 1.0;
    let mut steps = Vec::with_capacity(horizon);
    let mut ruined_at = None;

    for t in 1..=horizon {
        let state = history.current_state;
        let total = history.total_wealth();
        let rate = model.rate(state);
        let law = model.conditional(state, total);
        let obs = Observation {
            t,
            state_label: model.state_label(state),
            rate,
            law: &law,
            history: &history,
        };
        let profile = decide_profile(rules, &obs, n)?;

        let prices = clear_prices(&profile, &history.current_wealth);
        let (next_state, payoff) = model.sample(state, total, rng);
        let wealth = step_wealth_at(&profile, &history.current_wealth, &prices, rate, &payoff);
        discount *= rate;
        let total_next: f64 = wealth.iter().sum();
        if total_next <= 0.0 && ruined_at.is_none() {
            ruined_at = Some(t);
        }
        steps.push(StepRecord {
            t,
            prior_state: state,
            state: next_state,
            rate,
            relative: relative(&wealth),
            total: total_next,
            prices,
            payoff,
            wealth: wealth.clone(),
            profile: profile.clone(),
            discount,
        });
        history.past_profiles.push(profile);
        history.current_state = next_state;
        history.current_wealth = wealth;
    }

    let labels = (0..model.num_states())
        .map(|s| model.state_label(s).to_string())
        .collect();
    Ok(TrajectoryRecord {
        initial: MarketState::initial(initial_wealth.to_vec(), initial_state),
        state_labels: labels,
        steps,
        ruined_at,
    })
}

/// Every investor's proportions for the period described by `obs`.
///
/// Rules are evaluated on the same snapshot.  With zero total wealth nobody
/// invests and no rule is consulted.
pub fn decide_profile(
    rules: &[StrategyRule],
    obs: &Observation<'_>,
    assets: usize,
) -> Result<ProportionProfile> {
    if !(obs.history.total_wealth() > 0.0) {
        return Ok(ProportionProfile::zeros(rules.len(), assets));
    }
    let rows = rules
        .iter()
        .enumerate()
        .map(|(investor, rule)| {
            rule.evaluate(obs)
                .and_then(|row| check_row(row, assets))
                .map_err(|e| Error::InvalidProportions {
                    step: obs.t,
                    investor,
                    reason: e.to_string(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    ProportionProfile::new(rows)
}

fn check_row(row: ProportionVector, n: usize) -> Result<ProportionVector> {
    if row.len() != n {
        return Err(Error::Domain(format!(
            "{} proportions for {n} assets",
            row.len()
        )));
    }
    Ok(row)
}

/// `W'_t = W_t / D_t` for `t = 0..=T`.
pub fn discounted_series(record: &TrajectoryRecord) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(record.horizon() + 1);
    out.push(record.initial.total);
    for s in &record.steps {
        if s.rate == 0.0 {
            return Err(Error::Discounting(s.t));
        }
        out.push(s.discounted_total());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::{DiscreteDistribution, PayoffProcess};
    use crate::rng::path_rng;

    fn pv(v: &[f64]) -> ProportionVector {
        ProportionVector::new(v.to_vec()).unwrap()
    }

    fn profile(rows: &[&[f64]]) -> ProportionProfile {
        ProportionProfile::new(rows.iter().map(|r| pv(r)).collect()).unwrap()
    }

    #[test]
    fn price_examples() {
        assert_eq!(
            clear_prices(&profile(&[&[1.0], &[1.0]]), &[1.0, 1.0]),
            vec![2.0]
        );
        assert_eq!(
            clear_prices(&ProportionProfile::zeros(2, 3), &[1.0, 4.0]),
            vec![0.0; 3]
        );
        assert_eq!(
            clear_prices(&profile(&[&[0.5, 0.5], &[1.0, 0.0]]), &[2.0, 3.0]),
            vec![4.0, 1.0]
        );
    }

    #[test]
    fn wealth_examples() {
        assert_eq!(
            step_wealth(&profile(&[&[1.0], &[1.0]]), &[1.0, 1.0], 1.0, &[3.0]),
            vec![1.5, 1.5]
        );
        assert_eq!(
            step_wealth(&ProportionProfile::zeros(2, 1), &[1.0, 2.0], 1.5, &[9.0]),
            vec![1.5, 3.0]
        );
        let y = step_wealth(&profile(&[&[0.5], &[1.0]]), &[1.0, 1.0], 1.0, &[1.0]);
        assert!((y[0] - 5.0 / 6.0).abs() < 1e-15);
        assert!((y[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn uninvested_payoff_vanishes() {
        let y = step_wealth(
            &profile(&[&[0.5, 0.0], &[0.25, 0.0]]),
            &[2.0, 4.0],
            1.0,
            &[3.0, 7.0],
        );
        let total: f64 = y.iter().sum();
        // cash 1 + 3, plus the whole payoff of asset 1 only
        assert!((total - 7.0).abs() < 1e-12);
    }

    #[test]
    fn idle_investor_keeps_wealth() {
        let law = DiscreteDistribution::point_mass(vec![2.0]).unwrap();
        let p = PayoffProcess::iid(law, 1.0).unwrap();
        let rules = [StrategyRule::Constant(ProportionVector::zeros(1))];
        let rec = simulate(&p, &rules, &[3.0], 50, &mut path_rng(0, 0)).unwrap();
        assert!(rec.steps.iter().all(|s| s.wealth == vec![3.0]));
    }

    #[test]
    fn invalid_rule_output_reports_step() {
        let law = DiscreteDistribution::point_mass(vec![2.0]).unwrap();
        let p = PayoffProcess::iid(law, 1.0).unwrap();
        let rules = [
            StrategyRule::gro(),
            crate::strategy::schedule_rule(|t| ProportionVector::new(vec![0.4 * t as f64])),
        ];
        let err = simulate(&p, &rules, &[1.0, 1.0], 10, &mut path_rng(0, 0)).unwrap_err();
        assert!(
            matches!(
                err,
                Error::InvalidProportions {
                    step: 3,
                    investor: 1,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn ruin_is_absorbing_and_flagged() {
        // rate 0 and a payoff of zero with probability one half
        let law =
            DiscreteDistribution::new(vec![(vec![0.0, 1.0], 0.5), (vec![1.0, 0.0], 0.5)]).unwrap();
        let p = PayoffProcess::iid(law, 0.0).unwrap();
        let rules = [
            StrategyRule::Constant(pv(&[1.0, 0.0])),
            StrategyRule::Constant(pv(&[1.0, 0.0])),
        ];
        let rec = simulate(&p, &rules, &[1.0, 1.0], 64, &mut path_rng(5, 0)).unwrap();
        let t0 = rec.ruined_at.expect("ruin within 64 fair coin flips");
        assert!(rec.steps[t0 - 1..]
            .iter()
            .all(|s| s.total == 0.0 && s.relative == vec![0.0, 0.0]));
    }

    #[test]
    fn discounting() {
        let law = DiscreteDistribution::new(vec![(vec![0.5], 0.5), (vec![2.0], 0.5)]).unwrap();
        let p = PayoffProcess::iid(law.clone(), 1.0).unwrap();
        let rules = [StrategyRule::gro(), StrategyRule::Constant(pv(&[0.3]))];
        let rec = simulate(&p, &rules, &[1.0, 1.0], 20, &mut path_rng(1, 0)).unwrap();
        let d = discounted_series(&rec).unwrap();
        for (s, w) in rec.steps.iter().zip(&d[1..]) {
            assert_eq!(s.total, *w);
        }
        let p0 =
            PayoffProcess::iid(DiscreteDistribution::point_mass(vec![1.0]).unwrap(), 0.0).unwrap();
        let rec = simulate(&p0, &rules, &[1.0, 1.0], 3, &mut path_rng(1, 0)).unwrap();
        assert_eq!(discounted_series(&rec).unwrap_err(), Error::Discounting(1));
    }

    #[test]
    fn csv_layout() {
        let law =
            DiscreteDistribution::new(vec![(vec![0.5, 1.0], 0.5), (vec![2.0, 0.0], 0.5)]).unwrap();
        let p = PayoffProcess::iid(law, 1.0).unwrap();
        let rules = [StrategyRule::gro(), StrategyRule::Constant(pv(&[0.3, 0.3]))];
        let rec = simulate(&p, &rules, &[1.0, 2.0], 3, &mut path_rng(1, 0)).unwrap();
        let csv = rec.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,state,rho,D,W,Wprime,X_1,X_2,p_1,p_2,Y_1,r_1,lambda_1_1,lambda_1_2,Y_2,r_2,lambda_2_1,lambda_2_2"
        );
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 18);
        assert_eq!(row[0], "1");
        assert_eq!(row[1], "iid");
        assert_eq!(row[2], "1.0000000000000000e0");
        assert_eq!(csv.lines().count(), 4);
    }
}
