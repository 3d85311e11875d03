//! Exact multi-step expected log growth by enumerating the payoff tree.

use crate::error::{Error, Result};
use crate::market::{decide_profile, step_wealth};
use crate::payoff::PayoffModel;
use crate::strategy::{History, Observation, StrategyRule};

/// Deepest tree the enumerator accepts.
pub const MAX_DEPTH: usize = 6;

/// `E(ln(Y^m_{s+depth} / Y^m_s) | F_s)` for every investor, where `history`
/// is the market after `s` periods.  Ruined investors contribute `-inf`.
pub fn expected_log_growth<P: PayoffModel + ?Sized>(
    model: &P,
    rules: &[StrategyRule],
    history: &History,
    depth: usize,
) -> Result<Vec<f64>> {
    if depth > MAX_DEPTH {
        return Err(Error::Domain(format!(
            "tree depth {depth} exceeds {MAX_DEPTH}"
        )));
    }
    if let Some(y) = history.current_wealth.iter().find(|y| !(**y > 0.0)) {
        return Err(Error::Domain(format!(
            "starting wealth {y} must be positive"
        )));
    }
    let mut acc = vec![0.0; rules.len()];
    walk(
        model,
        rules,
        history,
        depth,
        1.0,
        &history.current_wealth,
        &mut acc,
    )?;
    Ok(acc)
}

fn walk<P: PayoffModel + ?Sized>(
    model: &P,
    rules: &[StrategyRule],
    history: &History,
    depth: usize,
    prob: f64,
    base: &[f64],
    acc: &mut [f64],
) -> Result<()> {
    if depth == 0 {
        for ((a, y), y0) in acc.iter_mut().zip(&history.current_wealth).zip(base) {
            *a += if *y > 0.0 {
                prob * (y / y0).ln()
            } else {
                f64::NEG_INFINITY
            };
        }
        return Ok(());
    }
    let state = history.current_state;
    let total = history.total_wealth();
    let rate = model.rate(state);
    let law = model.conditional(state, total);
    let obs = Observation {
        t: history.elapsed() + 1,
        state_label: model.state_label(state),
        rate,
        law: &law,
        history,
    };
    let profile = decide_profile(rules, &obs, model.num_assets())?;
    for tr in model.transitions(state, total).iter() {
        let mut next = history.clone();
        next.current_wealth = step_wealth(&profile, &history.current_wealth, rate, &tr.payoff);
        next.current_state = tr.next;
        next.past_profiles.push(profile.clone());
        walk(model, rules, &next, depth - 1, prob * tr.prob, base, acc)?;
    }
    Ok(())
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

    #[test]
    fn all_gro_growth_is_equal() {
        let h = History::new(vec![1.0, 2.0], 0);
        let g = expected_log_growth(
            &two_point(),
            &[StrategyRule::gro(), StrategyRule::gro()],
            &h,
            4,
        )
        .unwrap();
        assert!((g[0] - g[1]).abs() < 1e-12);
    }

    #[test]
    fn depth_one_matches_hand_sum() {
        // constant opponent, single step: average the two outcomes by hand
        let p = two_point();
        let rules = [
            StrategyRule::Constant(ProportionVector::new(vec![0.5]).unwrap()),
            StrategyRule::Constant(ProportionVector::new(vec![1.0]).unwrap()),
        ];
        let h = History::new(vec![1.0, 1.0], 0);
        let g = expected_log_growth(&p, &rules, &h, 1).unwrap();
        let y1 = |x: f64| 0.5 + 0.5 / 1.5 * x;
        let expected = 0.5 * y1(0.5).ln() + 0.5 * y1(2.0).ln();
        assert!((g[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn gro_beats_opponent_two_investors() {
        let rules = [
            StrategyRule::gro(),
            StrategyRule::Constant(ProportionVector::new(vec![0.9]).unwrap()),
        ];
        let h = History::new(vec![1.0, 1.0], 0);
        let g = expected_log_growth(&two_point(), &rules, &h, 4).unwrap();
        assert!(g[0] >= g[1]);
    }

    #[test]
    fn depth_limit() {
        let h = History::new(vec![1.0], 0);
        assert!(expected_log_growth(&two_point(), &[StrategyRule::gro()], &h, 7).is_err());
    }
}
