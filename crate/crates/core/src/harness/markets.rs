//! Seeded generators of random markets and opponents for the audits.

use rand::Rng;

use crate::error::Result;
use crate::experiment::Experiment;
use crate::payoff::{PayoffProcess, StateSpec};
use crate::proportions::ProportionVector;
use crate::rng::{path_rng, PathRng};
use crate::strategy::{ScriptEntry, ScriptTable, StrategyRule};

/// A market and its investors, optimal investor first.
#[derive(Debug, Clone)]
pub struct RandomGame {
    pub model: PayoffProcess,
    pub rules: Vec<StrategyRule>,
    pub initial_wealth: Vec<f64>,
}

impl RandomGame {
    pub fn experiment(self, horizon: usize, seed: u64, paths: u64) -> Experiment<PayoffProcess> {
        Experiment {
            model: self.model,
            rules: self.rules,
            initial_wealth: self.initial_wealth,
            horizon,
            seed,
            paths,
        }
    }
}

fn probabilities(rng: &mut PathRng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn payoff(rng: &mut PathRng, assets: usize, need_positive: bool) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..assets)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random_range(0.0..3.0)
                }
            })
            .collect();
        if !need_positive || x.iter().sum::<f64>() > 0.0 {
            return x;
        }
    }
}

/// An iid or two-state payoff process with `assets` assets and 2–5 atoms
/// per state.  With `positive_rate` every interest factor lies in
/// `[0.5, 1.2]`; otherwise it is zero a fifth of the time.
pub fn random_process(
    rng: &mut PathRng,
    assets: usize,
    max_atoms: usize,
    positive_rate: bool,
) -> Result<PayoffProcess> {
    let labels: &[&str] = if rng.random_bool(0.5) {
        &["a"]
    } else {
        &["a", "b"]
    };
    let specs = labels
        .iter()
        .map(|label| {
            let rate = if !positive_rate && rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.5..1.2)
            };
            let atoms = rng.random_range(2..=max_atoms);
            let probs = probabilities(rng, atoms);
            let transitions = probs
                .into_iter()
                .map(|p| {
                    let next = labels[rng.random_range(0..labels.len())].to_string();
                    (next, payoff(rng, assets, rate == 0.0), p)
                })
                .collect();
            StateSpec {
                label: label.to_string(),
                rate,
                transitions,
            }
        })
        .collect();
    PayoffProcess::new(specs, "a")
}

fn random_weights(rng: &mut PathRng, assets: usize) -> Result<ProportionVector> {
    let invested = rng.random_range(0.0..=1.0);
    let w: Vec<f64> = (0..assets).map(|_| rng.random_range(0.0..1.0)).collect();
    let s: f64 = w.iter().sum();
    if s == 0.0 {
        return Ok(ProportionVector::zeros(assets));
    }
    ProportionVector::new(w.iter().map(|x| x / s * invested).collect())
}

/// A constant, state-scripted or shifted-optimal opponent.
pub fn random_opponent(rng: &mut PathRng, model: &PayoffProcess) -> Result<StrategyRule> {
    let assets = crate::payoff::PayoffModel::num_assets(model);
    Ok(match rng.random_range(0..3) {
        0 => StrategyRule::Constant(random_weights(rng, assets)?),
        1 => {
            let entries = ["a", "b"]
                .iter()
                .map(|s| {
                    Ok(ScriptEntry {
                        t: None,
                        state: Some(s.to_string()),
                        weights: random_weights(rng, assets)?,
                    })
                })
                .collect::<Result<_>>()?;
            StrategyRule::Scripted(ScriptTable {
                entries,
                default: None,
            })
        }
        _ => StrategyRule::Shifted {
            eps: rng.random_range(0.01..0.2),
            decay: false,
            tol: crate::zeta::DEFAULT_TOL,
        },
    })
}

fn wealth(rng: &mut PathRng, investors: usize) -> Vec<f64> {
    (0..investors).map(|_| rng.random_range(0.2..3.0)).collect()
}

/// One optimal investor against 1–4 random opponents; 1–4 assets.
pub fn random_game(seed: u64, index: u64) -> Result<RandomGame> {
    let mut rng = path_rng(seed, index);
    let investors = rng.random_range(2..=5);
    let assets = rng.random_range(1..=4);
    let model = random_process(&mut rng, assets, 5, false)?;
    let mut rules = vec![StrategyRule::gro()];
    for _ in 1..investors {
        rules.push(random_opponent(&mut rng, &model)?);
    }
    Ok(RandomGame {
        initial_wealth: wealth(&mut rng, investors),
        model,
        rules,
    })
}

/// Every investor optimal, interest factors positive.
pub fn random_all_gro(seed: u64, index: u64) -> Result<RandomGame> {
    let mut rng = path_rng(seed, index);
    let investors = rng.random_range(2..=5);
    let assets = rng.random_range(1..=4);
    let model = random_process(&mut rng, assets, 5, true)?;
    Ok(RandomGame {
        initial_wealth: wealth(&mut rng, investors),
        model,
        rules: vec![StrategyRule::gro(); investors],
    })
}

/// Two investors, the first optimal; small enough for exhaustive trees.
pub fn random_duel(seed: u64, index: u64) -> Result<RandomGame> {
    let mut rng = path_rng(seed, index);
    let assets = rng.random_range(1..=3);
    let model = random_process(&mut rng, assets, 3, false)?;
    let opponent = random_opponent(&mut rng, &model)?;
    Ok(RandomGame {
        initial_wealth: wealth(&mut rng, 2),
        model,
        rules: vec![StrategyRule::gro(), opponent],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::PayoffModel;

    #[test]
    fn generators_are_valid_and_seeded() {
        for i in 0..50 {
            let g = random_game(1, i).unwrap();
            assert!((2..=5).contains(&g.rules.len()));
            assert!((1..=4).contains(&g.model.num_assets()));
            assert_eq!(g.initial_wealth.len(), g.rules.len());
            let again = random_game(1, i).unwrap();
            assert_eq!(g.initial_wealth, again.initial_wealth);
            let a = random_all_gro(1, i).unwrap();
            assert!((0..a.model.num_states()).all(|s| a.model.rate(s) > 0.0));
        }
    }
}
