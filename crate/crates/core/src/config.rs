//! JSON experiment configuration and the bundled presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::harness::suites::Thresholds;
use crate::payoff::{
    DiscreteDistribution, Market, PayoffModel, PayoffProcess, StateSpec, WealthLinkedPayoff,
};
use crate::proportions::ProportionVector;
use crate::strategy::{Schedule, ScriptEntry, ScriptTable, StrategyRule};
use crate::zeta::DEFAULT_TOL;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub market: MarketSpec,
    pub investors: Vec<InvestorSpec>,
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub paths: u64,
    /// Where `simulate` writes its files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Allow a market with a single investor.
    #[serde(default, skip_serializing_if = "is_false")]
    pub single_investor: bool,
}

fn one() -> u64 {
    1
}

fn is_false(b: &bool) -> bool {
    !b
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarketSpec {
    /// The same payoff law every period.
    Iid { rate: f64, atoms: Vec<AtomSpec> },
    /// Finite-state Markov payoffs.
    Process {
        initial_state: String,
        states: Vec<StateJson>,
    },
    /// One asset paying `fraction` of the total wealth at the period start.
    WealthFraction { fraction: f64, rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub payoff: Vec<f64>,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub label: String,
    pub rate: f64,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionJson {
    pub next: String,
    pub payoff: Vec<f64>,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvestorSpec {
    pub initial_wealth: f64,
    pub strategy: StrategySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    Gro {
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Constant {
        weights: Vec<f64>,
    },
    /// Row `t − 1` at period `t`, last row repeated.
    Schedule {
        table: Vec<Vec<f64>>,
    },
    /// `1/2` at the first period, then `1/2 + 1/(2(t − 1))`.
    HalfPlusDecay,
    Scripted {
        entries: Vec<ScriptEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<ProportionVector>,
    },
    /// The optimal proportions moved by `eps` (by `eps/t` with `decay`).
    Shifted {
        eps: f64,
        #[serde(default)]
        decay: bool,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

fn at(field: &str, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{field}: {m}")),
        e => Error::Config(format!("{field}: {e}")),
    }
}

fn weights(field: &str, w: &[f64], assets: usize) -> Result<ProportionVector> {
    if w.len() != assets {
        return Err(Error::Config(format!(
            "{field}: expected {assets} weights, got {}",
            w.len()
        )));
    }
    ProportionVector::new(w.to_vec()).map_err(|e| at(field, e))
}

impl MarketSpec {
    pub fn build(&self) -> Result<Market> {
        match self {
            MarketSpec::Iid { rate, atoms } => {
                let d = DiscreteDistribution::new(
                    atoms.iter().map(|a| (a.payoff.clone(), a.prob)).collect(),
                )
                .map_err(|e| at("market.atoms", e))?;
                PayoffProcess::iid(d, *rate)
                    .map(Market::Process)
                    .map_err(|e| at("market", e))
            }
            MarketSpec::Process {
                initial_state,
                states,
            } => {
                let specs = states
                    .iter()
                    .map(|s| StateSpec {
                        label: s.label.clone(),
                        rate: s.rate,
                        transitions: s
                            .transitions
                            .iter()
                            .map(|t| (t.next.clone(), t.payoff.clone(), t.prob))
                            .collect(),
                    })
                    .collect();
                PayoffProcess::new(specs, initial_state)
                    .map(Market::Process)
                    .map_err(|e| at("market.states", e))
            }
            MarketSpec::WealthFraction { fraction, rate } => {
                WealthLinkedPayoff::new(*fraction, *rate)
                    .map(Market::WealthLinked)
                    .map_err(|e| at("market", e))
            }
        }
    }
}

impl StrategySpec {
    pub fn build(&self, field: &str, assets: usize) -> Result<StrategyRule> {
        let check_tol = |tol: f64| {
            if tol.is_finite() && tol > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{field}.tol: must be positive, got {tol}"
                )))
            }
        };
        Ok(match self {
            StrategySpec::Gro { tol } => {
                check_tol(*tol)?;
                StrategyRule::Gro { tol: *tol }
            }
            StrategySpec::Constant { weights: w } => {
                StrategyRule::Constant(weights(&format!("{field}.weights"), w, assets)?)
            }
            StrategySpec::Schedule { table } => {
                if table.is_empty() {
                    return Err(Error::Config(format!("{field}.table: must not be empty")));
                }
                let rows = table
                    .iter()
                    .enumerate()
                    .map(|(i, w)| weights(&format!("{field}.table[{i}]"), w, assets))
                    .collect::<Result<_>>()?;
                StrategyRule::Schedule(Schedule::Table(rows))
            }
            StrategySpec::HalfPlusDecay => {
                if assets != 1 {
                    return Err(Error::Config(format!(
                        "{field}: half_plus_decay needs a single asset"
                    )));
                }
                StrategyRule::Schedule(Schedule::HalfPlusDecay)
            }
            StrategySpec::Scripted { entries, default } => {
                for (i, e) in entries.iter().enumerate() {
                    if e.weights.len() != assets {
                        return Err(Error::Config(format!(
                            "{field}.entries[{i}].weights: expected {assets} weights, got {}",
                            e.weights.len()
                        )));
                    }
                }
                if let Some(d) = default.as_ref().filter(|d| d.len() != assets) {
                    return Err(Error::Config(format!(
                        "{field}.default: expected {assets} weights, got {}",
                        d.len()
                    )));
                }
                StrategyRule::Scripted(ScriptTable {
                    entries: entries.clone(),
                    default: default.clone(),
                })
            }
            StrategySpec::Shifted { eps, decay, tol } => {
                check_tol(*tol)?;
                if !(eps.is_finite() && *eps > 0.0 && *eps <= 1.0) {
                    return Err(Error::Config(format!(
                        "{field}.eps: must lie in (0, 1], got {eps}"
                    )));
                }
                StrategyRule::Shifted {
                    eps: *eps,
                    decay: *decay,
                    tol: *tol,
                }
            }
        })
    }
}

impl ExperimentConfig {
    /// Parse and validate.  Syntax errors carry line and column; semantic
    /// errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<Experiment<Market>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        let min = if self.single_investor { 1 } else { 2 };
        if self.investors.len() < min {
            return Err(Error::Config(format!(
                "investors: need at least {min}, got {} (set single_investor for a one-investor run)",
                self.investors.len()
            )));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon: must be at least 1".into()));
        }
        if self.paths == 0 {
            return Err(Error::Config("paths: must be at least 1".into()));
        }
        let model = self.market.build()?;
        let assets = model.num_assets();
        let mut rules = Vec::with_capacity(self.investors.len());
        let mut initial_wealth = Vec::with_capacity(self.investors.len());
        for (i, inv) in self.investors.iter().enumerate() {
            let y = inv.initial_wealth;
            if !(y.is_finite() && y > 0.0) {
                return Err(Error::Config(format!(
                    "investors[{i}].initial_wealth: must be positive, got {y}"
                )));
            }
            initial_wealth.push(y);
            rules.push(
                inv.strategy
                    .build(&format!("investors[{i}].strategy"), assets)?,
            );
        }
        Ok(Experiment {
            model,
            rules,
            initial_wealth,
            horizon: self.horizon,
            seed: self.seed,
            paths: self.paths,
        })
    }
}

fn gro(y: f64) -> InvestorSpec {
    InvestorSpec {
        initial_wealth: y,
        strategy: StrategySpec::Gro { tol: DEFAULT_TOL },
    }
}

fn constant(y: f64, w: f64) -> InvestorSpec {
    InvestorSpec {
        initial_wealth: y,
        strategy: StrategySpec::Constant { weights: vec![w] },
    }
}

fn atoms(pairs: &[(f64, f64)]) -> Vec<AtomSpec> {
    pairs
        .iter()
        .map(|&(x, p)| AtomSpec {
            payoff: vec![x],
            prob: p,
        })
        .collect()
}

fn base(
    market: MarketSpec,
    investors: Vec<InvestorSpec>,
    horizon: usize,
    paths: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        market,
        investors,
        horizon,
        seed: 20240601,
        paths,
        out_dir: None,
        thresholds: Thresholds::default(),
        single_investor: false,
    }
}

pub const PRESETS: [(&str, &str); 8] = [
    (
        "vanishing-wealth",
        "two investors, payoff W/2: total wealth vanishes although investor 1 is optimal",
    ),
    (
        "all-gro",
        "three optimal investors on a two-point payoff: relative wealth stays fixed",
    ),
    (
        "dominance",
        "optimal investor against the optimal rule shifted by 0.2",
    ),
    (
        "survival",
        "optimal investor against two constant-proportion opponents on a two-state market",
    ),
    (
        "growth-duel",
        "optimal investor against a constant 0.9 opponent",
    ),
    (
        "discounted-constant",
        "all optimal, constant payoff 2, W_0 = 5: discounted wealth stays at 5",
    ),
    (
        "discounted-iid",
        "all optimal, payoff 0.5 or 2: discounted wealth grows without bound",
    ),
    (
        "m3-counterexample",
        "one period, three investors: a cash-only investor beats the optimal one",
    ),
];

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let two_point = || MarketSpec::Iid {
            rate: 1.0,
            atoms: atoms(&[(0.5, 0.5), (2.0, 0.5)]),
        };
        Ok(match name {
            "vanishing-wealth" => base(
                MarketSpec::WealthFraction {
                    fraction: 0.5,
                    rate: 1.0,
                },
                vec![
                    gro(1.0),
                    InvestorSpec {
                        initial_wealth: 1.0,
                        strategy: StrategySpec::HalfPlusDecay,
                    },
                ],
                10_000,
                1,
            ),
            "all-gro" => base(two_point(), vec![gro(1.0), gro(2.0), gro(0.5)], 1000, 4),
            "dominance" => base(
                two_point(),
                vec![
                    gro(1.0),
                    InvestorSpec {
                        initial_wealth: 1.0,
                        strategy: StrategySpec::Shifted {
                            eps: 0.2,
                            decay: false,
                            tol: DEFAULT_TOL,
                        },
                    },
                ],
                5000,
                64,
            ),
            "survival" => base(
                MarketSpec::Process {
                    initial_state: "calm".into(),
                    states: vec![
                        StateJson {
                            label: "calm".into(),
                            rate: 1.02,
                            transitions: vec![
                                TransitionJson {
                                    next: "calm".into(),
                                    payoff: vec![1.0, 0.5],
                                    prob: 0.6,
                                },
                                TransitionJson {
                                    next: "storm".into(),
                                    payoff: vec![0.2, 1.5],
                                    prob: 0.4,
                                },
                            ],
                        },
                        StateJson {
                            label: "storm".into(),
                            rate: 0.0,
                            transitions: vec![
                                TransitionJson {
                                    next: "calm".into(),
                                    payoff: vec![0.0, 2.0],
                                    prob: 0.5,
                                },
                                TransitionJson {
                                    next: "storm".into(),
                                    payoff: vec![1.0, 0.0],
                                    prob: 0.5,
                                },
                            ],
                        },
                    ],
                },
                vec![
                    gro(1.0),
                    InvestorSpec {
                        initial_wealth: 3.0,
                        strategy: StrategySpec::Constant {
                            weights: vec![0.7, 0.3],
                        },
                    },
                    InvestorSpec {
                        initial_wealth: 3.0,
                        strategy: StrategySpec::Constant {
                            weights: vec![0.1, 0.2],
                        },
                    },
                ],
                2000,
                16,
            ),
            "growth-duel" => base(two_point(), vec![gro(1.0), constant(1.0, 0.9)], 2000, 16),
            "discounted-constant" => base(
                MarketSpec::Iid {
                    rate: 1.0,
                    atoms: atoms(&[(2.0, 1.0)]),
                },
                vec![gro(2.5), gro(2.5)],
                100,
                1,
            ),
            "discounted-iid" => base(two_point(), vec![gro(1.0), gro(1.0)], 10_000, 32),
            "m3-counterexample" => base(
                MarketSpec::Iid {
                    rate: 1.0,
                    atoms: atoms(&[(1.0, 1.0)]),
                },
                vec![gro(1.0), constant(1.0, 1.0), constant(1.0, 0.0)],
                1,
                1,
            ),
            _ => {
                let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
                return Err(Error::Config(format!(
                    "unknown preset `{name}`; available: {}",
                    names.join(", ")
                )));
            }
        })
    }
}
