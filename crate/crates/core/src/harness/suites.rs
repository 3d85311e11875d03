//! Named verification suites as run by `verify` and the acceptance test.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::audit::{dominance_test, submartingale_audit, survival_test};
use super::decay::{decay_compare, decay_oracle};
use super::gibbs::gibbs_gap;
use super::growth::expected_log_growth;
use super::markets::{random_all_gro, random_duel, random_game};
use super::wealth::{discount_reduction_gap, theorem4_audit};
use super::{CheckReport, MarginTracker, Witness, DRIFT_TOL};
use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::market::{simulate, step_wealth};
use crate::payoff::{DiscreteDistribution, PayoffProcess};
use crate::proportions::{ProportionProfile, ProportionVector};
use crate::rng::{path_rng, PathRng};
use crate::strategy::{History, StrategyRule};
use crate::zeta::{gro_solution, in_gamma, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gibbs,
    Drift,
    Dominance,
    Survival,
    Growth,
    Theorem4,
    Example6,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "gibbs",
        "drift",
        "dominance",
        "survival",
        "growth",
        "theorem4",
        "example6",
        "all",
    ];

    /// The concrete suites `self` stands for.
    pub fn expand(self) -> Vec<Suite> {
        use Suite::*;
        match self {
            All => vec![
                Gibbs, Drift, Dominance, Survival, Growth, Theorem4, Example6,
            ],
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Suite::*;
        [
            Gibbs, Drift, Dominance, Survival, Growth, Theorem4, Example6, All,
        ]
        .into_iter()
        .find(|v| v.name() == s)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown suite `{s}`; expected one of {}",
                Self::NAMES.join(", ")
            ))
        })
    }
}

/// Pass thresholds for the asymptotic claims.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Terminal relative wealth the optimal investor must reach.
    pub dominance: f64,
    /// Fraction of paths that must reach it.
    pub dominance_paths: f64,
    /// `W'_T ≥ divergence·W_0`.
    pub divergence: f64,
    /// `W_T ≤ ruin·W_1` in the vanishing-wealth example.
    pub ruin: f64,
    /// Reported count of paths whose minimum relative wealth falls below this.
    pub survival_floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            dominance: 0.99,
            dominance_paths: 63.0 / 64.0,
            divergence: 10.0,
            ruin: 0.01,
            survival_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub thresholds: Thresholds,
    /// Replace the audited optimal investors of the drift suite by a rule
    /// that halves the optimal proportions.
    pub inject_fault: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 20240601,
            thresholds: Thresholds::default(),
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
    /// Informational figures that do not decide the outcome.
    pub info: serde_json::Map<String, serde_json::Value>,
    pub seconds: f64,
}

impl SuiteReport {
    fn new(
        suite: Suite,
        checks: Vec<CheckReport>,
        info: serde_json::Map<String, serde_json::Value>,
    ) -> Self {
        Self {
            suite,
            passed: checks.iter().all(|c| c.passed),
            checks,
            info,
            seconds: 0.0,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub thresholds: Thresholds,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn run_suites(suite: Suite, opts: &SuiteOptions) -> Result<VerifyReport> {
    let suites = suite
        .expand()
        .into_iter()
        .map(|s| run_suite(s, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        seed: opts.seed,
        thresholds: opts.thresholds,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = std::time::Instant::now();
    let mut report = match suite {
        Suite::Gibbs => gibbs_suite(opts),
        Suite::Drift => drift_suite(opts),
        Suite::Dominance => dominance_suite(opts),
        Suite::Survival => survival_suite(opts),
        Suite::Growth => growth_suite(opts),
        Suite::Theorem4 => theorem4_suite(opts),
        Suite::Example6 => example6_suite(opts),
        Suite::All => return Err(Error::Config("`all` is not a single suite".into())),
    }?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn info(pairs: &[(&str, serde_json::Value)]) -> serde_json::Map<String, serde_json::Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn point(key: &str, value: f64) -> Witness {
    Witness {
        path: None,
        step: None,
        investor: None,
        values: [(key.to_string(), value)].into(),
    }
}

// ---------------------------------------------------------------- gibbs

pub const GIBBS_PAIRS: usize = 100_000;

/// A valid `(α, β)` pair: `|α|, |β| ≤ 1` and `α` vanishing wherever `β`
/// does, with boundary totals and zero components mixed in.
pub fn random_gibbs_pair(rng: &mut PathRng) -> (Vec<f64>, Vec<f64>) {
    let n = rng.random_range(1..=5);
    let total = |rng: &mut PathRng| match rng.random_range(0..10) {
        0 => 0.0,
        1 | 2 => 1.0,
        _ => rng.random_range(0.0..=1.0),
    };
    let tb = total(rng);
    let ta = if tb == 0.0 { 0.0 } else { total(rng) };
    let raw_b: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .collect();
    let raw_a: Vec<f64> = raw_b
        .iter()
        .map(|b| {
            if *b == 0.0 || rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .collect();
    let norm = |v: Vec<f64>, t: f64| {
        let s: f64 = v.iter().sum();
        if s == 0.0 {
            v
        } else {
            v.iter().map(|x| (x / s * t).min(t)).collect()
        }
    };
    (norm(raw_a, ta), norm(raw_b, tb))
}

fn gibbs_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rng = path_rng(opts.seed, 0);
    let mut gap = MarginTracker::default();
    for i in 0..GIBBS_PAIRS {
        let (a, b) = random_gibbs_pair(&mut rng);
        let g = gibbs_gap(&a, &b)?;
        gap.observe(g + 1e-12, || {
            let mut w = point("gap", g);
            w.step = Some(i);
            for (k, (x, y)) in a.iter().zip(&b).enumerate() {
                w = w
                    .with(&format!("alpha_{}", k + 1), *x)
                    .with(&format!("beta_{}", k + 1), *y);
            }
            w
        });
    }
    let mut fixed = MarginTracker::default();
    for (a, b, want) in [
        (vec![0.3, 0.7], vec![0.3, 0.7], 0.0),
        (vec![0.5, 0.5], vec![0.25, 0.75], 0.11259103622589046),
        (vec![0.2, 0.0], vec![0.5, 0.0], 0.09424185362516899),
    ] {
        let g = gibbs_gap(&a, &b)?;
        fixed.observe(1e-12 - (g - want).abs(), || {
            point("gap", g).with("expected", want)
        });
    }
    Ok(SuiteReport::new(
        Suite::Gibbs,
        vec![
            gap.report(
                "gibbs_gap_nonnegative",
                format!("gap >= -1e-12 on {GIBBS_PAIRS} random valid pairs"),
            ),
            fixed.report(
                "gibbs_gap_reference_values",
                "three hand-checked pairs to 1e-12",
            ),
        ],
        info(&[]),
    ))
}

// ---------------------------------------------------------------- drift

pub const ZETA_INSTANCES: usize = 1000;
pub const AUDIT_MARKETS: u64 = 100;
pub const AUDIT_HORIZON: usize = 200;
pub const EQUILIBRIUM_HORIZON: usize = 1000;

/// A random `(c, ρ, K)` instance for the cash solver.
pub fn random_zeta_instance(rng: &mut PathRng) -> Result<(f64, f64, DiscreteDistribution)> {
    let c = rng.random_range(0.05..10.0);
    let rho = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(0.1..2.0)
    };
    let n = rng.random_range(1..=4);
    let k = rng.random_range(1..=5);
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let atoms = w
        .iter()
        .map(|p| {
            let x: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.15) {
                        0.0
                    } else {
                        rng.random_range(0.0..4.0)
                    }
                })
                .collect();
            (x, p / s)
        })
        .collect();
    Ok((c, rho, DiscreteDistribution::new(atoms)?))
}

/// Residual on Γ, point-mass and two-atom closed forms, cash identity.
pub fn zeta_checks(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = path_rng(seed, 1);
    let mut resid = MarginTracker::default();
    let mut cash = MarginTracker::default();
    let wanted = ZETA_INSTANCES as u64;
    let mut i = 0;
    while resid.checked < wanted || cash.checked < wanted {
        i += 1;
        let (c, rho, law) = random_zeta_instance(&mut rng)?;
        let (sol, lambda) = gro_solution(c, rho, &law, DEFAULT_TOL)?;
        let w = || {
            let mut w = point("c", c).with("rho", rho).with("zeta", sol.zeta);
            w.step = Some(i);
            w
        };
        if sol.in_gamma && resid.checked < wanted {
            resid.observe(1e-10 - sol.residual.abs(), || {
                w().with("residual", sol.residual)
            });
        }
        if rho > 0.0 && cash.checked < wanted {
            let gap = (lambda.invested() - (1.0 - sol.zeta / c)).abs();
            cash.observe(1e-10 - gap, || w().with("invested", lambda.invested()));
        }
    }

    let mut closed = MarginTracker::default();
    for i in 0..ZETA_INSTANCES {
        let c = rng.random_range(0.1..10.0);
        let x: Vec<f64> = (0..rng.random_range(1..=3))
            .map(|_| rng.random_range(0.0..3.0))
            .collect();
        let total: f64 = x.iter().sum();
        let want = (c - total).max(0.0);
        // a permuted copy keeps |X| fixed but sends the solver through bisection
        let mut flipped = x.clone();
        flipped.reverse();
        let mut laws = vec![DiscreteDistribution::point_mass(x.clone())?];
        if flipped != x {
            laws.push(DiscreteDistribution::new(vec![(x, 0.5), (flipped, 0.5)])?);
        }
        for law in laws {
            let (sol, _) = gro_solution(c, 1.0, &law, DEFAULT_TOL)?;
            closed.observe(1e-10 - (sol.zeta - want).abs(), || {
                let mut w = point("c", c).with("zeta", sol.zeta).with("expected", want);
                w.step = Some(i);
                w
            });
        }
    }
    let two = DiscreteDistribution::new(vec![(vec![0.5], 0.5), (vec![2.0], 0.5)])?;
    let (sol, _) = gro_solution(1.0, 1.0, &two, DEFAULT_TOL)?;
    let want = (-3.0 + 13f64.sqrt()) / 4.0;
    closed.observe(1e-10 - (sol.zeta - want).abs(), || {
        point("zeta", sol.zeta).with("expected", want)
    });
    // no cash at all when ρ = 0
    let (sol, lambda) = gro_solution(
        1.0,
        0.0,
        &DiscreteDistribution::point_mass(vec![2.0])?,
        DEFAULT_TOL,
    )?;
    closed.observe(
        if sol.zeta == 0.0 && lambda.as_slice() == [1.0] && !in_gamma(1.0, 0.0, &two) {
            0.0
        } else {
            -1.0
        },
        || point("zeta", sol.zeta),
    );

    Ok(vec![
        resid.report("zeta_residual", format!("|residual| <= 1e-10 on {ZETA_INSTANCES} random instances in Gamma")),
        closed.report("zeta_closed_forms", "point mass (c - |X|)+ and two-atom quadratic root to 1e-10"),
        cash.report(
            "cash_identity",
            format!("| |lambda| - (1 - zeta/c) | <= 1e-10 on {ZETA_INSTANCES} random instances with rho > 0"),
        ),
    ])
}

fn audited_game(seed: u64, index: u64, fault: bool) -> Result<Experiment<PayoffProcess>> {
    let mut game = random_game(seed, index)?;
    if fault {
        game.rules[0] = StrategyRule::Miscomputed {
            factor: 0.5,
            tol: DEFAULT_TOL,
        };
        game.rules[1] = StrategyRule::gro();
    }
    Ok(game.experiment(AUDIT_HORIZON, seed ^ index, 1))
}

/// All-optimal markets keep every relative wealth fixed.
pub fn equilibrium_check(seed: u64, markets: u64) -> Result<CheckReport> {
    let mut tracker = MarginTracker::default();
    for i in 0..markets {
        let exp = random_all_gro(seed.wrapping_add(7), i)?.experiment(EQUILIBRIUM_HORIZON, seed, 1);
        let rec = exp.run_path(0)?;
        for step in &rec.steps {
            for (m, (r, r0)) in step.relative.iter().zip(&rec.initial.relative).enumerate() {
                let d = (r - r0).abs();
                tracker.observe(1e-9 - d, || {
                    Witness::at(i, step.t, m)
                        .with("relative", *r)
                        .with("initial", *r0)
                });
            }
        }
    }
    Ok(tracker.report(
        "equilibrium_constant_relative_wealth",
        format!(
            "|r_t - r_0| <= 1e-9 over T = {EQUILIBRIUM_HORIZON} in {markets} all-optimal markets"
        ),
    ))
}

fn drift_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut checks = if opts.inject_fault {
        Vec::new()
    } else {
        zeta_checks(opts.seed)?
    };
    let mut drift = MarginTracker::default();
    let mut bound = MarginTracker::default();
    let mut complement = MarginTracker::default();
    for i in 0..AUDIT_MARKETS {
        let a = submartingale_audit(&audited_game(opts.seed, i, opts.inject_fault)?)?;
        let relabel = |mut t: MarginTracker, r: CheckReport| {
            let mut w = r.witness;
            if let Some(w) = w.as_mut() {
                w.path = Some(i);
            }
            t.merge(MarginTracker {
                checked: r.checked,
                worst_margin: r.worst_margin,
                witness: w,
            });
            t
        };
        drift = relabel(drift, a.drift);
        bound = relabel(bound, a.bound);
        complement = relabel(complement, a.complement);
    }
    let detail = |s: &str| {
        format!(
            "{s}; {AUDIT_MARKETS} random markets, T = {AUDIT_HORIZON}, witness path = market index"
        )
    };
    checks.push(drift.report("drift", detail("E(ln r_t - ln r_{t-1} | F_{t-1}) >= -1e-9")));
    checks.push(bound.report(
        "compensator_bound",
        detail("drift >= (1-r)^2 |lambda - lambda_rep|^2 / 4 - 1e-9"),
    ));
    checks.push(complement.report(
        "supermartingale_complement",
        detail("E(r_t | F_{t-1}) - r_{t-1} <= 1e-9"),
    ));
    if !opts.inject_fault {
        checks.push(equilibrium_check(opts.seed, 10)?);
    }
    Ok(SuiteReport::new(
        Suite::Drift,
        checks,
        info(&[("fault_injected", opts.inject_fault.into())]),
    ))
}

// ------------------------------------------------------------ dominance

pub const DOMINANCE_PATHS: u64 = 64;
pub const DOMINANCE_HORIZON: usize = 5000;

/// Two-point iid payoff `{0.5, 2}` with equal odds and unit interest.
pub fn two_point_market() -> Result<PayoffProcess> {
    let d = DiscreteDistribution::new(vec![(vec![0.5], 0.5), (vec![2.0], 0.5)])?;
    PayoffProcess::iid(d, 1.0)
}

pub fn dominance_experiment(
    eps: f64,
    decay: bool,
    seed: u64,
    paths: u64,
) -> Result<Experiment<PayoffProcess>> {
    Ok(Experiment {
        model: two_point_market()?,
        rules: vec![
            StrategyRule::gro(),
            StrategyRule::Shifted {
                eps,
                decay,
                tol: DEFAULT_TOL,
            },
        ],
        initial_wealth: vec![1.0, 1.0],
        horizon: DOMINANCE_HORIZON,
        seed,
        paths,
    })
}

fn dominance_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let th = opts.thresholds;
    let d = dominance_test(
        &dominance_experiment(0.2, false, opts.seed, DOMINANCE_PATHS)?,
        0,
        th.dominance,
    )?;
    let mut tracker = MarginTracker::default();
    tracker.observe(d.fraction() - th.dominance_paths, || {
        point("fraction", d.fraction()).with("required", th.dominance_paths)
    });
    // square-summable shift: no dominance claimed, reported only
    let soft = dominance_test(
        &dominance_experiment(0.2, true, opts.seed, 8)?,
        0,
        th.dominance,
    )?;
    Ok(SuiteReport::new(
        Suite::Dominance,
        vec![tracker.report(
            "dominance",
            format!(
                "terminal r >= {} on >= {:.4} of {DOMINANCE_PATHS} paths, T = {DOMINANCE_HORIZON}, shift 0.2",
                th.dominance, th.dominance_paths
            ),
        )],
        info(&[
            ("paths_reached", d.reached.into()),
            ("terminal_relative_min", d.summary.terminal_relative[0].min.into()),
            ("terminal_relative_median", d.summary.terminal_relative[0].median.into()),
            ("decaying_shift_terminal_median", soft.summary.terminal_relative[0].median.into()),
        ]),
    ))
}

// ------------------------------------------------------------- survival

fn survival_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut tracker = MarginTracker::default();
    let mut minima = Vec::new();
    for i in 0..AUDIT_MARKETS {
        let s = survival_test(&audited_game(opts.seed, i, false)?, 0)?;
        for (k, lo) in s.minima.iter().enumerate() {
            tracker.observe(if *lo > 0.0 { *lo } else { -1.0 }, || {
                Witness::at(i, 0, 0)
                    .with("min_relative", *lo)
                    .with("path", k as f64)
            });
            minima.push(*lo);
        }
    }
    let below = minima
        .iter()
        .filter(|m| **m < opts.thresholds.survival_floor)
        .count();
    let lowest = minima.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SuiteReport::new(
        Suite::Survival,
        vec![tracker.report(
            "survival",
            format!(
                "min over path of r > 0 for the optimal investor in {AUDIT_MARKETS} random markets"
            ),
        )],
        info(&[
            ("lowest_minimum", lowest.into()),
            ("paths_below_floor", below.into()),
            ("floor", opts.thresholds.survival_floor.into()),
        ]),
    ))
}

// --------------------------------------------------------------- growth

pub const GROWTH_CONFIGS: u64 = 20;
pub const GROWTH_DEPTH: usize = 4;

/// Investor one's expected log growth over `depth` periods minus investor
/// two's, from the start and again after a few simulated periods.
pub fn duel_growth_margins(seed: u64, index: u64) -> Result<Vec<(usize, Vec<f64>)>> {
    let game = random_duel(seed, index)?;
    let mut out = Vec::new();
    let h0 = History::new(
        game.initial_wealth.clone(),
        crate::payoff::PayoffModel::initial_state(&game.model),
    );
    out.push((
        0,
        expected_log_growth(&game.model, &game.rules, &h0, GROWTH_DEPTH)?,
    ));

    let s = 3;
    let mut rng = path_rng(seed, 1000 + index);
    let rec = simulate(&game.model, &game.rules, &game.initial_wealth, s, &mut rng)?;
    if rec.wealth_at(s).iter().all(|y| *y > 0.0) {
        let h = History {
            initial_wealth: game.initial_wealth.clone(),
            past_profiles: rec.steps.iter().map(|st| st.profile.clone()).collect(),
            current_state: rec.steps[s - 1].state,
            current_wealth: rec.wealth_at(s).to_vec(),
        };
        out.push((
            s,
            expected_log_growth(&game.model, &game.rules, &h, GROWTH_DEPTH)?,
        ));
    }
    Ok(out)
}

/// One period of `N = 1`, `Y_0 = (1,1,1)`, `ρ = 1`, `X = 1`, proportions
/// `(λ̂, 1, 0)`.
pub fn three_investor_counterexample() -> Result<Vec<f64>> {
    let law = DiscreteDistribution::point_mass(vec![1.0])?;
    let (_, gro) = gro_solution(3.0, 1.0, &law, DEFAULT_TOL)?;
    let profile = ProportionProfile::new(vec![
        gro,
        ProportionVector::new(vec![1.0])?,
        ProportionVector::zeros(1),
    ])?;
    Ok(step_wealth(&profile, &[1.0, 1.0, 1.0], 1.0, &[1.0]))
}

fn growth_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut tree = MarginTracker::default();
    for i in 0..GROWTH_CONFIGS {
        for (s, g) in duel_growth_margins(opts.seed, i)? {
            let margin = if g[1] == f64::NEG_INFINITY {
                1.0
            } else {
                g[0] - g[1] + DRIFT_TOL
            };
            tree.observe(margin, || {
                Witness::at(i, s, 0)
                    .with("growth_1", g[0])
                    .with("growth_2", g[1])
            });
        }
    }
    let y = three_investor_counterexample()?;
    let mut counter = MarginTracker::default();
    let err = (y[0] - 11.0 / 12.0).abs();
    counter.observe(
        if err <= 1e-15 && y[2] == 1.0 && y[2] > y[0] {
            0.0
        } else {
            -err.max(1e-300)
        },
        || point("y1", y[0]).with("y3", y[2]),
    );
    Ok(SuiteReport::new(
        Suite::Growth,
        vec![
            tree.report(
                "two_investor_log_growth",
                format!(
                    "depth-{GROWTH_DEPTH} exact tree: E ln(Y1_(s+t)/Y1_s) >= E ln(Y2_(s+t)/Y2_s) - 1e-9, {GROWTH_CONFIGS} configs"
                ),
            ),
            counter.report("three_investor_counterexample", "Y_1 = (11/12, ., 1)"),
        ],
        info(&[("counterexample_wealth", serde_json::to_value(&y).unwrap_or_default())]),
    ))
}

// ------------------------------------------------------------- theorem4

pub const T4_RUNS: u64 = 50;
pub const T4_HORIZON: usize = 200;
pub const DIVERGENCE_PATHS: u64 = 32;
pub const DIVERGENCE_HORIZON: usize = 10_000;

/// `W'_t` of an all-optimal two-investor market with constant payoff
/// `|X| = 2`, `ρ = 1` and `W_0` split evenly.
pub fn constant_payoff_series(w0: f64, horizon: usize) -> Result<Vec<f64>> {
    let exp = Experiment {
        model: PayoffProcess::iid(DiscreteDistribution::point_mass(vec![2.0])?, 1.0)?,
        rules: vec![StrategyRule::gro(); 2],
        initial_wealth: vec![w0 / 2.0, w0 / 2.0],
        horizon,
        seed: 0,
        paths: 1,
    };
    Ok(theorem4_audit(&exp)?.discounted.remove(0))
}

pub fn divergence_experiment(
    model: PayoffProcess,
    w0: f64,
    seed: u64,
) -> Experiment<PayoffProcess> {
    Experiment {
        model,
        rules: vec![StrategyRule::gro(); 2],
        initial_wealth: vec![w0 / 2.0, w0 / 2.0],
        horizon: DIVERGENCE_HORIZON,
        seed,
        paths: DIVERGENCE_PATHS,
    }
}

/// The constant payoff `2` multiplied by `ξ` uniform on `{1/4, 1/2, 3/4, 1}`.
pub fn randomized_constant_market() -> Result<PayoffProcess> {
    let d = DiscreteDistribution::new(
        [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|x| (vec![*x], 0.25))
            .collect(),
    )?;
    PayoffProcess::iid(d, 1.0)
}

fn theorem4_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut sup = MarginTracker::default();
    let mut eq = MarginTracker::default();
    let mut reduction = MarginTracker::default();
    for i in 0..T4_RUNS {
        let exp =
            random_all_gro(opts.seed.wrapping_add(4), i)?.experiment(T4_HORIZON, opts.seed, 1);
        let a = theorem4_audit(&exp)?;
        for (tracker, r) in [(&mut sup, a.supermartingale), (&mut eq, a.growth_equation)] {
            let mut w = r.witness;
            if let Some(w) = w.as_mut() {
                w.path = Some(i);
            }
            tracker.merge(MarginTracker {
                checked: r.checked,
                worst_margin: r.worst_margin,
                witness: w,
            });
        }
        let rec = exp.run_path(0)?;
        let gap = discount_reduction_gap(&exp.model, &rec, DEFAULT_TOL)?;
        reduction.observe(1e-9 - gap.proportions.max(gap.wealth), || {
            Witness::at(i, 0, 0)
                .with("proportions", gap.proportions)
                .with("wealth", gap.wealth)
        });
    }

    let mut constant = MarginTracker::default();
    for w0 in [1.0, 5.0] {
        let want = f64::max(w0, 2.0);
        for (t, w) in constant_payoff_series(w0, 100)?.iter().enumerate().skip(1) {
            let err = (w - want).abs() / want;
            constant.observe(1e-12 - err, || {
                Witness::at(0, t, 0)
                    .with("discounted", *w)
                    .with("expected", want)
            });
        }
    }

    let th = opts.thresholds;
    let mut diverge = MarginTracker::default();
    let mut smaller = MarginTracker::default();
    let mut info_pairs = Vec::new();
    for (name, model, w0) in [
        ("two_point", two_point_market()?, 2.0),
        ("randomized_constant", randomized_constant_market()?, 5.0),
    ] {
        let a = theorem4_audit(&divergence_experiment(model, w0, opts.seed))?;
        let terminal = a.terminal();
        for (p, w) in terminal.iter().enumerate() {
            let witness = || {
                Witness::at(p as u64, DIVERGENCE_HORIZON, 0)
                    .with("discounted", *w)
                    .with("w0", w0)
            };
            if name == "two_point" {
                diverge.observe(w / (th.divergence * w0) - 1.0, witness);
            } else {
                // the constant payoff 2 would stall at max(W_0, 2) = W_0
                smaller.observe(w / w0 - 1.0, witness);
            }
        }
        // dyadic checkpoints of the first path
        let checkpoints: Vec<f64> = (0..)
            .map(|k| 1usize << k)
            .take_while(|t| *t <= DIVERGENCE_HORIZON)
            .map(|t| a.discounted[0][t])
            .collect();
        let lowest = terminal.iter().copied().fold(f64::INFINITY, f64::min);
        info_pairs.push((
            format!("{name}_terminal_min"),
            serde_json::Value::from(lowest),
        ));
        info_pairs.push((
            format!("{name}_dyadic_checkpoints"),
            serde_json::Value::from(checkpoints),
        ));
    }

    let mut info = serde_json::Map::new();
    for (k, v) in info_pairs {
        info.insert(k, v);
    }
    Ok(SuiteReport::new(
        Suite::Theorem4,
        vec![
            sup.report(
                "inverse_discounted_wealth_supermartingale",
                format!("exact one-step check at every step, {T4_RUNS} random all-optimal runs, T = {T4_HORIZON}"),
            ),
            eq.report("discounted_wealth_equation", "relative residual <= 1e-9"),
            constant.report("constant_payoff_closed_form", "W'_t = max(W_0, 2) for W_0 in {1, 5}, relative 1e-12"),
            diverge.report(
                "discounted_wealth_diverges",
                format!(
                    "iid payoff {{0.5, 2}}, W_0 = 2: W'_T >= {} W_0 at T = {DIVERGENCE_HORIZON} on all {DIVERGENCE_PATHS} paths",
                    th.divergence
                ),
            ),
            smaller.report(
                "smaller_payoff_grows",
                format!("payoff 2 times xi, xi uniform on quarters: W'_T > W_0 = 5 on all {DIVERGENCE_PATHS} paths"),
            ),
            reduction.report(
                "discount_reduction",
                "unit-rate replay matches proportions and W_t/D_t to 1e-9",
            ),
        ],
        info,
    ))
}

// ------------------------------------------------------------- example6

pub const EXAMPLE6_ENGINE_HORIZON: usize = 10_000;
pub const EXAMPLE6_ORACLE_HORIZON: usize = 1_000_000;

fn example6_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let cmp = decay_compare(EXAMPLE6_ENGINE_HORIZON, 1e-9)?;
    let oracle = decay_oracle(EXAMPLE6_ORACLE_HORIZON);
    let t = EXAMPLE6_ORACLE_HORIZON;
    let (r_t, r_half) = (oracle.r2[t - 1], oracle.r2[t / 2 - 1]);
    let (w_t, w_1) = (oracle.w[t - 1], oracle.w[0]);

    let mut alpha = MarginTracker::default();
    for (i, a) in oracle.alpha.iter().enumerate() {
        let s = (i + 1) as f64;
        // α_t·t² → r²(1 − r²)/2 ≤ 1/8
        alpha.observe(
            if *a > 0.0 && *a < 1.0 {
                1.0 - a * s * s
            } else {
                -1.0
            },
            || Witness::at(0, i + 1, 1).with("alpha", *a),
        );
    }
    let mut conv = MarginTracker::default();
    conv.observe((1e-6 - (r_t - r_half).abs()).min(r_t), || {
        point("r2_T", r_t).with("r2_half", r_half)
    });
    let mut ruin = MarginTracker::default();
    let ratio = w_t / w_1;
    ruin.observe(opts.thresholds.ruin - ratio, || {
        point("w_T", w_t).with("w_1", w_1).with("ratio", ratio)
    });

    Ok(SuiteReport::new(
        Suite::Example6,
        vec![
            cmp.agreement,
            cmp.gro_half,
            cmp.cash_only,
            alpha.report(
                "alpha_bounds",
                "0 < alpha_t < 1 and alpha_t t^2 <= 1 up to T = 1e6",
            ),
            conv.report(
                "r2_converges",
                "|r2_T - r2_(T/2)| < 1e-6 and r2_T > 0 at T = 1e6",
            ),
            ruin.report(
                "wealth_vanishes",
                format!("W_T <= {} W_1 at T = 1e6", opts.thresholds.ruin),
            ),
        ],
        info(&[
            ("r2_limit_estimate", r_t.into()),
            ("w_ratio", ratio.into()),
            ("alpha_t2_max", oracle.alpha_scaled_max().into()),
            ("engine_terminal_w", cmp.terminal_w.into()),
        ]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for n in Suite::NAMES {
            assert_eq!(n.parse::<Suite>().unwrap().to_string(), n);
        }
        assert!("zeta".parse::<Suite>().is_err());
        assert_eq!(Suite::All.expand().len(), 7);
    }

    #[test]
    fn gibbs_pairs_are_valid() {
        let mut rng = path_rng(5, 0);
        for _ in 0..1000 {
            let (a, b) = random_gibbs_pair(&mut rng);
            assert!(a.iter().sum::<f64>() <= 1.0 + 1e-12 && b.iter().sum::<f64>() <= 1.0 + 1e-12);
            assert!(a.iter().zip(&b).all(|(x, y)| *y > 0.0 || *x == 0.0));
        }
    }

    #[test]
    fn counterexample_wealth() {
        let y = three_investor_counterexample().unwrap();
        assert_eq!(y[2], 1.0);
        assert!((y[0] - 11.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn fault_injection_fails_drift() {
        let opts = SuiteOptions {
            inject_fault: true,
            ..SuiteOptions::default()
        };
        let r = run_suite(Suite::Drift, &opts).unwrap();
        assert!(!r.passed);
        let w = r.check("drift").unwrap().witness.clone().unwrap();
        assert!(w.values["drift"] < 0.0);
        assert!(w.path.is_some() && w.step.is_some());
    }
}
