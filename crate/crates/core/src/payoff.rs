//! Finite-support payoff laws and the Markov payoff/interest process.
//!
//! Every conditional law of the payoff vector is a finite list of atoms, so
//! all integrals against it are exact finite sums.  A [`PayoffProcess`]
//! attaches the gross interest factor to the state occupied at the start of
//! a period; payoff and next state are drawn jointly from one transition atom.

use std::borrow::Cow;
use std::collections::HashMap;
use std::str::FromStr;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a law before renormalization.
pub const PROB_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub payoff: Vec<f64>,
    pub prob: f64,
}

impl Atom {
    /// `|x|`, the total payoff of all assets.
    pub fn total(&self) -> f64 {
        self.payoff.iter().sum()
    }
}

/// A probability law on payoff vectors with finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let atoms = atoms
            .into_iter()
            .map(|(payoff, prob)| Atom { payoff, prob })
            .collect();
        Self::from_atoms(atoms)
    }

    pub fn from_atoms(mut atoms: Vec<Atom>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::Config("distribution needs at least one atom".into()))?;
        let dim = first.payoff.len();
        if dim == 0 {
            return Err(Error::Config(
                "payoff vectors must have at least one asset".into(),
            ));
        }
        for atom in &atoms {
            validate_payoff(&atom.payoff, dim)?;
            if !(atom.prob.is_finite() && atom.prob > 0.0 && atom.prob <= 1.0 + PROB_SUM_TOL) {
                return Err(Error::Config(format!(
                    "atom probability {} must lie in (0, 1]",
                    atom.prob
                )));
            }
        }
        normalize(&mut atoms)?;
        Ok(Self { atoms })
    }

    pub fn point_mass(payoff: Vec<f64>) -> Result<Self> {
        Self::new(vec![(payoff, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Number of assets N.
    pub fn dim(&self) -> usize {
        self.atoms[0].payoff.len()
    }

    pub fn is_point_mass(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Exact `Σ prob·φ(payoff)`.
    ///
    /// A `+inf` term makes the result `+inf` (likewise `-inf`); both at once
    /// is an error.  Terms with zero weight are never evaluated since atoms
    /// have strictly positive probability.
    pub fn expect<F>(&self, phi: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut sum = 0.0;
        let (mut pos_inf, mut neg_inf) = (false, false);
        for atom in &self.atoms {
            let v = phi(&atom.payoff);
            if v.is_nan() {
                return Err(Error::Domain("integrand is NaN at an atom".into()));
            }
            if v == f64::INFINITY {
                pos_inf = true;
            } else if v == f64::NEG_INFINITY {
                neg_inf = true;
            } else {
                sum += atom.prob * v;
            }
        }
        match (pos_inf, neg_inf) {
            (true, true) => Err(Error::IndeterminateExpectation),
            (true, false) => Ok(f64::INFINITY),
            (false, true) => Ok(f64::NEG_INFINITY),
            (false, false) => Ok(sum),
        }
    }

    /// The law of `k·X`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("scale factor {k} must be positive")));
        }
        Ok(Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    payoff: a.payoff.iter().map(|x| x * k).collect(),
                    prob: a.prob,
                })
                .collect(),
        })
    }

    /// Merge atoms with bit-identical payoff vectors, keeping first-seen order.
    fn merged(atoms: impl IntoIterator<Item = Atom>) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        for atom in atoms {
            let key: Vec<u64> = atom.payoff.iter().map(|x| canonical_bits(*x)).collect();
            match index.get(&key) {
                Some(&i) => out[i].prob += atom.prob,
                None => {
                    index.insert(key, out.len());
                    out.push(atom);
                }
            }
        }
        out
    }
}

// -0.0 and 0.0 denote the same payoff.
fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

fn validate_payoff(payoff: &[f64], dim: usize) -> Result<()> {
    if payoff.len() != dim {
        return Err(Error::Config(format!(
            "payoff vector has {} components, expected {dim}",
            payoff.len()
        )));
    }
    if let Some(x) = payoff.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Config(format!(
            "payoff component {x} must be finite and non-negative"
        )));
    }
    Ok(())
}

fn normalize(atoms: &mut [Atom]) -> Result<()> {
    let total: f64 = atoms.iter().map(|a| a.prob).sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::Config(format!(
            "probabilities must sum to 1 (got {total:.17})"
        )));
    }
    for a in atoms.iter_mut() {
        a.prob /= total;
    }
    Ok(())
}

/// One transition atom: the payoff realized over the period and the state
/// entered at its end.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub next: usize,
    pub payoff: Vec<f64>,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub label: String,
    /// Gross interest factor ρ for the period that starts in this state.
    pub rate: f64,
    /// `(next state label, payoff, probability)`.
    pub transitions: Vec<(String, Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
struct State {
    label: String,
    rate: f64,
    transitions: Vec<Transition>,
    cumulative: Vec<f64>,
    law: DiscreteDistribution,
}

/// Finite-state Markov generator of payoffs and interest factors.
#[derive(Debug, Clone)]
pub struct PayoffProcess {
    states: Vec<State>,
    initial: usize,
    assets: usize,
}

/// Parses `payoff:prob` pairs separated by commas, with vector components
/// separated by `/`: `"0.5:0.5,2:0.5"` or `"1/0:0.5,0/1:0.5"`.
impl FromStr for DiscreteDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{t}` is not a number in distribution `{s}`")))
        };
        let atoms = s
            .split(',')
            .map(|pair| {
                let (x, p) = pair.split_once(':').ok_or_else(|| {
                    Error::Config(format!("atom `{pair}` is not of the form payoff:prob"))
                })?;
                let payoff = x.split('/').map(num).collect::<Result<Vec<_>>>()?;
                Ok((payoff, num(p)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }
}

impl PayoffProcess {
    pub fn new(specs: Vec<StateSpec>, initial_state: &str) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::Config(
                "payoff process needs at least one state".into(),
            ));
        }
        let mut index = HashMap::new();
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.label.clone(), i).is_some() {
                return Err(Error::Config(format!(
                    "duplicate state label `{}`",
                    s.label
                )));
            }
        }
        let lookup = |label: &str| {
            index
                .get(label)
                .copied()
                .ok_or_else(|| Error::UnknownState(label.to_string()))
        };
        let initial = lookup(initial_state)?;
        let assets = specs
            .iter()
            .flat_map(|s| s.transitions.first())
            .map(|t| t.1.len())
            .next()
            .ok_or_else(|| Error::Config("payoff process has no transitions".into()))?;
        if assets == 0 {
            return Err(Error::Config(
                "payoff vectors must have at least one asset".into(),
            ));
        }

        let mut states = Vec::with_capacity(specs.len());
        for spec in &specs {
            if !(spec.rate.is_finite() && spec.rate >= 0.0) {
                return Err(Error::Config(format!(
                    "state `{}`: interest factor {} must be finite and non-negative",
                    spec.label, spec.rate
                )));
            }
            if spec.transitions.is_empty() {
                return Err(Error::Config(format!(
                    "state `{}` has no transitions",
                    spec.label
                )));
            }
            let mut transitions = Vec::with_capacity(spec.transitions.len());
            for (next, payoff, prob) in &spec.transitions {
                validate_payoff(payoff, assets)
                    .map_err(|e| Error::Config(format!("state `{}`: {e}", spec.label)))?;
                if !(prob.is_finite() && *prob > 0.0) {
                    return Err(Error::Config(format!(
                        "state `{}`: transition probability {prob} must be positive",
                        spec.label
                    )));
                }
                let total: f64 = payoff.iter().sum();
                if spec.rate + total <= 0.0 {
                    return Err(Error::Config(format!(
                        "state `{}`: interest factor plus total payoff must be positive",
                        spec.label
                    )));
                }
                transitions.push(Transition {
                    next: lookup(next)?,
                    payoff: payoff.clone(),
                    prob: *prob,
                });
            }
            let total: f64 = transitions.iter().map(|t| t.prob).sum();
            if (total - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::Config(format!(
                    "state `{}`: probabilities must sum to 1 (got {total:.17})",
                    spec.label
                )));
            }
            for t in &mut transitions {
                t.prob /= total;
            }
            let cumulative = transitions
                .iter()
                .scan(0.0, |acc, t| {
                    *acc += t.prob;
                    Some(*acc)
                })
                .collect();
            let law = DiscreteDistribution {
                atoms: DiscreteDistribution::merged(transitions.iter().map(|t| Atom {
                    payoff: t.payoff.clone(),
                    prob: t.prob,
                })),
            };
            states.push(State {
                label: spec.label.clone(),
                rate: spec.rate,
                transitions,
                cumulative,
                law,
            });
        }
        Ok(Self {
            states,
            initial,
            assets,
        })
    }

    /// Single-state process with i.i.d. payoffs and a constant interest factor.
    pub fn iid(dist: DiscreteDistribution, rate: f64) -> Result<Self> {
        let transitions = dist
            .atoms()
            .iter()
            .map(|a| ("iid".to_string(), a.payoff.clone(), a.prob))
            .collect();
        Self::new(
            vec![StateSpec {
                label: "iid".into(),
                rate,
                transitions,
            }],
            "iid",
        )
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    /// Conditional law of the next payoff given the current state label.
    pub fn conditional_distribution(&self, label: &str) -> Result<&DiscreteDistribution> {
        Ok(&self.states[self.state_index(label)?].law)
    }

    pub fn law(&self, state: usize) -> &DiscreteDistribution {
        &self.states[state].law
    }

    pub fn state_transitions(&self, state: usize) -> &[Transition] {
        &self.states[state].transitions
    }

    /// Draw the next `(state, payoff)` from the current state's transitions.
    pub fn sample_step<'a>(&'a self, state: usize, rng: &mut dyn RngCore) -> (usize, &'a [f64]) {
        let s = &self.states[state];
        let u: f64 = rng.random();
        let i = s
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(s.transitions.len() - 1);
        (s.transitions[i].next, &s.transitions[i].payoff)
    }
}

/// Deterministic single-asset payoff equal to a fixed fraction of the total
/// wealth at the start of the period, with a constant interest factor.
///
/// This is the endogenous payoff of the vanishing-wealth example; its
/// conditional law is a point mass known one period ahead.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthLinkedPayoff {
    pub fraction: f64,
    pub rate: f64,
}

impl WealthLinkedPayoff {
    pub fn new(fraction: f64, rate: f64) -> Result<Self> {
        if !(fraction.is_finite() && fraction > 0.0) {
            return Err(Error::Config(format!(
                "payoff fraction {fraction} must be positive"
            )));
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Config(format!(
                "interest factor {rate} must be non-negative"
            )));
        }
        Ok(Self { fraction, rate })
    }
}

/// What the market engine needs from a payoff source.
pub trait PayoffModel: Send + Sync {
    fn num_assets(&self) -> usize;
    fn num_states(&self) -> usize;
    fn initial_state(&self) -> usize;
    fn state_label(&self, state: usize) -> &str;
    /// Gross interest factor for the period starting in `state`.
    fn rate(&self, state: usize) -> f64;
    /// Transition atoms out of `state` given total wealth at the period start.
    fn transitions(&self, state: usize, total_wealth: f64) -> Cow<'_, [Transition]>;
    /// Conditional payoff law, identical payoffs merged.
    fn conditional(&self, state: usize, total_wealth: f64) -> Cow<'_, DiscreteDistribution>;
    fn sample(&self, state: usize, total_wealth: f64, rng: &mut dyn RngCore) -> (usize, Vec<f64>);
}

impl PayoffModel for PayoffProcess {
    fn num_assets(&self) -> usize {
        self.assets
    }

    fn num_states(&self) -> usize {
        self.states.len()
    }

    fn initial_state(&self) -> usize {
        self.initial
    }

    fn state_label(&self, state: usize) -> &str {
        &self.states[state].label
    }

    fn rate(&self, state: usize) -> f64 {
        self.states[state].rate
    }

    fn transitions(&self, state: usize, _total_wealth: f64) -> Cow<'_, [Transition]> {
        Cow::Borrowed(&self.states[state].transitions)
    }

    fn conditional(&self, state: usize, _total_wealth: f64) -> Cow<'_, DiscreteDistribution> {
        Cow::Borrowed(&self.states[state].law)
    }

    fn sample(&self, state: usize, _total_wealth: f64, rng: &mut dyn RngCore) -> (usize, Vec<f64>) {
        let (next, x) = self.sample_step(state, rng);
        (next, x.to_vec())
    }
}

impl PayoffModel for WealthLinkedPayoff {
    fn num_assets(&self) -> usize {
        1
    }

    fn num_states(&self) -> usize {
        1
    }

    fn initial_state(&self) -> usize {
        0
    }

    fn state_label(&self, _state: usize) -> &str {
        "det"
    }

    fn rate(&self, _state: usize) -> f64 {
        self.rate
    }

    fn transitions(&self, _state: usize, total_wealth: f64) -> Cow<'_, [Transition]> {
        Cow::Owned(vec![Transition {
            next: 0,
            payoff: vec![self.fraction * total_wealth],
            prob: 1.0,
        }])
    }

    fn conditional(&self, _state: usize, total_wealth: f64) -> Cow<'_, DiscreteDistribution> {
        Cow::Owned(DiscreteDistribution {
            atoms: vec![Atom {
                payoff: vec![self.fraction * total_wealth],
                prob: 1.0,
            }],
        })
    }

    fn sample(
        &self,
        _state: usize,
        total_wealth: f64,
        _rng: &mut dyn RngCore,
    ) -> (usize, Vec<f64>) {
        (0, vec![self.fraction * total_wealth])
    }
}

/// Any payoff source an experiment can be configured with.
#[derive(Debug, Clone)]
pub enum Market {
    Process(PayoffProcess),
    WealthLinked(WealthLinkedPayoff),
}

impl Market {
    pub fn as_process(&self) -> Option<&PayoffProcess> {
        match self {
            Market::Process(p) => Some(p),
            Market::WealthLinked(_) => None,
        }
    }

    fn inner(&self) -> &dyn PayoffModel {
        match self {
            Market::Process(p) => p,
            Market::WealthLinked(w) => w,
        }
    }
}

impl PayoffModel for Market {
    fn num_assets(&self) -> usize {
        self.inner().num_assets()
    }
    fn num_states(&self) -> usize {
        self.inner().num_states()
    }
    fn initial_state(&self) -> usize {
        self.inner().initial_state()
    }
    fn state_label(&self, state: usize) -> &str {
        self.inner().state_label(state)
    }
    fn rate(&self, state: usize) -> f64 {
        self.inner().rate(state)
    }
    fn transitions(&self, state: usize, total_wealth: f64) -> Cow<'_, [Transition]> {
        self.inner().transitions(state, total_wealth)
    }
    fn conditional(&self, state: usize, total_wealth: f64) -> Cow<'_, DiscreteDistribution> {
        self.inner().conditional(state, total_wealth)
    }
    fn sample(&self, state: usize, total_wealth: f64, rng: &mut dyn RngCore) -> (usize, Vec<f64>) {
        self.inner().sample(state, total_wealth, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_rng;

    fn two_point() -> DiscreteDistribution {
        DiscreteDistribution::new(vec![(vec![0.5], 0.5), (vec![2.0], 0.5)]).unwrap()
    }

    #[test]
    fn parses_literals() {
        let d: DiscreteDistribution = "0.5:0.5, 2:0.5".parse().unwrap();
        assert_eq!(d, two_point());
        let d: DiscreteDistribution = "1/0:0.5,0/1:0.5".parse().unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(d.atoms()[1].payoff, vec![0.0, 1.0]);
        assert!("2".parse::<DiscreteDistribution>().is_err());
        assert!("2:x".parse::<DiscreteDistribution>().is_err());
        let e = "1:0.5".parse::<DiscreteDistribution>().unwrap_err();
        assert!(e.to_string().contains("probabilities must sum to 1"));
    }

    #[test]
    fn conditional_of_single_state_is_point_mass() {
        let p =
            PayoffProcess::iid(DiscreteDistribution::point_mass(vec![2.0]).unwrap(), 1.0).unwrap();
        let k = p.conditional_distribution("iid").unwrap();
        assert_eq!(
            k.atoms(),
            &[Atom {
                payoff: vec![2.0],
                prob: 1.0
            }]
        );
    }

    #[test]
    fn identical_payoffs_merge_across_next_states() {
        let p = PayoffProcess::new(
            vec![
                StateSpec {
                    label: "a".into(),
                    rate: 1.0,
                    transitions: vec![("a".into(), vec![1.0], 0.4), ("b".into(), vec![1.0], 0.6)],
                },
                StateSpec {
                    label: "b".into(),
                    rate: 1.0,
                    transitions: vec![("a".into(), vec![1.0], 1.0)],
                },
            ],
            "a",
        )
        .unwrap();
        let k = p.conditional_distribution("a").unwrap();
        assert_eq!(k.atoms().len(), 1);
        assert_eq!(k.atoms()[0].payoff, vec![1.0]);
        assert!((k.atoms()[0].prob - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_atom_law_passes_through() {
        let p = PayoffProcess::iid(two_point(), 1.0).unwrap();
        assert_eq!(p.conditional_distribution("iid").unwrap(), &two_point());
    }

    #[test]
    fn unknown_state_is_rejected() {
        let p = PayoffProcess::iid(two_point(), 1.0).unwrap();
        assert_eq!(
            p.conditional_distribution("nope").unwrap_err(),
            Error::UnknownState("nope".into())
        );
    }

    #[test]
    fn expect_examples() {
        let pm = DiscreteDistribution::point_mass(vec![2.0]).unwrap();
        assert_eq!(pm.expect(|x| x.iter().sum()).unwrap(), 2.0);

        // 0.5·(1/0.5) + 0.5·(1/2)
        let v = two_point().expect(|x| 1.0 / x[0]).unwrap();
        assert!((v - 1.25).abs() < 1e-15);

        let with_zero =
            DiscreteDistribution::new(vec![(vec![0.0], 0.1), (vec![1.0], 0.9)]).unwrap();
        let v = with_zero
            .expect(|x| {
                let s: f64 = x.iter().sum();
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / s
                }
            })
            .unwrap();
        assert_eq!(v, f64::INFINITY);
    }

    #[test]
    fn mixed_infinities_are_indeterminate() {
        let d = two_point();
        let err = d
            .expect(|x| {
                if x[0] < 1.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            })
            .unwrap_err();
        assert_eq!(err, Error::IndeterminateExpectation);
    }

    #[test]
    fn bad_probabilities_are_rejected() {
        let err = DiscreteDistribution::new(vec![(vec![1.0], 0.5), (vec![2.0], 0.6)]).unwrap_err();
        assert!(err.to_string().contains("probabilities must sum to 1"));
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![-1.0], 1.0)]).is_err());
        assert!(DiscreteDistribution::new(vec![(vec![1.0], 0.0), (vec![2.0], 1.0)]).is_err());
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let d =
            DiscreteDistribution::new(vec![(vec![1.0], 0.5 + 4e-13), (vec![2.0], 0.5)]).unwrap();
        let s: f64 = d.atoms().iter().map(|a| a.prob).sum();
        assert!((s - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn positivity_condition_is_enforced() {
        let d = DiscreteDistribution::new(vec![(vec![0.0], 0.5), (vec![1.0], 0.5)]).unwrap();
        let err = PayoffProcess::iid(d.clone(), 0.0).unwrap_err();
        assert!(err.to_string().contains("must be positive"));
        assert!(PayoffProcess::iid(d, 0.5).is_ok());
    }

    #[test]
    fn point_mass_sampling_ignores_rng() {
        let p =
            PayoffProcess::iid(DiscreteDistribution::point_mass(vec![3.0]).unwrap(), 1.0).unwrap();
        let mut rng = path_rng(7, 0);
        for _ in 0..100 {
            assert_eq!(p.sample_step(0, &mut rng), (0, &[3.0][..]));
        }
    }

    #[test]
    fn equiprobable_sampling_frequency_and_reproducibility() {
        let p = PayoffProcess::iid(two_point(), 1.0).unwrap();
        let n = 100_000;
        let draw = |seed| {
            let mut rng = path_rng(seed, 3);
            (0..n)
                .map(|_| p.sample_step(0, &mut rng).1[0])
                .collect::<Vec<_>>()
        };
        let a = draw(11);
        assert_eq!(a, draw(11));
        let hits = a.iter().filter(|&&x| x == 0.5).count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!(
            (hits - n as f64 * 0.5).abs() <= 3.0 * sigma,
            "hits = {hits}"
        );
    }

    #[test]
    fn wealth_linked_payoff_is_half_wealth() {
        let m = WealthLinkedPayoff::new(0.5, 1.0).unwrap();
        let k = m.conditional(0, 3.0);
        assert_eq!(k.atoms()[0].payoff, vec![1.5]);
        let mut rng = path_rng(0, 0);
        assert_eq!(m.sample(0, 3.0, &mut rng), (0, vec![1.5]));
    }
}
