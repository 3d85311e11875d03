//! Relative growth optimal investment in a market of short-lived assets
//! with a bank account.
//!
//! The crate solves for the optimal cash level and proportions, simulates
//! multi-investor wealth dynamics under market-clearing prices, and checks
//! the martingale, dominance and growth properties of the optimal rule by
//! exact enumeration over finite-support payoff laws.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod harness;
pub mod market;
pub mod payoff;
pub mod proportions;
pub mod rng;
pub mod strategy;
pub mod zeta;

pub use error::{Error, Result};
pub use market::{
    clear_prices, discounted_series, simulate, step_wealth, MarketState, TrajectoryRecord,
};
pub use payoff::{
    DiscreteDistribution, Market, PayoffModel, PayoffProcess, StateSpec, WealthLinkedPayoff,
};
pub use proportions::{ProportionProfile, ProportionVector};
pub use strategy::{representative, History, StrategyRule};
pub use zeta::{gro_proportions, in_gamma, solve_zeta, ZetaSolution};
