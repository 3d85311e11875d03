use rayon::prelude::*;

use crate::error::Result;
use crate::market::{simulate, TrajectoryRecord};
use crate::payoff::PayoffModel;
use crate::rng::path_rng;
use crate::strategy::StrategyRule;

/// A market, its investors and how many seeded paths to run.
#[derive(Debug, Clone)]
pub struct Experiment<P> {
    pub model: P,
    pub rules: Vec<StrategyRule>,
    pub initial_wealth: Vec<f64>,
    pub horizon: usize,
    pub seed: u64,
    pub paths: u64,
}

impl<P: PayoffModel> Experiment<P> {
    pub fn run_path(&self, path: u64) -> Result<TrajectoryRecord> {
        let mut rng = path_rng(self.seed, path);
        simulate(
            &self.model,
            &self.rules,
            &self.initial_wealth,
            self.horizon,
            &mut rng,
        )
    }

    /// Run every path in parallel and apply `f` to each record; results come
    /// back in path order.
    pub fn map_paths<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, TrajectoryRecord) -> Result<T> + Sync,
    {
        (0..self.paths)
            .into_par_iter()
            .map(|i| self.run_path(i).and_then(|rec| f(i, rec)))
            .collect()
    }
}
