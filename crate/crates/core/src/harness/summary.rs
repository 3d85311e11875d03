use serde::Serialize;

use crate::market::TrajectoryRecord;

/// `(1/T)·ln(Y_T^m / Y_0^m)` per investor; `-inf` for a ruined investor.
pub fn growth_rate_compare(record: &TrajectoryRecord) -> Vec<f64> {
    let t = record.horizon();
    record
        .wealth_at(t)
        .iter()
        .zip(&record.initial.wealth)
        .map(|(y, y0)| {
            if *y > 0.0 {
                (y / y0).ln() / t as f64
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSummary {
    pub path: u64,
    pub min_relative: Vec<f64>,
    pub terminal_relative: Vec<f64>,
    pub growth_rate: Vec<f64>,
    /// `W'_T`, absent when some interest factor was zero.
    pub terminal_discounted: Option<f64>,
    pub ruined_at: Option<usize>,
}

impl PathSummary {
    pub fn from_record(path: u64, record: &TrajectoryRecord) -> Self {
        let m = record.investors();
        let mut min_relative = record.initial.relative.clone();
        for s in &record.steps {
            for (lo, r) in min_relative.iter_mut().zip(&s.relative) {
                *lo = lo.min(*r);
            }
        }
        let last = record.steps.last();
        Self {
            path,
            min_relative,
            terminal_relative: last.map_or_else(|| vec![0.0; m], |s| s.relative.clone()),
            growth_rate: growth_rate_compare(record),
            terminal_discounted: last
                .filter(|s| s.discount > 0.0)
                .map(|s| s.discounted_total()),
            ruined_at: record.ruined_at,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            if v.is_empty() {
                return f64::NAN;
            }
            let i = p * (v.len() - 1) as f64;
            let (lo, hi) = (i.floor() as usize, i.ceil() as usize);
            if lo == hi {
                v[lo]
            } else {
                v[lo] + (v[hi] - v[lo]) * (i - lo as f64)
            }
        };
        Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: q(0.0),
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            max: q(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub paths: Vec<PathSummary>,
    /// Indexed by investor.
    pub terminal_relative: Vec<Aggregate>,
    pub min_relative: Vec<Aggregate>,
    pub growth_rate: Vec<Aggregate>,
}

impl ExperimentSummary {
    pub fn from_paths(paths: Vec<PathSummary>) -> Self {
        let m = paths.first().map_or(0, |p| p.terminal_relative.len());
        let per = |f: fn(&PathSummary) -> &Vec<f64>| {
            (0..m)
                .map(|k| Aggregate::of(&paths.iter().map(|p| f(p)[k]).collect::<Vec<_>>()))
                .collect()
        };
        Self {
            terminal_relative: per(|p| &p.terminal_relative),
            min_relative: per(|p| &p.min_relative),
            growth_rate: per(|p| &p.growth_rate),
            paths,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let a = Aggregate::of(&[4.0, 1.0, 3.0, 2.0, 5.0]);
        assert_eq!(
            (a.min, a.q25, a.median, a.q75, a.max),
            (1.0, 2.0, 3.0, 4.0, 5.0)
        );
        assert_eq!(a.mean, 3.0);
        let a = Aggregate::of(&[0.0, 1.0]);
        assert_eq!(a.median, 0.5);
    }
}
