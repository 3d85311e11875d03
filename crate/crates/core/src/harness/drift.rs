//! Exact one-step conditional drift of an investor's relative wealth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::{clear_prices, step_wealth_at};
use crate::payoff::PayoffModel;
use crate::proportions::ProportionProfile;
use crate::strategy::{relative, representative};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftRow {
    pub investor: usize,
    /// `r_{t−1}`.
    pub relative: f64,
    /// `E(ln r_t − ln r_{t−1} | F_{t−1})`; `-inf` if some atom wipes the investor out.
    pub drift: f64,
    /// `E(r_t | F_{t−1}) − r_{t−1}`.
    pub relative_drift: f64,
    /// `¼(1 − r)²‖λ − λ̃‖²`.
    pub lower_bound: f64,
    pub i_g: f64,
    pub i_h: f64,
}

/// Enumerate the payoff atoms of the coming period and return the exact
/// drift of investor `investor`, who must hold positive wealth.
pub fn exact_drift<P: PayoffModel + ?Sized>(
    model: &P,
    state: usize,
    wealth: &[f64],
    profile: &ProportionProfile,
    investor: usize,
) -> Result<DriftRow> {
    let y = wealth[investor];
    if !(y > 0.0) {
        return Err(Error::Domain(format!(
            "investor {investor} holds no wealth"
        )));
    }
    let total: f64 = wealth.iter().sum();
    let rel = relative(wealth);
    let r = rel[investor];
    let rate = model.rate(state);
    let law = model.conditional(state, total);
    let prices = clear_prices(profile, wealth);

    let mut drift = 0.0;
    let mut relative_drift = 0.0;
    for atom in law.atoms() {
        let next = step_wealth_at(profile, wealth, &prices, rate, &atom.payoff);
        let next_total: f64 = next.iter().sum();
        let r_next = if next_total > 0.0 {
            next[investor] / next_total
        } else {
            0.0
        };
        relative_drift += atom.prob * (r_next - r);
        drift += if r_next > 0.0 {
            atom.prob * (r_next.ln() - r.ln())
        } else {
            f64::NEG_INFINITY
        };
    }

    let own = profile.row(investor);
    let rep = representative(profile, &rel, investor);
    let lower_bound = 0.25 * (1.0 - r).powi(2) * own.dist2(&rep);

    // F^n = λⁿ/(rλⁿ + (1 − r)λ̃ⁿ) with 0/0 = 0
    let ln_f: Vec<Option<f64>> = own
        .as_slice()
        .iter()
        .zip(rep.as_slice())
        .map(|(l, lt)| {
            let denom = r * l + (1.0 - r) * lt;
            if *l > 0.0 && denom > 0.0 {
                Some((l / denom).ln())
            } else {
                None
            }
        })
        .collect();
    let cash = own.cash() * total;
    let cash_rep = rep.cash() * total;
    let mut i_g = 0.0;
    let mut i_h = 0.0;
    for atom in law.atoms() {
        let denom = cash * rate + atom.total();
        if denom > 0.0 {
            let g: f64 = atom
                .payoff
                .iter()
                .zip(&ln_f)
                .filter_map(|(x, lf)| lf.map(|v| x * v))
                .sum();
            i_g += atom.prob * g / denom;
            i_h += atom.prob * (1.0 - r) * (cash - cash_rep) * rate / denom;
        }
    }

    Ok(DriftRow {
        investor,
        relative: r,
        drift,
        relative_drift,
        lower_bound,
        i_g,
        i_h,
    })
}
