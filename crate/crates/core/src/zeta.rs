//! Cash level of the relative growth optimal strategy.
//!
//! For total wealth `c`, interest factor `ρ` and payoff law `K`, keeping
//! cash pays off exactly when `∫ cρ/|x| K(dx) > 1`.  In that case the cash
//! amount `ζ ∈ (0, c]` solves `∫ cρ/(ζρ + |x|) K(dx) = 1`; otherwise `ζ = 0`.
//! The optimal proportions are `λ̂ⁿ = ∫ xⁿ/(ζρ + |x|) K(dx)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::payoff::DiscreteDistribution;
use crate::proportions::ProportionVector;

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaSolution {
    pub zeta: f64,
    pub in_gamma: bool,
    /// `∫ cρ/(ζρ + |x|) K(dx) − 1` at the returned `ζ`.
    pub residual: f64,
}

/// `cρ/|x|` with `0/0 = 0` and `pos/0 = +inf`.
fn cash_ratio(c_rho: f64, total: f64) -> f64 {
    if total == 0.0 {
        if c_rho > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        c_rho / total
    }
}

pub fn in_gamma(c: f64, rho: f64, law: &DiscreteDistribution) -> bool {
    let c_rho = c * rho;
    law.expect(|x| cash_ratio(c_rho, x.iter().sum()))
        .map(|v| v > 1.0)
        .unwrap_or(false)
}

/// `∫ cρ/(zρ + |x|) K(dx) − 1`; atoms with a zero denominator contribute 0.
pub fn residual(z: f64, c: f64, rho: f64, law: &DiscreteDistribution) -> f64 {
    let c_rho = c * rho;
    let z_rho = z * rho;
    let mut sum = 0.0;
    for atom in law.atoms() {
        let denom = z_rho + atom.total();
        if denom > 0.0 {
            sum += atom.prob * c_rho / denom;
        } else if c_rho > 0.0 {
            return f64::INFINITY;
        }
    }
    sum - 1.0
}

/// Solve for `ζ` by bisection on `(0, c]`; a point mass is solved in
/// closed form.
///
/// Stops once the bracket is no wider than `tol·max(1, c)`.
pub fn solve_zeta(c: f64, rho: f64, law: &DiscreteDistribution, tol: f64) -> Result<ZetaSolution> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("wealth {c} must be positive")));
    }
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::Domain(format!(
            "interest factor {rho} must be non-negative"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    if !in_gamma(c, rho, law) {
        let off = law.expect(|x| cash_ratio(c * rho, x.iter().sum()))? - 1.0;
        return Ok(ZetaSolution {
            zeta: 0.0,
            in_gamma: false,
            residual: off,
        });
    }

    if law.is_point_mass() && rho > 0.0 {
        let zeta = c - law.atoms()[0].total() / rho;
        return Ok(ZetaSolution {
            zeta,
            in_gamma: true,
            residual: residual(zeta, c, rho, law),
        });
    }

    // residual(0+) > 1 - 1 holds by membership; the upper end must not exceed 0.
    let at_c = residual(c, c, rho, law);
    if at_c > 0.0 {
        return Err(Error::Domain(format!(
            "zeta root not bracketed: residual at z = c is {at_c}"
        )));
    }

    let width = tol * c.max(1.0);
    let (mut lo, mut hi) = (0.0_f64, c);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid, c, rho, law) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let zeta = 0.5 * (lo + hi);
    Ok(ZetaSolution {
        zeta,
        in_gamma: true,
        residual: residual(zeta, c, rho, law),
    })
}

/// `λ̂ⁿ = Σ p·xⁿ/(ζρ + |x|)` for a given cash level.
pub fn proportions_for_zeta(
    zeta: f64,
    rho: f64,
    law: &DiscreteDistribution,
) -> Result<ProportionVector> {
    let mut weights = vec![0.0; law.dim()];
    let z_rho = zeta * rho;
    for atom in law.atoms() {
        let denom = z_rho + atom.total();
        if denom > 0.0 {
            for (w, x) in weights.iter_mut().zip(&atom.payoff) {
                *w += atom.prob * x / denom;
            }
        }
    }
    ProportionVector::new(weights)
}

/// The cash solution together with the optimal proportions.
pub fn gro_solution(
    c: f64,
    rho: f64,
    law: &DiscreteDistribution,
    tol: f64,
) -> Result<(ZetaSolution, ProportionVector)> {
    let sol = solve_zeta(c, rho, law, tol)?;
    let lambda = proportions_for_zeta(sol.zeta, rho, law)?;
    Ok((sol, lambda))
}

pub fn gro_proportions(
    c: f64,
    rho: f64,
    law: &DiscreteDistribution,
    tol: f64,
) -> Result<ProportionVector> {
    gro_solution(c, rho, law, tol).map(|(_, l)| l)
}
