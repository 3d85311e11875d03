use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the budget constraint before an allocation counts as leverage.
pub const BUDGET_SLACK: f64 = 1e-12;

/// Fractions of one investor's wealth placed in each asset; the rest is cash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProportionVector(Vec<f64>);

impl ProportionVector {
    /// Validates `weights`.  A total in `(1, 1 + 1e-12]` is rescaled to
    /// exactly 1; anything larger is rejected.
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("proportion vector is empty".into()));
        }
        if let Some(w) = weights
            .iter()
            .find(|w| !(w.is_finite() && **w >= 0.0 && **w <= 1.0 + BUDGET_SLACK))
        {
            return Err(Error::Domain(format!("proportion {w} is outside [0, 1]")));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + BUDGET_SLACK {
            return Err(Error::Domain(format!(
                "proportions sum to {total}, exceeding 1 (no borrowing)"
            )));
        }
        if total > 1.0 {
            for w in &mut weights {
                *w /= total;
            }
            // rescaling can leave the sum one ulp above 1
            while weights.iter().sum::<f64>() > 1.0 {
                if let Some(w) = weights.iter_mut().max_by(|a, b| a.total_cmp(b)) {
                    *w = f64::from_bits(w.to_bits() - 1);
                }
            }
        }
        Ok(Self(weights))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `|λ|`, the fraction invested in assets.
    pub fn invested(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn cash(&self) -> f64 {
        1.0 - self.invested()
    }

    /// Squared Euclidean distance.
    pub fn dist2(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl Index<usize> for ProportionVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProportionVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProportionVector> for Vec<f64> {
    fn from(p: ProportionVector) -> Self {
        p.0
    }
}

/// One row per investor; an element of the admissible set of profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionProfile {
    rows: Vec<ProportionVector>,
}

impl ProportionProfile {
    pub fn new(rows: Vec<ProportionVector>) -> Result<Self> {
        let n = rows
            .first()
            .map(ProportionVector::len)
            .ok_or_else(|| Error::Domain("profile has no investors".into()))?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("profile rows have different lengths".into()));
        }
        Ok(Self { rows })
    }

    pub fn zeros(investors: usize, assets: usize) -> Self {
        Self {
            rows: vec![ProportionVector::zeros(assets); investors],
        }
    }

    pub fn rows(&self) -> &[ProportionVector] {
        &self.rows
    }

    pub fn row(&self, m: usize) -> &ProportionVector {
        &self.rows[m]
    }

    pub fn investors(&self) -> usize {
        self.rows.len()
    }

    pub fn assets(&self) -> usize {
        self.rows[0].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_tiny_excess() {
        let p = ProportionVector::new(vec![0.5, 0.5 + 5e-13]).unwrap();
        assert!(p.invested() <= 1.0);
        assert!((p.invested() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_leverage_and_shorts() {
        assert!(ProportionVector::new(vec![0.6, 0.5]).is_err());
        assert!(ProportionVector::new(vec![-0.1, 0.5]).is_err());
        assert!(ProportionVector::new(vec![f64::NAN]).is_err());
        assert!(ProportionVector::new(vec![]).is_err());
    }

    #[test]
    fn serde_validates() {
        let ok: ProportionVector = serde_json::from_str("[0.25, 0.5]").unwrap();
        assert_eq!(ok.as_slice(), &[0.25, 0.5]);
        assert!(serde_json::from_str::<ProportionVector>("[0.75, 0.5]").is_err());
    }

    #[test]
    fn ragged_profile_rejected() {
        let a = ProportionVector::new(vec![0.1]).unwrap();
        let b = ProportionVector::new(vec![0.1, 0.2]).unwrap();
        assert!(ProportionProfile::new(vec![a, b]).is_err());
    }
}
