use crate::error::{Error, Result};

/// `α(ln α − ln β) − (‖α − β‖²/4 + |α| − |β|)`, non-negative for admissible
/// inputs; terms with `αⁿ = 0` count as zero.
pub fn gibbs_gap(alpha: &[f64], beta: &[f64]) -> Result<f64> {
    if alpha.len() != beta.len() {
        return Err(Error::Domain("vectors differ in length".into()));
    }
    for v in [alpha, beta] {
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Domain(
                "components must be finite and non-negative".into(),
            ));
        }
        if v.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::Domain("vector sums exceed 1".into()));
        }
    }
    if alpha.iter().zip(beta).any(|(a, b)| *b == 0.0 && *a > 0.0) {
        return Err(Error::Domain("alpha must vanish wherever beta does".into()));
    }
    let lhs: f64 = alpha
        .iter()
        .zip(beta)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a.ln() - b.ln()))
        .sum();
    let dist2: f64 = alpha.iter().zip(beta).map(|(a, b)| (a - b) * (a - b)).sum();
    let rhs = dist2 / 4.0 + alpha.iter().sum::<f64>() - beta.iter().sum::<f64>();
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tight_at_equality() {
        assert_eq!(gibbs_gap(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn known_values() {
        // 30-digit evaluations of both sides
        let g = gibbs_gap(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert!((g - 0.112_591_036_225_890_46).abs() < 1e-14, "{g}");
        let g = gibbs_gap(&[0.2, 0.0], &[0.5, 0.0]).unwrap();
        assert!((g - 0.094_241_853_625_168_99).abs() < 1e-14, "{g}");
    }

    #[test]
    fn precondition_violations() {
        assert!(gibbs_gap(&[0.5, 0.1], &[0.5, 0.0]).is_err());
        assert!(gibbs_gap(&[0.7, 0.7], &[0.5, 0.5]).is_err());
        assert!(gibbs_gap(&[0.5], &[0.5, 0.1]).is_err());
        assert!(gibbs_gap(&[-0.1], &[0.5]).is_err());
    }

    fn sub_simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
        (
            proptest::collection::vec(0.0f64..1.0, n),
            0.0f64..=1.0,
            proptest::bool::weighted(0.2),
        )
            .prop_map(|(w, mass, full)| {
                let s: f64 = w.iter().sum();
                let mass = if full { 1.0 } else { mass };
                if s == 0.0 {
                    w
                } else {
                    w.iter().map(|x| x / s * mass).collect()
                }
            })
    }

    proptest! {
        #[test]
        fn gap_is_nonnegative((a, b) in (1usize..6).prop_flat_map(|n| (sub_simplex(n), sub_simplex(n)))) {
            let a: Vec<f64> = a.iter().zip(&b).map(|(x, y)| if *y == 0.0 { 0.0 } else { *x }).collect();
            prop_assert!(gibbs_gap(&a, &b).unwrap() >= -1e-12);
        }
    }
}
