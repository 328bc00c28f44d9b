use crate::error::InputError;

const SUM_TOL: f64 = 1e-9;

/// Shannon entropy in bits of a finite distribution given by its probabilities.
///
/// Zero-probability outcomes contribute nothing. The probabilities must be
/// nonnegative and sum to one within `1e-9`.
pub fn shannon_entropy<I>(probs: I) -> Result<f64, InputError>
where
    I: IntoIterator<Item = f64>,
{
    let mut total = 0.0;
    let mut h = 0.0;
    for (k, p) in probs.into_iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(InputError::Range(format!("probability #{k} = {p}")));
        }
        total += p;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    if (total - 1.0).abs() > SUM_TOL {
        return Err(InputError::Range(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(h.max(0.0))
}

/// Entropy of the empirical distribution given by occurrence counts.
pub fn entropy_from_counts<I>(counts: I) -> f64
where
    I: IntoIterator<Item = u64>,
{
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let log_total = total.log2();
    // sum_c (c/N) * (log N - log c) keeps the terms positive
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let c = c as f64;
            c / total * (log_total - c.log2())
        })
        .sum();
    h.max(0.0)
}

/// Upper bound on the entropy of a single rounded row signature, as a
/// function of `lambda = Delta / ||alpha||_2`.
pub fn g_bound(lambda: f64) -> Result<f64, InputError> {
    if !(lambda > 0.0) || lambda.is_nan() {
        return Err(InputError::Range(format!(
            "g_bound needs lambda > 0, got {lambda}"
        )));
    }
    if lambda >= 2.0 {
        Ok(9.0 * (-lambda * lambda / 5.0).exp())
    } else {
        Ok((32.0 + 64.0 / lambda).log2())
    }
}

/// Discrepancy multiplier to impose on a row so that its rounded signature
/// costs at most `b` bits. Satisfies `g_bound(g_inverse(b)) <= b`.
pub fn g_inverse(b: f64) -> Result<f64, InputError> {
    if !(b > 0.0) || b.is_nan() {
        return Err(InputError::Range(format!("g_inverse needs b > 0, got {b}")));
    }
    if b <= 6.0 {
        Ok((10.0 * (9.0 / b).ln()).sqrt())
    } else {
        Ok(128.0 * 0.5_f64.powf(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy([0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(shannon_entropy([1.0]).unwrap(), 0.0);
        assert!((shannon_entropy([0.125; 8]).unwrap() - 3.0).abs() < 1e-12);
        assert!((entropy_from_counts([1, 1, 1, 1]) - 2.0).abs() < 1e-12);
        assert_eq!(entropy_from_counts([7]), 0.0);
    }

    #[test]
    fn entropy_rejects_bad_distributions() {
        assert!(shannon_entropy([0.5, 0.6]).is_err());
        assert!(shannon_entropy([1.5, -0.5]).is_err());
        assert!(shannon_entropy([f64::NAN]).is_err());
    }

    #[test]
    fn g_examples() {
        assert!((g_bound(2.0).unwrap() - 9.0 * (-0.8f64).exp()).abs() < 1e-12);
        assert!((g_bound(2.0).unwrap() - 4.04396).abs() < 1e-5);
        assert!((g_bound(1.0).unwrap() - 96f64.log2()).abs() < 1e-12);
        assert!((g_bound(1.0).unwrap() - 6.5850).abs() < 1e-4);
        assert!((g_bound(10.0).unwrap() - 9.0 * (-20f64).exp()).abs() < 1e-20);
        assert!((g_bound(10.0).unwrap() - 1.855e-8).abs() < 1e-11);
        assert_eq!(g_inverse(7.0).unwrap(), 1.0);
        assert!((g_inverse(6.0).unwrap() - (10.0 * 1.5f64.ln()).sqrt()).abs() < 1e-12);
        assert!((g_inverse(6.0).unwrap() - 2.0136).abs() < 1e-4);
    }

    #[test]
    fn g_rejects_nonpositive() {
        assert!(g_bound(0.0).is_err());
        assert!(g_bound(-1.0).is_err());
        assert!(g_inverse(0.0).is_err());
        assert!(g_inverse(f64::NAN).is_err());
    }

    #[test]
    fn g_inverse_is_a_right_bound() {
        for b in [0.01, 0.1, 1.0, 5.9, 6.1, 20.0] {
            let g = g_bound(g_inverse(b).unwrap()).unwrap();
            assert!(g <= b, "b = {b}: G(G^-1(b)) = {g}");
        }
    }

    #[test]
    fn g_monotone_on_grids() {
        let mut prev = f64::INFINITY;
        for k in 0..=400 {
            let lambda = 0.01 * (5000f64).powf(k as f64 / 400.0);
            let g = g_bound(lambda).unwrap();
            assert!(g <= prev + 1e-15, "g_bound increases at {lambda}");
            prev = g;
        }
        let mut prev = f64::INFINITY;
        for k in 0..=1000 {
            let b = 0.01 + (30.0 - 0.01) * k as f64 / 1000.0;
            let gi = g_inverse(b).unwrap();
            assert!(gi <= prev + 1e-15, "g_inverse increases at {b}");
            prev = gi;
        }
    }
}
