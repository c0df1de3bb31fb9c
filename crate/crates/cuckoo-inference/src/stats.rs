//! Binomial proportion confidence intervals.

/// Two-sided 95% normal quantile, `probit(0.975)`.
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` at normal quantile
/// `z`. Chosen over the normal approximation because it stays honest at the
/// very low event counts typical of failure-probability estimates.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    // The extreme counts have exact endpoints; rounding in center ± half
    // must not nudge them off 0 or 1.
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_brackets_the_point_estimate() {
        for &(k, n) in &[(0u64, 10u64), (1, 10), (5, 10), (10, 10), (3, 10_000)] {
            let (lo, hi) = wilson_interval(k, n, Z_95);
            let p_hat = k as f64 / n as f64;
            assert!((0.0..=1.0).contains(&lo));
            assert!((0.0..=1.0).contains(&hi));
            assert!(lo <= p_hat && p_hat <= hi, "({k},{n})");
        }
    }

    #[test]
    fn endpoints_solve_the_score_equation() {
        // The Wilson endpoints are the roots p of
        // (p_hat - p)^2 = z^2 * p(1-p)/n, checked independently of the
        // closed form used in the implementation.
        for &(k, n) in &[(1u64, 10u64), (5, 10), (7, 123), (3, 10_000), (9_999, 10_000)] {
            let (lo, hi) = wilson_interval(k, n, Z_95);
            let p_hat = k as f64 / n as f64;
            for p in [lo, hi] {
                let lhs = (p_hat - p) * (p_hat - p);
                let rhs = Z_95 * Z_95 * p * (1.0 - p) / n as f64;
                assert!((lhs - rhs).abs() < 1e-10, "k={k} n={n} p={p}");
            }
        }
    }

    #[test]
    fn zero_successes_has_zero_lower_and_small_upper() {
        let n = 10_000u64;
        let (lo, hi) = wilson_interval(0, n, Z_95);
        assert_eq!(lo, 0.0);
        // Upper limit of the zero-count interval is z^2 / (n + z^2).
        let expect = Z_95 * Z_95 / (n as f64 + Z_95 * Z_95);
        assert!((hi - expect).abs() < 1e-12);
    }

    #[test]
    fn all_successes_mirror_zero_successes() {
        let n = 500u64;
        let (lo0, hi0) = wilson_interval(0, n, Z_95);
        let (lo1, hi1) = wilson_interval(n, n, Z_95);
        assert_eq!(hi1, 1.0);
        assert!((lo1 - (1.0 - hi0)).abs() < 1e-12);
        assert!((hi1 - (1.0 - lo0)).abs() < 1e-12);
    }

    #[test]
    fn no_trials_is_vacuous() {
        assert_eq!(wilson_interval(0, 0, Z_95), (0.0, 1.0));
    }

    #[test]
    fn interval_tightens_with_more_trials() {
        let (_, hi_small) = wilson_interval(5, 100, Z_95);
        let (_, hi_large) = wilson_interval(500, 10_000, Z_95);
        assert!(hi_large < hi_small);
    }
}
