//! Closed-form probability bounds for placement failure.
//!
//! All formulas are expressed through the load slack `epsilon` of the
//! capacity rule `m >= (1+eps)*n` (or `m >= (1+eps)*d^2*n` for the
//! d-dimensional variant). Returned probabilities are clamped to `[0, 1]`
//! since the analytic expressions exceed 1 for small `n` or `epsilon`.

/// How the table size is derived from `(n, epsilon, d)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CapacityRule {
    /// `m = ceil((1+eps) * n)`.
    Classic,
    /// `m = ceil((1+eps) * d^2 * n)`, sized for d-dimensional vectors.
    DimensionSquared,
}

impl CapacityRule {
    /// Smallest table size satisfying the rule. Computed in floating point
    /// with a 1e-9 guard so that products like `1.1 * 500` that are integers
    /// mathematically do not get bumped up by representation error.
    pub fn table_size(self, n: usize, epsilon: f64, d: usize) -> u32 {
        let factor = match self {
            CapacityRule::Classic => 1.0,
            CapacityRule::DimensionSquared => (d * d) as f64,
        };
        let raw = (1.0 + epsilon) * factor * n as f64;
        let m = (raw - 1e-9).ceil().max(1.0);
        assert!(m < u32::MAX as f64, "table size overflows u32: {m}");
        m as u32
    }
}

#[derive(thiserror::Error, Debug, PartialEq)]
pub enum BoundsError {
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("m={m} violates the capacity rule (requires m ≥ {required})")]
    CapacityViolated { m: u32, required: f64 },
}

/// Validated parameter set for the bound formulas.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct BoundParams {
    pub n: usize,
    pub m: u32,
    pub epsilon: f64,
    pub d: usize,
}

impl BoundParams {
    /// Validates `epsilon > 0` and that `m` meets the selected capacity rule.
    pub fn new(
        n: usize,
        m: u32,
        epsilon: f64,
        d: usize,
        rule: CapacityRule,
    ) -> Result<BoundParams, BoundsError> {
        if epsilon <= 0.0 || epsilon.is_nan() {
            return Err(BoundsError::NonPositiveEpsilon(epsilon));
        }
        let factor = match rule {
            CapacityRule::Classic => 1.0,
            CapacityRule::DimensionSquared => (d * d) as f64,
        };
        let required = (1.0 + epsilon) * factor * n as f64;
        // The same representation guard as table_size, so a ceiling-derived
        // m always validates.
        if (m as f64) < required - 1e-9 {
            return Err(BoundsError::CapacityViolated { m, required });
        }
        Ok(BoundParams { n, m, epsilon, d })
    }

    /// Derives `m` from the rule and validates.
    pub fn from_rule(
        n: usize,
        epsilon: f64,
        d: usize,
        rule: CapacityRule,
    ) -> Result<BoundParams, BoundsError> {
        if epsilon <= 0.0 || epsilon.is_nan() {
            return Err(BoundsError::NonPositiveEpsilon(epsilon));
        }
        let m = rule.table_size(n, epsilon, d);
        BoundParams::new(n, m, epsilon, d, rule)
    }
}

fn clamp_probability(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Upper bound on the probability that a fixed node roots a basic bad path:
/// `(1+eps) / (eps * m)`, the closed form of the geometric series
/// `(1/m) * sum_{k>=1} (1/(1+eps))^(k-1)`.
pub fn bad_path_root_bound(p: &BoundParams) -> f64 {
    debug_assert!(p.epsilon > 0.0);
    clamp_probability((1.0 + p.epsilon) / (p.epsilon * p.m as f64))
}

/// Upper bound on the probability that a fixed item is bad:
/// `((1+eps)/eps)^3 * 2 / m^2`.
pub fn bad_item_bound(p: &BoundParams) -> f64 {
    debug_assert!(p.epsilon > 0.0);
    let ratio = (1.0 + p.epsilon) / p.epsilon;
    clamp_probability(ratio.powi(3) * 2.0 / (p.m as f64 * p.m as f64))
}

/// Upper bound on the probability that any item is bad (no legal placement):
/// `2 * (1+eps)^2 / eps^3 * 1/n`, clamped to 1.
pub fn failure_bound(p: &BoundParams) -> f64 {
    debug_assert!(p.epsilon > 0.0);
    let e = p.epsilon;
    clamp_probability(2.0 * (1.0 + e) * (1.0 + e) / (e * e * e) / p.n as f64)
}

/// Exact probability that two independent uniform `d`-vectors over `[0, m)`
/// share at least one value; this is the per-edge collision probability.
///
/// For `d = 1` it is exactly `1/m`. For larger `d` it is computed as
/// `1 - E[((m-K)/m)^d]` where `K` is the number of distinct values in one
/// vector, whose distribution follows from a draw-by-draw recurrence. The
/// value is always below the quoted `d^2/m` cap.
pub fn edge_probability(d: usize, m: u32) -> f64 {
    assert!(d >= 1 && m >= 1);
    let mf = m as f64;
    if d == 1 {
        return 1.0 / mf;
    }
    let kmax = d.min(m as usize);
    // distinct[j] = P(exactly j distinct values after t draws).
    let mut distinct = vec![0.0f64; kmax + 1];
    distinct[0] = 1.0;
    for _t in 0..d {
        for j in (0..kmax).rev() {
            let p = distinct[j];
            if p == 0.0 {
                continue;
            }
            distinct[j] = p * (j as f64 / mf);
            distinct[j + 1] += p * ((mf - j as f64) / mf);
        }
        // j = kmax can only stay at kmax (all further draws repeat).
        // Handled implicitly: distinct[kmax] keeps accumulating mass and a
        // repeat keeps it there with probability kmax/m = 1 when kmax = m.
    }
    let disjoint: f64 = distinct
        .iter()
        .enumerate()
        .map(|(j, &p)| p * ((mf - j as f64) / mf).powi(d as i32))
        .sum();
    clamp_probability(1.0 - disjoint)
}

/// The quoted analytic cap on [`edge_probability`]: `d^2 / m`, clamped to 1.
pub fn edge_probability_cap(d: usize, m: u32) -> f64 {
    clamp_probability((d * d) as f64 / m as f64)
}

/// Upper bound on the number of labeled basic bad paths with `k` edges
/// rooted at a fixed node: `n^(k-1)`. Saturates at `u128::MAX`.
pub fn labeled_path_count_bound(n: u64, k: u32) -> u128 {
    assert!(k >= 1);
    (n as u128).saturating_pow(k - 1)
}
