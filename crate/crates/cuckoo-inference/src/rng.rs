//! Counter-based deterministic randomness.
//!
//! All randomness in this crate is derived by hashing a key tuple with the
//! splitmix64 finalizer. There is no stateful generator: every draw is a pure
//! function of `(seed, key...)`, so instances and experiments are bit-stable
//! across runs, platforms, and worker counts.

/// Master seed for an experiment or a single sampled instance.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// The splitmix64 output function: adds the golden-gamma increment and runs
/// the two-round multiply/xorshift finalizer. Bijective on `u64`.
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a key tuple into a single word by chaining splitmix64 over the
/// parts. Order-sensitive, so `mix(s, &[a, b]) != mix(s, &[b, a])` in general.
#[inline]
pub fn mix(seed: Seed, parts: &[u64]) -> u64 {
    let mut h = splitmix64(seed.0);
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// Uniform draw from `[0, bound)` keyed by `(seed, key...)`.
///
/// Uses rejection sampling: words whose value falls in the incomplete final
/// block of multiples of `bound` are discarded and redrawn with an attempt
/// counter appended to the key, so the result carries no modulo bias.
#[inline]
pub fn uniform(seed: Seed, parts: &[u64], bound: u64) -> u64 {
    debug_assert!(bound > 0);
    if bound == 1 {
        return 0;
    }
    // Largest multiple of `bound` representable below 2^64.
    let zone = (u64::MAX / bound) * bound;
    let mut h = mix(seed, parts);
    let mut attempt = 0u64;
    while h >= zone {
        attempt += 1;
        h = splitmix64(h ^ attempt);
    }
    h % bound
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix64_reference_values() {
        // First three outputs of the splitmix64 stream seeded with 1234567,
        // per the published reference sequence.
        let mut s = 1234567u64;
        let mut out = Vec::new();
        for _ in 0..3 {
            out.push(splitmix64(s));
            s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
        }
        assert_eq!(
            out,
            vec![6457827717110365317, 3203168211198807973, 9817491932198370423]
        );
    }

    #[test]
    fn mix_is_order_sensitive() {
        let s = Seed(9);
        assert_ne!(mix(s, &[1, 2]), mix(s, &[2, 1]));
        assert_ne!(mix(Seed(0), &[1]), mix(Seed(1), &[0]));
    }

    #[test]
    fn uniform_stays_in_range_and_is_deterministic() {
        let s = Seed(42);
        for bound in [1u64, 2, 3, 7, 100, u64::MAX / 2 + 3] {
            for k in 0..200u64 {
                let a = uniform(s, &[k], bound);
                let b = uniform(s, &[k], bound);
                assert!(a < bound);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn uniform_small_bound_covers_all_values() {
        let s = Seed(7);
        let mut seen = [false; 5];
        for k in 0..200u64 {
            seen[uniform(s, &[k], 5) as usize] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }
}
