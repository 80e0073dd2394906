//! Deterministic random streams. Every (check, subject, point index) triple
//! gets its own ChaCha stream position, so results do not depend on the
//! order in which points are evaluated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used when neither `--seed` nor `CURVLAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;

/// Upper bound on draws spent looking for one valid sample point.
pub const MAX_ATTEMPTS: usize = 100;

fn fnv1a(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.bytes().chain(std::iter::once(0xff)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Generator for one sample slot. The stream id comes from the labels, the
/// word position from the index.
pub fn stream(seed: u64, check: &str, subject: &str, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(&[check, subject]));
    rng.set_word_pos((index as u128) << 32);
    rng
}

/// Uniform point in an axis-aligned box.
pub fn sample_point(rng: &mut impl Rng, sample_box: &[(f64, f64)]) -> Vec<f64> {
    sample_box
        .iter()
        .map(|&(lo, hi)| {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..hi)
            }
        })
        .collect()
}

/// Outcome of trying to find a usable sample.
#[derive(Debug, Clone)]
pub enum Sampled<T> {
    Ok {
        point: Vec<f64>,
        value: T,
        attempts: usize,
    },
    /// Every attempt failed; carries the last error message.
    Exhausted { attempts: usize, last_error: String },
}

/// Draws points until `f` returns `Ok(Some(..))`. `Ok(None)` means the point
/// was valid but inconclusive and is redrawn; `Err` means it was outside the
/// domain (singular metric, `log` of a negative number, ...).
pub fn sample_until<T, E: std::fmt::Display>(
    rng: &mut impl Rng,
    sample_box: &[(f64, f64)],
    mut f: impl FnMut(&[f64], &mut dyn rand::RngCore) -> Result<Option<T>, E>,
) -> Sampled<T> {
    let mut last_error = String::from("no attempts made");
    for attempt in 1..=MAX_ATTEMPTS {
        let point = sample_point(rng, sample_box);
        match f(&point, rng) {
            Ok(Some(value)) => {
                return Sampled::Ok {
                    point,
                    value,
                    attempts: attempt,
                }
            }
            Ok(None) => last_error = "inconclusive".into(),
            Err(e) => last_error = e.to_string(),
        }
    }
    Sampled::Exhausted {
        attempts: MAX_ATTEMPTS,
        last_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = stream(7, "c", "s", 3).next_u64();
        assert_eq!(a, stream(7, "c", "s", 3).next_u64());
        assert_ne!(a, stream(7, "c", "s", 4).next_u64());
        assert_ne!(a, stream(7, "c", "t", 3).next_u64());
        assert_ne!(a, stream(8, "c", "s", 3).next_u64());
    }

    #[test]
    fn sampling_respects_box() {
        let mut rng = stream(1, "box", "", 0);
        for _ in 0..100 {
            let p = sample_point(&mut rng, &[(0.0, 1.0), (-2.0, -1.0), (3.0, 3.0)]);
            assert!((0.0..1.0).contains(&p[0]));
            assert!((-2.0..-1.0).contains(&p[1]));
            assert_eq!(p[2], 3.0);
        }
    }

    #[test]
    fn sample_until_skips_failures() {
        let mut rng = stream(1, "retry", "", 0);
        let mut calls = 0;
        let out = sample_until(&mut rng, &[(0.0, 1.0)], |p, _| {
            calls += 1;
            if calls < 3 {
                Err("bad")
            } else {
                Ok(Some(p[0]))
            }
        });
        match out {
            Sampled::Ok { attempts, .. } => assert_eq!(attempts, 3),
            Sampled::Exhausted { .. } => panic!("should succeed"),
        }
        let out: Sampled<()> = sample_until(&mut rng, &[(0.0, 1.0)], |_, _| Err("never"));
        assert!(matches!(out, Sampled::Exhausted { attempts: 100, .. }));
    }
}
