//! Independent ground truth for the constructive guarantees.
//!
//! [`brute_force_pmax`] enumerates every time vector at a fixed scale and
//! reports the true maximum number of simultaneously separated runners on
//! that grid, together with the lexicographically smallest witness. The
//! search space is `2^scale`, so runs are gated by a configurable budget.
//! [`adversarial_config`] builds the speed patterns that make the window
//! sweep work hardest, and [`greedy_isolation_oracle`] turns the exhaustive
//! search into a maximal-removal schedule for step-count comparisons.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::isolation::{IsolationStep, IsolationTrace, Method};
use crate::numerics::{circ_dist, position, Dyadic, SeparationDistance, SpeedSet, TimeVector};

/// Limits for the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest scale the search will accept (default 22, i.e. ~4M vectors).
    pub scale_budget: u32,
    /// Worker cap for the parallel sweep; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            scale_budget: 22,
            jobs: None,
        }
    }
}

/// Result of an exhaustive sweep over all time vectors at one scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub max_saved: usize,
    /// Lexicographically smallest witness achieving `max_saved`.
    pub witness: TimeVector,
    pub scale: u32,
    pub d: SeparationDistance,
    /// Number of vectors examined, always `2^scale`.
    pub enumerated: u64,
}

impl OracleResult {
    pub fn to_json(&self) -> Value {
        json!({
            "max_saved": self.max_saved,
            "witness_bits": self.witness.bit_string(),
            "scale": self.scale,
            "d": self.d.to_string(),
            "enumerated": self.enumerated,
        })
    }
}

/// Exactly the runners separated from the stationary runner by at least `d`
/// at time `tv` (1-based indices).
pub fn verify_time(speeds: &SpeedSet, tv: &TimeVector, d: SeparationDistance) -> BTreeSet<usize> {
    speeds
        .iter_indexed()
        .filter(|&(_, s)| circ_dist(position(s, tv)).at_least(d))
        .map(|(i, _)| i)
        .collect()
}

/// Exhaustive search over all `2^scale` time vectors for the maximum number
/// of runners at distance `>= d`, returning the smallest such witness in
/// numerator order (equivalently, bit-string order `b_1 b_2 ...`).
///
/// Completeness is relative to the dyadic grid at this scale, not to real
/// times. The sweep may fan out over a thread pool; partial results merge
/// by (count, then smallest witness), so the outcome does not depend on the
/// worker count.
pub fn brute_force_pmax(
    speeds: &SpeedSet,
    d: SeparationDistance,
    scale: u32,
    config: &OracleConfig,
) -> Result<OracleResult> {
    if scale > config.scale_budget {
        return Err(Error::ScaleBudget {
            requested: scale,
            budget: config.scale_budget,
        });
    }
    // validates 1 <= scale <= 63
    TimeVector::zeros(scale)?;

    let modulus = 1u128 << scale;
    let reduced: Vec<u128> = speeds
        .speeds()
        .iter()
        .map(|&s| (s as u128) & (modulus - 1))
        .collect();
    let c = d.exponent();
    let total = 1u64 << scale;

    let sweep = || {
        (0..total)
            .into_par_iter()
            .map(|num| {
                let count = reduced
                    .iter()
                    .filter(|&&s| {
                        let m = (s * num as u128) % modulus;
                        let dist = m.min(modulus - m);
                        (dist << c) >= modulus
                    })
                    .count();
                (count, num)
            })
            .reduce(
                || (0usize, u64::MAX),
                |a, b| {
                    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                        b
                    } else {
                        a
                    }
                },
            )
    };
    let (max_saved, num) = match config.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("worker pool")
            .install(sweep),
        None => sweep(),
    };

    let witness = TimeVector::from_numerator(num, scale)?;
    debug_assert_eq!(verify_time(speeds, &witness, d).len(), max_saved);
    Ok(OracleResult {
        max_saved,
        witness,
        scale,
        d,
        enumerated: total,
    })
}

/// A speed set realizing the worst-case bit-index pattern for the window
/// sweep at parameter `c`: one runner in the top column `p`, `2x` in column
/// `p-1`, and `x` in each of the `c-2` columns below that, for a total of
/// `n = 1 + 2x + x(c-2)` runners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversarialConfig {
    pub c: u32,
    pub x: u64,
    /// Top column of the pattern (`>= c`; the generator default is `c`).
    pub p: u32,
    pub speeds: SpeedSet,
}

impl AdversarialConfig {
    pub fn n(&self) -> u64 {
        1 + 2 * self.x + self.x * (self.c as u64 - 2)
    }

    /// The speeds as a `--speeds`-compatible comma-separated line.
    pub fn speeds_line(&self) -> String {
        self.speeds
            .speeds()
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": self.c,
            "x": self.x,
            "p": self.p,
            "n": self.n(),
            "speeds": self.speeds.speeds(),
            "speeds_line": self.speeds_line(),
        })
    }
}

/// Generates the worst-case pattern with the minimal top column `p = c`.
/// Odd multipliers are drawn reproducibly from `seed`.
pub fn adversarial_config(c: u32, x: u64, seed: u64) -> Result<AdversarialConfig> {
    adversarial_config_at(c, x, seed, c)
}

/// Same pattern shifted so its top column sits at `p >= c`.
pub fn adversarial_config_at(c: u32, x: u64, seed: u64, p: u32) -> Result<AdversarialConfig> {
    if c < 2 || x < 1 {
        return Err(Error::AdversarialParams);
    }
    if p < c {
        return Err(Error::AdversarialShift { c, p });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut speeds = Vec::new();
    // columns p, p-1, ..., p-c+1 hold 1, 2x, x, ..., x runners
    for offset in 0..c {
        let column = p - offset;
        let count = match offset {
            0 => 1,
            1 => 2 * x,
            _ => x,
        };
        let mut odds = BTreeSet::new();
        while (odds.len() as u64) < count {
            odds.insert(2 * rng.gen_range(0..1u64 << 15) + 1);
        }
        // distinct odd parts in one column; columns cannot collide
        speeds.extend(odds.into_iter().map(|odd| odd << (column - 1)));
    }
    let config = AdversarialConfig {
        c,
        x,
        p,
        speeds: SpeedSet::new(speeds)?,
    };
    debug_assert_eq!(config.n() as usize, config.speeds.len());
    Ok(config)
}

/// Maximal-removal schedule: each step removes the full saved set of the
/// exhaustive search at distance `d` and scale `scale`, so the step count
/// lower-bounds what any same-`d` schedule built on this grid can achieve.
pub fn greedy_isolation_oracle(
    speeds: &SpeedSet,
    d: SeparationDistance,
    scale: u32,
    config: &OracleConfig,
) -> Result<IsolationTrace> {
    let mut alive: BTreeSet<usize> = (1..=speeds.len()).collect();
    let mut steps = Vec::new();
    while !alive.is_empty() {
        let (sub, orig) = speeds.subset(&alive)?;
        let result = brute_force_pmax(&sub, d, scale, config)?;
        if result.max_saved == 0 {
            return Err(Error::NoProgress(scale));
        }
        let saved = verify_time(&sub, &result.witness, d);
        let removed: BTreeSet<usize> = saved.iter().map(|&j| orig[j - 1]).collect();
        let distances: Vec<Dyadic> = removed
            .iter()
            .map(|&i| {
                circ_dist(position(
                    speeds.speed(i).expect("index in range"),
                    &result.witness,
                ))
            })
            .collect();
        for &i in &removed {
            alive.remove(&i);
        }
        steps.push(IsolationStep {
            witness: result.witness,
            removed,
            distances,
            d,
        });
    }
    Ok(IsolationTrace {
        method: Method::Oracle,
        steps,
        bound: None,
        bound_satisfied: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bit_index;

    fn speeds(v: &[u64]) -> SpeedSet {
        SpeedSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn verify_time_examples() {
        let set = speeds(&[2, 7, 16]);
        let tv = TimeVector::from_bit_str("1").unwrap();
        let saved = verify_time(&set, &tv, SeparationDistance::half());
        assert_eq!(saved, [2].into());

        let zeros = TimeVector::zeros(4).unwrap();
        assert!(verify_time(&set, &zeros, SeparationDistance::new(5).unwrap()).is_empty());

        let one = speeds(&[1]);
        let tv = TimeVector::from_bit_str("1").unwrap();
        assert_eq!(
            verify_time(&one, &tv, SeparationDistance::half()),
            [1].into()
        );
    }

    #[test]
    fn brute_force_finds_all_odds() {
        let set = speeds(&[1, 3, 5, 7]);
        let result = brute_force_pmax(
            &set,
            SeparationDistance::quarter(),
            3,
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(result.max_saved, 4);
        assert_eq!(result.enumerated, 8);
        // t = 1/4 already parks every odd speed at distance exactly 1/4,
        // and it precedes t = 1/2 in witness order
        assert_eq!(result.witness.bit_string(), "010");
        assert_eq!(
            verify_time(&set, &result.witness, result.d).len(),
            result.max_saved
        );
    }

    #[test]
    fn brute_force_respects_budget() {
        let set = speeds(&[1]);
        let err = brute_force_pmax(
            &set,
            SeparationDistance::half(),
            23,
            &OracleConfig::default(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::ScaleBudget {
                requested: 23,
                budget: 22
            }
        );
        let loose = OracleConfig {
            scale_budget: 30,
            ..OracleConfig::default()
        };
        assert!(brute_force_pmax(&set, SeparationDistance::half(), 8, &loose).is_ok());
    }

    #[test]
    fn brute_force_at_least_one_at_half() {
        let set = speeds(&[2, 7, 16]);
        let result = brute_force_pmax(
            &set,
            SeparationDistance::half(),
            6,
            &OracleConfig::default(),
        )
        .unwrap();
        assert!(result.max_saved >= 1);
    }

    #[test]
    fn brute_force_deterministic_across_worker_counts() {
        let set = speeds(&[3, 5, 12, 40]);
        let d = SeparationDistance::quarter();
        let base = brute_force_pmax(&set, d, 8, &OracleConfig::default()).unwrap();
        for jobs in [1, 2, 7] {
            let config = OracleConfig {
                jobs: Some(jobs),
                ..OracleConfig::default()
            };
            assert_eq!(brute_force_pmax(&set, d, 8, &config).unwrap(), base);
        }
    }

    #[test]
    fn adversarial_patterns() {
        let cfg = adversarial_config(2, 3, 0).unwrap();
        assert_eq!(cfg.n(), 7);
        assert_eq!(cfg.speeds.len(), 7);
        let mut counts = std::collections::BTreeMap::new();
        for &s in cfg.speeds.speeds() {
            *counts.entry(bit_index(s).unwrap().value()).or_insert(0u64) += 1;
        }
        assert_eq!(counts, [(2, 1), (1, 6)].into());

        let cfg = adversarial_config(3, 2, 1).unwrap();
        assert_eq!(cfg.n(), 7);
        let mut counts = std::collections::BTreeMap::new();
        for &s in cfg.speeds.speeds() {
            *counts.entry(bit_index(s).unwrap().value()).or_insert(0u64) += 1;
        }
        assert_eq!(counts, [(3, 1), (2, 4), (1, 2)].into());

        let cfg = adversarial_config(4, 1, 2).unwrap();
        assert_eq!(cfg.n(), 5);

        assert!(adversarial_config(1, 1, 0).is_err());
        assert!(adversarial_config(2, 0, 0).is_err());
        assert!(adversarial_config_at(3, 1, 0, 2).is_err());
    }

    #[test]
    fn adversarial_deterministic_and_shiftable() {
        let a = adversarial_config(3, 2, 42).unwrap();
        let b = adversarial_config(3, 2, 42).unwrap();
        assert_eq!(a, b);
        let shifted = adversarial_config_at(3, 2, 42, 6).unwrap();
        assert_eq!(shifted.speeds.max_bit_index().value(), 6);
        assert_eq!(shifted.n(), 7);
    }

    #[test]
    fn greedy_oracle_examples() {
        let odds = speeds(&[1, 3, 5, 7]);
        let trace = greedy_isolation_oracle(
            &odds,
            SeparationDistance::quarter(),
            3,
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(trace.step_count(), 1);
        trace.verify(&odds).unwrap();

        let set = speeds(&[2, 7, 16]);
        let trace = greedy_isolation_oracle(
            &set,
            SeparationDistance::half(),
            5,
            &OracleConfig::default(),
        )
        .unwrap();
        assert!(trace.step_count() <= 3);
        trace.verify(&set).unwrap();

        let one = speeds(&[9]);
        let trace = greedy_isolation_oracle(
            &one,
            SeparationDistance::half(),
            4,
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(trace.step_count(), 1);
    }

    #[test]
    fn greedy_oracle_needs_enough_scale() {
        // speed 4 can only reach 1/2 with at least 3 bits
        let set = speeds(&[4]);
        let err = greedy_isolation_oracle(
            &set,
            SeparationDistance::half(),
            2,
            &OracleConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::NoProgress(2));
    }
}
