//! Removal schedules that isolate the stationary runner.
//!
//! A schedule repeatedly picks a witness time for the runners still present
//! (everyone reset to the start), removes every runner separated by the
//! step's threshold `d`, and stops when nobody is left. Four strategies
//! trade threshold size against step count:
//!
//! - `t5`: one bit-index class per step at `d = 1/2`, at most `n` steps.
//! - `t6`: majority sweep per step at `d = 1/4`, halving the survivors.
//! - `t7`: window sweep at fixed `c = floor(lg n)`, `d = 1/2^c`.
//! - `t8`: window sweep at adaptive `c = floor(lg n_m)`, falling back to
//!   the majority sweep when at most 3 runners remain.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::{
    circ_dist, floor_lg, position, Dyadic, SeparationDistance, SpeedSet, TimeVector,
};
use crate::pmax::{theorem2_save, window_save, GroupList, SaveReport};

/// Which schedule produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    T5,
    T6,
    T7,
    T8,
    /// Greedy maximum-removal schedule driven by exhaustive search.
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::T5 => "t5",
            Method::T6 => "t6",
            Method::T7 => "t7",
            Method::T8 => "t8",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "t5" => Ok(Method::T5),
            "t6" => Ok(Method::T6),
            "t7" => Ok(Method::T7),
            "t8" => Ok(Method::T8),
            "oracle" => Ok(Method::Oracle),
            other => Err(format!("unknown method {other:?} (expected t5|t6|t7|t8)")),
        }
    }
}

/// One removal step: the witness, the runners removed (original 1-based
/// indices, ascending) and their exact distances at the witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolationStep {
    pub witness: TimeVector,
    pub removed: BTreeSet<usize>,
    /// Distance of each removed runner, in ascending-index order.
    pub distances: Vec<Dyadic>,
    pub d: SeparationDistance,
}

impl IsolationStep {
    fn to_json(&self) -> Value {
        json!({
            "witness_bits": self.witness.bit_string(),
            "scale": self.witness.scale(),
            "d": self.d.to_string(),
            "removed": self.removed.iter().copied().collect::<Vec<_>>(),
            "distances": self.distances.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// A complete removal schedule with its step bound, if one applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolationTrace {
    pub method: Method,
    pub steps: Vec<IsolationStep>,
    /// Step-count cap claimed for this run, when defined.
    pub bound: Option<u64>,
    pub bound_satisfied: Option<bool>,
}

impl IsolationTrace {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "method": self.method.as_str(),
            "steps": self.steps.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "step_count": self.step_count(),
            "bound": self.bound,
            "bound_satisfied": self.bound_satisfied,
        })
    }

    /// Structural checks that hold for every schedule: the removed sets
    /// partition the full runner set, every step removes someone, and each
    /// recorded distance recomputes exactly and meets the step's threshold.
    pub fn verify(&self, speeds: &SpeedSet) -> std::result::Result<(), String> {
        let mut seen = BTreeSet::new();
        for (m, step) in self.steps.iter().enumerate() {
            if step.removed.is_empty() {
                return Err(format!("step {} removed nobody", m + 1));
            }
            if step.removed.len() != step.distances.len() {
                return Err(format!("step {} distances misaligned", m + 1));
            }
            for (&i, &recorded) in step.removed.iter().zip(step.distances.iter()) {
                if !seen.insert(i) {
                    return Err(format!("runner {i} removed twice"));
                }
                let s = speeds
                    .speed(i)
                    .map_err(|e| format!("step {}: {e}", m + 1))?;
                let d = circ_dist(position(s, &step.witness));
                if d != recorded {
                    return Err(format!(
                        "step {}: runner {i} distance {d} does not match recorded {recorded}",
                        m + 1
                    ));
                }
                if !d.at_least(step.d) {
                    return Err(format!(
                        "step {}: runner {i} at {d} below threshold {}",
                        m + 1,
                        step.d
                    ));
                }
            }
        }
        if seen.len() != speeds.len() {
            return Err(format!(
                "removed {} of {} runners",
                seen.len(),
                speeds.len()
            ));
        }
        Ok(())
    }

    /// Remaining runner count after each step, starting from `n`.
    pub fn remaining_counts(&self, n: usize) -> Vec<usize> {
        let mut remaining = n;
        self.steps
            .iter()
            .map(|s| {
                remaining -= s.removed.len();
                remaining
            })
            .collect()
    }

    /// Method-specific count guarantees, asserted over the trace.
    pub fn check_guarantees(&self, speeds: &SpeedSet) -> std::result::Result<(), String> {
        let n = speeds.len();
        let after = self.remaining_counts(n);
        match self.method {
            Method::T5 => {
                let classes: BTreeSet<u32> = speeds
                    .speeds()
                    .iter()
                    .map(|&s| crate::numerics::bit_index(s).unwrap().value())
                    .collect();
                if self.step_count() != classes.len() {
                    return Err(format!(
                        "t5 took {} steps for {} bit-index classes",
                        self.step_count(),
                        classes.len()
                    ));
                }
                for step in &self.steps {
                    if step.distances.iter().any(|&d| d != Dyadic::new(1, 1)) {
                        return Err("t5 removal not at exactly 1/2".into());
                    }
                }
            }
            Method::T6 => {
                for (m, &left) in after.iter().enumerate() {
                    let cap = n >> (m + 1).min(63);
                    if left > cap {
                        return Err(format!(
                            "t6 left {left} runners after step {}, cap {cap}",
                            m + 1
                        ));
                    }
                }
            }
            Method::T7 => {
                let c = floor_lg(n as u64) as usize;
                let mut current = n;
                for (m, &left) in after.iter().enumerate() {
                    if c as u32 <= floor_lg(current.max(1) as u64) && left > (current - 1) / c {
                        return Err(format!(
                            "t7 step {}: {current} -> {left} exceeds ({current}-1)/{c}",
                            m + 1
                        ));
                    }
                    current = left;
                }
            }
            Method::T8 => {
                let mut current = n;
                for (m, &left) in after.iter().enumerate() {
                    let cap = if current >= 4 {
                        (current - 1) / floor_lg(current as u64) as usize
                    } else {
                        current / 2
                    };
                    if left > cap {
                        return Err(format!(
                            "t8 step {}: {current} -> {left} exceeds cap {cap}",
                            m + 1
                        ));
                    }
                    current = left;
                }
            }
            Method::Oracle => {}
        }
        if self.bound_satisfied == Some(false) {
            return Err(format!(
                "step count {} exceeds bound {:?}",
                self.step_count(),
                self.bound
            ));
        }
        Ok(())
    }
}

/// Tracks the survivors across steps and maps subset reports back to the
/// original runner indices.
struct Survivors<'a> {
    speeds: &'a SpeedSet,
    alive: BTreeSet<usize>,
}

impl<'a> Survivors<'a> {
    fn new(speeds: &'a SpeedSet) -> Self {
        Survivors {
            speeds,
            alive: (1..=speeds.len()).collect(),
        }
    }

    fn count(&self) -> usize {
        self.alive.len()
    }

    fn subset(&self) -> Result<(SpeedSet, Vec<usize>)> {
        self.speeds.subset(&self.alive)
    }

    /// Converts a subset report into a step removing its saved runners,
    /// then drops them from the survivor set.
    fn remove_saved(&mut self, report: &SaveReport, orig: &[usize]) -> IsolationStep {
        assert!(
            !report.saved.is_empty(),
            "separation sweep saved nobody; schedule cannot progress"
        );
        let removed: BTreeSet<usize> = report.saved.iter().map(|&j| orig[j - 1]).collect();
        let distances = report
            .saved
            .iter()
            .map(|&j| report.distances[j - 1])
            .collect();
        for &i in &removed {
            self.alive.remove(&i);
        }
        IsolationStep {
            witness: report.witness,
            removed,
            distances,
            d: report.guarantee,
        }
    }
}

/// Removes one bit-index class per step at `d = 1/2`: the single bit at the
/// smallest surviving index sends exactly that class to the antipode while
/// everyone else stays at the start. Steps = number of distinct bit indices.
pub fn isolate_t5(speeds: &SpeedSet) -> Result<IsolationTrace> {
    let n = speeds.len() as u64;
    let mut steps = Vec::new();
    for group in GroupList::ascending(speeds).iter() {
        let e = group.bit_index.value();
        let witness = TimeVector::single_bit(e, e)?;
        let removed: BTreeSet<usize> = group.members.iter().copied().collect();
        let distances: Vec<Dyadic> = removed
            .iter()
            .map(|&i| {
                circ_dist(position(
                    speeds.speed(i).expect("member in range"),
                    &witness,
                ))
            })
            .collect();
        debug_assert!(distances.iter().all(|&d| d == Dyadic::new(1, 1)));
        steps.push(IsolationStep {
            witness,
            removed,
            distances,
            d: SeparationDistance::half(),
        });
    }
    let count = steps.len() as u64;
    Ok(IsolationTrace {
        method: Method::T5,
        steps,
        bound: Some(n),
        bound_satisfied: Some(count <= n),
    })
}

/// Majority-sweep schedule at `d = 1/4`: each step removes the saved set of
/// [`theorem2_save`] over the survivors, so the survivor count at least
/// halves every step. Reported against the cap `floor(lg n) + 1`.
pub fn isolate_t6(speeds: &SpeedSet) -> Result<IsolationTrace> {
    let n = speeds.len() as u64;
    let mut survivors = Survivors::new(speeds);
    let mut steps = Vec::new();
    while survivors.count() > 0 {
        let (sub, orig) = survivors.subset()?;
        let report = theorem2_save(&sub)?;
        steps.push(survivors.remove_saved(&report, &orig));
    }
    let bound = floor_lg(n) as u64 + 1;
    let count = steps.len() as u64;
    Ok(IsolationTrace {
        method: Method::T6,
        steps,
        bound: Some(bound),
        bound_satisfied: Some(count <= bound),
    })
}

/// Window-sweep schedule at the fixed resolution `c = floor(lg n)` taken
/// from the original count, `d = 1/2^c` at every step. Reported against
/// `ceil(lg(n-1)/lg c) + 1` steps.
pub fn isolate_t7(speeds: &SpeedSet) -> Result<IsolationTrace> {
    let n = speeds.len() as u64;
    if n < 4 {
        return Err(Error::T7Precondition);
    }
    let c = floor_lg(n);
    let mut survivors = Survivors::new(speeds);
    let mut steps = Vec::new();
    while survivors.count() > 0 {
        let (sub, orig) = survivors.subset()?;
        let run = window_save(&sub, c)?;
        steps.push(survivors.remove_saved(&run, &orig));
    }
    let bound = t7_bound(n)?.ceil() as u64 + 1;
    let count = steps.len() as u64;
    Ok(IsolationTrace {
        method: Method::T7,
        steps,
        bound: Some(bound),
        bound_satisfied: Some(count <= bound),
    })
}

/// Adaptive window-sweep schedule: with `n_m` survivors the step uses the
/// resolution `c_m = floor(lg n_m)` (so `d = 1/2^c_m`); once at most three
/// runners remain it finishes with majority-sweep steps at `d = 1/4`.
/// Reported against `ceil(t8_bound(n))` when `n >= 8`.
pub fn isolate_t8(speeds: &SpeedSet) -> Result<IsolationTrace> {
    let n = speeds.len() as u64;
    let mut survivors = Survivors::new(speeds);
    let mut steps = Vec::new();
    while survivors.count() > 0 {
        let (sub, orig) = survivors.subset()?;
        let report = if sub.len() >= 4 {
            window_save(&sub, floor_lg(sub.len() as u64))?
        } else {
            theorem2_save(&sub)?
        };
        steps.push(survivors.remove_saved(&report, &orig));
    }
    let (bound, bound_satisfied) = if n >= 8 {
        let cap = t8_bound(n)?.ceil() as u64;
        (Some(cap), Some(steps.len() as u64 <= cap))
    } else {
        (None, None)
    };
    Ok(IsolationTrace {
        method: Method::T8,
        steps,
        bound,
        bound_satisfied,
    })
}

/// Step bound for the fixed-resolution schedule: `lg(n-1) / lg(floor(lg n))`.
/// Defined for `n >= 4` (so the denominator is at least 1).
pub fn t7_bound(n: u64) -> Result<f64> {
    if n < 4 {
        return Err(Error::BoundUndefined { n, min: 4 });
    }
    let c = floor_lg(n) as f64;
    Ok(((n - 1) as f64).log2() / c.log2())
}

/// Derived quantities behind [`t8_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem8Params {
    /// `lg(n) - 1`.
    pub n_log: f64,
    /// `floor(lg(lg(n) - 1))`.
    pub level: u32,
    /// The step bound itself.
    pub bound: f64,
}

/// Computes the adaptive-schedule step bound
/// `2 + (N - 2^L)/L + sum over k in [1, L-1] of 2^k/k`
/// with `N = lg(n) - 1` and `L = floor(lg N)`. Defined for `n >= 8`.
pub fn theorem8_params(n: u64) -> Result<Theorem8Params> {
    if n < 8 {
        return Err(Error::BoundUndefined { n, min: 8 });
    }
    let n_log = (n as f64).log2() - 1.0;
    let level = if n.is_power_of_two() {
        // N is an exact integer here; avoid floating log at the boundary
        floor_lg(floor_lg(n) as u64 - 1)
    } else {
        n_log.log2().floor() as u32
    };
    let tail: f64 = (1..level).map(|k| (1u64 << k) as f64 / k as f64).sum();
    let bound = 2.0 + (n_log - (1u64 << level) as f64) / level as f64 + tail;
    Ok(Theorem8Params {
        n_log,
        level,
        bound,
    })
}

/// Step bound for the adaptive schedule; see [`theorem8_params`].
pub fn t8_bound(n: u64) -> Result<f64> {
    Ok(theorem8_params(n)?.bound)
}
