//! Constructive separation witnesses.
//!
//! Three strategies of increasing resolution, each returning a
//! [`SaveReport`] whose claims recompute exactly from the witness:
//!
//! - [`theorem1_time`]: one chosen runner exactly opposite the origin
//!   (distance 1/2) via a single time bit.
//! - [`theorem2_save`]: a majority sweep over bit-index groups that leaves
//!   at least `ceil(n/2)` runners at distance >= 1/4.
//! - [`window_save`]: a moving window over bit columns that leaves at most
//!   `floor((n-1)/c)` runners closer than `1/2^c`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::{
    bit_index, circ_dist, floor_lg, position, sector_index, BitIndex, Dyadic, SeparationDistance,
    SpeedSet, TimeVector,
};

/// Runners sharing one bit index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub bit_index: BitIndex,
    /// 1-based runner indices, ascending.
    pub members: Vec<usize>,
}

/// Runners partitioned by bit index, ordered by the sweep direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupList {
    groups: Vec<Group>,
}

impl GroupList {
    /// Groups ordered by descending bit index (separation sweeps).
    pub fn descending(speeds: &SpeedSet) -> Self {
        let mut list = Self::ascending(speeds);
        list.groups.reverse();
        list
    }

    /// Groups ordered by ascending bit index (isolation sweeps).
    pub fn ascending(speeds: &SpeedSet) -> Self {
        let mut by_index: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, s) in speeds.iter_indexed() {
            let e = bit_index(s).expect("speed set speeds are nonzero");
            by_index.entry(e.value()).or_default().push(i);
        }
        let groups = by_index
            .into_iter()
            .map(|(e, members)| Group {
                bit_index: BitIndex::from_value(e),
                members,
            })
            .collect();
        GroupList { groups }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Group> {
        self.groups.iter()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Outcome of a separation sweep: the witness time, which runners it
/// separates, and the exact distance of every runner at that time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaveReport {
    pub witness: TimeVector,
    /// Runners at distance >= `guarantee` (1-based indices).
    pub saved: BTreeSet<usize>,
    /// Exact circular distance of runner `i` at `distances[i-1]`.
    pub distances: Vec<Dyadic>,
    pub guarantee: SeparationDistance,
    /// Whether the strategy's count bound is asserted for these parameters.
    pub guaranteed: bool,
}

impl SaveReport {
    /// Recomputes distances and the saved set from a witness.
    pub fn from_witness(
        speeds: &SpeedSet,
        witness: TimeVector,
        guarantee: SeparationDistance,
        guaranteed: bool,
    ) -> Self {
        let distances: Vec<Dyadic> = speeds
            .speeds()
            .iter()
            .map(|&s| circ_dist(position(s, &witness)))
            .collect();
        let saved = distances
            .iter()
            .enumerate()
            .filter(|(_, d)| d.at_least(guarantee))
            .map(|(k, _)| k + 1)
            .collect();
        SaveReport {
            witness,
            saved,
            distances,
            guarantee,
            guaranteed,
        }
    }

    pub fn saved_count(&self) -> usize {
        self.saved.len()
    }

    pub fn unsaved_count(&self) -> usize {
        self.distances.len() - self.saved.len()
    }

    /// Checks the report against the speeds it was produced from: distances
    /// must recompute exactly and the saved set must match the guarantee.
    pub fn verify(&self, speeds: &SpeedSet) -> std::result::Result<(), String> {
        if speeds.len() != self.distances.len() {
            return Err(format!(
                "report carries {} distances for {} runners",
                self.distances.len(),
                speeds.len()
            ));
        }
        let recomputed =
            SaveReport::from_witness(speeds, self.witness, self.guarantee, self.guaranteed);
        if recomputed.distances != self.distances {
            return Err("distances do not recompute from the witness".into());
        }
        if recomputed.saved != self.saved {
            return Err("saved set does not match the witness".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "witness_bits": self.witness.bit_string(),
            "scale": self.witness.scale(),
            "guarantee": self.guarantee.to_string(),
            "saved": self.saved.iter().copied().collect::<Vec<_>>(),
            "distances": self.distances.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "guaranteed": self.guaranteed,
        })
    }
}

/// Separates runner `i` from the stationary runner by exactly 1/2: the
/// witness sets the single bit at runner `i`'s bit index, which multiplies
/// out to `odd/2` and lands the runner on the antipode.
pub fn theorem1_time(speeds: &SpeedSet, i: usize) -> Result<SaveReport> {
    let e = speeds.bit_index_of(i)?;
    let p = speeds.max_bit_index().value();
    let witness = TimeVector::single_bit(p, e.value())?;
    let report = SaveReport::from_witness(speeds, witness, SeparationDistance::half(), true);
    debug_assert!(report.saved.contains(&i));
    Ok(report)
}

/// Majority sweep: walk the bit-index groups from the highest index down;
/// for each group choose the value of the group's bit that leaves more of
/// its members at distance >= 1/4 (ties pick 1). Later choices cannot move
/// earlier groups, so at least half of every group — hence at least
/// `ceil(n/2)` runners overall — end at distance >= 1/4.
pub fn theorem2_save(speeds: &SpeedSet) -> Result<SaveReport> {
    let p = speeds.max_bit_index().value();
    let mut tv = TimeVector::zeros(p)?;
    let quarter = SeparationDistance::quarter();
    for group in GroupList::descending(speeds).iter() {
        let e = group.bit_index.value();
        let saved_with = |bit: bool| -> Result<usize> {
            let cand = tv.with_bit(e, bit)?;
            let mut count = 0;
            for &i in &group.members {
                let d = circ_dist(position(speeds.speed(i)?, &cand));
                if d.at_least(quarter) {
                    count += 1;
                }
            }
            Ok(count)
        };
        let zeros = saved_with(false)?;
        let ones = saved_with(true)?;
        // Flipping the group bit moves each member by exactly 1/2, so every
        // member is far on at least one side and max(zeros, ones) covers at
        // least half the group.
        debug_assert!(zeros + ones >= group.members.len());
        tv.set_bit(e, ones >= zeros)?;
    }
    Ok(SaveReport::from_witness(speeds, tv, quarter, true))
}

/// Save record for one runner in a window sweep: the column whose bit saved
/// it and the sector resolution used there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorSave {
    /// Column index `k` at which the runner was marked.
    pub column: u32,
    /// Sector resolution `u = k - e + 1`; the runner sits in an odd sector
    /// of the `2^u` grid from this point on.
    pub resolution: u32,
}

/// One column step of a window sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowStep {
    pub column: u32,
    /// Unsaved runners whose bit index fell inside the window at this step.
    pub window: Vec<usize>,
    pub chosen_bit: bool,
    pub newly_saved: Vec<usize>,
}

/// Full trace of a window sweep, for callers that need per-step data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowRun {
    pub report: SaveReport,
    /// Runners marked by the sweep itself, with where and how. The report's
    /// saved set may be larger: it lists everyone the witness separates.
    pub saved_at: BTreeMap<usize, SectorSave>,
    pub steps: Vec<WindowStep>,
}

/// Moving-window sweep at window parameter `c >= 2`.
///
/// Bits are indexed over `[1, p+c-2]` and chosen from the top column down.
/// At column `k` the window holds the still-unmarked runners whose bit
/// index `e` satisfies `k-c+2 <= e <= k`; the bit `b_k` is set to the value
/// that puts more of them in odd sectors of their personal `2^(k-e+1)`
/// grid, and those runners are marked. Marked runners keep a distance of at
/// least `1/2^c`, and at most `floor((n-1)/c)` runners end up unmarked.
pub fn window_save(speeds: &SpeedSet, c: u32) -> Result<SaveReport> {
    Ok(window_save_detailed(speeds, c)?.report)
}

/// [`window_save`] plus the per-column trace.
pub fn window_save_detailed(speeds: &SpeedSet, c: u32) -> Result<WindowRun> {
    if c < 2 {
        return Err(Error::WindowParam);
    }
    let n = speeds.len();
    let p = speeds.max_bit_index().value();
    let scale = p + c - 2;
    let mut tv = TimeVector::zeros(scale)?;
    let e: Vec<u32> = speeds
        .speeds()
        .iter()
        .map(|&s| bit_index(s).expect("speeds are nonzero").value())
        .collect();

    let mut unsaved: BTreeSet<usize> = (1..=n).collect();
    let mut saved_at = BTreeMap::new();
    let mut steps = Vec::new();

    let mut k = scale;
    while let Some(min_e) = unsaved.iter().map(|&i| e[i - 1]).min() {
        if k < min_e {
            break;
        }
        let window: Vec<usize> = unsaved
            .iter()
            .copied()
            .filter(|&i| e[i - 1] <= k && e[i - 1] + c - 2 >= k)
            .collect();
        if window.is_empty() {
            // nothing to position at this column; leave b_k = 0
            steps.push(WindowStep {
                column: k,
                window,
                chosen_bit: false,
                newly_saved: Vec::new(),
            });
            if k == 1 {
                break;
            }
            k -= 1;
            continue;
        }

        let odd_members = |bit: bool| -> Result<Vec<usize>> {
            let cand = tv.with_bit(k, bit)?;
            let mut odd = Vec::new();
            for &i in &window {
                let u = k - e[i - 1] + 1;
                let q = sector_index(position(speeds.speed(i)?, &cand), u)?;
                if q % 2 == 1 {
                    odd.push(i);
                }
            }
            Ok(odd)
        };
        let zeros = odd_members(false)?;
        let ones = odd_members(true)?;
        // Parity at resolution k-e+1 flips with b_k (boundary points count
        // as odd on both sides), so the better value covers >= half.
        debug_assert!(zeros.len() + ones.len() >= window.len());
        let chosen_bit = ones.len() >= zeros.len();
        let newly_saved = if chosen_bit { ones } else { zeros };
        tv.set_bit(k, chosen_bit)?;
        for &i in &newly_saved {
            unsaved.remove(&i);
            saved_at.insert(
                i,
                SectorSave {
                    column: k,
                    resolution: k - e[i - 1] + 1,
                },
            );
        }
        steps.push(WindowStep {
            column: k,
            window,
            chosen_bit,
            newly_saved,
        });
        if k == 1 {
            break;
        }
        k -= 1;
    }

    let guarantee = SeparationDistance::new(c)?;
    let guaranteed = c <= floor_lg(n as u64);
    let report = SaveReport::from_witness(speeds, tv, guarantee, guaranteed);
    debug_assert!(saved_at.keys().all(|i| report.saved.contains(i)));
    Ok(WindowRun {
        report,
        saved_at,
        steps,
    })
}

/// Window sweep at the strongest guaranteed resolution `c = floor(lg n)`,
/// leaving at least `n - floor((n-1)/c)` runners at distance `>= 1/2^c`.
pub fn theorem3_save(speeds: &SpeedSet) -> Result<SaveReport> {
    let n = speeds.len() as u64;
    if n < 4 {
        return Err(Error::Theorem3Precondition);
    }
    window_save(speeds, floor_lg(n))
}

/// An exact non-negative fraction kept unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        Some(lhs.cmp(&rhs))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Lower bound on the fraction of runners separable by `1/2^floor(lg n)`
/// at once: `(n - floor((n-1)/floor(lg n))) / n`, exact and unreduced.
pub fn saved_fraction_bound(n: u64) -> Result<Fraction> {
    if n < 4 {
        return Err(Error::BoundUndefined { n, min: 4 });
    }
    let c = floor_lg(n) as u64;
    Ok(Fraction {
        num: n - (n - 1) / c,
        den: n,
    })
}
