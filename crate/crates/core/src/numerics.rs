//! Exact dyadic arithmetic on the unit circle.
//!
//! Every quantity in this crate is a dyadic rational `m / 2^P` held as an
//! integer numerator plus a power-of-two scale, so that no comparison is
//! ever decided by floating point. Times are restricted to the grid
//! `t = b_1/2 + b_2/4 + ... + b_P/2^P` with `b_j` binary; at such a time the
//! position of a runner with integer speed `s` is the exact fraction
//! `frac(s * t)` and stays on the same grid.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported scale: numerators must fit in a `u64`.
pub const MAX_SCALE: u32 = 63;

/// Position (1-based, from the least significant end) of the lowest set bit
/// of a speed. A speed `s` with bit index `e` factors as `s = odd * 2^(e-1)`.
///
/// Note the convention is `trailing_zeros + 1` for every speed, including
/// exact powers of two: the bit index of 16 is 5, so that the single time
/// bit `b_5 = 1` (i.e. `t = 1/32`) lands the runner exactly at 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitIndex(u32);

impl BitIndex {
    pub fn value(self) -> u32 {
        self.0
    }

    pub(crate) fn from_value(value: u32) -> Self {
        debug_assert!(value >= 1);
        BitIndex(value)
    }
}

impl fmt::Display for BitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Returns the bit index of a positive speed: `trailing_zeros + 1`.
pub fn bit_index(speed: u64) -> Result<BitIndex> {
    if speed == 0 {
        return Err(Error::ZeroSpeed);
    }
    Ok(BitIndex(speed.trailing_zeros() + 1))
}

/// The distinct positive integer speeds of the moving runners, indexed 1..=n.
/// The stationary runner has speed 0 and is never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeedSet {
    speeds: Vec<u64>,
}

impl SpeedSet {
    /// Validates distinctness and positivity.
    pub fn new(speeds: Vec<u64>) -> Result<Self> {
        if speeds.is_empty() {
            return Err(Error::EmptySpeeds);
        }
        let mut seen = BTreeSet::new();
        for &s in &speeds {
            if s == 0 {
                return Err(Error::ZeroSpeed);
            }
            if !seen.insert(s) {
                return Err(Error::DuplicateSpeed(s));
            }
        }
        Ok(SpeedSet { speeds })
    }

    /// Number of moving runners `n`.
    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: n >= 1
    }

    pub fn speeds(&self) -> &[u64] {
        &self.speeds
    }

    /// Speed of runner `i` (1-based).
    pub fn speed(&self, i: usize) -> Result<u64> {
        self.speeds
            .get(i.wrapping_sub(1))
            .copied()
            .ok_or(Error::RunnerIndex {
                index: i,
                n: self.len(),
            })
    }

    /// Iterates `(runner index, speed)` with 1-based indices.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.speeds.iter().enumerate().map(|(k, &s)| (k + 1, s))
    }

    /// Bit index of runner `i` (1-based).
    pub fn bit_index_of(&self, i: usize) -> Result<BitIndex> {
        bit_index(self.speed(i)?)
    }

    pub fn max_bit_index(&self) -> BitIndex {
        max_bit_index(self)
    }

    /// The subset of runners named by `keep` (original 1-based indices),
    /// paired with the original index of each retained runner.
    pub fn subset(&self, keep: &BTreeSet<usize>) -> Result<(SpeedSet, Vec<usize>)> {
        let mut speeds = Vec::with_capacity(keep.len());
        let mut orig = Vec::with_capacity(keep.len());
        for &i in keep {
            speeds.push(self.speed(i)?);
            orig.push(i);
        }
        Ok((SpeedSet::new(speeds)?, orig))
    }
}

/// Returns `p`, the maximum bit index over the whole speed set.
pub fn max_bit_index(speeds: &SpeedSet) -> BitIndex {
    speeds
        .speeds()
        .iter()
        .map(|&s| BitIndex(s.trailing_zeros() + 1))
        .max()
        .expect("speed set is non-empty")
}

/// Floor of the base-2 logarithm of a positive integer.
pub fn floor_lg(n: u64) -> u32 {
    debug_assert!(n >= 1);
    n.ilog2()
}

/// A time on the dyadic grid: `t = sum of b_j / 2^j` for `j` in `1..=P`,
/// stored as the numerator `sum of b_j * 2^(P-j)` over denominator `2^P`.
/// The integer part of the time is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeVector {
    num: u64,
    scale: u32,
}

impl TimeVector {
    /// The all-zero time at the given scale (`t = 0`).
    pub fn zeros(scale: u32) -> Result<Self> {
        if scale == 0 || scale > MAX_SCALE {
            return Err(Error::ScaleRange(scale));
        }
        Ok(TimeVector { num: 0, scale })
    }

    /// A single set bit `b_j = 1`, i.e. `t = 1/2^j`.
    pub fn single_bit(scale: u32, j: u32) -> Result<Self> {
        let mut tv = TimeVector::zeros(scale)?;
        tv.set_bit(j, true)?;
        Ok(tv)
    }

    /// Builds a time vector directly from its numerator.
    pub fn from_numerator(num: u64, scale: u32) -> Result<Self> {
        if scale == 0 || scale > MAX_SCALE {
            return Err(Error::ScaleRange(scale));
        }
        debug_assert!(num < 1u64 << scale);
        Ok(TimeVector {
            num: num & ((1u64 << scale) - 1),
            scale,
        })
    }

    /// Parses the serialized form: the characters `b_1 b_2 ... b_P`.
    pub fn from_bit_str(bits: &str) -> Result<Self> {
        let len = bits.len() as u32;
        if len == 0 || len > MAX_SCALE {
            return Err(Error::BadBits(bits.to_string()));
        }
        let mut num = 0u64;
        for ch in bits.chars() {
            num = (num << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::BadBits(bits.to_string())),
                };
        }
        Ok(TimeVector { num, scale: len })
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Numerator over `2^scale`.
    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// Value of `b_j` (1-based, `b_1` is the coefficient of 1/2).
    pub fn bit(&self, j: u32) -> bool {
        debug_assert!(j >= 1 && j <= self.scale);
        (self.num >> (self.scale - j)) & 1 == 1
    }

    pub fn set_bit(&mut self, j: u32, value: bool) -> Result<()> {
        if j == 0 || j > self.scale {
            return Err(Error::BitRange {
                bit: j,
                scale: self.scale,
            });
        }
        let mask = 1u64 << (self.scale - j);
        if value {
            self.num |= mask;
        } else {
            self.num &= !mask;
        }
        Ok(())
    }

    /// Copy of `self` with bit `j` set to `value`.
    pub fn with_bit(&self, j: u32, value: bool) -> Result<Self> {
        let mut tv = *self;
        tv.set_bit(j, value)?;
        Ok(tv)
    }

    /// The serialized bit string `b_1 b_2 ... b_P`.
    pub fn bit_string(&self) -> String {
        (1..=self.scale)
            .map(|j| if self.bit(j) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for TimeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bit_string())
    }
}

/// Exact position of a runner on the unit circle: `num / 2^scale` in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactPosition {
    num: u64,
    scale: u32,
}

impl ExactPosition {
    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Position shifted by half a turn (`+ 1/2 mod 1`).
    pub fn antipode(&self) -> ExactPosition {
        let half = 1u64 << (self.scale - 1);
        ExactPosition {
            num: (self.num + half) & ((1u64 << self.scale) - 1),
            scale: self.scale,
        }
    }
}

impl fmt::Display for ExactPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u64 << self.scale)
    }
}

/// Exact position of the runner with the given speed at time `tv`:
/// the fractional part of `speed * t`, with numerator
/// `(speed * tv.numerator) mod 2^P` over `2^P`.
pub fn position(speed: u64, tv: &TimeVector) -> ExactPosition {
    let modulus = 1u128 << tv.scale;
    let s = (speed as u128) & (modulus - 1);
    let num = (s * tv.num as u128) % modulus;
    ExactPosition {
        num: num as u64,
        scale: tv.scale,
    }
}

/// An exact dyadic value in [0, 1], canonicalized so the numerator is odd
/// (or the value is 0/1). Used for circular distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u64,
    scale: u32,
}

impl Dyadic {
    /// Canonicalizes `num / 2^scale` by stripping shared factors of two.
    pub fn new(mut num: u64, mut scale: u32) -> Self {
        if num == 0 {
            return Dyadic { num: 0, scale: 0 };
        }
        while num & 1 == 0 && scale > 0 {
            num >>= 1;
            scale -= 1;
        }
        Dyadic { num, scale }
    }

    pub fn zero() -> Self {
        Dyadic { num: 0, scale: 0 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Exact comparison against a separation threshold `1/2^c`.
    pub fn at_least(&self, d: SeparationDistance) -> bool {
        ((self.num as u128) << d.exponent()) >= (1u128 << self.scale)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / (1u64 << self.scale) as f64
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = (self.num as u128) << other.scale;
        let rhs = (other.num as u128) << self.scale;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u64 << self.scale)
    }
}

/// Shortest arc from a position to the stationary runner at 0:
/// `min(m, 2^P - m) / 2^P`, always in [0, 1/2].
pub fn circ_dist(pos: ExactPosition) -> Dyadic {
    let den = 1u64 << pos.scale;
    Dyadic::new(pos.num.min(den - pos.num), pos.scale)
}

/// A separation threshold `d = 1/2^c` with `c >= 1` (so `0 < d <= 1/2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeparationDistance {
    exponent: u32,
}

impl SeparationDistance {
    pub fn new(exponent: u32) -> Result<Self> {
        if exponent == 0 || exponent > MAX_SCALE {
            return Err(Error::SeparationExponent(exponent));
        }
        Ok(SeparationDistance { exponent })
    }

    /// `1/2` (exponent 1).
    pub fn half() -> Self {
        SeparationDistance { exponent: 1 }
    }

    /// `1/4` (exponent 2).
    pub fn quarter() -> Self {
        SeparationDistance { exponent: 2 }
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn as_dyadic(&self) -> Dyadic {
        Dyadic {
            num: 1,
            scale: self.exponent,
        }
    }

    /// Parses the serialized form `1/2^c`.
    pub fn parse(text: &str) -> Result<Self> {
        let rest = text
            .strip_prefix("1/2^")
            .ok_or_else(|| Error::BadDistance(text.to_string()))?;
        let c: u32 = rest
            .parse()
            .map_err(|_| Error::BadDistance(text.to_string()))?;
        SeparationDistance::new(c).map_err(|_| Error::BadDistance(text.to_string()))
    }
}

impl fmt::Display for SeparationDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/2^{}", self.exponent)
    }
}

/// Index of the sector containing `pos` when the circle is cut into `2^u`
/// equal sectors centered on the multiples of `1/2^u` (sector q spans
/// `q/2^u - 1/2^(u+1)` to `q/2^u + 1/2^(u+1)`).
///
/// A position exactly on a boundary is assigned to the odd-indexed
/// neighbor, which keeps the guarantee that an odd sector index implies a
/// circular distance of at least `1/2^(u+1)`.
pub fn sector_index(pos: ExactPosition, u: u32) -> Result<u64> {
    let (q, _) = sector_index_split(pos, u)?;
    Ok(q)
}

/// True when `pos` sits exactly on a boundary between two sectors of the
/// `2^u`-sector grid.
pub fn on_sector_boundary(pos: ExactPosition, u: u32) -> Result<bool> {
    let (_, boundary) = sector_index_split(pos, u)?;
    Ok(boundary)
}

fn sector_index_split(pos: ExactPosition, u: u32) -> Result<(u64, bool)> {
    if u == 0 || u > MAX_SCALE {
        return Err(Error::SectorResolution(u));
    }
    let p = pos.scale;
    // Nearest integer to pos * 2^u: floor((m * 2^(u+1) + 2^P) / 2^(P+1)),
    // with an exact remainder of zero flagging a boundary point.
    let t = ((pos.num as u128) << (u + 1)) + (1u128 << p);
    let q0 = (t >> (p + 1)) as u64;
    let boundary = t & ((1u128 << (p + 1)) - 1) == 0;
    let sectors = 1u64 << u;
    let q = if boundary && q0.is_multiple_of(2) {
        // boundary between q0-1 and q0: take the odd neighbor
        (q0 - 1) % sectors
    } else {
        q0 % sectors
    };
    Ok((q, boundary))
}
