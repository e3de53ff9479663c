//! Sort keys.
//!
//! Every algorithm in this crate is generic over [`SortKey`], a 64-bit
//! totally ordered key. Integer keys use their natural order; doubles are
//! wrapped in [`F64Key`], which orders by `f64::total_cmp`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A totally ordered 64-bit key that can take part in a distributed sort.
pub trait SortKey: Copy + Ord + Send + Sync + fmt::Debug + 'static {
    /// Midpoint of `lo` and `hi`, computed without overflow.
    ///
    /// Requires `lo <= hi`; the result always satisfies `lo <= mid <= hi`.
    /// Integer keys round towards negative infinity.
    fn midpoint(lo: Self, hi: Self) -> Self;

    /// Arithmetic mean of a non-empty slice, rounded like [`SortKey::midpoint`].
    fn mean(values: &[Self]) -> Self;

    /// Placeholder pivot for globally empty segments. Never used to partition.
    fn sentinel() -> Self;

    /// Lossy conversion used for reporting only.
    fn to_f64(self) -> f64;
}

impl SortKey for i64 {
    fn midpoint(lo: Self, hi: Self) -> Self {
        (lo as i128 + hi as i128).div_euclid(2) as i64
    }

    fn mean(values: &[Self]) -> Self {
        assert!(!values.is_empty(), "mean of an empty slice");
        let sum: i128 = values.iter().map(|&v| v as i128).sum();
        sum.div_euclid(values.len() as i128) as i64
    }

    fn sentinel() -> Self {
        0
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl SortKey for u64 {
    fn midpoint(lo: Self, hi: Self) -> Self {
        ((lo as u128 + hi as u128) / 2) as u64
    }

    fn mean(values: &[Self]) -> Self {
        assert!(!values.is_empty(), "mean of an empty slice");
        let sum: u128 = values.iter().map(|&v| v as u128).sum();
        (sum / values.len() as u128) as u64
    }

    fn sentinel() -> Self {
        0
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// An `f64` with a total order (`-NaN < -inf < ... < -0.0 < 0.0 < ... < inf < NaN`).
///
/// Two keys compare equal only when their bit patterns are identical, so a
/// sort of `F64Key`s is fully determined by the multiset of inputs.
#[derive(Clone, Copy, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct F64Key(pub f64);

impl F64Key {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<f64> for F64Key {
    fn from(v: f64) -> Self {
        F64Key(v)
    }
}

impl PartialEq for F64Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for F64Key {}

impl PartialOrd for F64Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for F64Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Debug for F64Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for F64Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl SortKey for F64Key {
    fn midpoint(lo: Self, hi: Self) -> Self {
        // Halving first keeps the sum finite for keys near f64::MAX.
        let mid = F64Key(lo.0 / 2.0 + hi.0 / 2.0);
        mid.clamp(lo, hi)
    }

    fn mean(values: &[Self]) -> Self {
        assert!(!values.is_empty(), "mean of an empty slice");
        let len = values.len() as f64;
        let mean = F64Key(values.iter().map(|v| v.0 / len).sum());
        let lo = *values.iter().min().unwrap();
        let hi = *values.iter().max().unwrap();
        mean.clamp(lo, hi)
    }

    fn sentinel() -> Self {
        F64Key(0.0)
    }

    fn to_f64(self) -> f64 {
        self.0
    }
}
