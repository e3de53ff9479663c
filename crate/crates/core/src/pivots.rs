//! Local and global pivot selection.
//!
//! Each rank proposes a candidate per active segment; one collective turns
//! the candidates of all ranks into a [`PivotVector`] that is identical
//! everywhere. Two schemes are supported:
//!
//! * interpolation (default): the pivot is the midpoint of the global
//!   minimum and maximum. Sorted buffers contribute their exact endpoints;
//!   unsorted ones the extremes of a small random sample.
//! * median-mean: the pivot is the mean of the ranks' local medians.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::vcomm::Comm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotKind {
    #[default]
    #[serde(rename = "interp")]
    Interpolation,
    #[serde(rename = "median")]
    MedianMean,
}

impl FromStr for PivotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interp" | "interpolation" => Ok(PivotKind::Interpolation),
            "median" | "median-mean" => Ok(PivotKind::MedianMean),
            other => Err(Error::Config(format!("unknown pivot strategy `{other}`"))),
        }
    }
}

impl fmt::Display for PivotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PivotKind::Interpolation => "interp",
            PivotKind::MedianMean => "median",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotStrategy {
    pub kind: PivotKind,
    /// Elements sampled per segment when the buffer is not sorted.
    pub sample_size: usize,
}

impl Default for PivotStrategy {
    fn default() -> Self {
        PivotStrategy {
            kind: PivotKind::Interpolation,
            sample_size: 20,
        }
    }
}

impl PivotStrategy {
    pub fn new(kind: PivotKind, sample_size: usize) -> Result<Self> {
        if sample_size == 0 {
            return Err(Error::Config("pivot sample size must be at least 1".into()));
        }
        Ok(PivotStrategy { kind, sample_size })
    }
}

/// Global pivots for one iteration, one per active segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotVector<K> {
    pub values: Vec<K>,
    /// `true` where the segment is empty on every rank. The value in that
    /// slot is [`SortKey::sentinel`] and must not be used.
    pub empty: Vec<bool>,
}

impl<K: SortKey> PivotVector<K> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The pivot for slot `j`, or `None` for a globally empty segment.
    pub fn get(&self, j: usize) -> Option<K> {
        (!self.empty[j]).then_some(self.values[j])
    }

    fn from_slots(slots: Vec<Option<K>>) -> Self {
        let empty = slots.iter().map(Option::is_none).collect();
        let values = slots.into_iter().map(|v| v.unwrap_or_else(K::sentinel)).collect();
        PivotVector { values, empty }
    }
}

/// A rank's proposal for one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate<K> {
    MinMax(Option<(K, K)>),
    Median(Option<K>),
}

/// Local (min, max) candidate, or `None` for an empty buffer.
///
/// Sorted buffers yield their endpoints. Otherwise the extremes of `s`
/// positions drawn uniformly with replacement; buffers of at most `s`
/// elements are scanned completely.
pub fn local_minmax<K: SortKey, R: Rng + ?Sized>(a: &[K], sorted: bool, s: usize, rng: &mut R) -> Option<(K, K)> {
    let n = a.len();
    if n == 0 {
        return None;
    }
    if sorted {
        return Some((a[0], a[n - 1]));
    }
    let extremes = |it: &mut dyn Iterator<Item = K>| {
        let first = it.next().unwrap();
        it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    if n <= s {
        Some(extremes(&mut a.iter().copied()))
    } else {
        Some(extremes(&mut (0..s).map(|_| a[rng.gen_range(0..n)])))
    }
}

/// Local median candidate: the middle element of a sorted buffer, or the
/// median of a sample of `s` elements otherwise.
pub fn local_median<K: SortKey, R: Rng + ?Sized>(a: &[K], sorted: bool, s: usize, rng: &mut R) -> Option<K> {
    let n = a.len();
    if n == 0 {
        return None;
    }
    if sorted {
        return Some(a[n / 2]);
    }
    let mut sample: Vec<K> = if n <= s {
        a.to_vec()
    } else {
        (0..s).map(|_| a[rng.gen_range(0..n)]).collect()
    };
    let mid = sample.len() / 2;
    let (_, m, _) = sample.select_nth_unstable(mid);
    Some(*m)
}

/// Midpoint of the global extremes.
pub fn interpolate<K: SortKey>(gmin: K, gmax: K) -> K {
    K::midpoint(gmin, gmax)
}

pub fn local_choose<K: SortKey, R: Rng + ?Sized>(
    a: &[K],
    sorted: bool,
    strategy: &PivotStrategy,
    rng: &mut R,
) -> Candidate<K> {
    match strategy.kind {
        PivotKind::Interpolation => Candidate::MinMax(local_minmax(a, sorted, strategy.sample_size, rng)),
        PivotKind::MedianMean => Candidate::Median(local_median(a, sorted, strategy.sample_size, rng)),
    }
}

/// Agrees on one pivot per candidate slot with a single allreduce.
pub async fn global_choose<K: SortKey>(
    comm: &Comm<K>,
    candidates: &[Candidate<K>],
    strategy: &PivotStrategy,
) -> Result<PivotVector<K>> {
    let wrong_kind = || Error::Contract(format!("candidates do not match the {} strategy", strategy.kind));
    match strategy.kind {
        PivotKind::Interpolation => {
            let local = candidates
                .iter()
                .map(|c| match c {
                    Candidate::MinMax(v) => Ok(*v),
                    Candidate::Median(_) => Err(wrong_kind()),
                })
                .collect::<Result<Vec<_>>>()?;
            let global = comm.allreduce_minmax(local).await?;
            Ok(PivotVector::from_slots(
                global
                    .into_iter()
                    .map(|g| g.map(|(lo, hi)| interpolate(lo, hi)))
                    .collect(),
            ))
        }
        PivotKind::MedianMean => {
            let local = candidates
                .iter()
                .map(|c| match c {
                    Candidate::Median(v) => Ok(*v),
                    Candidate::MinMax(_) => Err(wrong_kind()),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PivotVector::from_slots(comm.allreduce_mean(local).await?))
        }
    }
}
