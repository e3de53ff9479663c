//! Per-rank sequential kernels: sorting, pivot partitioning, binary-search
//! splitting and multiway merging, plus the segment bookkeeping used by the
//! exchange-free variants.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

use crate::error::{Error, Result};

/// Sorts `a` in non-decreasing order (comparison based, unstable).
pub fn local_sort<K: Ord>(a: &mut [K]) {
    a.sort_unstable();
}

pub fn is_sorted<K: Ord>(a: &[K]) -> bool {
    a.windows(2).all(|w| w[0] <= w[1])
}

/// Rearranges `a` around `pivot` and returns the split index `n0`.
///
/// Afterwards `a[..n0] <= pivot <= a[n0..]`. Elements equal to the pivot are
/// divided evenly: with `L` elements below and `E` equal to the pivot,
/// `n0 = L + ceil(E / 2)`. The rearrangement is stable within each of the
/// three classes.
pub fn partition_even<K: Ord + Copy>(a: &mut [K], pivot: K) -> usize {
    let (mut less, mut equal) = (0, 0);
    for x in a.iter() {
        match x.cmp(&pivot) {
            std::cmp::Ordering::Less => less += 1,
            std::cmp::Ordering::Equal => equal += 1,
            std::cmp::Ordering::Greater => {}
        }
    }
    if equal == 0 && (less == 0 || less == a.len()) {
        return less;
    }
    let scratch = a.to_vec();
    let (mut li, mut ei, mut gi) = (0, less, less + equal);
    for x in scratch {
        let slot = match x.cmp(&pivot) {
            std::cmp::Ordering::Less => &mut li,
            std::cmp::Ordering::Equal => &mut ei,
            std::cmp::Ordering::Greater => &mut gi,
        };
        a[*slot] = x;
        *slot += 1;
    }
    less + equal.div_ceil(2)
}

/// Split index of a sorted buffer: the middle of the run of keys equal to
/// `pivot`, found by two binary searches.
///
/// With `lb` the first index holding a key `>= pivot` and `ub` the first
/// holding a key `> pivot`, returns `lb + (ub - lb) / 2`.
pub fn split_sorted<K: Ord>(a: &[K], pivot: &K) -> usize {
    let lb = a.partition_point(|x| x < pivot);
    let ub = lb + a[lb..].partition_point(|x| x <= pivot);
    lb + (ub - lb) / 2
}

/// Merges two sorted runs. Ties go to `left`.
pub fn merge_two<K: Ord + Copy>(left: &[K], right: &[K]) -> Vec<K> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            out.push(right[j]);
            j += 1;
        } else {
            out.push(left[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&left[i..]);
    out.extend_from_slice(&right[j..]);
    out
}

/// Merges sorted runs with a binary heap of run heads.
///
/// O(N log k) comparisons for N elements in k runs. Equal keys are taken
/// from the run with the smaller index first.
pub fn multiway_merge<K: Ord + Copy, R: AsRef<[K]>>(runs: &[R]) -> Vec<K> {
    let total = runs.iter().map(|r| r.as_ref().len()).sum();
    let mut out = Vec::with_capacity(total);
    let live: Vec<&[K]> = runs.iter().map(|r| r.as_ref()).collect();
    match live.iter().filter(|r| !r.is_empty()).count() {
        0 => return out,
        1 => {
            out.extend_from_slice(live.iter().find(|r| !r.is_empty()).unwrap());
            return out;
        }
        _ => {}
    }
    let mut pos = vec![0usize; live.len()];
    let mut heap: BinaryHeap<Reverse<(K, usize)>> = live
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| Reverse((r[0], i)))
        .collect();
    while let Some(Reverse((key, run))) = heap.pop() {
        out.push(key);
        pos[run] += 1;
        if let Some(&next) = live[run].get(pos[run]) {
            heap.push(Reverse((next, run)));
        }
    }
    out
}

/// Ordered decomposition of a local buffer into contiguous segments.
///
/// Segment `j` occupies `offsets[j]..offsets[j] + lengths[j]`. The exchange
/// free variants start from one segment covering the whole buffer and
/// double the segment count every iteration; after `log2 p` iterations
/// segment `j` holds the elements destined for rank `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentTable {
    offsets: Vec<usize>,
    lengths: Vec<usize>,
}

impl SegmentTable {
    /// One segment spanning a buffer of `n` elements.
    pub fn whole(n: usize) -> Self {
        SegmentTable {
            offsets: vec![0],
            lengths: vec![n],
        }
    }

    /// Consecutive segments with the given lengths, starting at offset 0.
    pub fn from_lengths(lengths: &[usize]) -> Self {
        let offsets = lengths
            .iter()
            .scan(0, |acc, &len| {
                let start = *acc;
                *acc += len;
                Some(start)
            })
            .collect();
        SegmentTable {
            offsets,
            lengths: lengths.to_vec(),
        }
    }

    /// Builds a table from explicit offsets and lengths, checking that the
    /// segments tile `0..buffer_len` in order.
    pub fn from_parts(offsets: Vec<usize>, lengths: Vec<usize>, buffer_len: usize) -> Result<Self> {
        let table = SegmentTable { offsets, lengths };
        table.validate(buffer_len)?;
        Ok(table)
    }

    pub fn active_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn range(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j] + self.lengths[j]
    }

    pub fn ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        (0..self.active_count()).map(move |j| self.range(j))
    }

    pub fn total_len(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Splits every segment `j` at relative position `cuts[j]` into segments
    /// `2j` and `2j + 1`.
    pub fn refine(&mut self, cuts: &[usize]) -> Result<()> {
        if cuts.len() != self.active_count() {
            return Err(Error::Contract(format!(
                "{} cuts for {} segments",
                cuts.len(),
                self.active_count()
            )));
        }
        let mut offsets = Vec::with_capacity(2 * cuts.len());
        let mut lengths = Vec::with_capacity(2 * cuts.len());
        for (j, &cut) in cuts.iter().enumerate() {
            let (off, len) = (self.offsets[j], self.lengths[j]);
            if cut > len {
                return Err(Error::Contract(format!("cut {cut} beyond segment {j} of length {len}")));
            }
            offsets.extend([off, off + cut]);
            lengths.extend([cut, len - cut]);
        }
        self.offsets = offsets;
        self.lengths = lengths;
        Ok(())
    }

    /// Checks that the segments are contiguous, disjoint, in ascending order
    /// and cover exactly `0..buffer_len`.
    pub fn validate(&self, buffer_len: usize) -> Result<()> {
        if self.offsets.len() != self.lengths.len() {
            return Err(Error::Contract("offset and length tables differ in size".into()));
        }
        let mut expected = 0;
        for (j, (&off, &len)) in self.offsets.iter().zip(&self.lengths).enumerate() {
            if off != expected {
                return Err(Error::Contract(format!(
                    "segment {j} starts at {off}, expected {expected} (overlapping or out of order)"
                )));
            }
            expected = off + len;
        }
        if expected != buffer_len {
            return Err(Error::Contract(format!(
                "segments cover {expected} elements of a {buffer_len}-element buffer"
            )));
        }
        Ok(())
    }

    /// Checks the ordering property against the pivots that created each
    /// segment boundary: every element left of boundary `j` is `<=`
    /// `fences[j]`, every element right of it is `>=`. `None` fences belong
    /// to globally empty segments and are skipped.
    pub fn check_order<K: Ord + std::fmt::Debug>(&self, buffer: &[K], fences: &[Option<K>]) -> Result<()> {
        if fences.len() + 1 != self.active_count() {
            return Err(Error::Invariant(format!(
                "{} fences for {} segments",
                fences.len(),
                self.active_count()
            )));
        }
        for (j, fence) in fences.iter().enumerate() {
            let Some(fence) = fence else { continue };
            if let Some(x) = buffer[self.range(j)].iter().find(|x| *x > fence) {
                return Err(Error::Invariant(format!(
                    "segment {j} holds {x:?} above its upper pivot {fence:?}"
                )));
            }
            if let Some(x) = buffer[self.range(j + 1)].iter().find(|x| *x < fence) {
                return Err(Error::Invariant(format!(
                    "segment {} holds {x:?} below its lower pivot {fence:?}",
                    j + 1
                )));
            }
        }
        Ok(())
    }
}
