//! Exchange-free variants.
//!
//! Ranks keep all their elements until the very end. In iteration `i` every
//! rank holds `2^i` ordered segments; one allreduce yields a global pivot per
//! segment and each segment is partitioned in place, doubling the segment
//! count. After `log2 p` iterations segment `j` is sent to rank `j` with a
//! single all-to-all, and the received pieces are sorted (or merged).
//!
//! Nothing here depends on the caller's rank: every step is either local or
//! a symmetric collective.

use rand_chacha::ChaCha8Rng;

use super::{SortConfig, SortOutcome};
use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::localcore::{is_sorted, local_sort, multiway_merge, partition_even, split_sorted, SegmentTable};
use crate::pivots::{global_choose, local_choose};
use crate::vcomm::Comm;

/// Exchange-free parallel Quicksort.
pub async fn xfree_qsort<K: SortKey>(
    comm: &Comm<K>,
    a: Vec<K>,
    cfg: &SortConfig,
    rng: &mut ChaCha8Rng,
) -> Result<SortOutcome<K>> {
    partition_and_redistribute(comm, a, cfg, rng, false).await
}

/// Exchange-free HyperQuicksort.
pub async fn xfree_hyper_qsort<K: SortKey>(
    comm: &Comm<K>,
    mut a: Vec<K>,
    cfg: &SortConfig,
    rng: &mut ChaCha8Rng,
) -> Result<SortOutcome<K>> {
    local_sort(&mut a);
    xfree_hyper_sorted(comm, a, cfg, rng).await
}

/// Exchange-free HyperQuicksort on an already sorted buffer.
pub(super) async fn xfree_hyper_sorted<K: SortKey>(
    comm: &Comm<K>,
    a: Vec<K>,
    cfg: &SortConfig,
    rng: &mut ChaCha8Rng,
) -> Result<SortOutcome<K>> {
    partition_and_redistribute(comm, a, cfg, rng, true).await
}

async fn partition_and_redistribute<K: SortKey>(
    comm: &Comm<K>,
    mut a: Vec<K>,
    cfg: &SortConfig,
    rng: &mut ChaCha8Rng,
    sorted: bool,
) -> Result<SortOutcome<K>> {
    if comm.size() == 1 {
        // nothing to partition or redistribute
        let n = a.len();
        if !sorted {
            local_sort(&mut a);
        }
        return Ok(SortOutcome {
            output: a,
            levels_executed: 0,
            switched_at: None,
            segment_history: vec![vec![n]],
        });
    }
    let iterations = comm.size().trailing_zeros() as usize;
    let mut table = SegmentTable::whole(a.len());
    // fences[j] is the pivot separating segment j from segment j + 1
    let mut fences: Vec<Option<K>> = Vec::new();
    let mut history = vec![table.lengths().to_vec()];

    for iteration in 0..iterations {
        let candidates: Vec<_> = table
            .ranges()
            .map(|r| local_choose(&a[r], sorted, &cfg.pivot, rng))
            .collect();
        let pivots = global_choose(comm, &candidates, &cfg.pivot).await?;

        let mut cuts = Vec::with_capacity(table.active_count());
        for (j, r) in table.ranges().enumerate() {
            cuts.push(match pivots.get(j) {
                None => 0,
                Some(x) if sorted => split_sorted(&a[r], &x),
                Some(x) => partition_even(&mut a[r], x),
            });
        }
        table.refine(&cuts)?;

        let mut next = Vec::with_capacity(2 * fences.len() + 1);
        for j in 0..pivots.len() {
            next.push(pivots.get(j));
            if let Some(old) = fences.get(j) {
                next.push(*old);
            }
        }
        fences = next;
        history.push(table.lengths().to_vec());

        if cfg.debug_asserts {
            table.check_order(&a, &fences)?;
            if sorted {
                if let Some(j) = table.ranges().position(|r| !is_sorted(&a[r])) {
                    return Err(Error::Invariant(format!(
                        "segment {j} not sorted after iteration {iteration}"
                    )));
                }
            }
        }
    }

    let expected = comm.alltoall_counts(table.lengths().to_vec()).await?;
    let (received, lengths) = comm.alltoallv(&a, &table).await?;
    if expected != lengths {
        return Err(Error::Invariant(format!(
            "alltoallv delivered {lengths:?}, counts announced {expected:?}"
        )));
    }

    let output = if sorted {
        let runs = SegmentTable::from_lengths(&lengths);
        let pieces: Vec<&[K]> = runs.ranges().map(|r| &received[r]).collect();
        multiway_merge(&pieces)
    } else {
        let mut received = received;
        local_sort(&mut received);
        received
    };
    Ok(SortOutcome {
        output,
        levels_executed: iterations,
        switched_at: None,
        segment_history: history,
    })
}
