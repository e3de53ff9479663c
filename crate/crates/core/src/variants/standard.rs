//! Exchange-based recursion: standard parallel Quicksort and HyperQuicksort,
//! and the combined variants that switch to the exchange-free scheme.

use rand_chacha::ChaCha8Rng;

use super::xfree::{xfree_hyper_sorted, xfree_qsort};
use super::{EstimateMode, SortConfig, SortOutcome};
use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::localcore::{is_sorted, local_sort, merge_two, partition_even, split_sorted};
use crate::pivots::{global_choose, local_choose};
use crate::vcomm::Comm;

/// Standard parallel Quicksort: partition, exchange with `rank ^ size/2`,
/// halve the group, repeat; sort locally at the bottom.
pub async fn par_qsort<K: SortKey>(
    comm: Comm<K>,
    a: Vec<K>,
    cfg: &SortConfig,
    rng: &mut ChaCha8Rng,
) -> Result<SortOutcome<K>> {
    exchange_recursion(comm, a, cfg, rng, false, None).await
}

/// HyperQuicksort: sort first, then split by binary search and merge the
/// kept and received runs at every level.
pub async fn hyper_qsort<K: SortKey>(
    comm: Comm<K>,
    a: Vec<K>,
    cfg: &SortConfig,
    rng: &mut ChaCha8Rng,
) -> Result<SortOutcome<K>> {
    exchange_recursion(comm, a, cfg, rng, true, None).await
}

/// Parallel Quicksort that hands over to [`xfree_qsort`] once the switch
/// rule in `cfg.combined` holds. `estimate` is the static per-rank count.
pub async fn combined_qsort<K: SortKey>(
    comm: Comm<K>,
    a: Vec<K>,
    cfg: &SortConfig,
    estimate: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SortOutcome<K>> {
    exchange_recursion(comm, a, cfg, rng, false, Some(estimate)).await
}

/// HyperQuicksort that hands over to the exchange-free HyperQuicksort.
pub async fn combined_hyper_qsort<K: SortKey>(
    comm: Comm<K>,
    a: Vec<K>,
    cfg: &SortConfig,
    estimate: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SortOutcome<K>> {
    exchange_recursion(comm, a, cfg, rng, true, Some(estimate)).await
}

async fn exchange_recursion<K: SortKey>(
    mut comm: Comm<K>,
    mut a: Vec<K>,
    cfg: &SortConfig,
    rng: &mut ChaCha8Rng,
    hyper: bool,
    combined: Option<usize>,
) -> Result<SortOutcome<K>> {
    if hyper {
        local_sort(&mut a);
    }
    let mut levels = 0;
    while comm.size() > 1 {
        if let Some(estimate) = combined {
            let per_rank = match cfg.combined.estimate_mode {
                EstimateMode::StaticEstimate => estimate,
                EstimateMode::AllreduceMax => comm.allreduce_max_count(a.len()).await?,
            };
            if cfg.combined.should_switch(comm.size(), per_rank) {
                let group_size = comm.size();
                let mut out = if hyper {
                    xfree_hyper_sorted(&comm, a, cfg, rng).await?
                } else {
                    xfree_qsort(&comm, a, cfg, rng).await?
                };
                out.levels_executed += levels;
                out.switched_at = Some(group_size);
                return Ok(out);
            }
        }

        let candidate = local_choose(&a, hyper, &cfg.pivot, rng);
        let pivots = global_choose(&comm, &[candidate], &cfg.pivot).await?;
        let n0 = match pivots.get(0) {
            None => 0,
            Some(x) if hyper => split_sorted(&a, &x),
            Some(x) => partition_even(&mut a, x),
        };

        let half = comm.size() / 2;
        let lower = comm.rank() < half;
        let (low_part, high_part) = a.split_at(n0);
        let (keep, send) = if lower {
            (low_part, high_part)
        } else {
            (high_part, low_part)
        };
        let received = comm.exchange(comm.rank() ^ half, send.to_vec()).await?;
        a = if hyper {
            merge_two(keep, &received)
        } else {
            let mut next = Vec::with_capacity(keep.len() + received.len());
            next.extend_from_slice(keep);
            next.extend(received);
            next
        };
        comm = comm.split_group(lower).await?;
        levels += 1;

        if hyper && cfg.debug_asserts && !is_sorted(&a) {
            return Err(Error::Invariant(format!("buffer not sorted after level {levels}")));
        }
    }
    if !hyper {
        local_sort(&mut a);
    }
    Ok(SortOutcome {
        output: a,
        levels_executed: levels,
        switched_at: None,
        segment_history: Vec::new(),
    })
}
