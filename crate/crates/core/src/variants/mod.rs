//! The parallel Quicksort variants.
//!
//! Every variant is a per-rank async procedure over a [`Comm`]; [`run_variant`]
//! launches one on every rank of a fresh runtime. All of them satisfy the same
//! contract: each rank's output is sorted, rank `i`'s elements are `<=` rank
//! `i + 1`'s, and the union of outputs is the union of inputs.

mod standard;
mod xfree;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use standard::{combined_hyper_qsort, combined_qsort, hyper_qsort, par_qsort};
pub use xfree::{xfree_hyper_qsort, xfree_qsort};

use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::pivots::PivotStrategy;
use crate::vcomm::{Comm, Spmd, TraceStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "qsort")]
    Qsort,
    #[serde(rename = "hyper")]
    Hyper,
    #[serde(rename = "xfree-qsort")]
    XfreeQsort,
    #[serde(rename = "xfree-hyper")]
    XfreeHyper,
    #[serde(rename = "combined-qsort")]
    CombinedQsort,
    #[serde(rename = "combined-hyper")]
    CombinedHyper,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Qsort,
        Variant::Hyper,
        Variant::XfreeQsort,
        Variant::XfreeHyper,
        Variant::CombinedQsort,
        Variant::CombinedHyper,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Variant::Qsort => "qsort",
            Variant::Hyper => "hyper",
            Variant::XfreeQsort => "xfree-qsort",
            Variant::XfreeHyper => "xfree-hyper",
            Variant::CombinedQsort => "combined-qsort",
            Variant::CombinedHyper => "combined-hyper",
        }
    }

    pub fn is_exchange_free(self) -> bool {
        matches!(self, Variant::XfreeQsort | Variant::XfreeHyper)
    }

    /// Variants that sort locally first and keep their data in order.
    pub fn is_hyper(self) -> bool {
        matches!(self, Variant::Hyper | Variant::XfreeHyper | Variant::CombinedHyper)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant `{s}`")))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// How the combined variants estimate the per-rank element count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    /// `ceil(n / p)` from the initial configuration, identical on every rank.
    #[default]
    StaticEstimate,
    /// Maximum of the actual local counts, one allreduce per level.
    AllreduceMax,
}

/// Switch rule for the combined variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedPolicy {
    pub c: f64,
    pub estimate_mode: EstimateMode,
}

impl Default for CombinedPolicy {
    fn default() -> Self {
        CombinedPolicy {
            c: 1500.0,
            estimate_mode: EstimateMode::StaticEstimate,
        }
    }
}

impl CombinedPolicy {
    pub fn new(c: f64, estimate_mode: EstimateMode) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::Config(format!("combined threshold c must be >= 0, got {c}")));
        }
        Ok(CombinedPolicy { c, estimate_mode })
    }

    /// `true` when a group of `group_size` ranks holding about `per_rank`
    /// elements each should stop exchanging and finish exchange-free:
    /// `n' > c * p' / (log2 p' + log2 n')`, with `n'` clamped to at least one.
    pub fn should_switch(&self, group_size: usize, per_rank: usize) -> bool {
        let n = per_rank.max(1) as f64;
        let p = group_size as f64;
        n > self.c * p / (p.log2() + n.log2())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortConfig {
    pub pivot: PivotStrategy,
    pub combined: CombinedPolicy,
    /// Seeds the per-rank sampling generators.
    pub seed: u64,
    /// Check segment ordering and sortedness after every iteration.
    pub debug_asserts: bool,
    /// Worker threads for the runtime; `None` uses the available cores.
    pub workers: Option<usize>,
}

impl Default for SortConfig {
    fn default() -> Self {
        SortConfig {
            pivot: PivotStrategy::default(),
            combined: CombinedPolicy::default(),
            seed: 0,
            debug_asserts: debug_asserts_from_env(),
            workers: None,
        }
    }
}

/// `XSORT_DEBUG_ASSERTS=1` turns on per-iteration invariant checks.
pub fn debug_asserts_from_env() -> bool {
    std::env::var("XSORT_DEBUG_ASSERTS").is_ok_and(|v| v == "1")
}

/// One rank's result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortOutcome<K> {
    pub output: Vec<K>,
    /// Exchange levels plus exchange-free iterations performed.
    pub levels_executed: usize,
    /// Group size at which a combined variant switched to exchange-free.
    pub switched_at: Option<usize>,
    /// Segment lengths after each exchange-free iteration, starting with the
    /// single whole-buffer segment. Empty for exchange-based levels.
    pub segment_history: Vec<Vec<usize>>,
}

impl<K> SortOutcome<K> {
    pub fn local_count(&self) -> usize {
        self.output.len()
    }
}

/// Per-rank sampling generator: one ChaCha stream per world rank.
pub fn rank_rng(seed: u64, world_rank: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(world_rank as u64);
    rng
}

/// Everything a variant run produced.
#[derive(Debug)]
pub struct VariantRun<K> {
    pub outcomes: Vec<SortOutcome<K>>,
    pub traces: Vec<TraceStats>,
    pub finish_times: Option<Vec<Duration>>,
}

impl<K: Clone> VariantRun<K> {
    /// Rank outputs concatenated in rank order.
    pub fn concat(&self) -> Vec<K> {
        self.outcomes.iter().flat_map(|o| o.output.iter().cloned()).collect()
    }

    pub fn outputs(&self) -> Vec<Vec<K>> {
        self.outcomes.iter().map(|o| o.output.clone()).collect()
    }

    pub fn total_trace(&self) -> TraceStats {
        TraceStats::total(&self.traces)
    }

    pub fn slowest(&self) -> Option<Duration> {
        self.finish_times.as_ref().and_then(|t| t.iter().max().copied())
    }
}

/// Runs `variant` on `inputs.len()` ranks, rank `i` starting from `inputs[i]`.
pub fn run_variant<K: SortKey>(variant: Variant, inputs: Vec<Vec<K>>, cfg: &SortConfig) -> Result<VariantRun<K>> {
    let p = inputs.len();
    let total_n: usize = inputs.iter().map(Vec::len).sum();
    let estimate = if p == 0 { 0 } else { total_n.div_ceil(p) };
    let mut spmd = Spmd::new(p);
    if let Some(w) = cfg.workers {
        spmd = spmd.workers(w);
    }
    let run = spmd.run(inputs, |comm: Comm<K>, input: Vec<K>| async move {
        let mut rng = rank_rng(cfg.seed, comm.world_rank());
        match variant {
            Variant::Qsort => par_qsort(comm, input, cfg, &mut rng).await,
            Variant::Hyper => hyper_qsort(comm, input, cfg, &mut rng).await,
            Variant::XfreeQsort => xfree_qsort(&comm, input, cfg, &mut rng).await,
            Variant::XfreeHyper => xfree_hyper_qsort(&comm, input, cfg, &mut rng).await,
            Variant::CombinedQsort => combined_qsort(comm, input, cfg, estimate, &mut rng).await,
            Variant::CombinedHyper => combined_hyper_qsort(comm, input, cfg, estimate, &mut rng).await,
        }
    })?;
    Ok(VariantRun {
        outcomes: run.outputs,
        traces: run.traces,
        finish_times: run.finish_times,
    })
}
