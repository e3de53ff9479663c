//! Parallel Quicksort variants on a virtual message-passing runtime.
//!
//! The crate sorts `p = 2^k` distributed buffers so that every rank's output
//! is sorted and every element on rank `i` is `<=` every element on rank
//! `i + 1`. Four algorithms and two combinations are provided:
//!
//! * standard parallel Quicksort and HyperQuicksort, which exchange half of
//!   their elements with a partner at each of the `log2 p` levels;
//! * their exchange-free counterparts, which only agree on pivots during the
//!   recursion and move every element at most once, in a final all-to-all;
//! * combined variants that start with exchanges and switch to the
//!   exchange-free scheme once the per-rank load is large enough.
//!
//! All communication goes through [`vcomm`], which counts every element and
//! pivot transferred so the volume tradeoff can be measured exactly.

pub mod error;
pub mod harness;
pub mod key;
pub mod localcore;
pub mod pivots;
pub mod variants;
pub mod vcomm;

pub use error::{Error, Result};
pub use key::{F64Key, SortKey};
pub use variants::{run_variant, CombinedPolicy, EstimateMode, SortConfig, SortOutcome, Variant, VariantRun};
pub use vcomm::{spawn_spmd, Comm, Spmd, SpmdRun, TraceStats};
