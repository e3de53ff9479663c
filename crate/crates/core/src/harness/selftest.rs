use super::{gen_input, verify, InputKind, Inputs};
use crate::error::Result;
use crate::key::SortKey;
use crate::variants::{run_variant, SortConfig, Variant};

#[derive(Debug, Clone, Default)]
pub struct SelftestReport {
    pub runs: usize,
    pub failures: Vec<String>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every variant with invariant checks enabled over a small grid of
/// rank counts, sizes and input kinds, `seeds` times each.
pub fn run_selftest(seeds: u64) -> SelftestReport {
    let mut report = SelftestReport::default();
    for seed in 0..seeds {
        for variant in Variant::ALL {
            for p in [1usize, 2, 4, 8, 16] {
                for n in [0usize, 1, 7, 100, 1000] {
                    for kind in InputKind::ALL {
                        report.runs += 1;
                        let label = format!("{variant} p={p} n={n} {kind} seed={seed}");
                        if let Err(msg) = check_one(variant, p, n, kind, seed) {
                            report.failures.push(format!("{label}: {msg}"));
                        }
                    }
                }
            }
        }
    }
    report
}

fn check_one(variant: Variant, p: usize, n: usize, kind: InputKind, seed: u64) -> Result<(), String> {
    let cfg = SortConfig {
        seed,
        debug_asserts: true,
        ..SortConfig::default()
    };
    match gen_input(kind, n, p, None, seed).map_err(|e| e.to_string())? {
        Inputs::Int(bufs) => check_typed(variant, bufs, &cfg),
        Inputs::Double(bufs) => check_typed(variant, bufs, &cfg),
    }
}

fn check_typed<K: SortKey>(variant: Variant, inputs: Vec<Vec<K>>, cfg: &SortConfig) -> Result<(), String> {
    let p = inputs.len();
    let n: usize = inputs.iter().map(Vec::len).sum();
    let run = run_variant(variant, inputs.clone(), cfg).map_err(|e| e.to_string())?;
    let report = verify(&inputs, &run.outputs());
    if !report.all_ok() {
        return Err(format!("verification failed: {report:?}"));
    }
    if variant.is_exchange_free() {
        let t = run.total_trace();
        if t.element_units_sent != 0 || t.element_units_alltoallv > n as u64 {
            return Err(format!(
                "exchange-free volume: {} exchanged, {} redistributed for n = {n}",
                t.element_units_sent, t.element_units_alltoallv
            ));
        }
        for (rank, trace) in run.traces.iter().enumerate() {
            let expected: Vec<usize> = (0..p.trailing_zeros()).map(|i| 1 << i).collect();
            if trace.allreduce_slots != expected {
                return Err(format!("rank {rank} pivot rounds {:?}", trace.allreduce_slots));
            }
        }
    }
    Ok(())
}
