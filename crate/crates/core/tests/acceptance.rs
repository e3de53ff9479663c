//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any gating criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xsort_core::harness::{gen_input, run_experiment, InputKind, Inputs, RunConfig};
use xsort_core::localcore::{local_sort, multiway_merge, partition_even, split_sorted};
use xsort_core::{run_variant, CombinedPolicy, Error, SortConfig, SortKey, Variant, VariantRun};

const PS: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
const NS: [usize; 5] = [0, 1, 7, 1000, 100_000];
const SEEDS: u64 = 5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], ok_detail: String) -> Outcome {
    match failures.first() {
        None => Outcome {
            pass: true,
            detail: ok_detail,
        },
        Some(first) => Outcome {
            pass: false,
            detail: format!("{} failure(s), first: {first}", failures.len()),
        },
    }
}

fn cfg(seed: u64) -> SortConfig {
    SortConfig {
        seed,
        debug_asserts: false,
        ..SortConfig::default()
    }
}

/// One pass over the full grid feeds the first three criteria.
#[derive(Default)]
struct GridFindings {
    runs: usize,
    oracle: Vec<String>,
    volume: Vec<String>,
    pivots: Vec<String>,
    elapsed: Duration,
}

fn grid_case<K: SortKey>(findings: &mut GridFindings, variant: Variant, inputs: Vec<Vec<K>>, seed: u64, label: &str) {
    let p = inputs.len();
    let n: usize = inputs.iter().map(Vec::len).sum();
    let mut expected: Vec<K> = inputs.concat();
    expected.sort_unstable();
    findings.runs += 1;
    let run = match run_variant(variant, inputs, &cfg(seed)) {
        Ok(run) => run,
        Err(e) => {
            findings.oracle.push(format!("{label}: {e}"));
            return;
        }
    };
    if run.concat() != expected {
        findings
            .oracle
            .push(format!("{label}: output differs from sequential sort"));
    }
    if variant.is_exchange_free() {
        let t = run.total_trace();
        if t.element_units_sent != 0 || t.element_units_alltoallv > n as u64 {
            findings.volume.push(format!(
                "{label}: sent {} alltoallv {} (n = {n})",
                t.element_units_sent, t.element_units_alltoallv
            ));
        }
        let rounds: Vec<usize> = (0..p.trailing_zeros()).map(|i| 1 << i).collect();
        for (rank, trace) in run.traces.iter().enumerate() {
            let total: usize = trace.allreduce_slots.iter().sum();
            if trace.allreduce_slots != rounds || total != p - 1 {
                findings
                    .pivots
                    .push(format!("{label} rank {rank}: rounds {:?}", trace.allreduce_slots));
            }
        }
    }
}

fn grid() -> GridFindings {
    let start = Instant::now();
    let mut findings = GridFindings::default();
    for seed in 0..SEEDS {
        for p in PS {
            for n in NS {
                for kind in InputKind::ALL {
                    let inputs = gen_input(kind, n, p, None, seed).expect("valid input config");
                    for variant in Variant::ALL {
                        let label = format!("{variant} p={p} n={n} {kind} seed={seed}");
                        match inputs.clone() {
                            Inputs::Int(b) => grid_case(&mut findings, variant, b, seed, &label),
                            Inputs::Double(b) => grid_case(&mut findings, variant, b, seed, &label),
                        }
                    }
                }
            }
        }
    }
    findings.elapsed = start.elapsed();
    findings
}

fn standard_volume_band() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for p in [4usize, 8, 16] {
        let n = p * 10_000;
        let ideal = n as f64 / 2.0 * (p as f64).log2();
        for seed in 0..10 {
            let Inputs::Double(bufs) = gen_input(InputKind::UniformDouble, n, p, None, seed).unwrap() else {
                unreachable!()
            };
            for variant in [Variant::Qsort, Variant::Hyper] {
                let run = run_variant(variant, bufs.clone(), &cfg(seed)).unwrap();
                let units = run.total_trace().element_units_sent as f64;
                let dev = (units - ideal).abs() / ideal;
                worst = worst.max(dev);
                if dev > 0.30 {
                    failures.push(format!("{variant} p={p} seed={seed}: {units} vs {ideal}"));
                }
            }
        }
    }
    outcome(&failures, format!("max deviation {:.2}% of (n/2)log2 p", worst * 100.0))
}

fn load_balance() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for p in [4usize, 8, 16, 32, 64] {
        let per_rank = 10_000;
        for seed in 0..SEEDS {
            let Inputs::Int(bufs) = gen_input(InputKind::Perm, p * per_rank, p, None, seed).unwrap() else {
                unreachable!()
            };
            for variant in [Variant::XfreeQsort, Variant::XfreeHyper] {
                let run = run_variant(variant, bufs.clone(), &cfg(seed)).unwrap();
                let imb = xsort_core::harness::imbalance(run.outcomes.iter().map(|o| o.output.len()));
                let rel = imb / per_rank as f64;
                worst = worst.max(rel);
                if rel > 0.05 {
                    failures.push(format!("{variant} p={p} seed={seed}: imbalance {imb}"));
                }
            }
        }
    }
    outcome(&failures, format!("worst imbalance {:.2}% of n/p", worst * 100.0))
}

fn same_run<K: SortKey>(a: &VariantRun<K>, b: &VariantRun<K>) -> bool {
    a.outputs() == b.outputs() && a.traces == b.traces
}

fn combined_boundaries() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    let pairs = [
        (Variant::CombinedQsort, Variant::XfreeQsort, Variant::Qsort),
        (Variant::CombinedHyper, Variant::XfreeHyper, Variant::Hyper),
    ];
    for seed in 0..SEEDS {
        for p in PS {
            for n in [0usize, 7, 1000, 20_000] {
                let Inputs::Double(bufs) = gen_input(InputKind::UniformDouble, n, p, None, seed).unwrap() else {
                    unreachable!()
                };
                for (combined, xfree, standard) in pairs {
                    for (c, target) in [(0.0, xfree), (2f64.powi(62), standard)] {
                        cases += 1;
                        let mut with_c = cfg(seed);
                        with_c.combined = CombinedPolicy { c, ..with_c.combined };
                        let lhs = run_variant(combined, bufs.clone(), &with_c).unwrap();
                        let rhs = run_variant(target, bufs.clone(), &cfg(seed)).unwrap();
                        if !same_run(&lhs, &rhs) {
                            failures.push(format!("{combined} c={c} vs {target} p={p} n={n} seed={seed}"));
                        }
                    }
                }
            }
        }
    }
    outcome(&failures, format!("{cases} comparisons identical in output and trace"))
}

fn debug_invariants() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let runs = 240;
    for i in 0..runs {
        let variant = Variant::ALL[i % Variant::ALL.len()];
        let p = 1usize << rng.gen_range(0..7);
        let n = match rng.gen_range(0..4) {
            0 => rng.gen_range(0..p * 2 + 1),
            1 => rng.gen_range(0..200),
            _ => rng.gen_range(0..20_000),
        };
        let kind = InputKind::ALL[rng.gen_range(0..3)];
        // narrow key ranges force many duplicates
        let key_range = rng.gen_bool(0.3).then(|| rng.gen_range(1.0..16.0));
        let seed = rng.gen();
        let config = SortConfig {
            seed,
            debug_asserts: true,
            ..SortConfig::default()
        };
        let inputs = gen_input(kind, n, p, key_range, seed).unwrap();
        let result = match inputs {
            Inputs::Int(b) => run_variant(variant, b, &config).map(|_| ()),
            Inputs::Double(b) => run_variant(variant, b, &config).map(|_| ()),
        };
        if let Err(e) = result {
            let tag = if matches!(e, Error::Invariant(_)) {
                "violation"
            } else {
                "error"
            };
            failures.push(format!("{tag} in {variant} p={p} n={n} {kind}: {e}"));
        }
    }
    outcome(&failures, format!("{runs} seeded runs, zero violations"))
}

fn random_buffer(rng: &mut ChaCha8Rng) -> Vec<i64> {
    let len = rng.gen_range(0..64);
    let range = rng.gen_range(1..40);
    (0..len).map(|_| rng.gen_range(-range..range)).collect()
}

fn kernel_oracles() -> Outcome {
    const BUFFERS: usize = 1000;
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    for i in 0..BUFFERS {
        let original = random_buffer(&mut rng);
        let pivot = rng.gen_range(-45..45);

        let mut a = original.clone();
        let n0 = partition_even(&mut a, pivot);
        let less = original.iter().filter(|&&x| x < pivot).count();
        let equal = original.iter().filter(|&&x| x == pivot).count();
        let (mut sorted_a, mut sorted_o) = (a.clone(), original.clone());
        sorted_a.sort_unstable();
        sorted_o.sort_unstable();
        if n0 != less + equal.div_ceil(2)
            || sorted_a != sorted_o
            || a[..n0].iter().any(|&x| x > pivot)
            || a[n0..].iter().any(|&x| x < pivot)
        {
            failures.push(format!("partition_even buffer {i}: {original:?} pivot {pivot}"));
        }

        let mut sorted = original.clone();
        local_sort(&mut sorted);
        let lb = sorted.iter().position(|&x| x >= pivot).unwrap_or(sorted.len());
        let ub = sorted.iter().position(|&x| x > pivot).unwrap_or(sorted.len());
        if split_sorted(&sorted, &pivot) != lb + (ub - lb) / 2 {
            failures.push(format!("split_sorted buffer {i}: {sorted:?} pivot {pivot}"));
        }

        let runs: Vec<Vec<i64>> = (0..rng.gen_range(0..9))
            .map(|_| {
                let mut r = random_buffer(&mut rng);
                r.sort_unstable();
                r
            })
            .collect();
        let mut expected = runs.concat();
        expected.sort_unstable();
        if multiway_merge(&runs) != expected {
            failures.push(format!("multiway_merge buffer {i}"));
        }
    }
    outcome(&failures, format!("{BUFFERS} buffers per kernel"))
}

/// Returns `None` when the machine is too small to say anything.
fn timing_smoke() -> Option<Outcome> {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if cores < 8 {
        return None;
    }
    let mut config = RunConfig::new(Variant::XfreeQsort, 8, 10_000_000, InputKind::UniformDouble, 1);
    config.repeats = 3;
    config.warmups = 1;
    config.debug_asserts = false;
    let record = run_experiment(&config).ok()?;
    Some(Outcome {
        pass: record.speedup > 1.0,
        detail: format!(
            "best {:.1} ms vs baseline {:.1} ms, speedup {:.2}",
            record.best_time.as_secs_f64() * 1e3,
            record.baseline_time.as_secs_f64() * 1e3,
            record.speedup
        ),
    })
}

fn report(failed: &mut usize, name: &str, o: Outcome) {
    println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    if !o.pass {
        *failed += 1;
    }
}

fn main() -> ExitCode {
    let mut failed = 0;

    let g = grid();
    let mut oracle_failures = g.oracle.clone();
    if g.elapsed > Duration::from_secs(120) {
        oracle_failures.push(format!("grid took {:.1} s (limit 120 s)", g.elapsed.as_secs_f64()));
    }
    report(
        &mut failed,
        "master-oracle",
        outcome(
            &oracle_failures,
            format!("{} runs in {:.1} s", g.runs, g.elapsed.as_secs_f64()),
        ),
    );
    report(
        &mut failed,
        "exchange-free-volume",
        outcome(&g.volume, "no exchanges, alltoallv units <= n on every config".into()),
    );
    report(
        &mut failed,
        "pivot-distribution-count",
        outcome(&g.pivots, "log2 p rounds of 1, 2, ..., p/2 slots on every rank".into()),
    );
    report(&mut failed, "standard-volume-band", standard_volume_band());
    report(&mut failed, "load-balance", load_balance());
    report(&mut failed, "combined-boundary-equivalence", combined_boundaries());
    report(&mut failed, "debug-invariants", debug_invariants());
    report(&mut failed, "kernel-oracles", kernel_oracles());
    match timing_smoke() {
        None => println!("WARN timing-smoke: skipped, fewer than 8 cores available (non-gating)"),
        Some(o) if o.pass => println!("PASS timing-smoke: {}", o.detail),
        Some(o) => println!("WARN timing-smoke: {} (non-gating)", o.detail),
    }

    if failed == 0 {
        println!("acceptance: all gating criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} gating criterion/criteria failed");
        ExitCode::FAILURE
    }
}
