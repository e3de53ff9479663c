//! Experiment driver: input generation, verification, timing and CSV/JSON
//! output for single runs and scaling sweeps.
//!
//! Wall times measured here come from the in-process runtime and include its
//! scheduling overhead; they are not comparable to cluster timings. The trace
//! counters are exact and are the primary measurement.

mod input;
mod selftest;
mod verify;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use input::{block_sizes, gen_input, InputKind, Inputs};
pub use selftest::{run_selftest, SelftestReport};
pub use verify::{imbalance, verify, VerifyReport};

use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::localcore::local_sort;
use crate::pivots::PivotStrategy;
use crate::variants::{run_variant, CombinedPolicy, SortConfig, Variant, VariantRun};
use crate::vcomm::{is_power_of_two, TraceDocument, TraceStats};

/// Header of the results CSV, in column order.
pub const CSV_HEADER: &str = "variant,p,n,input,seed,rep_best_ms,baseline_ms,speedup,efficiency,imbalance,\
elem_exchange_units,elem_alltoallv_units,pivot_units,switch_group_size";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub variant: Variant,
    pub p: usize,
    pub n: usize,
    pub input: InputKind,
    /// Upper bound (exclusive) for uniform keys; defaults to `n`.
    pub key_range: Option<f64>,
    pub seed: u64,
    pub repeats: usize,
    pub warmups: usize,
    pub pivot: PivotStrategy,
    pub combined: CombinedPolicy,
    /// Bytes per element, used only to report transfer volume in bytes.
    pub element_byte_weight: u64,
    pub workers: Option<usize>,
    pub debug_asserts: bool,
}

impl RunConfig {
    pub fn new(variant: Variant, p: usize, n: usize, input: InputKind, seed: u64) -> Self {
        RunConfig {
            variant,
            p,
            n,
            input,
            key_range: None,
            seed,
            repeats: 43,
            warmups: 5,
            pivot: PivotStrategy::default(),
            combined: CombinedPolicy::default(),
            element_byte_weight: 8,
            workers: None,
            debug_asserts: crate::variants::debug_asserts_from_env(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_power_of_two(self.p) {
            return Err(Error::Config(format!("p = {} is not a power of two", self.p)));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        PivotStrategy::new(self.pivot.kind, self.pivot.sample_size)?;
        CombinedPolicy::new(self.combined.c, self.combined.estimate_mode)?;
        Ok(())
    }

    pub fn sort_config(&self) -> SortConfig {
        SortConfig {
            pivot: self.pivot,
            combined: self.combined,
            seed: self.seed,
            debug_asserts: self.debug_asserts,
            workers: self.workers,
        }
    }
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: RunConfig,
    /// Best over repeats of the slowest rank's completion time.
    pub best_time: Duration,
    /// Best over repeats of a single-process sort of the same keys.
    pub baseline_time: Duration,
    pub speedup: f64,
    pub efficiency: f64,
    pub verify: VerifyReport,
    pub imbalance: f64,
    pub elem_exchange_units: u64,
    pub elem_alltoallv_units: u64,
    pub pivot_units: u64,
    /// Element bytes moved (exchange plus redistribution) at the configured weight.
    pub element_bytes: u64,
    pub switch_group_size: Option<usize>,
    pub traces: Vec<TraceStats>,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    variant: &'a str,
    p: usize,
    n: usize,
    input: &'a str,
    seed: u64,
    rep_best_ms: f64,
    baseline_ms: f64,
    speedup: f64,
    efficiency: f64,
    imbalance: f64,
    elem_exchange_units: u64,
    elem_alltoallv_units: u64,
    pivot_units: u64,
    switch_group_size: Option<usize>,
}

impl RunRecord {
    pub fn passed(&self) -> bool {
        self.verify.all_ok()
    }

    fn csv_row(&self) -> CsvRow<'_> {
        CsvRow {
            variant: self.config.variant.id(),
            p: self.config.p,
            n: self.config.n,
            input: self.config.input.id(),
            seed: self.config.seed,
            rep_best_ms: self.best_time.as_secs_f64() * 1e3,
            baseline_ms: self.baseline_time.as_secs_f64() * 1e3,
            speedup: self.speedup,
            efficiency: self.efficiency,
            imbalance: self.imbalance,
            elem_exchange_units: self.elem_exchange_units,
            elem_alltoallv_units: self.elem_alltoallv_units,
            pivot_units: self.pivot_units,
            switch_group_size: self.switch_group_size,
        }
    }

    /// This record as one CSV line (no trailing newline).
    pub fn to_csv_line(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.serialize(self.csv_row()).expect("csv row serializes");
        let bytes = w.into_inner().expect("in-memory writer");
        String::from_utf8(bytes).expect("csv is utf-8").trim_end().to_string()
    }

    pub fn trace_document(&self) -> TraceDocument {
        TraceDocument::new(self.config.variant.id(), self.config.n, &self.traces)
    }
}

/// Appends records to a CSV file, writing the header first if the file is
/// new or empty.
pub fn append_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{CSV_HEADER}")?;
    }
    for r in records {
        writeln!(file, "{}", r.to_csv_line())?;
    }
    Ok(())
}

/// Runs `warmups + repeats` sorts of one generated input, verifies the last
/// one and compares the best time against a sequential sort.
pub fn run_experiment(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    match gen_input(config.input, config.n, config.p, config.key_range, config.seed)? {
        Inputs::Int(bufs) => run_typed(config, bufs),
        Inputs::Double(bufs) => run_typed(config, bufs),
    }
}

fn run_typed<K: SortKey>(config: &RunConfig, inputs: Vec<Vec<K>>) -> Result<RunRecord> {
    let sort_cfg = config.sort_config();
    let mut best = Duration::MAX;
    let mut last: Option<VariantRun<K>> = None;
    for i in 0..config.warmups + config.repeats {
        let run = run_variant(config.variant, inputs.clone(), &sort_cfg)?;
        if i >= config.warmups {
            best = best.min(run.slowest().unwrap_or_default());
        }
        last = Some(run);
    }
    let run = last.expect("at least one repetition");

    let mut baseline = Duration::MAX;
    let all: Vec<K> = inputs.iter().flatten().copied().collect();
    for i in 0..config.warmups + config.repeats {
        let mut keys = all.clone();
        let start = Instant::now();
        local_sort(&mut keys);
        let elapsed = start.elapsed();
        if i >= config.warmups {
            baseline = baseline.min(elapsed);
        }
    }

    let outputs = run.outputs();
    let report = verify(&inputs, &outputs);
    let total = run.total_trace();
    let speedup = if best.is_zero() {
        f64::NAN
    } else {
        baseline.as_secs_f64() / best.as_secs_f64()
    };
    Ok(RunRecord {
        config: config.clone(),
        best_time: best,
        baseline_time: baseline,
        speedup,
        efficiency: speedup / config.p as f64,
        verify: report,
        imbalance: report.imbalance,
        elem_exchange_units: total.element_units_sent,
        elem_alltoallv_units: total.element_units_alltoallv,
        pivot_units: total.pivot_units,
        element_bytes: (total.element_units_sent + total.element_units_alltoallv) * config.element_byte_weight,
        switch_group_size: run.outcomes.iter().filter_map(|o| o.switched_at).max(),
        traces: run.traces,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Fixed total `n`, growing `p`.
    Strong,
    /// Fixed `p`, growing elements per rank.
    Weak,
}

impl std::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(SweepMode::Strong),
            "weak" => Ok(SweepMode::Weak),
            other => Err(Error::Config(format!("unknown sweep mode `{other}`"))),
        }
    }
}

/// Powers of two from `lo` to `hi` inclusive (`lo` rounded up to a power of two).
pub fn doubling(lo: usize, hi: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut x = lo.max(1).next_power_of_two();
    while x <= hi {
        v.push(x);
        x *= 2;
    }
    v
}

/// Geometric series `lo, 2 lo, 4 lo, ...` up to `hi` inclusive.
pub fn doubling_from(lo: usize, hi: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut x = lo.max(1);
    while x <= hi {
        v.push(x);
        x *= 2;
    }
    v
}

/// Expands a sweep into one configuration per (variant, point).
///
/// Strong mode varies `p` over `points` at the base `n`; weak mode keeps the
/// base `p` and sets `n = points[i] * p`.
pub fn sweep_configs(mode: SweepMode, base: &RunConfig, variants: &[Variant], points: &[usize]) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for &variant in variants {
        for &x in points {
            let mut cfg = base.clone();
            cfg.variant = variant;
            match mode {
                SweepMode::Strong => cfg.p = x,
                SweepMode::Weak => cfg.n = x * base.p,
            }
            out.push(cfg);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(variant: Variant, p: usize, n: usize) -> RunConfig {
        let mut c = RunConfig::new(variant, p, n, InputKind::Perm, 1);
        c.repeats = 1;
        c.warmups = 0;
        c
    }

    #[test]
    fn header_matches_row_shape() {
        let rec = run_experiment(&quick(Variant::XfreeQsort, 4, 1000)).unwrap();
        assert!(rec.passed());
        let line = rec.to_csv_line();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert!(line.starts_with("xfree-qsort,4,1000,perm,1,"));
        assert_eq!(rec.elem_exchange_units, 0);
        assert!(rec.elem_alltoallv_units <= 1000);
    }

    #[test]
    fn single_rank_self_comparison() {
        let rec = run_experiment(&quick(Variant::Qsort, 1, 20_000)).unwrap();
        assert!(rec.passed());
        assert!(rec.speedup > 0.0 && rec.speedup.is_finite());
        assert_eq!(rec.elem_exchange_units, 0);
        assert_eq!(rec.pivot_units, 0);
    }

    #[test]
    fn invalid_configs() {
        assert!(run_experiment(&quick(Variant::Qsort, 3, 10)).is_err());
        let mut c = quick(Variant::Qsort, 2, 10);
        c.repeats = 0;
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn non_timing_columns_are_deterministic() {
        let strip = |line: String| {
            let cols: Vec<String> = line.split(',').map(String::from).collect();
            [&cols[..5], &cols[9..]].concat()
        };
        let a = run_experiment(&quick(Variant::CombinedHyper, 8, 5000)).unwrap();
        let b = run_experiment(&quick(Variant::CombinedHyper, 8, 5000)).unwrap();
        assert_eq!(strip(a.to_csv_line()), strip(b.to_csv_line()));
    }

    #[test]
    fn sweep_expansion() {
        let base = quick(Variant::Qsort, 8, 1000);
        let strong = sweep_configs(
            SweepMode::Strong,
            &base,
            &[Variant::Qsort, Variant::XfreeQsort],
            &doubling(2, 64),
        );
        assert_eq!(strong.len(), 12);
        assert!(strong.iter().all(|c| c.n == 1000));
        let weak = sweep_configs(
            SweepMode::Weak,
            &base,
            &[Variant::Hyper],
            &doubling_from(10_000, 640_000),
        );
        assert_eq!(weak.len(), 7);
        assert_eq!(weak.last().unwrap().n, 640_000 * 8);
    }

    #[test]
    fn csv_file_gets_one_header() {
        let dir = std::env::temp_dir().join(format!("xsort-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("runs.csv");
        let _ = std::fs::remove_file(&path);
        let rec = run_experiment(&quick(Variant::Hyper, 2, 100)).unwrap();
        append_csv(&path, std::slice::from_ref(&rec)).unwrap();
        append_csv(&path, &[rec]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
