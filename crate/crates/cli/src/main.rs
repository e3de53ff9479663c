use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use xsort_core::harness::{
    append_csv, doubling, doubling_from, run_experiment, run_selftest, sweep_configs, InputKind, RunConfig, RunRecord,
    SweepMode, CSV_HEADER,
};
use xsort_core::pivots::{PivotKind, PivotStrategy};
use xsort_core::{CombinedPolicy, Error, EstimateMode, Variant};

#[derive(Parser)]
#[command(name = "xsort", version, about = "Exchange-free parallel Quicksort laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one variant on one configuration and verify the result.
    Run(RunArgs),
    /// Strong or weak scaling sweep over several variants.
    Sweep(SweepArgs),
    /// Run every variant with invariant checks over a small grid.
    VerifySelftest {
        /// Seeds per grid point.
        #[arg(long, default_value_t = 2)]
        seeds: u64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "perm")]
    input: InputKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 43)]
    repeats: usize,
    #[arg(long, default_value_t = 5)]
    warmups: usize,
    /// Pivot candidates sampled per segment on unsorted buffers.
    #[arg(long, default_value_t = 20)]
    sample_size: usize,
    /// Switch constant of the combined variants.
    #[arg(long, default_value_t = 1500.0)]
    c: f64,
    #[arg(long, default_value = "interp")]
    pivot: PivotKind,
    /// Estimate n' with an allreduce of the largest local count instead of ceil(n/p).
    #[arg(long)]
    allreduce_estimate: bool,
    /// Upper bound for uniform keys (defaults to n).
    #[arg(long)]
    key_range: Option<f64>,
    /// Runtime worker threads (defaults to available cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Append result rows to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    variant: Variant,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    common: Common,
    /// Write the per-rank communication trace as JSON.
    #[arg(long)]
    trace_json: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    mode: SweepMode,
    /// Comma-separated variant ids.
    #[arg(long, value_delimiter = ',', default_value = "qsort,xfree-qsort")]
    variants: Vec<Variant>,
    /// Total elements (strong mode).
    #[arg(long, default_value_t = 1 << 20)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    p_min: usize,
    #[arg(long, default_value_t = 64)]
    p_max: usize,
    /// Ranks (weak mode).
    #[arg(long, default_value_t = 16)]
    p: usize,
    #[arg(long, default_value_t = 10_000)]
    np_min: usize,
    #[arg(long, default_value_t = 640_000)]
    np_max: usize,
    #[command(flatten)]
    common: Common,
}

fn base_config(variant: Variant, p: usize, n: usize, common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::new(variant, p, n, common.input, common.seed);
    cfg.repeats = common.repeats;
    cfg.warmups = common.warmups;
    cfg.key_range = common.key_range;
    cfg.workers = common.workers;
    cfg.pivot = PivotStrategy::new(common.pivot, common.sample_size)?;
    let mode = if common.allreduce_estimate {
        EstimateMode::AllreduceMax
    } else {
        EstimateMode::StaticEstimate
    };
    cfg.combined = CombinedPolicy::new(common.c, mode)?;
    Ok(cfg)
}

fn print_row(record: &RunRecord) {
    println!("{}", record.to_csv_line());
    if !record.passed() {
        let c = &record.config;
        eprintln!(
            "FAIL {} p={} n={} seed={}: {:?}",
            c.variant, c.p, c.n, c.seed, record.verify
        );
    }
}

fn run(args: RunArgs) -> Result<bool, Error> {
    let cfg = base_config(args.variant, args.p, args.n, &args.common)?;
    let record = run_experiment(&cfg)?;
    println!("{CSV_HEADER}");
    print_row(&record);
    if let Some(path) = &args.common.csv {
        append_csv(path, std::slice::from_ref(&record))?;
    }
    if let Some(path) = &args.trace_json {
        std::fs::write(path, record.trace_document().to_json())?;
    }
    Ok(record.passed())
}

fn sweep(args: SweepArgs) -> Result<bool, Error> {
    let (base, points) = match args.mode {
        SweepMode::Strong => (
            base_config(args.variants[0], args.p_min, args.n, &args.common)?,
            doubling(args.p_min, args.p_max),
        ),
        SweepMode::Weak => (
            base_config(args.variants[0], args.p, args.np_min * args.p, &args.common)?,
            doubling_from(args.np_min, args.np_max),
        ),
    };
    if points.is_empty() {
        return Err(Error::Config("sweep range is empty".into()));
    }
    println!("{CSV_HEADER}");
    let mut all_ok = true;
    for cfg in sweep_configs(args.mode, &base, &args.variants, &points) {
        let record = run_experiment(&cfg)?;
        print_row(&record);
        all_ok &= record.passed();
        // append row by row so an interrupted sweep keeps its results
        if let Some(path) = &args.common.csv {
            append_csv(path, std::slice::from_ref(&record))?;
        }
    }
    Ok(all_ok)
}

fn selftest(seeds: u64) -> bool {
    let report = run_selftest(seeds);
    for failure in &report.failures {
        println!("FAIL {failure}");
    }
    println!("selftest: {} runs, {} failures", report.runs, report.failures.len());
    report.passed()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::VerifySelftest { seeds } => Ok(selftest(seeds)),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("xsort: {e}");
            ExitCode::from(2)
        }
    }
}
