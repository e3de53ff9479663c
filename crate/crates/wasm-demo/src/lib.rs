//! Browser demo: runs the sorting variants on the single-threaded runtime and
//! hands JSON to the page, which draws it on a canvas.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use xsort_core::harness::{gen_input, verify, InputKind, Inputs, VerifyReport};
use xsort_core::vcomm::TraceDocument;
use xsort_core::{run_variant, SortConfig, SortKey, Variant, VariantRun};

// the browser has one thread, so keep the demo sizes modest
const MAX_P: usize = 256;
const MAX_N: usize = 2_000_000;

fn config(seed: u64) -> SortConfig {
    SortConfig {
        seed,
        debug_asserts: true,
        workers: Some(1),
        ..SortConfig::default()
    }
}

fn check_size(p: usize, n: usize) -> Result<(), String> {
    if !p.is_power_of_two() || p > MAX_P {
        return Err(format!("p must be a power of two up to {MAX_P}"));
    }
    if n > MAX_N {
        return Err(format!("n is limited to {MAX_N} in the browser"));
    }
    Ok(())
}

fn parse<T: std::str::FromStr<Err = xsort_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: xsort_core::Error| e.to_string())
}

fn run_generated(variant: Variant, kind: InputKind, p: usize, n: usize, seed: u64) -> Result<Generated, String> {
    check_size(p, n)?;
    let cfg = config(seed);
    let inputs = gen_input(kind, n, p, None, seed).map_err(|e| e.to_string())?;
    Ok(match inputs {
        Inputs::Int(b) => Generated::from_run(&b, run_variant(variant, b.clone(), &cfg).map_err(|e| e.to_string())?),
        Inputs::Double(b) => Generated::from_run(&b, run_variant(variant, b.clone(), &cfg).map_err(|e| e.to_string())?),
    })
}

/// The key-type independent part of a run.
struct Generated {
    loads: Vec<usize>,
    history: Vec<Vec<Vec<usize>>>,
    switched_at: Option<usize>,
    report: VerifyReport,
    traces: Vec<xsort_core::TraceStats>,
    bounds: Vec<Option<(f64, f64)>>,
}

impl Generated {
    fn from_run<K: SortKey>(inputs: &[Vec<K>], run: VariantRun<K>) -> Self {
        let report = verify(inputs, &run.outputs());
        Generated {
            loads: run.outcomes.iter().map(|o| o.output.len()).collect(),
            history: run.outcomes.iter().map(|o| o.segment_history.clone()).collect(),
            switched_at: run.outcomes.iter().filter_map(|o| o.switched_at).max(),
            bounds: run
                .outcomes
                .iter()
                .map(|o| Some((o.output.first()?.to_f64(), o.output.last()?.to_f64())))
                .collect(),
            report,
            traces: run.traces,
        }
    }
}

#[derive(Serialize)]
struct SegmentView {
    variant: String,
    p: usize,
    n: usize,
    /// iterations[i][r] = segment lengths on rank r after iteration i
    iterations: Vec<Vec<Vec<usize>>>,
    final_loads: Vec<usize>,
    ok: bool,
}

/// Segment lengths on every rank after every exchange-free iteration.
pub fn segment_view(variant: &str, p: usize, n: usize, input: &str, seed: u64) -> Result<String, String> {
    let variant: Variant = parse(variant)?;
    if !variant.is_exchange_free() {
        return Err("segment view needs xfree-qsort or xfree-hyper".into());
    }
    let g = run_generated(variant, parse(input)?, p, n, seed)?;
    let steps = g.history.first().map_or(0, Vec::len);
    let iterations = (0..steps)
        .map(|i| g.history.iter().map(|h| h[i].clone()).collect())
        .collect();
    let view = SegmentView {
        variant: variant.id().into(),
        p,
        n,
        iterations,
        final_loads: g.loads,
        ok: g.report.all_ok(),
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[derive(Serialize)]
struct VolumePoint {
    p: usize,
    /// (n/2) log2 p, the expected exchange volume of the standard scheme
    reference: f64,
    qsort_exchange: u64,
    hyper_exchange: u64,
    xfree_alltoallv: u64,
    xfree_pivots: u64,
    qsort_pivots: u64,
}

/// Element and pivot volume of the standard and exchange-free schemes for
/// `p = 2, 4, ..., p_max` at fixed `n`.
pub fn volume_sweep(n: usize, p_max: usize, input: &str, seed: u64) -> Result<String, String> {
    let kind: InputKind = parse(input)?;
    let mut points = Vec::new();
    let mut p = 2;
    while p <= p_max {
        let units = |v: Variant| run_generated(v, kind, p, n, seed).map(|g| xsort_core::TraceStats::total(&g.traces));
        let q = units(Variant::Qsort)?;
        let h = units(Variant::Hyper)?;
        let x = units(Variant::XfreeQsort)?;
        points.push(VolumePoint {
            p,
            reference: n as f64 / 2.0 * (p as f64).log2(),
            qsort_exchange: q.element_units_sent,
            hyper_exchange: h.element_units_sent,
            xfree_alltoallv: x.element_units_alltoallv,
            xfree_pivots: x.pivot_units,
            qsort_pivots: q.pivot_units,
        });
        p *= 2;
    }
    Ok(serde_json::to_string(&points).expect("points serialize"))
}

#[derive(Serialize)]
struct RankLoads {
    loads: Vec<usize>,
    /// smallest and largest key per rank, absent for empty ranks
    bounds: Vec<Option<(f64, f64)>>,
    imbalance: f64,
    verify: VerifyReport,
    switch_group_size: Option<usize>,
    trace: TraceDocument,
}

/// Final per-rank loads, verification and communication trace of one run.
pub fn rank_loads(variant: &str, p: usize, n: usize, input: &str, seed: u64) -> Result<String, String> {
    let variant: Variant = parse(variant)?;
    let g = run_generated(variant, parse(input)?, p, n, seed)?;
    let out = RankLoads {
        imbalance: g.report.imbalance,
        trace: TraceDocument::new(variant.id(), n, &g.traces),
        loads: g.loads,
        bounds: g.bounds,
        verify: g.report,
        switch_group_size: g.switched_at,
    };
    Ok(serde_json::to_string(&out).expect("loads serialize"))
}

// seeds are u32 on the JS side so plain Numbers work (u64 would need BigInt)

#[wasm_bindgen(js_name = segmentView)]
pub fn segment_view_js(variant: &str, p: usize, n: usize, input: &str, seed: u32) -> Result<String, JsError> {
    segment_view(variant, p, n, input, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = volumeSweep)]
pub fn volume_sweep_js(n: usize, p_max: usize, input: &str, seed: u32) -> Result<String, JsError> {
    volume_sweep(n, p_max, input, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = rankLoads)]
pub fn rank_loads_js(variant: &str, p: usize, n: usize, input: &str, seed: u32) -> Result<String, JsError> {
    rank_loads(variant, p, n, input, seed.into()).map_err(|e| JsError::new(&e))
}
