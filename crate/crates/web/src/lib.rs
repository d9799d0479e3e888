//! WebAssembly bindings for the demo page. Every export takes a graph in
//! edge-list text and returns a JSON string; the `*_json` functions hold the
//! logic and run natively too.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use randmatch::analysis::{build_kernel, gibbs, tv_curve, Start, StateSpace, DEFAULT_EPS};
use randmatch::chain::{claimed_bounds, trace_sizes, ChainParams};
use randmatch::enumerate::size_counts;
use randmatch::{exact_max_matching, generate, read_graph, write_graph, Error, Family, Graph, Result};

/// Largest state space the page enumerates; every row of `P^t` is held.
pub const PAGE_STATE_CAP: usize = 2048;
pub const MAX_HORIZON: usize = 20_000;
pub const MAX_TRACE_STEPS: u64 = 5_000_000;
/// Trace length cap, in points.
pub const MAX_TRACE_POINTS: u64 = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsProfile {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub size_counts: Vec<u64>,
    pub log2_lambdas: Vec<f64>,
    /// `mass_by_size[i][j]`: Gibbs mass of the size-`j` matchings at
    /// `log2_lambdas[i]`.
    pub mass_by_size: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingCurve {
    pub states: usize,
    pub log2_lambda: f64,
    pub eps: f64,
    /// Worst-case distance for `t = 0..=horizon`.
    pub curve: Vec<f64>,
    /// First `t` with distance at most `eps`, if within the horizon.
    pub t_mix: Option<usize>,
    pub claimed_upper: f64,
    pub claimed_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainTrace {
    pub log2_lambda: f64,
    pub steps: u64,
    pub stride: u64,
    pub seed: u64,
    pub k: usize,
    pub sizes: Vec<usize>,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("demo types serialize to JSON")
}

fn nonempty(text: &str) -> Result<Graph> {
    let g = read_graph(text)?;
    if g.m() == 0 {
        return Err(Error::Param("the graph needs at least one edge".into()));
    }
    Ok(g)
}

pub fn generate_graph_text(family: &str, n: usize, p: f64, d: usize, seed: u64) -> Result<String> {
    let family = match family {
        "path" => Family::Path,
        "cycle" => Family::Cycle,
        "star" => Family::Star,
        "complete" => Family::Complete,
        "gnp" => Family::Gnp { p },
        "bipartite_regular" => Family::BipartiteRegular { d },
        other => return Err(Error::Param(format!("unknown family {other:?}"))),
    };
    Ok(write_graph(&generate(family, n, seed)?))
}

/// Mass of each matching size, from the size counts alone:
/// `S_j 2^{j x} / Σ_i S_i 2^{i x}`, summed in the log domain.
fn mass_by_size(counts: &[u64], x: f64) -> Vec<f64> {
    let logs: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(j, &c)| if c == 0 { f64::NEG_INFINITY } else { (c as f64).log2() + j as f64 * x })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp2()).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

pub fn gibbs_profile_json(text: &str, x_min: f64, x_max: f64, points: usize) -> Result<String> {
    if !(x_min.is_finite() && x_max.is_finite() && x_min <= x_max) || !(2..=1000).contains(&points) {
        return Err(Error::Param("need finite x_min <= x_max and 2..=1000 points".into()));
    }
    let g = nonempty(text)?;
    let sc = size_counts(&g, randmatch::enumerate::DEFAULT_STATE_CAP)?;
    let log2_lambdas: Vec<f64> =
        (0..points).map(|i| x_min + (x_max - x_min) * i as f64 / (points - 1) as f64).collect();
    let mass_by_size = log2_lambdas.iter().map(|&x| mass_by_size(&sc.counts, x)).collect();
    Ok(json(&GibbsProfile { n: g.n(), m: g.m(), k: sc.k, size_counts: sc.counts, log2_lambdas, mass_by_size }))
}

pub fn mixing_curve_json(text: &str, log2_lambda: f64, horizon: usize) -> Result<String> {
    if horizon > MAX_HORIZON {
        return Err(Error::Param(format!("horizon is limited to {MAX_HORIZON} steps")));
    }
    let g = nonempty(text)?;
    let space = StateSpace::build(&g, PAGE_STATE_CAP)?;
    let kernel = build_kernel(&space, log2_lambda)?;
    let pi = gibbs(&space, log2_lambda);
    let curve = tv_curve(&kernel, &pi, Start::Worst, horizon, PAGE_STATE_CAP)?;
    let t_mix = curve.iter().position(|&d| d <= DEFAULT_EPS);
    let bounds = claimed_bounds(g.n(), g.m(), space.size_counts().k)?;
    Ok(json(&MixingCurve {
        states: space.len(),
        log2_lambda,
        eps: DEFAULT_EPS,
        curve,
        t_mix,
        claimed_upper: bounds.t_mix_upper,
        claimed_lower: bounds.t_mix_lower,
    }))
}

/// `steps = 0` selects the default budget `ceil(10 m ln n)`.
pub fn chain_trace_json(text: &str, log2_lambda: f64, steps: u64, seed: u64) -> Result<String> {
    let g = nonempty(text)?;
    let defaults = ChainParams::paper_default(&g, seed);
    let steps = if steps == 0 { defaults.steps } else { steps };
    if steps > MAX_TRACE_STEPS {
        return Err(Error::Param(format!("trace is limited to {MAX_TRACE_STEPS} steps")));
    }
    let params = ChainParams { log2_lambda, steps, ..defaults };
    let stride = steps.div_ceil(MAX_TRACE_POINTS).max(1);
    let sizes = trace_sizes(&g, &params, stride)?;
    let (k, _) = exact_max_matching(&g);
    Ok(json(&ChainTrace { log2_lambda, steps, stride, seed, k, sizes }))
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn generate_graph(family: &str, n: usize, p: f64, d: usize, seed: u64) -> std::result::Result<String, JsError> {
    js(generate_graph_text(family, n, p, d, seed))
}

#[wasm_bindgen]
pub fn gibbs_profile(graph: &str, x_min: f64, x_max: f64, points: usize) -> std::result::Result<String, JsError> {
    js(gibbs_profile_json(graph, x_min, x_max, points))
}

#[wasm_bindgen]
pub fn mixing_curve(graph: &str, log2_lambda: f64, horizon: usize) -> std::result::Result<String, JsError> {
    js(mixing_curve_json(graph, log2_lambda, horizon))
}

#[wasm_bindgen]
pub fn chain_trace(graph: &str, log2_lambda: f64, steps: u64, seed: u64) -> std::result::Result<String, JsError> {
    js(chain_trace_json(graph, log2_lambda, steps, seed))
}
