use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use randmatch::analysis::{
    analyze, build_kernel, conductance_exact, exact_mixing_time, gibbs, max_matching_cut, AnalysisOptions,
    MixingOptions, StateSpace, DEFAULT_EPS,
};
use randmatch::bench::{bench, spread, step_cost_scaling};
use randmatch::chain::{amplified_solve, claimed_bounds, rand_matching, ChainParams};
use randmatch::coupling::coupling_report;
use randmatch::{exact_max_matching, generate, read_graph, write_graph, Family, Graph, Matching};

use crate::args::{BenchArgs, ChainArgs, Cli, Command, CouplingArgs, ExactArgs, FamilyName, GraphSource};
use crate::record::{to_csv, ExperimentRecord, GraphFingerprint};
use crate::CliError;

const SCALING_SIZES: [usize; 3] = [1_000, 10_000, 100_000];
const SCALING_STEPS: u64 = 10_000_000;

struct Outcome {
    graph: Option<Graph>,
    params: Value,
    result: Value,
    /// CSV rows; the result object itself when `None`.
    rows: Option<Vec<Value>>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn write_path(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_graph(src: &GraphSource) -> Result<Graph, CliError> {
    if let Some(path) = &src.graph {
        let text =
            fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        return Ok(read_graph(&text)?);
    }
    let Some(name) = src.family else {
        return Err(usage("one of --graph or --family is required"));
    };
    let n = src.n.ok_or_else(|| usage("--family needs --n"))?;
    let family = match name {
        FamilyName::Path => Family::Path,
        FamilyName::Cycle => Family::Cycle,
        FamilyName::Star => Family::Star,
        FamilyName::Complete => Family::Complete,
        FamilyName::Gnp => Family::Gnp { p: src.p.ok_or_else(|| usage("gnp needs --p"))? },
        FamilyName::BipartiteRegular => {
            Family::BipartiteRegular { d: src.d.ok_or_else(|| usage("bipartite-regular needs --d"))? }
        }
    };
    let seed = match family {
        Family::Gnp { .. } | Family::BipartiteRegular { .. } => require_seed(src)?,
        _ => 0,
    };
    Ok(generate(family, n, seed)?)
}

fn require_seed(src: &GraphSource) -> Result<u64, CliError> {
    src.seed.ok_or_else(|| usage("--seed is required for randomized commands and families"))
}

fn check_eps(eps: Option<f64>) -> Result<f64, CliError> {
    match eps {
        None => Ok(DEFAULT_EPS),
        Some(e) if e > 0.0 && e < 1.0 => Ok(e),
        Some(e) => Err(usage(format!("--eps must lie in (0, 1), got {e}"))),
    }
}

fn chain_params(args: &ChainArgs, g: &Graph, seed: u64) -> ChainParams {
    let d = ChainParams::paper_default(g, seed);
    ChainParams {
        log2_lambda: args.log2_lambda.unwrap_or(d.log2_lambda),
        steps: args.steps.unwrap_or(d.steps),
        restarts: args.restarts.unwrap_or(d.restarts),
        seed,
    }
}

fn edges_of(m: &Matching) -> Vec<usize> {
    m.edges().collect()
}

fn solve(src: &GraphSource) -> Result<Outcome, CliError> {
    let g = load_graph(src)?;
    let (k, m) = exact_max_matching(&g);
    m.validate(&g)?;
    let method = if g.bipartition().is_some() { "augmenting_paths" } else { "branch_and_bound" };
    let result = json!({ "k": k, "matching": m.to_json(), "method": method });
    Ok(Outcome { graph: Some(g), params: json!({}), result, rows: None })
}

fn sample(args: &ChainArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let p = chain_params(args, &g, require_seed(&args.source)?);
    let r = rand_matching(&g, &p)?;
    r.final_state.validate(&g)?;
    let params = json!({ "log2_lambda": p.log2_lambda, "steps": p.steps, "seed": p.seed });
    Ok(Outcome { graph: Some(g), params, result: to_value(&r.to_json()), rows: None })
}

fn randmatching(args: &ChainArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let p = chain_params(args, &g, require_seed(&args.source)?);
    let a = amplified_solve(&g, &p, p.seed)?;
    a.best.validate(&g)?;
    let restarts: Vec<Value> = a.reports.iter().map(|r| to_value(&r.to_json())).collect();
    let rows = restarts
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r["restart"] = json!(i);
            r
        })
        .collect();
    let params = json!({
        "log2_lambda": p.log2_lambda, "steps": p.steps, "restarts": p.restarts, "master_seed": p.seed,
    });
    let result = json!({
        "found_size": a.best.size(),
        "best_index": a.best_index,
        "best": a.best.to_json(),
        "restarts": restarts,
    });
    Ok(Outcome { graph: Some(g), params, result, rows: Some(rows) })
}

fn exact_params(args: &ExactArgs, x: f64, eps: f64) -> Value {
    json!({
        "log2_lambda": x, "eps": eps, "state_cap": args.state_cap, "cut_cap": args.cut_cap, "t_max": args.t_max,
    })
}

fn analyze_cmd(args: &ExactArgs) -> Result<Outcome, CliError> {
    let eps = check_eps(args.eps)?;
    let g = load_graph(&args.source)?;
    let x = args.log2_lambda.unwrap_or(g.m() as f64);
    let opts = AnalysisOptions {
        state_cap: args.state_cap,
        cut_cap: args.cut_cap,
        mixing: MixingOptions { eps, t_max: args.t_max, ..Default::default() },
    };
    let report = analyze(&g, x, &opts)?;
    Ok(Outcome { params: exact_params(args, x, eps), graph: Some(g), result: to_value(&report), rows: None })
}

fn mix(args: &ExactArgs) -> Result<Outcome, CliError> {
    let eps = check_eps(args.eps)?;
    let g = load_graph(&args.source)?;
    let x = args.log2_lambda.unwrap_or(g.m() as f64);
    let space = StateSpace::build(&g, args.state_cap)?;
    let kernel = build_kernel(&space, x)?;
    let pi = gibbs(&space, x);
    let opts = MixingOptions { eps, t_max: args.t_max, ..Default::default() };
    let mut report = exact_mixing_time(&kernel, &pi, &opts)?;
    if space.len() >= 2 && space.len() <= args.cut_cap {
        report = report.with_conductance(conductance_exact(&kernel, &pi, args.cut_cap)?.phi);
    }
    let bounds = claimed_bounds(g.n(), g.m(), space.size_counts().k)?;
    let rows = report.tv_curve.iter().enumerate().map(|(t, tv)| json!({ "t": t, "tv": tv })).collect();
    let result = json!({
        "states": space.len(),
        "t_mix": report.t_mix,
        "eps": report.eps,
        "worst_start": report.worst_start,
        "worst_start_matching": edges_of(space.state(report.worst_start)),
        "tv_curve": report.tv_curve,
        "conductance": report.conductance,
        "t_relax": report.t_relax,
        "claimed_upper": bounds.t_mix_upper,
        "claimed_lower": bounds.t_mix_lower,
    });
    Ok(Outcome { params: exact_params(args, x, eps), graph: Some(g), result, rows: Some(rows) })
}

fn conductance(args: &ExactArgs) -> Result<Outcome, CliError> {
    let eps = check_eps(args.eps)?;
    let g = load_graph(&args.source)?;
    let x = args.log2_lambda.unwrap_or(g.m() as f64);
    let space = StateSpace::build(&g, args.state_cap)?;
    let kernel = build_kernel(&space, x)?;
    let pi = gibbs(&space, x);
    let c = conductance_exact(&kernel, &pi, args.cut_cap)?;
    let cut = max_matching_cut(&space, &kernel, &pi, x)?;
    let result = json!({
        "states": space.len(),
        "phi_min": c.phi,
        "t_relax": 1.0 / c.phi,
        "argmin_cut": c.argmin_cut,
        "argmin_cut_matchings": c.argmin_cut.iter().map(|&i| edges_of(space.state(i))).collect::<Vec<_>>(),
        "max_matching_state": cut.state,
        "phi_cut": cut.phi_direct,
        "phi_cut_closed_form": cut.phi_closed_form,
    });
    Ok(Outcome { params: exact_params(args, x, eps), graph: Some(g), result, rows: None })
}

fn coupling(args: &CouplingArgs) -> Result<Outcome, CliError> {
    let g = load_graph(&args.source)?;
    let x = args.log2_lambda.unwrap_or(g.m() as f64);
    let space = StateSpace::build(&g, args.state_cap)?;
    let kernel = build_kernel(&space, x)?;
    let report = coupling_report(&space, &kernel, args.variant, x, args.pair_cap)?;
    let mut result = to_value(&report);
    let (i, j, _) = report.witness;
    result["witness_matchings"] = json!([edges_of(space.state(i)), edges_of(space.state(j))]);
    let params = json!({
        "log2_lambda": x, "variant": args.variant, "state_cap": args.state_cap, "pair_cap": args.pair_cap,
    });
    Ok(Outcome { graph: Some(g), params, result, rows: None })
}

fn bench_cmd(args: &BenchArgs) -> Result<Outcome, CliError> {
    let chain = &args.chain;
    if args.scaling {
        let seed = require_seed(&chain.source)?;
        let steps = chain.steps.unwrap_or(SCALING_STEPS);
        let points = step_cost_scaling(&SCALING_SIZES, args.degree, steps, args.reps, seed)?;
        let s = spread(&points);
        let params =
            json!({ "sizes": SCALING_SIZES, "degree": args.degree, "steps": steps, "reps": args.reps, "seed": seed });
        let result = json!({ "points": points, "spread": s, "within_3x": s <= 3.0 });
        let rows = points.iter().map(to_value).collect();
        return Ok(Outcome { graph: None, params, result, rows: Some(rows) });
    }
    let g = load_graph(&chain.source)?;
    let p = chain_params(chain, &g, require_seed(&chain.source)?);
    let rec = bench(&g, &p, args.reps)?;
    let rows = rec.rows.iter().map(to_value).collect();
    let params = json!({ "log2_lambda": p.log2_lambda, "steps": p.steps, "seed": p.seed, "reps": args.reps });
    Ok(Outcome { graph: Some(g), params, result: to_value(&rec), rows: Some(rows) })
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Solve(_) => "solve",
        Command::Sample(_) => "sample",
        Command::Randmatching(_) => "randmatching",
        Command::Analyze(_) => "analyze",
        Command::Mix(_) => "mix",
        Command::Coupling(_) => "coupling",
        Command::Conductance(_) => "conductance",
        Command::Bench(_) => "bench",
    }
}

pub(crate) fn execute(cli: &Cli, echo: Vec<String>, out: &mut dyn Write) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Gen(src) => {
            let g = load_graph(src)?;
            let Some(path) = &cli.output else {
                // without -o the edge list itself is the output
                return out
                    .write_all(write_graph(&g).as_bytes())
                    .map_err(|source| CliError::Io { path: "stdout".into(), source });
            };
            write_path(path, &write_graph(&g))?;
            let result = json!({ "written": path.display().to_string() });
            Outcome { graph: Some(g), params: json!({}), result, rows: None }
        }
        cmd => pool.install(|| match cmd {
            Command::Solve(src) => solve(src),
            Command::Sample(a) => sample(a),
            Command::Randmatching(a) => randmatching(a),
            Command::Analyze(a) => analyze_cmd(a),
            Command::Mix(a) => mix(a),
            Command::Coupling(a) => coupling(a),
            Command::Conductance(a) => conductance(a),
            Command::Bench(a) => bench_cmd(a),
            Command::Gen(_) => unreachable!("handled above"),
        })?,
    };
    let wall_nanos = start.elapsed().as_nanos().min(u64::MAX as u128) as u64;

    let record = ExperimentRecord {
        subcommand: subcommand_name(&cli.command).into(),
        command: echo,
        version: env!("CARGO_PKG_VERSION").into(),
        graph: outcome.graph.as_ref().map(GraphFingerprint::of),
        params: outcome.params,
        result: outcome.result,
        wall_nanos,
    };
    let text = if cli.csv {
        let rows = outcome.rows.unwrap_or_else(|| vec![record.result.clone()]);
        to_csv(&record, &rows)?
    } else {
        serde_json::to_string_pretty(&record).expect("record serializes") + "\n"
    };
    match (&cli.output, &cli.command) {
        (Some(path), cmd) if !matches!(cmd, Command::Gen(_)) => write_path(path, &text),
        _ => out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "stdout".into(), source }),
    }
}
