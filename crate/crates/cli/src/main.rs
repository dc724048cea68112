//! `shotgun`: seeded experiment driver over the shotgun-core pipelines.
//!
//! Every subcommand writes one report whose header records the command,
//! seed, worker count and full configuration. Same inputs, same bytes.

mod output;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use output::{emit, write_atomic, Format, Report, Table};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use shotgun::admissibility::{check_admissibility, check_strong_admissibility, xi_frequency};
use shotgun::blocking::{find_blocking, verify_certificate};
use shotgun::estimators::{
    alpha, decay_diagnostics, extinction_q, gamma_mc, gamma_series, threshold_r, McConfig,
};
use shotgun::graph::{generate_er, Graph};
use shotgun::reconstruct::{build_profile, encode_profile, good_depth, reconstruct, verify_reconstruction};
use shotgun::rooted::{canon_rooted_graph_with, CanonConfig};
use shotgun::{io, rng};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "shotgun", version, about = "Shotgun assembly experiments on sparse random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extinction probability, gamma, alpha, threshold depth and decay table.
    Estimate(EstimateArgs),
    /// Sample a graph, reconstruct it from its neighborhood profile, verify.
    Reconstruct(ReconstructArgs),
    /// Search for a blocking configuration and check its certificate.
    Blocking(BlockingArgs),
    /// Run both admissibility checkers with Xi diagnostics.
    Admissibility(AdmissibilityArgs),
    /// Success and admissibility rates over a range of depths.
    Sweep(SweepArgs),
    /// Sample G(n, lambda/n) and write it out.
    Gen(GenArgs),
    /// Dump the depth-r neighborhood profile of a graph file.
    Profile(ProfileArgs),
}

#[derive(Args, Serialize)]
struct Common {
    /// Base seed for every random stream.
    #[arg(long, env = "SHOTGUN_SEED", default_value_t = 0)]
    #[serde(skip)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file, replaced atomically. Defaults to stdout.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GraphArgs {
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Read the graph from an edge-list or JSON file instead of sampling.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CanonArgs {
    /// Largest cyclomatic number the canonizer accepts.
    #[arg(long, default_value_t = CanonConfig::default().max_complexity)]
    max_complexity: usize,
    #[arg(long, default_value_t = CanonConfig::default().node_budget)]
    node_budget: usize,
}

impl CanonArgs {
    fn config(&self) -> CanonConfig {
        CanonConfig { max_complexity: self.max_complexity, node_budget: self.node_budget }
    }
}

#[derive(Args, Serialize)]
struct EstimateArgs {
    #[arg(long)]
    lambda: f64,
    /// Graph size used for the threshold depth.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Monte-Carlo samples; accepts forms like 1e6.
    #[arg(long, default_value = "100000", value_parser = parse_count)]
    samples: u64,
    /// Largest tree size in the gamma series.
    #[arg(long, default_value_t = 12)]
    series_size: usize,
    #[arg(long, default_value_t = 8)]
    r_max: usize,
    /// Also write the decay table as CSV here.
    #[arg(long)]
    #[serde(skip)]
    table: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct ReconstructArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 8)]
    r: usize,
    #[arg(long, default_value_t = 0.6)]
    rho: f64,
    #[command(flatten)]
    canon: CanonArgs,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct BlockingArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 4)]
    r: usize,
    #[arg(short = 'L', long = "line", default_value_t = 3)]
    #[serde(rename = "L")]
    l: usize,
    /// Slack in the theoretical depth `(1 - eps0) log n / log(1/alpha)`.
    #[arg(long, default_value_t = 0.1)]
    eps0: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct AdmissibilityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 8)]
    r: usize,
    #[arg(long, default_value_t = 0.6)]
    rho: f64,
    #[arg(short = 'L', long = "line", default_value_t = 3)]
    #[serde(rename = "L")]
    l: usize,
    /// Cap on vertex pairs examined for the Xi histogram.
    #[arg(long, default_value_t = 2000)]
    max_pairs: usize,
    #[command(flatten)]
    canon: CanonArgs,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 0.8)]
    lambda: f64,
    #[arg(long, default_value_t = 2)]
    r_min: usize,
    #[arg(long, default_value_t = 12)]
    r_max: usize,
    #[arg(long, default_value_t = 50)]
    trials: u64,
    #[arg(long, default_value_t = 0.6)]
    rho: f64,
    #[command(flatten)]
    canon: CanonArgs,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Args, Serialize)]
struct ProfileArgs {
    /// Graph file (edge list, JSON graph, or a `gen` report).
    input: PathBuf,
    #[arg(long, default_value_t = 8)]
    r: usize,
    #[arg(long, default_value_t = 0.6)]
    rho: f64,
    /// Also write the binary profile container here.
    #[arg(long)]
    #[serde(skip)]
    binary: Option<PathBuf>,
    #[command(flatten)]
    canon: CanonArgs,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("expected a non-negative integer, got {s}"))
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Blocking(a) => cmd_blocking(a),
        Command::Admissibility(a) => cmd_admissibility(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Profile(a) => cmd_profile(a),
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        bail!("--workers must be at least 1");
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

fn finish(report: Report, common: &Common) -> Result<()> {
    emit(common.out.as_deref(), &report.render(common.format))
}

fn check_rho(r: usize, rho: f64) -> Result<usize> {
    good_depth(r, rho).context("reconstruction needs 1 <= ceil(rho * r) <= r - 2; pick a larger --r or a smaller --rho")
}

/// Reads a graph in any supported form, including the JSON report written by `gen`.
fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let g = v.get("result").and_then(|r| r.get("graph")).unwrap_or(&v);
        return serde_json::from_value(g.clone()).with_context(|| format!("parsing graph in {}", path.display()));
    }
    Ok(io::parse_edge_list(&text)?)
}

fn load_graph(a: &GraphArgs, seed: u64) -> Result<Graph> {
    match &a.input {
        Some(p) => read_graph(p),
        None => Ok(generate_er(a.n, a.lambda, seed)?.graph),
    }
}

/// `r_* = log n / log(1/alpha)` with gamma from the size-12 series, when alpha < 1.
fn r_star(n: usize, lambda: f64) -> Option<f64> {
    let gamma = gamma_series(lambda, 12).ok()?.partial_sum;
    threshold_r(n, lambda, gamma).ok()
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let c = &a.common;
    let pool = pool(c.workers)?;
    let mc = McConfig::new(a.samples, c.seed).with_workers(c.workers);
    let q = extinction_q(a.lambda)?;
    let series = gamma_series(a.lambda, a.series_size)?;
    let (gm, decay) = pool.install(|| -> Result<_> {
        Ok((gamma_mc(a.lambda, &mc)?, decay_diagnostics(a.lambda, a.r_max, &mc)?))
    })?;
    let alpha_v = alpha(a.lambda, series.partial_sum).ok();
    let r_star = alpha_v.and_then(|_| threshold_r(a.n, a.lambda, series.partial_sum).ok());
    let result = json!({
        "lambda": a.lambda,
        "q": q,
        "q_bound": if a.lambda > 1.0 { Some(a.lambda.powi(-2)) } else { None },
        "gamma_series": {
            "value": series.partial_sum,
            "max_size": series.max_size,
            "tail_allowance": series.tail_allowance(),
            "terms_by_size": series.terms_by_size,
        },
        "gamma_mc": gm,
        "alpha": alpha_v,
        "threshold_r": r_star,
        "decay": decay,
        "monotonicity_violations": decay.monotonicity_violations(),
    });
    let report = Report::new("estimate", c.seed, c.workers, &a, result).with_table(Table::from_csv(&decay.to_csv()));
    if let Some(p) = &a.table {
        write_atomic(p, (report.header_lines() + &decay.to_csv()).as_bytes())?;
    }
    finish(report, c)
}

fn cmd_reconstruct(a: ReconstructArgs) -> Result<()> {
    let c = &a.common;
    let s = check_rho(a.r, a.rho)?;
    let cfg = a.canon.config();
    let g = load_graph(&a.graph, c.seed)?;
    let profile = build_profile(&g, a.r, a.rho)?;
    let mut res = reconstruct(&profile, &cfg)?;
    res.success = Some(verify_reconstruction(&g, &res, &cfg)?);
    let result = json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "r": a.r,
        "s": s,
        "success": res.success,
        "stats": res.stats,
        "graph_prime": res.graph_prime,
        "degenerate_components": res.degenerate_components.len(),
    });
    finish(Report::new("reconstruct", c.seed, c.workers, &a, result), c)
}

fn cmd_blocking(a: BlockingArgs) -> Result<()> {
    let c = &a.common;
    let g = load_graph(&a.graph, c.seed)?;
    let theoretical = r_star(g.n(), a.graph.lambda).map(|r| (1.0 - a.eps0) * r);
    let cert = find_blocking(&g, a.r, a.l)?;
    let verification = match &cert {
        Some(cert) => Some(verify_certificate(&g, cert, a.r, a.l)?),
        None => {
            eprintln!("none found");
            None
        }
    };
    let result = json!({
        "n": g.n(),
        "r": a.r,
        "L": a.l,
        "theoretical_r": theoretical,
        "found": cert.is_some(),
        "certificate": cert,
        "verification": verification,
    });
    finish(Report::new("blocking", c.seed, c.workers, &a, result), c)
}

fn cmd_admissibility(a: AdmissibilityArgs) -> Result<()> {
    let c = &a.common;
    check_rho(a.r, a.rho)?;
    let cfg = a.canon.config();
    let g = load_graph(&a.graph, c.seed)?;
    let adm = check_admissibility(&g, a.r, a.rho, &cfg)?;
    let strong = check_strong_admissibility(&g, a.r, a.rho, a.l, &cfg)?;
    let xi = xi_frequency(&g, a.r, &cfg, a.max_pairs)?;
    let result = json!({
        "n": g.n(),
        "r": a.r,
        "admissible": adm.admissible,
        "good": adm.good,
        "bad": adm.bad,
        "differences": adm.differences,
        "strong": strong,
        "xi": {
            "pairs": xi.pairs,
            "histogram": xi.histogram,
            "lambda_zero": xi.lambda_zero,
            "fraction_above_two": xi.fraction_above_two(),
        },
    });
    finish(Report::new("admissibility", c.seed, c.workers, &a, result), c)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    success: u64,
    admissible: u64,
    errors: u64,
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let c = &a.common;
    if a.r_min > a.r_max {
        bail!("--r-min must not exceed --r-max");
    }
    let cfg = a.canon.config();
    let depths: Vec<(usize, Option<usize>)> = (a.r_min..=a.r_max).map(|r| (r, good_depth(r, a.rho).ok())).collect();
    if depths.iter().all(|d| d.1.is_none()) {
        check_rho(a.r_max, a.rho)?;
    }
    // Trial t uses the same graph at every depth.
    let per_trial: Vec<Vec<Tally>> = pool(c.workers)?.install(|| {
        (0..a.trials)
            .into_par_iter()
            .map(|t| {
                let seed = rng::stream(c.seed, t).random::<u64>();
                let g = generate_er(a.n, a.lambda, seed).map(|s| s.graph);
                depths
                    .iter()
                    .map(|&(r, s)| match (&g, s) {
                        (Ok(g), Some(_)) => trial(g, r, a.rho, &cfg),
                        _ => Tally::default(),
                    })
                    .collect()
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for (i, &(r, s)) in depths.iter().enumerate() {
        let mut sum = Tally::default();
        for t in &per_trial {
            sum.success += t[i].success;
            sum.admissible += t[i].admissible;
            sum.errors += t[i].errors;
        }
        let k = a.trials.max(1) as f64;
        match s {
            Some(s) => {
                let (sr, ar) = (sum.success as f64 / k, sum.admissible as f64 / k);
                rows.push(format!("{r},{s},true,{},{sr},{ar},{}", a.trials, sum.errors));
                json_rows.push(json!({"r": r, "s": s, "valid": true, "trials": a.trials,
                    "success_rate": sr, "admissibility_rate": ar, "errors": sum.errors}));
            }
            None => {
                rows.push(format!("{r},,false,0,,,0"));
                json_rows.push(json!({"r": r, "valid": false}));
            }
        }
    }
    let result = json!({ "threshold_r": r_star(a.n, a.lambda), "rows": json_rows });
    let table = Table { header: "r,s,valid,trials,success_rate,admissibility_rate,errors".into(), rows };
    finish(Report::new("sweep", c.seed, c.workers, &a, result).with_table(table), c)
}

fn trial(g: &Graph, r: usize, rho: f64, cfg: &CanonConfig) -> Tally {
    let run = || -> shotgun::Result<(bool, bool)> {
        let profile = build_profile(g, r, rho)?;
        let res = reconstruct(&profile, cfg)?;
        let ok = verify_reconstruction(g, &res, cfg)?;
        Ok((ok, check_admissibility(g, r, rho, cfg)?.admissible))
    };
    match run() {
        Ok((ok, adm)) => Tally { success: ok as u64, admissible: adm as u64, errors: 0 },
        Err(_) => Tally { errors: 1, ..Tally::default() },
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let c = &a.common;
    let sample = generate_er(a.n, a.lambda, c.seed)?;
    let report = Report::new(
        "gen",
        c.seed,
        c.workers,
        &a,
        json!({ "p": sample.p, "clamped": sample.clamped, "graph": sample.graph }),
    );
    let body = match c.format {
        Format::Json => report.to_json(),
        Format::Csv => report.header_lines() + &io::to_edge_list(&sample.graph),
    };
    emit(c.out.as_deref(), &body)
}

fn cmd_profile(a: ProfileArgs) -> Result<()> {
    let c = &a.common;
    let s = check_rho(a.r, a.rho)?;
    let cfg = a.canon.config();
    let g = read_graph(&a.input)?;
    let profile = build_profile(&g, a.r, a.rho)?;
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (e, &v) in profile.entries().iter().zip(profile.audit_ids()) {
        let code = canon_rooted_graph_with(e, &cfg)?;
        let degenerate = e.is_degenerate(a.r);
        rows.push(format!("{v},{},{},{},{degenerate},{code}", e.len(), e.edge_count(), e.max_depth()));
        entries.push(json!({"vertex": v, "vertices": e.len(), "edges": e.edge_count(),
            "depth": e.max_depth(), "degenerate": degenerate, "code": code}));
    }
    if let Some(p) = &a.binary {
        write_atomic(p, &encode_profile(&profile, &cfg)?)?;
    }
    let result = json!({ "n": g.n(), "r": a.r, "s": s, "entries": entries });
    let table = Table { header: "vertex,vertices,edges,depth,degenerate,code".into(), rows };
    finish(Report::new("profile", c.seed, c.workers, &a, result).with_table(table), c)
}
