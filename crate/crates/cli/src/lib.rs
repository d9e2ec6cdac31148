//! The `vizing` command line: coloring, benchmarking, distributed simulation
//! and graph generation.

pub mod fit;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use vizing::graph::{generate, read_graph, GeneratorParams, GraphFile};
use vizing::local::{run_distributed, trace_to_jsonl, DistributedRun, LocalConfig, LocalError};
use vizing::msva::{default_cap, default_ell, records_to_jsonl};
use vizing::sequential::{color_greedy, color_msva, color_vizing, MsvaRunOptions, RunStats};
use vizing::{validate, Graph, PartialColoring, ValidationReport};

use fit::{median, scaling_fit, ScalingFit};

#[derive(Debug, Parser)]
#[command(name = "vizing", version, about = "(Δ+1)-edge-coloring with Vizing and multi-step Vizing chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Color a graph and write the coloring and run statistics.
    Color(ColorArgs),
    /// Time colorers over a grid of random graphs.
    Bench(BenchArgs),
    /// Simulate the distributed colorer stage by stage.
    Distsim(DistsimArgs),
    /// Generate a random bounded-degree graph.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Vizing,
    Msva,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Vizing => "vizing",
            Algorithm::Msva => "msva",
        }
    }
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    /// Edge list or graph JSON; `-` reads stdin.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "msva", env = "VIZING_ALG")]
    pub alg: Algorithm,
    /// Path cut length for msva; defaults to max(16, 4Δ²).
    #[arg(long, env = "VIZING_ELL")]
    pub ell: Option<usize>,
    /// Iteration cap per msva call; defaults to 64(1 + log₂ n).
    #[arg(long, env = "VIZING_CAP")]
    pub cap: Option<usize>,
    #[arg(long, default_value_t = 0, env = "VIZING_SEED")]
    pub seed: u64,
    /// Where to write the coloring (`edge color` lines).
    #[arg(long, short, env = "VIZING_OUTPUT")]
    pub output: Option<PathBuf>,
    /// Where to write the run statistics JSON.
    #[arg(long, env = "VIZING_STATS")]
    pub stats: Option<PathBuf>,
    /// Where to write one JSON record per msva call.
    #[arg(long, env = "VIZING_RECORDS")]
    pub records: Option<PathBuf>,
    /// Check the loop invariants of every msva iteration.
    #[arg(long, env = "VIZING_VALIDATE_DEBUG")]
    pub validate_debug: bool,
    #[arg(long, env = "VIZING_JSON")]
    pub json: bool,
    /// Report wall_ns as 0 so repeated runs are byte-identical.
    #[arg(long, env = "VIZING_NO_TIMING")]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "msva,vizing", env = "VIZING_ALGS")]
    pub algs: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', required = true, env = "VIZING_N_GRID")]
    pub n_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true, env = "VIZING_DELTA_GRID")]
    pub delta_grid: Vec<usize>,
    /// Fixed path cut length; defaults to max(16, 4Δ²) per Δ.
    #[arg(long, env = "VIZING_ELL")]
    pub ell: Option<usize>,
    #[arg(long, default_value_t = 3, env = "VIZING_SEEDS")]
    pub seeds: u64,
    #[arg(long, default_value_t = 0, env = "VIZING_SEED")]
    pub seed: u64,
    /// Cell CSV; fits go to a sibling file with a `.fits.csv` suffix.
    #[arg(long, short, default_value = "bench.csv", env = "VIZING_OUTPUT")]
    pub output: PathBuf,
    /// Cells timed concurrently. More than 1 disturbs the timings.
    #[arg(long, default_value_t = 1, env = "VIZING_JOBS")]
    pub jobs: usize,
    #[arg(long, env = "VIZING_JSON")]
    pub json: bool,
    #[arg(long, env = "VIZING_NO_TIMING")]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct DistsimArgs {
    pub input: PathBuf,
    /// Defaults to max(16, 4Δ²).
    #[arg(long, env = "VIZING_ELL")]
    pub ell: Option<usize>,
    /// Iteration budget per edge per stage; defaults to 64(1 + log₂ n).
    #[arg(long, env = "VIZING_T")]
    pub t: Option<usize>,
    #[arg(long, default_value_t = 200, env = "VIZING_STAGE_CAP")]
    pub stage_cap: usize,
    #[arg(long, default_value_t = 0, env = "VIZING_SEED")]
    pub seed: u64,
    /// Stage trace as JSON lines.
    #[arg(long, env = "VIZING_TRACE")]
    pub trace: Option<PathBuf>,
    #[arg(long, short, env = "VIZING_OUTPUT")]
    pub output: Option<PathBuf>,
    #[arg(long, env = "VIZING_JSON")]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Edges,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, env = "VIZING_N")]
    pub n: usize,
    #[arg(long, env = "VIZING_DELTA")]
    pub delta: usize,
    #[arg(long, default_value_t = 0, env = "VIZING_SEED")]
    pub seed: u64,
    /// Every vertex gets degree exactly Δ.
    #[arg(long, env = "VIZING_REGULAR")]
    pub regular: bool,
    #[arg(long, value_enum, default_value = "json", env = "VIZING_FORMAT")]
    pub format: GraphFormat,
    #[arg(long, short, env = "VIZING_OUTPUT")]
    pub output: Option<PathBuf>,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input: exit 2.
    Usage(anyhow::Error),
    /// The produced coloring failed validation: exit 3.
    Invalid(String),
    /// Anything else, including an unfinished distributed run: exit 1.
    Other(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Other(e) => write!(f, "{e:#}"),
            CliError::Invalid(s) => write!(f, "invalid coloring: {s}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(anyhow::anyhow!(msg.into()))
}

fn other(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Other(e.into())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Color(a) => cmd_color(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Distsim(a) => cmd_distsim(&a),
        Command::Gen(a) => cmd_gen(&a),
    }
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(e.into()))?;
        s
    } else {
        fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(CliError::Usage)?
    };
    read_graph(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(CliError::Usage)
}

fn write_out(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())).map_err(CliError::Other),
        None => io::stdout().write_all(body.as_bytes()).map_err(other),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn check(report: &ValidationReport, palette: usize) -> Result<(), CliError> {
    if !report.is_total_and_proper() {
        return Err(CliError::Invalid(format!(
            "{} violations, {} uncolored edges",
            report.violations.len(),
            report.uncolored
        )));
    }
    if report.max_color > palette {
        return Err(CliError::Invalid(format!("color {} exceeds palette {palette}", report.max_color)));
    }
    Ok(())
}

#[derive(Serialize)]
struct ColorReport<'a> {
    #[serde(flatten)]
    stats: &'a RunStats,
    colors_used: usize,
    max_color: usize,
    valid: bool,
}

fn cmd_color(a: &ColorArgs) -> Result<(), CliError> {
    let g = load_graph(&a.input)?;
    let delta = g.max_degree();
    let (phi, mut stats, records): (PartialColoring, RunStats, Option<String>) = match a.alg {
        Algorithm::Greedy => {
            let (phi, stats) = color_greedy(&g);
            (phi, stats, None)
        }
        Algorithm::Vizing => {
            let run = color_vizing(&g, a.seed).map_err(other)?;
            (run.coloring, run.stats, None)
        }
        Algorithm::Msva => {
            let mut opts = MsvaRunOptions::for_graph(&g);
            opts.ell = a.ell.unwrap_or(opts.ell);
            opts.cap = a.cap.unwrap_or(opts.cap);
            if opts.ell < 2 || opts.cap == 0 {
                return Err(usage("--ell must be at least 2 and --cap at least 1"));
            }
            opts.validate = a.validate_debug;
            opts.keep_records = a.records.is_some();
            let run = color_msva(&g, opts, a.seed).map_err(|e| match e {
                vizing::sequential::SequentialError::Msva(
                    m @ vizing::MsvaError::InvariantViolated(_),
                ) => CliError::Invalid(m.to_string()),
                e => other(e),
            })?;
            let records = a.records.is_some().then(|| records_to_jsonl(&run.records));
            (run.coloring, run.stats, records)
        }
    };
    if a.no_timing {
        stats.wall_ns = 0;
    }
    let palette = match a.alg {
        Algorithm::Greedy => (2 * delta).saturating_sub(1).max(1),
        _ => delta + 1,
    };
    let report = validate(&g, &phi);
    let valid = check(&report, palette);

    if let Some(p) = &a.output {
        write_out(Some(p), &phi.to_text())?;
    }
    let summary = ColorReport {
        stats: &stats,
        colors_used: report.colors_used,
        max_color: report.max_color,
        valid: valid.is_ok(),
    };
    if let Some(p) = &a.stats {
        write_out(Some(p), &to_json(&summary))?;
    }
    if let (Some(p), Some(body)) = (&a.records, &records) {
        write_out(Some(p), body)?;
    }
    if a.json {
        write_out(None, &to_json(&summary))?;
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "algorithm   {}", stats.algorithm);
        let _ = writeln!(s, "graph       n={} m={} delta={}", stats.n, stats.m, stats.delta);
        let _ = writeln!(s, "colors      {} used, max {}", report.colors_used, report.max_color);
        let _ = writeln!(s, "iterations  {} ({} restarts)", stats.total_iterations, stats.restarts);
        let _ = writeln!(s, "wall        {:.3} ms", stats.wall_ns as f64 / 1e6);
        let _ = writeln!(s, "valid       {}", valid.is_ok());
        if a.output.is_none() {
            s.push_str(&phi.to_text());
        }
        write_out(None, &s)?;
    }
    valid
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub alg: Algorithm,
    pub n: usize,
    pub delta: usize,
    pub seed: u64,
    pub m: usize,
    pub ell: Option<usize>,
    pub wall_ns: u64,
    pub total_iterations: u64,
    pub restarts: u64,
    pub path_length_sum: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchFit {
    pub alg: Algorithm,
    pub delta: usize,
    pub points: usize,
    pub time_slope: Option<f64>,
    pub time_prefers_nlogn: Option<bool>,
    pub time_aic_linear: Option<f64>,
    pub time_aic_nlogn: Option<f64>,
    /// Slope of iterations (msva) or path length sums (vizing) against n.
    pub work_slope: Option<f64>,
}

fn run_cell(alg: Algorithm, n: usize, delta: usize, ell: Option<usize>, seed: u64) -> anyhow::Result<BenchRow> {
    let g = generate(GeneratorParams { n, delta, seed, regular: false })?;
    let mut row = BenchRow {
        alg,
        n,
        delta,
        seed,
        m: g.m(),
        ell: None,
        wall_ns: 0,
        total_iterations: 0,
        restarts: 0,
        path_length_sum: None,
    };
    let stats = match alg {
        Algorithm::Greedy => color_greedy(&g).1,
        Algorithm::Vizing => color_vizing(&g, seed)?.stats,
        Algorithm::Msva => {
            let opts = MsvaRunOptions::for_graph(&g).ell(ell.unwrap_or_else(|| default_ell(delta)));
            color_msva(&g, opts, seed)?.stats
        }
    };
    row.ell = stats.ell;
    row.wall_ns = stats.wall_ns;
    row.total_iterations = stats.total_iterations;
    row.restarts = stats.restarts;
    row.path_length_sum = stats.path_length_sum;
    Ok(row)
}

/// Fits each `(alg, Δ)` series on the per-`n` medians.
pub fn fit_rows(rows: &[BenchRow]) -> Vec<BenchFit> {
    let mut keys: Vec<(Algorithm, usize)> = rows.iter().map(|r| (r.alg, r.delta)).collect();
    keys.sort_by_key(|&(a, d)| (a.name(), d));
    keys.dedup();
    keys.into_iter()
        .map(|(alg, delta)| {
            let series: Vec<&BenchRow> = rows.iter().filter(|r| r.alg == alg && r.delta == delta).collect();
            let mut ns: Vec<usize> = series.iter().map(|r| r.n).collect();
            ns.sort_unstable();
            ns.dedup();
            let per_n = |f: &dyn Fn(&BenchRow) -> f64| -> Vec<(f64, f64)> {
                ns.iter()
                    .filter_map(|&n| {
                        let mut ys: Vec<f64> = series.iter().filter(|r| r.n == n).map(|r| f(r)).collect();
                        median(&mut ys).map(|y| (n as f64, y))
                    })
                    .collect()
            };
            let time: Option<ScalingFit> = scaling_fit(&per_n(&|r| r.wall_ns as f64));
            let work = scaling_fit(&per_n(&|r| match r.alg {
                Algorithm::Vizing => r.path_length_sum.unwrap_or(0) as f64,
                _ => r.total_iterations as f64,
            }));
            BenchFit {
                alg,
                delta,
                points: ns.len(),
                time_slope: time.map(|f| f.slope),
                time_prefers_nlogn: time.map(|f| f.prefers_nlogn()),
                time_aic_linear: time.map(|f| f.aic_linear),
                time_aic_nlogn: time.map(|f| f.aic_nlogn),
                work_slope: work.map(|f| f.slope),
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Other)?;
    for r in rows {
        w.serialize(r).map_err(other)?;
    }
    w.flush().map_err(other)
}

pub fn fits_path(output: &Path) -> PathBuf {
    output.with_extension("fits.csv")
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    if a.algs.is_empty() || a.n_grid.is_empty() || a.delta_grid.is_empty() || a.seeds == 0 {
        return Err(usage("algorithm set, n grid, delta grid and seed count must be nonempty"));
    }
    if let Some(&d) = a.delta_grid.iter().find(|&&d| d < 2) {
        return Err(usage(format!("delta {d} is below 2")));
    }
    if let Some(&n) = a.n_grid.iter().find(|&&n| n < 2) {
        return Err(usage(format!("n {n} is below 2")));
    }
    if a.ell.is_some_and(|l| l < 2) || a.jobs == 0 {
        return Err(usage("--ell must be at least 2 and --jobs at least 1"));
    }
    let mut cells = Vec::new();
    for &alg in &a.algs {
        for &delta in &a.delta_grid {
            for &n in &a.n_grid {
                for s in 0..a.seeds {
                    cells.push((alg, n, delta, a.seed.wrapping_add(s)));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build().map_err(other)?;
    let rows: Vec<BenchRow> = pool
        .install(|| {
            cells
                .par_iter()
                .map(|&(alg, n, delta, seed)| run_cell(alg, n, delta, a.ell, seed))
                .collect::<anyhow::Result<Vec<_>>>()
        })
        .map_err(CliError::Other)?;
    let rows: Vec<BenchRow> = rows
        .into_iter()
        .map(|mut r| {
            if a.no_timing {
                r.wall_ns = 0;
            }
            r
        })
        .collect();
    let fits = fit_rows(&rows);
    write_csv(&a.output, &rows)?;
    write_csv(&fits_path(&a.output), &fits)?;
    if a.json {
        #[derive(Serialize)]
        struct Out<'a> {
            schema: u32,
            cells: usize,
            fits: &'a [BenchFit],
        }
        write_out(None, &to_json(&Out { schema: 1, cells: rows.len(), fits: &fits }))?;
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "{:<8} {:>5} {:>6} {:>11} {:>11} {:>7}", "alg", "delta", "points", "time_slope", "work_slope", "nlogn");
        for f in &fits {
            let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
            let _ = writeln!(
                s,
                "{:<8} {:>5} {:>6} {:>11} {:>11} {:>7}",
                f.alg.name(),
                f.delta,
                f.points,
                show(f.time_slope),
                show(f.work_slope),
                f.time_prefers_nlogn.map_or("-".to_string(), |b| b.to_string())
            );
        }
        write_out(None, &s)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DistsimSummary {
    schema: u32,
    n: usize,
    m: usize,
    delta: usize,
    ell: usize,
    t: usize,
    seed: u64,
    stages: usize,
    rounds: usize,
    uncolored: usize,
    colored: bool,
}

fn cmd_distsim(a: &DistsimArgs) -> Result<(), CliError> {
    if a.stage_cap == 0 {
        return Err(usage("--stage-cap must be at least 1"));
    }
    let g = load_graph(&a.input)?;
    let cfg = LocalConfig {
        ell: a.ell.unwrap_or_else(|| default_ell(g.max_degree())),
        t: a.t.unwrap_or_else(|| default_cap(g.n())),
        stage_cap: a.stage_cap,
        seed: a.seed,
    };
    let (run, finished): (DistributedRun, bool) = match run_distributed(&g, &cfg) {
        Ok(run) => (run, true),
        Err(LocalError::StageCapExceeded(run)) => (*run, false),
        Err(LocalError::InvalidConfig(s)) => return Err(usage(s)),
        Err(e) => return Err(CliError::Invalid(e.to_string())),
    };
    let report = validate(&g, &run.coloring);
    if !report.is_valid() || report.max_color > g.max_degree() + 1 {
        return Err(CliError::Invalid(format!("{} violations", report.violations.len())));
    }
    if let Some(p) = &a.trace {
        write_out(Some(p), &trace_to_jsonl(&run.trace))?;
    }
    if let Some(p) = &a.output {
        write_out(Some(p), &run.coloring.to_text())?;
    }
    let summary = DistsimSummary {
        schema: 1,
        n: g.n(),
        m: g.m(),
        delta: g.max_degree(),
        ell: cfg.ell,
        t: cfg.t,
        seed: cfg.seed,
        stages: run.trace.len(),
        rounds: run.trace.last().map_or(0, |t| t.cumulative_rounds),
        uncolored: run.coloring.uncolored_count(),
        colored: finished,
    };
    if a.json {
        write_out(None, &to_json(&summary))?;
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "{:>5} {:>8} {:>8} {:>8} {:>10} {:>8}", "stage", "U", "S", "W", "gamma", "rounds");
        for t in &run.trace {
            let _ = writeln!(
                s,
                "{:>5} {:>8} {:>8} {:>8} {:>10} {:>8}",
                t.stage, t.uncolored, t.succeeded, t.winners, t.gamma_edges, t.cumulative_rounds
            );
        }
        let _ = writeln!(s, "{} uncolored after {} stages", summary.uncolored, summary.stages);
        write_out(None, &s)?;
    }
    if finished {
        Ok(())
    } else {
        Err(other(anyhow::anyhow!(
            "{} edges uncolored after {} stages",
            summary.uncolored,
            summary.stages
        )))
    }
}

fn cmd_gen(a: &GenArgs) -> Result<(), CliError> {
    let params = GeneratorParams { n: a.n, delta: a.delta, seed: a.seed, regular: a.regular };
    let g = generate(params).map_err(|e| CliError::Usage(e.into()))?;
    let body = match a.format {
        GraphFormat::Json => to_json(&GraphFile::new(&g, Some(params))),
        GraphFormat::Edges => g.to_edge_list(),
    };
    write_out(a.output.as_deref(), &body)
}
