//! The `yapa` command line.
//!
//! Every subcommand takes the same settings, either as flags or from a JSON
//! file given with `--config` (flags win). Outputs go to `--out` (default
//! `.`); each CSV echoes the resolved settings in its comment header, and
//! re-running with those settings reproduces it byte for byte.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
//! runtime or numerical failures, including a sweep with failed cells.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use crate::connectivity::{
    detached_surface, expected_detached_fraction, surface_limit, Checkpoints, ComponentTrace,
    ComponentTracker, Survival,
};
use crate::degree::{degree_summary, l1_distance, DegreeSummary};
use crate::error::{Error, Result};
use crate::generator::{
    generate, generate_observed, Dag, GeneratorKind, GraphStream, GrowthObserver, InitialCondition,
};
use crate::io::{fmt_f64, fmt_opt, read_graph, write_graph, CsvTable};
use crate::model::{child_seed, rng_from_seed, Params, VertexId};
use crate::paths::{genesis_distances, path_summary, PathSummary};
use crate::theory::{gw_ensemble, limiting_indegree_pmf, limiting_outdegree_pmf, solve_gamma};

pub const DEFAULT_NODES: usize = 10_000;
pub const DEFAULT_GW_TREES: usize = 10_000;
pub const DEFAULT_GENERATIONS: u32 = 50;
/// Initial fanout used by `sweep` unless configured otherwise.
pub const DEFAULT_SWEEP_FANOUT: u32 = 10;
const DEFAULT_TRACE_POINTS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "yapa", version, about = "Young-age preferential attachment DAG simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow graphs and write edge lists with JSON metadata.
    Generate(Settings),
    /// Degree histograms and the limiting in/out-degree laws.
    Degrees(Settings),
    /// Detached-surface counts against the limit.
    Surface(Settings),
    /// Forward-component traces of the tracked roots.
    Component(Settings),
    /// Shortest-path-to-genesis statistics.
    Paths(Settings),
    /// Galton–Watson local-limit trees.
    Gw(Settings),
    /// Giant-component fixed points over an (alpha, beta) grid.
    Fixpoint(Settings),
    /// Component traces and path statistics over an (alpha, beta) grid.
    Sweep(Settings),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Degrees(_) => "degrees",
            Command::Surface(_) => "surface",
            Command::Component(_) => "component",
            Command::Paths(_) => "paths",
            Command::Gw(_) => "gw",
            Command::Fixpoint(_) => "fixpoint",
            Command::Sweep(_) => "sweep",
        }
    }

    fn settings(&self) -> &Settings {
        match self {
            Command::Generate(s)
            | Command::Degrees(s)
            | Command::Surface(s)
            | Command::Component(s)
            | Command::Paths(s)
            | Command::Gw(s)
            | Command::Fixpoint(s)
            | Command::Sweep(s) => s,
        }
    }
}

/// Flags shared by all subcommands. In a config file the same names are
/// used, with `_` instead of `-`.
#[derive(Clone, Debug, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Edge density α.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Reinforcement bias β.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Number of vertices N.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Independent runs (trees for `gw`).
    #[arg(long)]
    pub runs: Option<usize>,
    /// Master seed; run r uses seed + r.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampler: reference or accelerated.
    #[arg(long)]
    pub generator: Option<GeneratorKind>,
    /// Vertices 2..=K+1 always reference the genesis.
    #[arg(long)]
    pub init_fanout: Option<u32>,
    /// Genesis set for path distances.
    #[arg(long, value_delimiter = ',')]
    pub genesis: Option<Vec<VertexId>>,
    /// Roots whose forward components are traced.
    #[arg(long, value_delimiter = ',')]
    pub root: Option<Vec<VertexId>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with default settings.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Analyse this edge list (with its .json sidecar) instead of generating.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generation cap for `gw`.
    #[arg(long)]
    pub generations: Option<u32>,
    /// Node cap per tree for `gw`.
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Checkpoint stride for component traces.
    #[arg(long)]
    pub stride: Option<u32>,
    /// α grid for `sweep` and `fixpoint`.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// β grid for `sweep` and `fixpoint`.
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
}

impl Settings {
    /// Fills unset fields from `base`.
    pub fn or(self, base: Settings) -> Settings {
        Settings {
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            nodes: self.nodes.or(base.nodes),
            runs: self.runs.or(base.runs),
            seed: self.seed.or(base.seed),
            generator: self.generator.or(base.generator),
            init_fanout: self.init_fanout.or(base.init_fanout),
            genesis: self.genesis.or(base.genesis),
            root: self.root.or(base.root),
            out: self.out.or(base.out),
            config: self.config.or(base.config),
            input: self.input.or(base.input),
            generations: self.generations.or(base.generations),
            max_nodes: self.max_nodes.or(base.max_nodes),
            stride: self.stride.or(base.stride),
            alphas: self.alphas.or(base.alphas),
            betas: self.betas.or(base.betas),
        }
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("bad config {}: {e}", path.display())))
    }

    /// Flags merged over the `--config` file, if any.
    pub fn resolve(self) -> Result<Settings> {
        match self.config.clone() {
            Some(path) => Ok(self.or(Settings::load(&path)?)),
            None => Ok(self),
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Fully resolved settings of one simulation cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    pub n_vertices: usize,
    pub seed: u64,
    pub runs: usize,
    pub generator_kind: GeneratorKind,
    pub init: InitialCondition,
    pub tracked_roots: Vec<VertexId>,
    pub genesis: Vec<VertexId>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn from_settings(s: &Settings, alpha: f64, beta: f64, default_fanout: u32) -> Result<Self> {
        let cfg = RunConfig {
            params: Params::new(alpha, beta)?,
            n_vertices: s.nodes.unwrap_or(DEFAULT_NODES),
            seed: s.seed.unwrap_or(0),
            runs: s.runs.unwrap_or(1),
            generator_kind: s.generator.unwrap_or(GeneratorKind::Accelerated),
            init: InitialCondition::fanout(s.init_fanout.unwrap_or(default_fanout)),
            tracked_roots: s.root.clone().unwrap_or_else(|| vec![1]),
            genesis: s.genesis.clone().unwrap_or_else(|| vec![1]),
            out_dir: s.out_dir(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be >= 1".into()));
        }
        if self.n_vertices == 0 || self.n_vertices > VertexId::MAX as usize {
            return Err(Error::Config(format!("nodes must lie in 1..={}", VertexId::MAX)));
        }
        let in_range = |v: &VertexId| *v >= 1 && *v as usize <= self.n_vertices;
        if self.tracked_roots.is_empty() || !self.tracked_roots.iter().all(in_range) {
            return Err(Error::Config(format!(
                "roots must be a nonempty list within 1..={}",
                self.n_vertices
            )));
        }
        if self.genesis.is_empty() || !self.genesis.iter().all(in_range) {
            return Err(Error::Config(format!(
                "genesis must be a nonempty list within 1..={}",
                self.n_vertices
            )));
        }
        Ok(())
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }

    fn init_fanout(&self) -> u32 {
        match self.init {
            InitialCondition::None => 0,
            InitialCondition::GenesisFanout { k } => k,
        }
    }

    /// Adds the config echo to a table's comment header.
    pub fn echo(&self, table: &mut CsvTable, command: &str) {
        table
            .comment("command", command)
            .comment("version", env!("CARGO_PKG_VERSION"))
            .comment("alpha", fmt_f64(self.params.alpha()))
            .comment("beta", fmt_f64(self.params.beta()))
            .comment("nodes", self.n_vertices)
            .comment("runs", self.runs)
            .comment("seed", self.seed)
            .comment("generator", self.generator_kind)
            .comment("init_fanout", self.init_fanout())
            .comment("root", join(&self.tracked_roots))
            .comment("genesis", join(&self.genesis));
    }

    fn generate_run(&self, run: usize) -> Result<Dag> {
        generate(
            self.params,
            self.n_vertices,
            self.run_seed(run),
            self.init,
            self.generator_kind,
        )
    }
}

/// An (α, β) grid; every cell shares the remaining settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub template: Settings,
}

impl SweepGrid {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let alphas = s.alphas.clone().or(s.alpha.map(|a| vec![a]));
        let betas = s.betas.clone().or(s.beta.map(|b| vec![b]));
        match (alphas, betas) {
            (Some(alphas), Some(betas)) if !alphas.is_empty() && !betas.is_empty() => {
                Ok(SweepGrid {
                    alphas,
                    betas,
                    template: s.clone(),
                })
            }
            _ => Err(Error::Config(
                "grid needs nonempty --alphas/--alpha and --betas/--beta".into(),
            )),
        }
    }

    /// Cells in row-major order (α outer, β inner).
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.alphas
            .iter()
            .flat_map(|&a| self.betas.iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn echo(&self, table: &mut CsvTable) {
        table
            .comment("alphas", join(&self.alphas))
            .comment("betas", join(&self.betas));
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn require_params(s: &Settings) -> Result<(f64, f64)> {
    match (s.alpha, s.beta) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Config("--alpha and --beta are required".into())),
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct Tracked(Vec<ComponentTracker>);

impl GrowthObserver for Tracked {
    fn on_vertex(&mut self, n: VertexId, arcs: &[VertexId]) {
        for t in &mut self.0 {
            t.on_vertex(n, arcs);
        }
    }
}

fn trackers(cfg: &RunConfig, stride: u32) -> Result<Tracked> {
    let horizon = cfg.n_vertices as VertexId;
    cfg.tracked_roots
        .iter()
        .map(|&r| {
            Ok(ComponentTracker::new(cfg.params, r, Checkpoints::Every { stride })?
                .with_horizon(horizon))
        })
        .collect::<Result<Vec<_>>>()
        .map(Tracked)
}

fn stride_for(s: &Settings, n: usize) -> u32 {
    s.stride
        .unwrap_or_else(|| (n / DEFAULT_TRACE_POINTS).max(1) as u32)
        .max(1)
}

fn trace_table(cfg: &RunConfig, command: &str, trace: &ComponentTrace, run: usize) -> CsvTable {
    let mut t = CsvTable::new(&["n", "gamma", "gamma_over_n", "weight_over_n"]);
    cfg.echo(&mut t, command);
    t.comment("trace_root", trace.root).comment("run", run);
    for s in &trace.samples {
        t.push_row(vec![
            s.n.to_string(),
            s.gamma.to_string(),
            fmt_f64(s.gamma_over_n()),
            fmt_f64(s.weight_over_n()),
        ]);
    }
    t
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code. Diagnostics go to stderr; written paths to `stdout`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("yapa {}: {e}", cli.command.name());
            match e {
                Error::Config(_) | Error::Domain(_) => 1,
                _ => 2,
            }
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run_with(std::env::args_os(), &mut lock)
}

fn dispatch(command: &Command, stdout: &mut dyn Write) -> Result<i32> {
    let s = command.settings().clone().resolve()?;
    let name = command.name();
    let written = match command {
        Command::Generate(_) => cmd_generate(&s)?,
        Command::Degrees(_) => cmd_degrees(&s, stdout)?,
        Command::Surface(_) => cmd_surface(&s)?,
        Command::Component(_) => cmd_component(&s)?,
        Command::Paths(_) => cmd_paths(&s)?,
        Command::Gw(_) => cmd_gw(&s)?,
        Command::Fixpoint(_) => cmd_fixpoint(&s)?,
        Command::Sweep(_) => {
            let (files, failed) = cmd_sweep(&s)?;
            for f in &files {
                writeln!(stdout, "{}", f.display())?;
            }
            if failed > 0 {
                eprintln!("yapa {name}: {failed} cell(s) failed");
                return Ok(2);
            }
            return Ok(0);
        }
    };
    for f in &written {
        writeln!(stdout, "{}", f.display())?;
    }
    Ok(0)
}

fn save(table: &CsvTable, dir: &Path, name: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    table.save(&path)?;
    written.push(path);
    Ok(())
}

/// Writes `graph.csv`/`graph.json`, or `graph_<run>.*` for several runs.
pub fn cmd_generate(s: &Settings) -> Result<Vec<PathBuf>> {
    let (a, b) = require_params(s)?;
    let cfg = RunConfig::from_settings(s, a, b, 0)?;
    let mut written = Vec::new();
    for run in 0..cfg.runs {
        let dag = cfg.generate_run(run)?;
        let stem = if cfg.runs == 1 {
            "graph".to_string()
        } else {
            format!("graph_{run:03}")
        };
        write_graph(&dag, &cfg.out_dir, &stem)?;
        written.push(cfg.out_dir.join(format!("{stem}.csv")));
        written.push(cfg.out_dir.join(format!("{stem}.json")));
    }
    Ok(written)
}

/// The graphs a command analyses: the `--input` file, or fresh runs.
fn load_graphs(s: &Settings) -> Result<(RunConfig, Vec<Dag>)> {
    if let Some(input) = &s.input {
        let dir = input.parent().unwrap_or(Path::new("."));
        let stem = input
            .file_stem()
            .and_then(|x| x.to_str())
            .ok_or_else(|| Error::Config(format!("bad input path {}", input.display())))?;
        let dag = read_graph(dir, stem)?;
        let merged = Settings {
            nodes: Some(dag.n_vertices()),
            seed: Some(dag.seed()),
            runs: Some(1),
            generator: Some(dag.kind()),
            init_fanout: Some(match dag.init() {
                InitialCondition::None => 0,
                InitialCondition::GenesisFanout { k } => k,
            }),
            ..s.clone()
        };
        let cfg = RunConfig::from_settings(
            &merged,
            dag.params().alpha(),
            dag.params().beta(),
            0,
        )?;
        return Ok((cfg, vec![dag]));
    }
    let (a, b) = require_params(s)?;
    let cfg = RunConfig::from_settings(s, a, b, 0)?;
    let dags = (0..cfg.runs)
        .into_par_iter()
        .map(|r| cfg.generate_run(r))
        .collect::<Result<Vec<_>>>()?;
    Ok((cfg, dags))
}

fn echo_input(t: &mut CsvTable, s: &Settings) {
    if let Some(input) = &s.input {
        t.comment("input", input.display());
    }
}

/// Pooled degree histogram plus the limiting pmfs.
pub fn cmd_degrees(s: &Settings, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let (cfg, dags) = load_graphs(s)?;
    let mut pooled = DegreeSummary::default();
    for dag in &dags {
        pooled.merge(&degree_summary(dag));
    }
    let mut written = Vec::new();
    let mut hist = CsvTable::new(&["degree", "count_in", "count_out"]);
    cfg.echo(&mut hist, "degrees");
    echo_input(&mut hist, s);
    let len = pooled.in_histogram.len().max(pooled.out_histogram.len());
    for k in 0..len {
        hist.push_row(vec![
            k.to_string(),
            pooled.in_histogram.get(k).copied().unwrap_or(0).to_string(),
            pooled.out_histogram.get(k).copied().unwrap_or(0).to_string(),
        ]);
    }
    save(&hist, &cfg.out_dir, "degrees_histogram.csv", &mut written)?;

    let k_max = len.max(40);
    let limits = [
        ("indegree_limit_pmf.csv", limiting_indegree_pmf(&cfg.params, k_max)?, pooled.in_pmf()),
        ("outdegree_limit_pmf.csv", limiting_outdegree_pmf(&cfg.params, k_max), pooled.out_pmf()),
    ];
    for (name, limit, empirical) in &limits {
        let mut t = CsvTable::new(&["k", "probability"]);
        cfg.echo(&mut t, "degrees");
        echo_input(&mut t, s);
        for (k, w) in limit.weights().iter().enumerate() {
            t.push_row(vec![k.to_string(), fmt_f64(*w)]);
        }
        save(&t, &cfg.out_dir, name, &mut written)?;
        let l1 = l1_distance(empirical, limit)?;
        writeln!(stdout, "# {name}: l1 distance to empirical pmf = {l1}")?;
    }
    Ok(written)
}

/// One row per run: detached count, fraction and `e^{−α/(β+1)}`.
pub fn cmd_surface(s: &Settings) -> Result<Vec<PathBuf>> {
    let (cfg, dags) = load_graphs(s)?;
    let mut t = CsvTable::new(&["N", "detached", "fraction", "theory_fraction"]);
    cfg.echo(&mut t, "surface");
    echo_input(&mut t, s);
    let exact = expected_detached_fraction(&cfg.params, cfg.n_vertices as VertexId)?;
    t.comment("expected_fraction_at_N", fmt_f64(exact));
    let limit = surface_limit(&cfg.params);
    for dag in &dags {
        let st = detached_surface(dag);
        t.push_row(vec![
            st.n_vertices.to_string(),
            st.detached_count.to_string(),
            fmt_f64(st.fraction()),
            fmt_f64(limit),
        ]);
    }
    let mut written = Vec::new();
    save(&t, &cfg.out_dir, "surface.csv", &mut written)?;
    Ok(written)
}

fn stream_traces(cfg: &RunConfig, run: usize, stride: u32) -> Result<Vec<ComponentTrace>> {
    let mut obs = trackers(cfg, stride)?;
    let mut stream = GraphStream::new(cfg.params, cfg.init, cfg.generator_kind, cfg.run_seed(run));
    for _ in 0..cfg.n_vertices {
        let (n, arcs) = stream.advance();
        obs.on_vertex(n, arcs);
    }
    Ok(obs.0.into_iter().map(ComponentTracker::into_trace).collect())
}

/// Per-run traces for every tracked root, plus a summary with the
/// survival classification at `N`.
pub fn cmd_component(s: &Settings) -> Result<Vec<PathBuf>> {
    let (a, b) = require_params(s)?;
    let cfg = RunConfig::from_settings(s, a, b, 0)?;
    let stride = stride_for(s, cfg.n_vertices);
    let traces = (0..cfg.runs)
        .into_par_iter()
        .map(|r| stream_traces(&cfg, r, stride))
        .collect::<Result<Vec<_>>>()?;
    let fixed = solve_gamma(&cfg.params)?;
    let mut written = Vec::new();
    let mut summary = CsvTable::new(&[
        "root",
        "run",
        "N",
        "gamma",
        "gamma_over_n",
        "weight_over_n",
        "survival",
    ]);
    cfg.echo(&mut summary, "component");
    summary
        .comment("stride", stride)
        .comment("gamma_theory", fmt_f64(fixed.gamma))
        .comment("y_star", fmt_f64(fixed.y_star));
    for (run, per_root) in traces.iter().enumerate() {
        for trace in per_root {
            let mut t = trace_table(&cfg, "component", trace, run);
            t.comment("stride", stride);
            let name = format!("component_root{}_run{run:03}.csv", trace.root);
            save(&t, &cfg.out_dir, &name, &mut written)?;
            let last = trace.last().expect("horizon is always sampled");
            summary.push_row(vec![
                trace.root.to_string(),
                run.to_string(),
                last.n.to_string(),
                last.gamma.to_string(),
                fmt_f64(last.gamma_over_n()),
                fmt_f64(last.weight_over_n()),
                survival_label(Survival::classify(last.weight_over_n(), fixed.y_star)).into(),
            ]);
        }
    }
    save(&summary, &cfg.out_dir, "component_summary.csv", &mut written)?;
    Ok(written)
}

fn survival_label(s: Survival) -> &'static str {
    match s {
        Survival::Survived => "survived",
        Survival::Died => "died",
        Survival::Undecided => "undecided",
    }
}

fn path_row(cfg: &RunConfig, run: usize, p: &PathSummary) -> Vec<String> {
    vec![
        fmt_f64(cfg.params.alpha()),
        fmt_f64(cfg.params.beta()),
        run.to_string(),
        p.sum_hops.to_string(),
        fmt_opt(p.mean_hops),
        p.max_hops.to_string(),
        p.reachable_count.to_string(),
        p.unreachable_count.to_string(),
    ]
}

const PATH_COLUMNS: [&str; 8] = [
    "alpha",
    "beta",
    "run",
    "sum_hops",
    "mean_hops",
    "max_hops",
    "reachable",
    "unreachable",
];

/// One row per run of shortest-path-to-genesis statistics.
pub fn cmd_paths(s: &Settings) -> Result<Vec<PathBuf>> {
    let (cfg, dags) = load_graphs(s)?;
    let mut t = CsvTable::new(&PATH_COLUMNS);
    cfg.echo(&mut t, "paths");
    echo_input(&mut t, s);
    for (run, dag) in dags.iter().enumerate() {
        let summary = path_summary(&genesis_distances(dag, &cfg.genesis)?);
        t.push_row(path_row(&cfg, run, &summary));
    }
    let mut written = Vec::new();
    save(&t, &cfg.out_dir, "paths.csv", &mut written)?;
    Ok(written)
}

/// Generation sizes of `--runs` trees (default 10⁴).
pub fn cmd_gw(s: &Settings) -> Result<Vec<PathBuf>> {
    let (a, b) = require_params(s)?;
    let s = Settings {
        runs: s.runs.or(Some(DEFAULT_GW_TREES)),
        ..s.clone()
    };
    let cfg = RunConfig::from_settings(&s, a, b, 0)?;
    let generations = s.generations.unwrap_or(DEFAULT_GENERATIONS);
    let max_nodes = s.max_nodes.unwrap_or(crate::theory::gw::DEFAULT_MAX_NODES);
    let mut rng = rng_from_seed(cfg.seed);
    let ens = gw_ensemble(&cfg.params, cfg.runs, generations, max_nodes, &mut rng)?;
    let mut t = CsvTable::new(&["generation", "mean_size", "alive_fraction"]);
    cfg.echo(&mut t, "gw");
    t.comment("generations", generations)
        .comment("max_nodes", max_nodes)
        .comment("truncated_trees", ens.truncated);
    for (g, (m, alive)) in ens.mean_size.iter().zip(&ens.alive_fraction).enumerate() {
        t.push_row(vec![g.to_string(), fmt_f64(*m), fmt_f64(*alive)]);
    }
    let mut written = Vec::new();
    save(&t, &cfg.out_dir, "gw.csv", &mut written)?;
    Ok(written)
}

/// `γ`, `y*` and the regime for every grid cell.
pub fn cmd_fixpoint(s: &Settings) -> Result<Vec<PathBuf>> {
    let grid = SweepGrid::from_settings(s)?;
    let mut t = CsvTable::new(&["alpha", "beta", "regime", "gamma", "y_star", "residual"]);
    t.comment("command", "fixpoint")
        .comment("version", env!("CARGO_PKG_VERSION"));
    grid.echo(&mut t);
    for (a, b) in grid.cells() {
        let p = Params::new(a, b)?;
        let r = solve_gamma(&p)?;
        t.push_row(vec![
            fmt_f64(a),
            fmt_f64(b),
            r.regime.to_string(),
            fmt_f64(r.gamma),
            fmt_f64(r.y_star),
            fmt_f64(r.residual),
        ]);
    }
    let mut written = Vec::new();
    save(&t, &s.out_dir(), "fixpoint.csv", &mut written)?;
    Ok(written)
}

struct RunOutcome {
    traces: Vec<ComponentTrace>,
    paths: PathSummary,
}

struct CellOutcome {
    cfg: RunConfig,
    runs: Vec<RunOutcome>,
}

fn run_cell(grid: &SweepGrid, index: usize, a: f64, b: f64, stride: u32) -> Result<CellOutcome> {
    let template = Settings {
        seed: Some(child_seed(grid.template.seed.unwrap_or(0), index as u64)),
        ..grid.template.clone()
    };
    let cfg = RunConfig::from_settings(&template, a, b, DEFAULT_SWEEP_FANOUT)?;
    let runs = (0..cfg.runs)
        .into_par_iter()
        .map(|r| {
            let mut obs = trackers(&cfg, stride)?;
            let dag = generate_observed(
                cfg.params,
                cfg.n_vertices,
                cfg.run_seed(r),
                cfg.init,
                cfg.generator_kind,
                &mut obs,
            )?;
            let paths = path_summary(&genesis_distances(&dag, &cfg.genesis)?);
            Ok(RunOutcome {
                traces: obs.0.into_iter().map(ComponentTracker::into_trace).collect(),
                paths,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CellOutcome { cfg, runs })
}

fn is_marker(a: f64, b: f64) -> bool {
    (a - 2.0 * (b + 1.0)).abs() <= 1e-9 * a.max(1.0)
}

/// Runs every grid cell and writes the aggregated outputs. Returns the
/// written files and the number of failed cells.
pub fn cmd_sweep(s: &Settings) -> Result<(Vec<PathBuf>, usize)> {
    let grid = SweepGrid::from_settings(s)?;
    let out = s.out_dir();
    let n = s.nodes.unwrap_or(DEFAULT_NODES);
    let stride = stride_for(s, n);
    let cells = grid.cells();
    let mut written = Vec::new();
    let mut failed = 0;

    let mut paths_grid = CsvTable::new(&[
        "alpha",
        "beta",
        "runs",
        "mean_sum_hops",
        "std_sum_hops",
        "mean_mean_hops",
        "std_mean_hops",
        "pooled_mean_hops",
        "mean_outdegree",
        "outdegree_two_marker",
    ]);
    let mut paths_runs = CsvTable::new(&PATH_COLUMNS);
    let mut survival = CsvTable::new(&[
        "alpha",
        "beta",
        "root",
        "runs",
        "survived",
        "died",
        "undecided",
        "mean_gamma_over_n_survived",
        "gamma_theory",
        "y_star",
    ]);
    let mut echoed = false;

    for (i, &(a, b)) in cells.iter().enumerate() {
        let cell = match run_cell(&grid, i, a, b, stride) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("sweep: cell alpha={a} beta={b} failed: {e}");
                failed += 1;
                continue;
            }
        };
        let cfg = &cell.cfg;
        if !echoed {
            for t in [&mut paths_grid, &mut paths_runs, &mut survival] {
                cfg.echo(t, "sweep");
                grid.echo(t);
                t.comment("stride", stride);
            }
            echoed = true;
        }
        let fixed = match solve_gamma(&cfg.params) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("sweep: cell alpha={a} beta={b} failed: {e}");
                failed += 1;
                continue;
            }
        };

        for (slot, &root) in cfg.tracked_roots.iter().enumerate() {
            let traces: Vec<&ComponentTrace> = cell.runs.iter().map(|r| &r.traces[slot]).collect();
            let mut t = CsvTable::new(&[
                "n",
                "mean_gamma",
                "std_gamma",
                "mean_gamma_over_n",
                "std_gamma_over_n",
            ]);
            cfg.echo(&mut t, "sweep");
            t.comment("stride", stride).comment("trace_root", root);
            for (k, sample) in traces[0].samples.iter().enumerate() {
                let g: Vec<f64> = traces.iter().map(|tr| tr.samples[k].gamma as f64).collect();
                let gn: Vec<f64> = traces.iter().map(|tr| tr.samples[k].gamma_over_n()).collect();
                let (mg, sg) = mean_std(&g);
                let (mgn, sgn) = mean_std(&gn);
                t.push_row(vec![
                    sample.n.to_string(),
                    fmt_f64(mg),
                    fmt_f64(sg),
                    fmt_f64(mgn),
                    fmt_f64(sgn),
                ]);
            }
            let name = format!("sweep_component_alpha{a}_beta{b}_root{root}.csv");
            save(&t, &out, &name, &mut written)?;

            let mut counts = [0usize; 3];
            let mut survived_fracs = Vec::new();
            for tr in &traces {
                let last = tr.last().expect("horizon is always sampled");
                match Survival::classify(last.weight_over_n(), fixed.y_star) {
                    Survival::Survived => {
                        counts[0] += 1;
                        survived_fracs.push(last.gamma_over_n());
                    }
                    Survival::Died => counts[1] += 1,
                    Survival::Undecided => counts[2] += 1,
                }
            }
            survival.push_row(vec![
                fmt_f64(a),
                fmt_f64(b),
                root.to_string(),
                traces.len().to_string(),
                counts[0].to_string(),
                counts[1].to_string(),
                counts[2].to_string(),
                fmt_f64(mean_std(&survived_fracs).0),
                fmt_f64(fixed.gamma),
                fmt_f64(fixed.y_star),
            ]);
        }

        let sums: Vec<f64> = cell.runs.iter().map(|r| r.paths.sum_hops as f64).collect();
        let means: Vec<f64> = cell.runs.iter().filter_map(|r| r.paths.mean_hops).collect();
        let total_sum: u64 = cell.runs.iter().map(|r| r.paths.sum_hops).sum();
        let total_reach: u64 = cell.runs.iter().map(|r| r.paths.reachable_count).sum();
        let (ms, ss) = mean_std(&sums);
        let (mm, sm) = mean_std(&means);
        paths_grid.push_row(vec![
            fmt_f64(a),
            fmt_f64(b),
            cell.runs.len().to_string(),
            fmt_f64(ms),
            fmt_f64(ss),
            fmt_f64(mm),
            fmt_f64(sm),
            fmt_f64(total_sum as f64 / total_reach as f64),
            fmt_f64(cfg.params.mean_degree()),
            (is_marker(a, b) as u8).to_string(),
        ]);
        for (r, run) in cell.runs.iter().enumerate() {
            paths_runs.push_row(path_row(cfg, r, &run.paths));
        }
        eprintln!("sweep: {}/{} cells done (alpha={a}, beta={b})", i + 1, cells.len());
    }

    let mut marker = CsvTable::new(&["beta", "alpha_marker", "mean_outdegree", "in_grid"]);
    marker.comment("command", "sweep");
    grid.echo(&mut marker);
    for &b in &grid.betas {
        let am = 2.0 * (b + 1.0);
        let in_grid = grid.alphas.iter().any(|&a| is_marker(a, b));
        marker.push_row(vec![fmt_f64(b), fmt_f64(am), fmt_f64(2.0), (in_grid as u8).to_string()]);
    }
    if echoed {
        save(&survival, &out, "sweep_survival.csv", &mut written)?;
        save(&paths_grid, &out, "sweep_paths.csv", &mut written)?;
        save(&paths_runs, &out, "sweep_paths_runs.csv", &mut written)?;
    }
    save(&marker, &out, "sweep_marker.csv", &mut written)?;
    Ok((written, failed))
}
