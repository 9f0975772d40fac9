//! The `rhk` command line: one subcommand per module, JSON on stdout.
//!
//! Exit codes: 0 success, 1 a checked property fails, 2 usage or input error.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::Zero;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{fraction_string, parse_ratio, Ratio};
use crate::connectivity::{closed_walk_one_mod_k, find_arc, find_switchers, is_seq_tightly_connected};
use crate::framework::{pipeline_vicinity_to_framework, verify_framework, FrameworkOptions};
use crate::hypergraph::{check_perturbed_degree, KGraph};
use crate::instances::{
    achieved_degree, check_x_trap, complete_system, random_system_jobs, xy_obstruction, xy_obstruction_unchecked,
};
use crate::io::{self, Instance, IoError};
use crate::matching::{
    is_robustly_matchable, lift_link_matchings, max_fractional_matching_with, uniform_weights, Arithmetic,
    RobustForm, RobustOptions,
};
use crate::sequential::{shorten_walk, validate, WalkCheck};
use crate::solver::{
    check_absorbing_path, find_rainbow_hamilton, gadget_absorption_instance, threshold_probe,
    verify_absorbing_gadget, AbsorbStatus, AbsorptionQuery, Pruning, SearchConfig, SearchStatus,
};
use crate::vicinity::{build_max_vicinity, verify_vicinity};

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "rhk", version, about = "Rainbow tight Hamilton cycles in hypergraph systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Minimum degrees and the perturbed-degree check.
    Degree(DegreeArgs),
    /// Validate or shorten a sequential walk.
    Walk {
        #[command(subcommand)]
        action: WalkAction,
    },
    /// Tight connectivity report for one color.
    Connect {
        #[command(subcommand)]
        action: ConnectAction,
    },
    /// Fractional matchings.
    Match(MatchArgs),
    /// Build or verify maximal vicinities.
    Vicinity {
        #[command(subcommand)]
        action: VicinityAction,
    },
    /// Check F1-F5 on a (1,k)-graph.
    Framework {
        #[command(subcommand)]
        action: FrameworkAction,
    },
    /// Run cleanup, vicinity and framework stages end to end.
    Pipeline {
        #[command(subcommand)]
        action: PipelineAction,
    },
    /// Search for a rainbow Hamilton cycle.
    Solve(SolveArgs),
    /// Empirical threshold table on random systems.
    Probe(ProbeArgs),
    /// Absorbing gadgets and absorbing paths.
    Absorb {
        #[command(subcommand)]
        action: AbsorbAction,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    Complete {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Minimum relative (k-2)-degree to reach.
        #[arg(long)]
        target: String,
    },
    Xy {
        #[arg(long)]
        n: usize,
        #[arg(long = "x-size")]
        x_size: usize,
        /// Allow |X| ≥ n/3.
        #[arg(long)]
        unchecked: bool,
        /// Also run the X-trap check.
        #[arg(long)]
        trap: bool,
    },
}

#[derive(Debug, Args)]
struct DegreeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Size of the sets; defaults to k-2 (or 1 when k = 2).
    #[arg(long)]
    d: Option<usize>,
    /// Exit 1 when the minimum relative degree is below this value.
    #[arg(long = "at-least")]
    at_least: Option<String>,
    /// With --delta, run the perturbed-degree check on the (1,k)-graph.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    delta: Option<String>,
}

#[derive(Debug, Subcommand)]
enum WalkAction {
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        walk: PathBuf,
    },
    Shorten {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        walk: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum ConnectAction {
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        color: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MatchMode {
    Max,
    Robust,
    Lift,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    Size,
    Equality,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArithArg {
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Args)]
struct MatchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "max")]
    mode: MatchMode,
    /// Color whose graph is matched (max and robust).
    #[arg(long, default_value_t = 0)]
    color: usize,
    #[arg(long, default_value = "0")]
    gamma: String,
    #[arg(long, value_enum, default_value = "size")]
    form: FormArg,
    #[arg(long)]
    divisor: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    arithmetic: ArithArg,
}

#[derive(Debug, Args)]
struct Thresholds {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "0")]
    alpha: String,
    #[arg(long)]
    gamma: String,
    #[arg(long)]
    delta: String,
}

#[derive(Debug, Subcommand)]
enum VicinityAction {
    Build {
        #[arg(long)]
        input: PathBuf,
    },
    Verify(Thresholds),
}

#[derive(Debug, Subcommand)]
enum FrameworkAction {
    Verify {
        #[command(flatten)]
        t: Thresholds,
        /// Divisor for robust matchability of the window graphs.
        #[arg(long)]
        divisor: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum PipelineAction {
    Run {
        #[command(flatten)]
        t: Thresholds,
        /// Perturbed edges to clean up, as an instance on the same points.
        #[arg(long)]
        perturbed: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PruningArg {
    None,
    Hall,
    HallDegree,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Canonical order; absence is only reported in this mode.
    #[arg(long)]
    exact: bool,
    /// Milliseconds.
    #[arg(long = "time-limit")]
    time_limit: Option<u64>,
    #[arg(long = "node-limit")]
    node_limit: Option<u64>,
    #[arg(long, value_enum, default_value = "hall-degree")]
    pruning: PruningArg,
    #[arg(long = "hall-every", default_value_t = 1)]
    hall_every: usize,
    /// Leave out wall-clock time so output is byte-stable.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long = "node-limit")]
    node_limit: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum AbsorbAction {
    /// Build the canonical gadget, verify it and absorb (T, O) through it.
    Gadget {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Search an absorbing path for a query `{path, points, colors}`.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

struct Ctx {
    seed: u64,
    explicit_seed: bool,
    jobs: usize,
}

fn ratio_arg(name: &str, text: &str) -> CliResult<Ratio> {
    parse_ratio(text).map_err(|_| CliError::Usage(format!("--{name}: not a number: {text}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load(path: &Path) -> CliResult<Instance> {
    Ok(io::load_instance(path)?)
}

fn parse_grid(text: &str) -> CliResult<Vec<Ratio>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) =
                (ratio_arg("grid", start)?, ratio_arg("grid", stop)?, ratio_arg("grid", step)?);
            if step <= Ratio::zero() {
                return Err(CliError::Usage("--grid: step must be positive".into()));
            }
            let mut out = Vec::new();
            let mut x = start;
            while x <= stop {
                out.push(x.clone());
                x += &step;
            }
            Ok(out)
        }
        [_] => text.split(',').map(|s| ratio_arg("grid", s)).collect(),
        _ => Err(CliError::Usage(format!("--grid: expected start:stop:step, got {text}"))),
    }
}

fn gen(kind: &GenKind, ctx: &Ctx) -> CliResult<(Value, bool)> {
    let (sys, meta, ok) = match kind {
        GenKind::Complete { n, k } => {
            let sys = complete_system(*n, *k)?;
            (sys, json!({"generator": "complete", "n": n, "k": k}), true)
        }
        GenKind::Random { n, k, target } => {
            let t = ratio_arg("target", target)?;
            let sys = random_system_jobs(*n, *k, &t, ctx.seed, ctx.jobs)?;
            let achieved = achieved_degree(&sys);
            let meta = json!({
                "generator": "random", "n": n, "k": k, "target": fraction_string(&t),
                "seed": ctx.seed, "achievedDegree": fraction_string(&achieved),
            });
            (sys, meta, true)
        }
        GenKind::Xy { n, x_size, unchecked, trap } => {
            let sys = if *unchecked { xy_obstruction_unchecked(*n, *x_size)? } else { xy_obstruction(*n, *x_size)? };
            let delta1 = sys.min_degree(1)?.1.relative;
            let mut meta = json!({
                "generator": "xy", "n": n, "k": 3, "xSize": x_size,
                "achievedDelta1": fraction_string(&delta1),
            });
            let mut ok = true;
            if *trap {
                let x: Vec<usize> = (0..*x_size).collect();
                let report = check_x_trap(&sys, &x)?;
                ok = report.holds;
                meta["xTrap"] = to_value(&report);
            }
            (sys, meta, ok)
        }
    };
    Ok((to_value(&Instance::from_system(&sys, Some(meta))), ok))
}

fn degree(a: &DegreeArgs) -> CliResult<(Value, bool)> {
    let inst = load(&a.input)?;
    let d = a.d.unwrap_or(if inst.k > 2 { inst.k - 2 } else { 1 });
    let mut rows = Vec::new();
    let mut min: Option<crate::hypergraph::DegreeReport> = None;
    for (c, edges) in inst.graphs.iter().enumerate() {
        let g = KGraph::new(inst.n, inst.k, edges.iter().cloned())?;
        let mut rep = g.min_degree(d)?;
        rep.color = Some(c);
        if min.as_ref().is_none_or(|m| rep.relative < m.relative) {
            min = Some(rep.clone());
        }
        rows.push(rep);
    }
    let mut ok = true;
    if let (Some(floor), Some(m)) = (&a.at_least, &min) {
        ok &= m.relative >= ratio_arg("at-least", floor)?;
    }
    let mut out = json!({"d": d, "perColor": to_value(&rows), "minimum": to_value(&min)});
    if let Some(delta) = &a.delta {
        let alpha = ratio_arg("alpha", a.alpha.as_deref().unwrap_or("0"))?;
        let report = check_perturbed_degree(&inst.to_onek()?, &alpha, &ratio_arg("delta", delta)?);
        ok &= report.holds();
        out["perturbed"] = io::perturbed_report_json(&report);
    }
    Ok((out, ok))
}

fn walk(action: &WalkAction) -> CliResult<(Value, bool)> {
    match action {
        WalkAction::Validate { input, walk } => {
            let g = load(input)?.to_onek()?;
            let w = io::load_walk(walk)?;
            let check = validate(&g, &w)?;
            let invalid = match check {
                WalkCheck::Valid => None,
                WalkCheck::InvalidWindow(i) => Some(i),
            };
            let ok = invalid.is_none();
            Ok((json!({"valid": ok, "invalidWindow": invalid, "rainbow": w.is_rainbow(), "length": w.len()}), ok))
        }
        WalkAction::Shorten { input, walk } => {
            let g = load(input)?.to_onek()?;
            let w = io::load_walk(walk)?;
            Ok((to_value(&shorten_walk(&g, &w)?), true))
        }
    }
}

fn connect(input: &Path, color: usize) -> CliResult<(Value, bool)> {
    let h = load(input)?.to_onek()?;
    if color >= h.colors() {
        return Err(crate::Error::ColorOutOfRange { color, count: h.colors() }.into());
    }
    let connected = is_seq_tightly_connected(&h, color)?;
    let vic = crate::vicinity::build_max_vicinity_for(&h, color)?;
    let switchers: Vec<Value> = vic
        .iter()
        .map(|(s, c)| json!({"set": s, "switchers": find_switchers(c)}))
        .collect();
    let closed = closed_walk_one_mod_k(&h, &vic).ok();
    let out = json!({
        "color": color,
        "tightlyConnected": connected,
        "switchers": switchers,
        "arc": to_value(&find_arc(&vic)),
        "closedWalkOneModK": to_value(&closed),
    });
    Ok((out, connected))
}

fn matching(a: &MatchArgs, ctx: &Ctx) -> CliResult<(Value, bool)> {
    let inst = load(&a.input)?;
    let arithmetic = match a.arithmetic {
        ArithArg::Auto => Arithmetic::Auto,
        ArithArg::Exact => Arithmetic::Exact,
        ArithArg::Float => Arithmetic::Float,
    };
    let graph = |c: usize| -> CliResult<KGraph> {
        let edges = inst
            .graphs
            .get(c)
            .ok_or(crate::Error::ColorOutOfRange { color: c, count: inst.graphs.len() })?;
        Ok(KGraph::new(inst.n, inst.k, edges.iter().cloned())?)
    };
    match a.mode {
        MatchMode::Max => {
            let g = graph(a.color)?;
            let m = max_fractional_matching_with(&g, &uniform_weights(inst.n), arithmetic)?;
            let out = json!({
                "value": fraction_string(&m.size()),
                "density": fraction_string(&m.density()),
                "exact": m.exact,
                "weights": m.weight_strings(),
            });
            Ok((out, true))
        }
        MatchMode::Robust => {
            let opts = RobustOptions {
                form: match a.form {
                    FormArg::Size => RobustForm::Size,
                    FormArg::Equality => RobustForm::Equality,
                },
                divisor: a.divisor,
                arithmetic,
                seed: ctx.seed,
                ..RobustOptions::default()
            };
            let report = is_robustly_matchable(&graph(a.color)?, &ratio_arg("gamma", &a.gamma)?, &opts)?;
            let ok = report.holds;
            Ok((to_value(&report), ok))
        }
        MatchMode::Lift => {
            let r = inst.to_onek()?;
            let b = uniform_weights(r.n());
            let per_color = (0..r.colors())
                .map(|c| max_fractional_matching_with(&r.link(c, &[])?, &b, arithmetic))
                .collect::<crate::Result<Vec<_>>>()?;
            let lifted = lift_link_matchings(&r, &per_color, &b)?;
            Ok((to_value(&lifted), true))
        }
    }
}

fn vicinity(action: &VicinityAction) -> CliResult<(Value, bool)> {
    match action {
        VicinityAction::Build { input } => {
            let r = load(input)?.to_onek()?;
            let family = build_max_vicinity(&r)?;
            Ok((json!({"vicinities": family.iter().map(io::vicinity_json).collect::<Vec<_>>()}), true))
        }
        VicinityAction::Verify(t) => {
            let r = load(&t.input)?.to_onek()?;
            let family = build_max_vicinity(&r)?;
            let report = verify_vicinity(&r, &family, &ratio_arg("gamma", &t.gamma)?, &ratio_arg("delta", &t.delta)?)?;
            let ok = report.holds();
            Ok((to_value(&report), ok))
        }
    }
}

fn framework_opts(divisor: Option<usize>, ctx: &Ctx) -> FrameworkOptions {
    let mut opts = FrameworkOptions::default();
    opts.robust.divisor = divisor;
    opts.robust.seed = ctx.seed;
    opts
}

fn framework(t: &Thresholds, divisor: Option<usize>, ctx: &Ctx) -> CliResult<(Value, bool)> {
    let h = load(&t.input)?.to_onek()?;
    let report = verify_framework(
        &h,
        &ratio_arg("alpha", &t.alpha)?,
        &ratio_arg("gamma", &t.gamma)?,
        &ratio_arg("delta", &t.delta)?,
        &framework_opts(divisor, ctx),
    )?;
    let ok = report.holds();
    Ok((to_value(&report), ok))
}

fn pipeline(t: &Thresholds, perturbed: Option<&Path>, ctx: &Ctx) -> CliResult<(Value, bool)> {
    let r = load(&t.input)?.to_onek()?;
    let p = perturbed.map(|p| load(p)?.to_onek().map_err(CliError::from)).transpose()?;
    let (_, report) = pipeline_vicinity_to_framework(
        &r,
        p.as_ref(),
        &ratio_arg("alpha", &t.alpha)?,
        &ratio_arg("gamma", &t.gamma)?,
        &ratio_arg("delta", &t.delta)?,
        &framework_opts(None, ctx),
    )?;
    let ok = report.implications_hold();
    Ok((to_value(&report), ok))
}

fn solve(a: &SolveArgs, ctx: &Ctx) -> CliResult<(Value, bool)> {
    let sys = load(&a.input)?.to_system()?;
    let cfg = SearchConfig {
        time_limit: a.time_limit.map(Duration::from_millis),
        node_limit: a.node_limit,
        seed: ctx.seed,
        pruning: match a.pruning {
            PruningArg::None => Pruning::None,
            PruningArg::Hall => Pruning::Hall,
            PruningArg::HallDegree => Pruning::HallDegree,
        },
        hall_every: a.hall_every.max(1),
        exact: a.exact,
        jobs: ctx.jobs,
    };
    let outcome = find_rainbow_hamilton(&sys, &cfg)?;
    let mut out = json!({"status": to_value(&outcome.status), "nodes": outcome.nodes});
    if let Some(c) = &outcome.cycle {
        out["cycle"] = to_value(c);
    }
    if !(a.reproducible || ctx.explicit_seed) {
        out["millis"] = json!(outcome.millis);
    }
    Ok((out, outcome.status == SearchStatus::Found))
}

fn probe(a: &ProbeArgs, ctx: &Ctx) -> CliResult<(Value, bool)> {
    let grid = parse_grid(&a.grid)?;
    let cfg = SearchConfig { node_limit: a.node_limit, ..SearchConfig::default() };
    let table = threshold_probe(a.k, a.n, &grid, a.trials, ctx.seed, &cfg)?;
    Ok((to_value(&table), true))
}

fn absorb(action: &AbsorbAction) -> CliResult<(Value, bool)> {
    match action {
        AbsorbAction::Gadget { k, budget } => {
            let inst = gadget_absorption_instance(*k)?;
            let report = verify_absorbing_gadget(&inst.graph, &inst.gadget, &inst.t, &inst.o)?;
            let q = AbsorptionQuery { path: inst.path.clone(), points: inst.t.clone(), colors: inst.o.clone() };
            let outcome = check_absorbing_path(&inst.graph, &q, *budget)?;
            let ok = report.holds() && outcome.status == AbsorbStatus::Found;
            let out = json!({
                "instance": to_value(&Instance::from_onek(&inst.graph, None)),
                "gadget": to_value(&inst.gadget),
                "t": inst.t,
                "o": inst.o,
                "report": to_value(&report),
                "path": to_value(&inst.path),
                "absorption": to_value(&outcome),
            });
            Ok((out, ok))
        }
        AbsorbAction::Check { input, query, budget } => {
            let g = load(input)?.to_onek()?;
            let q: AbsorptionQuery = io::load_json(query)?;
            let outcome = check_absorbing_path(&g, &q, *budget)?;
            let ok = outcome.status == AbsorbStatus::Found;
            Ok((to_value(&outcome), ok))
        }
    }
}

fn execute(cli: &Cli) -> CliResult<(Value, bool)> {
    let ctx = Ctx { seed: cli.seed.unwrap_or(0), explicit_seed: cli.seed.is_some(), jobs: cli.jobs.max(1) };
    match &cli.command {
        Command::Gen { kind } => gen(kind, &ctx),
        Command::Degree(a) => degree(a),
        Command::Walk { action } => walk(action),
        Command::Connect { action: ConnectAction::Check { input, color } } => connect(input, *color),
        Command::Match(a) => matching(a, &ctx),
        Command::Vicinity { action } => vicinity(action),
        Command::Framework { action: FrameworkAction::Verify { t, divisor } } => framework(t, *divisor, &ctx),
        Command::Pipeline { action: PipelineAction::Run { t, perturbed } } => pipeline(t, perturbed.as_deref(), &ctx),
        Command::Solve(a) => solve(a, &ctx),
        Command::Probe(a) => probe(a, &ctx),
        Command::Absorb { action } => absorb(action),
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("RHK_LOG", "error");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `argv` (program name first), runs the command and prints JSON.
/// Returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok((value, ok)) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON values print") + "\n";
            if let Some(path) = &cli.output {
                if let Err(e) = io::write_text(path, &text) {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            print!("{text}");
            if ok {
                0
            } else {
                log::info!("property check failed");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
