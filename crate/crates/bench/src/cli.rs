//! Command-line front end. Exit codes: 0 on success, 1 when the input is
//! well-formed but the request fails (no solution, invalid schedule, I/O),
//! 2 on usage errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use divload_core::heuristics::{multi_inst, multi_inst_uncapped, simple_schedule, single_inst};
use divload_core::io::{Instance, ScheduleFile};
use divload_core::lp::{build_lp, export_lp_text, optimal_schedule, time_scale, BuildOptions};
use divload_core::sim::{replay, SimConfig, SimMode};
use divload_core::solver::SolverConfig;
use divload_core::{validate_schedule, InstallmentCounts, Schedule, ValidationOptions};
use thiserror::Error;

use crate::bench::{default_strategies, parse_strategies, run_bench};
use crate::gantt::render_gantt;
use crate::gen::{
    bandwidth_of, generate_instances, generate_one, latency_for_bandwidth, Combo, GenConfig,
    PowerDist, VolumeRange,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "divload",
    version,
    about = "Multi-installment divisible load scheduling on linear chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate random instances.
    Generate(GenerateArgs),
    /// Solve the LP for prescribed installment counts.
    Solve(SolveArgs),
    /// Run a heuristic strategy.
    Heuristic(HeuristicArgs),
    /// Check a schedule against every constraint.
    Validate(ValidateArgs),
    /// Replay a schedule with latency and start-up costs.
    Simulate(SimulateArgs),
    /// Compare strategies on a generated grid.
    Bench(BenchArgs),
    /// Render a schedule as an SVG timeline.
    Gantt(GanttArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = 50)]
    pub loads: usize,
    /// Every combination of speed distribution, volume range and ratio.
    #[arg(long, conflicts_with = "single")]
    pub grid: bool,
    /// One instance from the combination given by --power, --volume, --ccr.
    #[arg(long)]
    pub single: bool,
    #[arg(long, default_value_t = 100)]
    pub per_combo: usize,
    #[arg(long, value_enum, default_value_t = PowerArg::Homogeneous)]
    pub power: PowerArg,
    #[arg(long, value_enum, default_value_t = VolumeArg::Large)]
    pub volume: VolumeArg,
    #[arg(long, default_value_t = 1.0)]
    pub ccr: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PowerArg {
    Homogeneous,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VolumeArg {
    Large,
    Small,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Comma-separated installment count per load.
    #[arg(long, conflicts_with = "uniform_q")]
    pub installments: Option<String>,
    #[arg(long)]
    pub uniform_q: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormArg::Reduced)]
    pub form: FormArg,
    /// Add the extra forwarding constraint before computing.
    #[arg(long)]
    pub strict_forward: bool,
    /// Also write the LP in text form.
    #[arg(long)]
    pub export_lp: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormArg {
    Full,
    Reduced,
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    #[arg(long, value_enum)]
    pub name: HeuristicName,
    #[arg(long, default_value_t = 100)]
    pub cap: usize,
    /// Run the greedy without an installment cap.
    #[arg(long)]
    pub uncapped: bool,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HeuristicName {
    Simple,
    SingleInst,
    MultiInst,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub strict_forward: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, value_enum, default_value_t = LatencyMap::None)]
    pub latency_map: LatencyMap,
    #[arg(long, default_value_t = 0.0)]
    pub startup: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long)]
    pub skip_empty: bool,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LatencyMap {
    /// The instance's latencies, or derived from link bandwidth.
    Default,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exact,
    Earliest,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON generator configuration; the desk grid when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub strategies: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GanttArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn main_with(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(msg) => {
            if !msg.is_empty() {
                println!("{msg}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::read(path).map_err(failed)
}

fn load_schedule(path: &Path, inst: &Instance) -> Result<Schedule, CliError> {
    ScheduleFile::read(path)
        .and_then(|f| f.into_schedule(&inst.platform, &inst.workload))
        .map_err(failed)
}

fn save_schedule(path: &Option<PathBuf>, s: &Schedule) -> Result<(), CliError> {
    if let Some(p) = path {
        ScheduleFile::from_schedule(s).write(p).map_err(failed)?;
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| failed(format!("cannot write {}: {e}", path.display())))
}

pub fn run(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Heuristic(a) => heuristic(a),
        Command::Validate(a) => validate(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
        Command::Gantt(a) => gantt(a),
    }
}

fn generate(a: GenerateArgs) -> Result<String, CliError> {
    if !a.grid && !a.single {
        return Err(CliError::Usage("generate needs --grid or --single".into()));
    }
    if a.m == 0 || a.loads == 0 || a.per_combo == 0 {
        return Err(CliError::Usage(
            "--m, --loads and --per-combo must be at least 1".into(),
        ));
    }
    let instances = if a.grid {
        generate_instances(&GenConfig {
            m: a.m,
            n_loads: a.loads,
            instances_per_combo: a.per_combo,
            seed: a.seed,
            ..GenConfig::default()
        })
    } else {
        let combo = Combo {
            power: match a.power {
                PowerArg::Homogeneous => PowerDist::Homogeneous,
                PowerArg::Uniform => PowerDist::Uniform,
            },
            volume: match a.volume {
                VolumeArg::Large => VolumeRange::Large,
                VolumeArg::Small => VolumeRange::Small,
            },
            ccr: a.ccr,
        };
        if !crate::gen::CCR_SET.contains(&a.ccr) {
            return Err(CliError::Usage(format!(
                "--ccr {} is not in the ratio set",
                a.ccr
            )));
        }
        vec![generate_one(a.m, a.loads, combo, a.seed, 0)]
    };
    std::fs::create_dir_all(&a.out)
        .map_err(|e| failed(format!("cannot create {}: {e}", a.out.display())))?;
    for (k, inst) in instances.iter().enumerate() {
        inst.write(&a.out.join(format!("instance_{k:05}.json")))
            .map_err(failed)?;
    }
    Ok(format!(
        "wrote {} instances to {}",
        instances.len(),
        a.out.display()
    ))
}

fn solve(a: SolveArgs) -> Result<String, CliError> {
    let inst = load_instance(&a.instance)?;
    let wl = &inst.workload;
    let q = match (&a.installments, a.uniform_q) {
        (Some(list), None) => {
            let v = list
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(format!("--installments: {e}")))?;
            InstallmentCounts::new(v)
                .map_err(|e| CliError::Usage(format!("--installments: {e}")))?
        }
        (None, Some(q)) => InstallmentCounts::uniform(wl.len(), q)
            .map_err(|e| CliError::Usage(format!("--uniform-q: {e}")))?,
        _ => {
            return Err(CliError::Usage(
                "solve needs --installments or --uniform-q".into(),
            ))
        }
    };
    if q.len() != wl.len() {
        return Err(CliError::Usage(format!(
            "--installments has {} entries for {} loads",
            q.len(),
            wl.len()
        )));
    }
    let opts = BuildOptions {
        form: match a.form {
            FormArg::Full => divload_core::lp::LpForm::Full,
            FormArg::Reduced => divload_core::lp::LpForm::Reduced,
        },
        strict_forward: a.strict_forward,
    };
    if let Some(path) = &a.export_lp {
        let scaled = inst.platform.scaled(1.0 / time_scale(&inst.platform, wl));
        let prob = build_lp(&scaled, wl, &q, &opts).map_err(failed)?;
        write(path, &export_lp_text(&prob))?;
    }
    let opt = optimal_schedule(&inst.platform, wl, &q, &opts, &SolverConfig::default())
        .map_err(failed)?;
    save_schedule(&a.out, &opt.schedule)?;
    Ok(format!(
        "makespan {:e} (lp {:e}, {} rows, {} vars, {} iterations)",
        opt.makespan(),
        opt.lp_makespan,
        opt.rows,
        opt.vars,
        opt.iterations
    ))
}

fn heuristic(a: HeuristicArgs) -> Result<String, CliError> {
    let inst = load_instance(&a.instance)?;
    let (p, wl) = (&inst.platform, &inst.workload);
    let out = match a.name {
        HeuristicName::Simple => simple_schedule(p, wl),
        HeuristicName::SingleInst => single_inst(p, wl),
        HeuristicName::MultiInst if a.uncapped => multi_inst_uncapped(p, wl),
        HeuristicName::MultiInst => {
            multi_inst(p, wl, a.cap).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    match &out.schedule {
        Some(s) => {
            save_schedule(&a.out, s)?;
            Ok(format!(
                "makespan {:e}, installments per load {:?}",
                s.makespan, out.diagnostics.installments
            ))
        }
        None => {
            let d = &out.diagnostics;
            let mut msg = format!(
                "no solution at load {}: {}",
                d.failed_load.map_or(0, |n| n + 1),
                d.reason.as_deref().unwrap_or("unknown")
            );
            if let Some(b) = d.coverage_bound {
                msg.push_str(&format!(
                    "; coverage bound {b} {} 1",
                    if b < 1.0 { "<" } else { ">=" }
                ));
            }
            Err(CliError::Failed(msg))
        }
    }
}

fn validate(a: ValidateArgs) -> Result<String, CliError> {
    let inst = load_instance(&a.instance)?;
    let s = load_schedule(&a.schedule, &inst)?;
    let opts = ValidationOptions {
        tol: a.tol,
        strict_forward: a.strict_forward,
    };
    let report = validate_schedule(&inst.platform, &inst.workload, &s, &opts).map_err(failed)?;
    if report.ok {
        Ok(format!("valid, makespan {:e}", s.makespan))
    } else {
        let mut msg = format!(
            "{} violations in constraint families {:?}",
            report.violations.len(),
            report.families()
        );
        for v in report.violations.iter().take(10) {
            msg.push_str(&format!("\n  {v}"));
        }
        Err(CliError::Failed(msg))
    }
}

fn simulate(a: SimulateArgs) -> Result<String, CliError> {
    let inst = load_instance(&a.instance)?;
    let s = load_schedule(&a.schedule, &inst)?;
    let link_latency = match a.latency_map {
        LatencyMap::None => Vec::new(),
        LatencyMap::Default => inst.latency.clone().unwrap_or_else(|| {
            inst.platform
                .z()
                .iter()
                .map(|&z| latency_for_bandwidth(bandwidth_of(z)))
                .collect()
        }),
    };
    let cfg = SimConfig {
        link_latency,
        startup: a.startup,
        mode: match a.mode {
            ModeArg::Exact => SimMode::ReplayExact,
            ModeArg::Earliest => SimMode::Earliest,
        },
        skip_empty: a.skip_empty,
    };
    let r = replay(&inst.platform, &inst.workload, &s, &cfg).map_err(failed)?;
    if let Some(path) = &a.trace {
        let f = std::fs::File::create(path)
            .map_err(|e| failed(format!("cannot write {}: {e}", path.display())))?;
        r.write_trace_csv(f).map_err(failed)?;
    }
    Ok(format!(
        "realized makespan {:e} (planned {:e}), {} one-port violations",
        r.realized_makespan,
        s.makespan,
        r.violations.len()
    ))
}

fn bench(a: BenchArgs) -> Result<String, CliError> {
    let cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| failed(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<GenConfig>(&text)
                .map_err(|e| CliError::Usage(format!("--config: {e}")))?
        }
        None => GenConfig::desk(0),
    };
    cfg.check().map_err(CliError::Usage)?;
    let strategies = match &a.strategies {
        Some(list) => parse_strategies(list).map_err(|e| CliError::Usage(e.to_string()))?,
        None => default_strategies(),
    };
    let instances = generate_instances(&cfg);
    let report = run_bench(&instances, &strategies, Some(cfg)).map_err(|e| match e {
        crate::bench::BenchError::NoStrategies => CliError::Usage(e.to_string()),
        other => failed(other),
    })?;
    write(&a.out, &report.to_csv().map_err(failed)?)?;
    write(&a.out.with_extension("json"), &report.to_json())?;
    let mut msg = String::new();
    for r in &report.rows {
        msg.push_str(&format!(
            "{:<14} avg {:.4} std {:.4} max {:.4} failures {}/{}\n",
            r.strategy, r.avg_rel, r.std_rel, r.max_rel, r.failures, r.n_instances
        ));
    }
    Ok(msg.trim_end().to_string())
}

fn gantt(a: GanttArgs) -> Result<String, CliError> {
    let inst = load_instance(&a.instance)?;
    let s = load_schedule(&a.schedule, &inst)?;
    write(&a.out, &render_gantt(&inst.platform, &s))?;
    Ok(String::new())
}
