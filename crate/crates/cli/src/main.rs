use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use ots_core::bench::{
    parse_approaches, performance_profile, profile_to_csv, read_records, render_split_summary, render_summary,
    run_benchmark, split_instances, summarize, summarize_subset, summary_to_csv, write_records, BenchConfig,
};
use ots_core::formulation::{Bounds, LineStatus};
use ots_core::milp::{backend_identity, SolveControls};
use ots_core::netmodel::{generate_instances, load_instances, load_network, save_instances, Instance, LineId, Network};
use ots_core::oracle::{brute_force, DEFAULT_MAX_LINES};
use ots_core::tighten::{
    initial_bounds, run_tightening, solve_ots, solve_with_bounds, Mode, Propagation, TightenConfig, TightenReport,
};
use ots_core::topo::{build_line_graph, neighborhood};

/// Failure classes mapped to exit codes.
enum Failure {
    Data(String),
    Backend(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 2,
            Failure::Backend(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Backend(m) => m,
        }
    }
}

impl<E: Into<ots_core::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e: ots_core::Error = e.into();
        if e.is_backend() {
            Failure::Backend(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

type CliResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "ots", about = "DC optimal transmission switching with topology-aware bound tightening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample demand instances around the network's base demand.
    Gen(GenArgs),
    /// Print the line neighborhood of a line as JSON.
    Topo(TopoArgs),
    /// Tighten flow and big-M bounds for one instance and write a JSON report.
    Tighten(TightenArgs),
    /// Solve the switching problem, optionally on a tightening report's bounds.
    Solve(SolveArgs),
    /// Enumerate every topology and print the exact optimum as JSON.
    Oracle(OracleArgs),
    /// Run several approaches over an instance set and write results CSV.
    Bench(BenchArgs),
    /// Summarize an existing results CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative half-width of the uniform demand band around base demand.
    #[arg(long, default_value_t = 0.1)]
    spread: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TopoArgs {
    #[arg(long)]
    network: PathBuf,
    /// Line id.
    #[arg(long)]
    line: u32,
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    network: PathBuf,
    /// Instance file (a JSON list); the base demand is used when omitted.
    #[arg(long, alias = "instances")]
    instance: Option<PathBuf>,
    /// Position of the instance within the file.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

impl InstanceArgs {
    fn load(&self) -> Result<(Network, Instance), Failure> {
        let net = load_network(&self.network)?;
        let inst = match &self.instance {
            None => Instance::baseline(&net),
            Some(path) => {
                let all = load_instances(path, &net)?;
                all.get(self.index).cloned().ok_or_else(|| {
                    Failure::Data(format!(
                        "{} holds {} instances, index {} is out of range",
                        path.display(),
                        all.len(),
                        self.index
                    ))
                })?
            }
        };
        info!(
            "phase=load network={} buses={} lines={} seed={} index={}",
            net.name(),
            net.num_buses(),
            net.num_lines(),
            inst.seed_info.seed,
            inst.seed_info.index
        );
        Ok((net, inst))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Tbt,
    Sbt,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropagationArg {
    Seq,
    Batch,
}

impl From<PropagationArg> for Propagation {
    fn from(p: PropagationArg) -> Self {
        match p {
            PropagationArg::Seq => Propagation::Sequential,
            PropagationArg::Batch => Propagation::Batch,
        }
    }
}

#[derive(Args)]
struct TighteningOptions {
    /// Seconds per bounding problem (TBT).
    #[arg(long, default_value_t = 5.0)]
    per_problem_limit: f64,
    /// Seconds for the heuristic that sets the cost cap.
    #[arg(long, default_value_t = 10.0)]
    heuristic_budget: f64,
    #[arg(long, value_enum, default_value = "seq")]
    propagation: PropagationArg,
    #[arg(long, default_value_t = 1)]
    passes: usize,
    /// Worker threads for batch tightening and benchmark rows.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl TighteningOptions {
    fn config(&self, mode: Mode) -> TightenConfig {
        TightenConfig {
            per_problem_time_limit: self.per_problem_limit,
            heuristic_budget: self.heuristic_budget,
            propagation: self.propagation.into(),
            passes: self.passes,
            jobs: self.jobs,
            ..TightenConfig::new(mode)
        }
    }
}

#[derive(Args)]
struct TightenArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Closeness level for TBT.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Milliseconds per bounding problem for SBT.
    #[arg(long, default_value_t = 25)]
    t_ms: u64,
    #[command(flatten)]
    options: TighteningOptions,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ControlArgs {
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 1e-4)]
    gap: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl ControlArgs {
    fn controls(&self) -> SolveControls {
        SolveControls {
            time_limit: self.time_limit,
            rel_gap: self.gap,
            threads: self.threads,
            heuristic_effort: None,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InstanceArgs,
    /// Tightening report whose bounds and fixings are used.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    controls: ControlArgs,
    /// Write the final model in LP format.
    #[arg(long)]
    dump_model: Option<PathBuf>,
    /// Write the solution JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long, default_value_t = DEFAULT_MAX_LINES)]
    max_lines: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, alias = "instance")]
    instances: PathBuf,
    /// Comma-separated list, e.g. mip,tbt-0,tbt-2,sbt-25.
    #[arg(long, default_value = "mip,tbt-0,tbt-2,sbt-25")]
    approaches: String,
    #[command(flatten)]
    controls: ControlArgs,
    #[command(flatten)]
    options: TighteningOptions,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    split_fraction: f64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    /// Time limit the results were produced with; closes the profile curves.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    split_fraction: f64,
}

fn write_file(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

fn print(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
}

fn gen(a: GenArgs) -> CliResult {
    info!("phase=config command=gen count={} seed={} spread={}", a.count, a.seed, a.spread);
    let net = load_network(&a.network)?;
    let instances = generate_instances(&net, a.count, a.seed, a.spread)?;
    save_instances(&a.out, &instances)?;
    info!("phase=gen network={} written={} out={}", net.name(), instances.len(), a.out.display());
    Ok(())
}

#[derive(Serialize)]
struct TopoOutput {
    line: LineId,
    k: usize,
    neighborhood: Vec<LineId>,
}

fn topo(a: TopoArgs) -> CliResult {
    let net = load_network(&a.network)?;
    let g = build_line_graph(&net);
    let set = neighborhood(&g, LineId(a.line), a.k)?;
    print(&to_json(&TopoOutput {
        line: LineId(a.line),
        k: a.k,
        neighborhood: set.into_iter().collect(),
    }));
    Ok(())
}

fn tighten(a: TightenArgs) -> CliResult {
    let mode = match a.mode {
        ModeArg::Tbt => Mode::Tbt { k: a.k },
        ModeArg::Sbt => Mode::Sbt { t_ms: a.t_ms },
    };
    let cfg = a.options.config(mode);
    info!(
        "phase=config command=tighten mode={} propagation={:?} passes={} per_problem_limit={} heuristic_budget={} jobs={}",
        cfg.mode, cfg.propagation, cfg.passes, cfg.per_problem_time_limit, cfg.heuristic_budget, cfg.jobs
    );
    let (net, inst) = a.input.load()?;
    let report = run_tightening(&net, &inst, &cfg, None)?;
    write_file(&a.out, &to_json(&report))?;
    info!(
        "phase=done cap={} fixed={} t_bound={:.3} out={}",
        report.cap.cap,
        report.fixed_lines.len(),
        report.t_bound,
        a.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput {
    network: String,
    seed: u64,
    index: u64,
    status: String,
    cost: Option<f64>,
    dual_bound: Option<f64>,
    gap: Option<f64>,
    closed_lines: Option<Vec<LineId>>,
    flows: Option<Vec<f64>>,
    t_bound: f64,
    t_solve: f64,
}

fn read_report(path: &Path) -> Result<TightenReport, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn solve(a: SolveArgs) -> CliResult {
    let controls = a.controls.controls();
    info!(
        "phase=config command=solve time_limit={} gap={} threads={} report={}",
        controls.time_limit,
        controls.rel_gap,
        controls.threads,
        a.report.as_ref().map_or("none".into(), |p| p.display().to_string())
    );
    let (net, inst) = a.input.load()?;
    let (sol, t_bound) = match &a.report {
        Some(path) => {
            let report = read_report(path)?;
            let sol = if a.dump_model.is_some() {
                report.check_matches(&net, &inst)?;
                let fixed = report.fixed_positions(&net)?;
                solve_with_bounds(&net, &inst, &report.bounds, &fixed, &controls, a.dump_model.as_deref())?
            } else {
                solve_ots(&net, &inst, &report, &controls)?
            };
            (sol, report.t_bound)
        }
        None => {
            let bounds: Bounds = initial_bounds(&net);
            let fixed = std::collections::BTreeMap::<usize, LineStatus>::new();
            (solve_with_bounds(&net, &inst, &bounds, &fixed, &controls, a.dump_model.as_deref())?, 0.0)
        }
    };
    info!("phase=solve status={} cost={:?} seconds={:.3}", sol.status, sol.cost, sol.runtime);
    let out = SolveOutput {
        network: net.name().to_string(),
        seed: inst.seed_info.seed,
        index: inst.seed_info.index,
        status: sol.status.to_string(),
        cost: sol.cost,
        dual_bound: sol.dual_bound,
        gap: sol.gap,
        closed_lines: sol.x.as_ref().map(|x| {
            net.lines()
                .iter()
                .zip(x)
                .filter(|(_, &c)| c)
                .map(|(l, _)| l.id)
                .collect()
        }),
        flows: sol.flows,
        t_bound,
        t_solve: sol.runtime,
    };
    match &a.out {
        Some(path) => write_file(path, &to_json(&out)),
        None => {
            print(&to_json(&out));
            Ok(())
        }
    }
}

fn oracle(a: OracleArgs) -> CliResult {
    let (net, inst) = a.input.load()?;
    let start = Instant::now();
    let r = brute_force(&net, &inst, a.max_lines)?;
    info!(
        "phase=oracle topologies={} feasible={} seconds={:.3}",
        r.n_topologies,
        r.n_feasible,
        start.elapsed().as_secs_f64()
    );
    print(&to_json(&r));
    Ok(())
}

fn emit_summaries(
    records: &[ots_core::bench::BenchmarkRecord],
    time_limit: f64,
    summary: Option<&Path>,
    profiles: Option<&Path>,
    split_fraction: f64,
) -> CliResult {
    let rows = summarize(records);
    let split = split_instances(records, split_fraction)?;
    let mut text = String::from("All instances\n");
    text.push_str(&render_summary(&rows));
    text.push_str(&format!("\nHard instances ({})\n", split.hard.len()));
    text.push_str(&render_split_summary(&summarize_subset(records, &split.hard)));
    text.push_str(&format!("\nEasy instances ({})\n", split.easy.len()));
    text.push_str(&render_split_summary(&summarize_subset(records, &split.easy)));
    print(&text);
    if let Some(path) = summary {
        write_file(path, &summary_to_csv(&rows))?;
    }
    if let Some(path) = profiles {
        write_file(path, &profile_to_csv(&performance_profile(records, time_limit)))?;
    }
    Ok(())
}

fn bench(a: BenchArgs) -> CliResult {
    let approaches = parse_approaches(&a.approaches).map_err(Failure::Data)?;
    let cfg = BenchConfig {
        controls: a.controls.controls(),
        tighten: a.options.config(Mode::Tbt { k: 0 }),
        jobs: a.options.jobs,
    };
    info!(
        "phase=config command=bench approaches={} time_limit={} gap={} threads={} per_problem_limit={} heuristic_budget={} propagation={:?} jobs={}",
        approaches.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        cfg.controls.time_limit,
        cfg.controls.rel_gap,
        cfg.controls.threads,
        cfg.tighten.per_problem_time_limit,
        cfg.tighten.heuristic_budget,
        cfg.tighten.propagation,
        cfg.jobs
    );
    let net = load_network(&a.network)?;
    let instances = load_instances(&a.instances, &net)?;
    let start = Instant::now();
    let records = run_benchmark(&net, &instances, &approaches, &cfg)?;
    info!(
        "phase=bench rows={} seconds={:.3}",
        records.len(),
        start.elapsed().as_secs_f64()
    );
    let file = fs::File::create(&a.out).map_err(|e| Failure::Data(format!("cannot write {}: {e}", a.out.display())))?;
    write_records(file, &records)?;
    emit_summaries(
        &records,
        cfg.controls.time_limit,
        a.summary.as_deref(),
        a.profiles.as_deref(),
        a.split_fraction,
    )
}

fn report(a: ReportArgs) -> CliResult {
    let file = fs::File::open(&a.results).map_err(|e| Failure::Data(format!("cannot read {}: {e}", a.results.display())))?;
    let records = read_records(file)?;
    if records.is_empty() {
        return Err(Failure::Data(format!("{} has no rows", a.results.display())));
    }
    emit_summaries(&records, a.time_limit, a.summary.as_deref(), a.profiles.as_deref(), a.split_fraction)
}

fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format(|buf, record| {
            writeln!(
                buf,
                "level={} target={} {}",
                record.level().as_str().to_ascii_lowercase(),
                record.target(),
                record.args()
            )
        })
        .init();
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(format!("{} ({})", env!("CARGO_PKG_VERSION"), backend_identity()).into_boxed_str());
    let matches = match Cli::command().version(version).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    init_logging();
    let start = Instant::now();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Topo(a) => topo(a),
        Command::Tighten(a) => tighten(a),
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => {
            info!("phase=exit code=0 seconds={:.3}", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
