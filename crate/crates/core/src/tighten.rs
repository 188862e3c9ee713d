//! Bound tightening for the switching MILP: initial bounds, the heuristic
//! cost cap, per-line bounding (TBT-k and SBT-t), and the final solve on the
//! tightened model.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulation::{
    build_bounding, build_dcopf_fixed, build_ots, BoundTarget, Bounds, BuildError, CostCap, LineBounds,
    LineStatus, OtsModel, RelaxationSpec,
};
use crate::milp::{solve, Sense, SolveControls, SolveOutcome, SolveStatus, SolverError};
use crate::netmodel::{Instance, LineId, Network, SeedInfo};
use crate::topo::{build_line_graph, LineGraph};

#[derive(Debug, Error)]
pub enum TightenError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("backend failure on line {line}: {source}")]
    Backend { line: LineId, source: SolverError },
    #[error("backend failure: {0}")]
    Solver(#[from] SolverError),
    #[error("no cost cap available: {0}")]
    Heuristic(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("report does not match the input: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Mode {
    /// Lines within line-graph distance `k` stay binary.
    Tbt { k: usize },
    /// Every status stays binary; each subproblem is cut off after `t_ms`.
    Sbt { t_ms: u64 },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Tbt { k } => write!(f, "tbt-{k}"),
            Mode::Sbt { t_ms } => write!(f, "sbt-{t_ms}"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let parse = |rest: &str| rest.parse::<u64>().map_err(|_| format!("bad tightening mode {s:?}"));
        if let Some(rest) = lower.strip_prefix("tbt-") {
            Ok(Mode::Tbt { k: parse(rest)? as usize })
        } else if let Some(rest) = lower.strip_prefix("sbt-") {
            let t_ms = parse(rest)?;
            if t_ms == 0 {
                return Err(format!("bad tightening mode {s:?}: time budget must be positive"));
            }
            Ok(Mode::Sbt { t_ms })
        } else {
            Err(format!("bad tightening mode {s:?}, expected tbt-K or sbt-T"))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Propagation {
    /// Lines are processed in ascending id; each update is visible to the next problem.
    #[default]
    Sequential,
    /// Every line sees the bounds from the start of the pass; updates merge afterwards.
    Batch,
}

impl FromStr for Propagation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seq" | "sequential" => Ok(Propagation::Sequential),
            "batch" => Ok(Propagation::Batch),
            other => Err(format!("unknown propagation {other:?}, expected seq or batch")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TightenConfig {
    pub mode: Mode,
    /// Seconds per bounding problem in TBT mode. SBT uses `t_ms` instead.
    pub per_problem_time_limit: f64,
    /// Seconds for the heuristic that produces the cost cap.
    pub heuristic_budget: f64,
    pub propagation: Propagation,
    /// Minimum change (MW) for a candidate to count as an improvement.
    pub improvement_epsilon: f64,
    pub passes: usize,
    /// Worker threads for batch propagation.
    pub jobs: usize,
}

impl TightenConfig {
    pub fn new(mode: Mode) -> Self {
        TightenConfig {
            mode,
            per_problem_time_limit: 5.0,
            heuristic_budget: 10.0,
            propagation: Propagation::Sequential,
            improvement_epsilon: 1e-6,
            passes: 1,
            jobs: 1,
        }
    }

    pub fn tbt(k: usize) -> Self {
        Self::new(Mode::Tbt { k })
    }

    pub fn sbt(t_ms: u64) -> Self {
        Self::new(Mode::Sbt { t_ms })
    }

    pub fn validate(&self) -> Result<(), TightenError> {
        let bad = |m: String| Err(TightenError::Config(m));
        if let Mode::Sbt { t_ms: 0 } = self.mode {
            return bad("SBT time budget must be positive".into());
        }
        if !(self.per_problem_time_limit > 0.0) {
            return bad(format!("per-problem time limit must be positive, got {}", self.per_problem_time_limit));
        }
        if !(self.heuristic_budget > 0.0) {
            return bad(format!("heuristic budget must be positive, got {}", self.heuristic_budget));
        }
        if !(self.improvement_epsilon >= 0.0) {
            return bad("improvement epsilon must be non-negative".into());
        }
        if self.passes == 0 || self.jobs == 0 {
            return bad("passes and jobs must be at least 1".into());
        }
        Ok(())
    }

    /// Controls for one bounding problem.
    pub fn subproblem_controls(&self) -> SolveControls {
        let time_limit = match self.mode {
            Mode::Tbt { .. } => self.per_problem_time_limit,
            Mode::Sbt { t_ms } => t_ms as f64 / 1000.0,
        };
        SolveControls::with_time_limit(time_limit)
    }
}

/// Initial bounds: thermal limits for the flows, and for the big-M constants
/// the sum of every other line's largest angle drop, scaled by `b_l`.
pub fn initial_bounds(net: &Network) -> Bounds {
    let drops: Vec<f64> = net
        .lines()
        .iter()
        .map(|l| l.f_min.abs().max(l.f_max.abs()) / l.susceptance)
        .collect();
    Bounds(
        net.lines()
            .iter()
            .enumerate()
            .map(|(pos, l)| {
                let others: f64 = drops
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != pos)
                    .map(|(_, d)| d)
                    .sum();
                let m = l.susceptance * others;
                LineBounds {
                    line: l.id,
                    f_lo: l.f_min,
                    f_hi: l.f_max,
                    m_lo: -m,
                    m_hi: m,
                }
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapSource {
    /// Cost of the heuristic incumbent's topology, re-dispatched exactly.
    Incumbent,
    /// Total demand times the largest marginal cost.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapInfo {
    pub cap: f64,
    pub source: CapSource,
    /// Wall seconds spent by the heuristic.
    pub time: f64,
}

/// Cost cap from a time-limited, heuristic-heavy solve of the switching
/// MILP under initial bounds. The incumbent's topology is re-dispatched with
/// the fixed-topology DC-OPF so that the cap is the cost of an exactly
/// feasible switching plan; with no incumbent the cap is
/// `total demand * max cost`.
pub fn upper_bound_cost(net: &Network, inst: &Instance, budget: f64) -> Result<CapInfo, TightenError> {
    if !(budget > 0.0) {
        return Err(TightenError::Config(format!("heuristic budget must be positive, got {budget}")));
    }
    if net.num_buses() == 0 {
        return Err(TightenError::Heuristic("network has no buses".into()));
    }
    let start = Instant::now();
    let bounds = initial_bounds(net);
    let model = build_ots(net, inst, &bounds, &RelaxationSpec::all_binary(net.num_lines()), CostCap::none())?;
    let controls = SolveControls {
        heuristic_effort: Some(1.0),
        ..SolveControls::with_time_limit(budget)
    };
    let out = solve(&model.spec, &controls)?;
    let mut cap = None;
    if let Some(x) = statuses(&model, &out) {
        let refit = build_dcopf_fixed(net, inst, &x);
        let remaining = (budget - start.elapsed().as_secs_f64()).max(1.0);
        let r = solve(&refit.spec, &SolveControls::with_time_limit(remaining))?;
        cap = match (r.status, r.objective) {
            (SolveStatus::Optimal, Some(c)) => Some(c),
            _ => out.objective,
        };
    }
    let time = start.elapsed().as_secs_f64();
    let info = match cap {
        Some(cap) => CapInfo {
            cap,
            source: CapSource::Incumbent,
            time,
        },
        None => CapInfo {
            cap: inst.total_demand() * net.max_cost(),
            source: CapSource::Fallback,
            time,
        },
    };
    info!(
        "phase=heuristic status={} cap={} source={:?} seconds={:.3}",
        out.status, info.cap, info.source, info.time
    );
    Ok(info)
}

/// Line statuses of a solved switching model, rounded to 0/1.
fn statuses(model: &OtsModel, out: &SolveOutcome) -> Option<Vec<bool>> {
    let primal = out.primal.as_ref()?;
    Some(model.vars.x.iter().map(|v| primal[v.0] > 0.5).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateOutcome {
    Tightened,
    NoImprovement,
    /// Limit reached without a usable dual bound.
    NoBound,
    Infeasible,
    /// Not solved: the line is already fixed to the opposite status, or the
    /// paired problem over the same region was infeasible.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubproblemLog {
    pub target: BoundTarget,
    pub sense: Sense,
    pub status: Option<SolveStatus>,
    pub objective: Option<f64>,
    pub dual_bound: Option<f64>,
    /// Bound value proposed by this problem, before the sign clamp.
    pub candidate: Option<f64>,
    pub outcome: UpdateOutcome,
    pub runtime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineLog {
    pub line: LineId,
    pub pass: usize,
    /// Number of binary status variables in this line's bounding problems.
    pub binary_count: usize,
    pub subproblems: Vec<SubproblemLog>,
    pub fixed: Option<LineStatus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedLine {
    pub line: LineId,
    pub status: LineStatus,
}

/// Result of a tightening run, serialized as JSON by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightenReport {
    pub network: String,
    pub instance: SeedInfo,
    pub config: TightenConfig,
    pub bounds0: Bounds,
    pub bounds: Bounds,
    pub cap: CapInfo,
    pub fixed_lines: Vec<FixedLine>,
    /// Wall seconds spent in the bounding loop, excluding the heuristic.
    pub t_bound: f64,
    pub per_line_log: Vec<LineLog>,
}

impl TightenReport {
    /// Fixed statuses keyed by network position.
    pub fn fixed_positions(&self, net: &Network) -> Result<BTreeMap<usize, LineStatus>, TightenError> {
        self.fixed_lines
            .iter()
            .map(|f| {
                net.line_position(f.line)
                    .map(|p| (p, f.status))
                    .ok_or_else(|| TightenError::Mismatch(format!("unknown fixed line {}", f.line)))
            })
            .collect()
    }

    pub fn check_matches(&self, net: &Network, inst: &Instance) -> Result<(), TightenError> {
        if self.network != net.name() {
            return Err(TightenError::Mismatch(format!(
                "report is for network {:?}, not {:?}",
                self.network,
                net.name()
            )));
        }
        if self.instance != inst.seed_info {
            return Err(TightenError::Mismatch(format!(
                "report is for instance seed={} index={}, not seed={} index={}",
                self.instance.seed, self.instance.index, inst.seed_info.seed, inst.seed_info.index
            )));
        }
        self.bounds.check(net)?;
        self.fixed_positions(net).map(|_| ())
    }
}

/// Inputs shared by the four bounding problems of one line.
#[derive(Debug, Clone, Copy)]
pub struct LineState<'a> {
    pub net: &'a Network,
    pub inst: &'a Instance,
    pub bounds: &'a Bounds,
    pub cap: f64,
    pub fixed: &'a BTreeMap<usize, LineStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineUpdate {
    pub bounds: LineBounds,
    pub fixed: Option<LineStatus>,
    pub log: LineLog,
}

/// Bound proposed by a bounding problem: its proven dual bound, which for a
/// solved LP is the optimum and for a solved MILP is the optimum up to the
/// gap tolerance on the safe side. Falls back to the optimum when a solved
/// problem reports no bound. Incumbents at a limit are never used since they
/// lie inside the true range.
pub fn candidate_from_outcome(out: &SolveOutcome) -> Option<f64> {
    match out.status {
        SolveStatus::Optimal => out.dual_bound.or(out.objective),
        SolveStatus::FeasibleAtLimit | SolveStatus::NoSolutionAtLimit => out.dual_bound,
        SolveStatus::Infeasible | SolveStatus::Unbounded => None,
    }
}

const PROBLEMS: [(BoundTarget, Sense); 4] = [
    (BoundTarget::Flow, Sense::Minimize),
    (BoundTarget::Flow, Sense::Maximize),
    (BoundTarget::Dummy, Sense::Minimize),
    (BoundTarget::Dummy, Sense::Maximize),
];

/// Solves the four bounding problems of line `line` (network position) over
/// the region `relax`, applying each improvement before the next problem.
/// `relax.fixed` is merged with `state.fixed`.
pub fn tighten_line(
    state: LineState<'_>,
    line: usize,
    relax: &RelaxationSpec,
    controls: &SolveControls,
    epsilon: f64,
) -> Result<LineUpdate, TightenError> {
    let id = state.net.lines()[line].id;
    let relax = relax.clone().with_fixed(state.fixed);
    let mut bounds = state.bounds.clone();
    let already = relax.fixed.get(&line).copied();
    let mut infeasible = [false, false];
    let mut logs = Vec::with_capacity(4);

    for (target, sense) in PROBLEMS {
        let side = match target {
            BoundTarget::Flow => 0,
            BoundTarget::Dummy => 1,
        };
        let contradicts = matches!(
            (target, already),
            (BoundTarget::Flow, Some(LineStatus::Open)) | (BoundTarget::Dummy, Some(LineStatus::Closed))
        );
        if contradicts || infeasible[side] {
            logs.push(SubproblemLog {
                target,
                sense,
                status: None,
                objective: None,
                dual_bound: None,
                candidate: None,
                outcome: UpdateOutcome::Skipped,
                runtime: 0.0,
            });
            continue;
        }
        let model = build_bounding(
            state.net,
            state.inst,
            &bounds,
            line,
            target,
            sense,
            &relax,
            CostCap::at(state.cap),
        )?;
        let out = solve(&model.spec, controls).map_err(|source| TightenError::Backend { line: id, source })?;
        let candidate = candidate_from_outcome(&out);
        let outcome = if out.status == SolveStatus::Infeasible {
            infeasible[side] = true;
            UpdateOutcome::Infeasible
        } else {
            match candidate {
                None => UpdateOutcome::NoBound,
                Some(c) => apply_candidate(bounds.line_mut(line), target, sense, c, epsilon),
            }
        };
        logs.push(SubproblemLog {
            target,
            sense,
            status: Some(out.status),
            objective: out.objective,
            dual_bound: out.dual_bound,
            candidate,
            outcome,
            runtime: out.runtime,
        });
    }

    let fixed = match infeasible {
        [true, false] => Some(LineStatus::Open),
        [false, true] => Some(LineStatus::Closed),
        [true, true] => {
            // Only possible if the cap is below the optimum; keep the input bounds.
            warn!("line={id} both statuses infeasible under cap={}; leaving line untouched", state.cap);
            bounds = state.bounds.clone();
            None
        }
        [false, false] => None,
    }
    .filter(|s| already != Some(*s));

    Ok(LineUpdate {
        bounds: *bounds.line(line),
        fixed,
        log: LineLog {
            line: id,
            pass: 0,
            binary_count: relax.binary_lines.iter().filter(|&&l| l != line).count(),
            subproblems: logs,
            fixed,
        },
    })
}

/// Moves one side of a line's bounds inward to `candidate` when that
/// improves it by more than `epsilon`. Lower bounds never rise above zero
/// and upper bounds never drop below zero, so zero flow stays admissible.
fn apply_candidate(lb: &mut LineBounds, target: BoundTarget, sense: Sense, candidate: f64, epsilon: f64) -> UpdateOutcome {
    let slot = match (target, sense) {
        (BoundTarget::Flow, Sense::Minimize) => &mut lb.f_lo,
        (BoundTarget::Flow, Sense::Maximize) => &mut lb.f_hi,
        (BoundTarget::Dummy, Sense::Minimize) => &mut lb.m_lo,
        (BoundTarget::Dummy, Sense::Maximize) => &mut lb.m_hi,
    };
    let improved = match sense {
        Sense::Minimize => {
            let c = candidate.min(0.0);
            (c > *slot + epsilon).then_some(c)
        }
        Sense::Maximize => {
            let c = candidate.max(0.0);
            (c < *slot - epsilon).then_some(c)
        }
    };
    match improved {
        Some(c) => {
            *slot = c;
            UpdateOutcome::Tightened
        }
        None => UpdateOutcome::NoImprovement,
    }
}

/// Which statuses stay binary in line `l`'s bounding problems.
enum Region {
    Neighborhoods(Vec<Vec<usize>>),
    AllBinary(usize),
}

impl Region {
    fn relax_for(&self, line: usize) -> RelaxationSpec {
        match self {
            Region::Neighborhoods(n) => RelaxationSpec::with_binary(n[line].iter().copied()),
            Region::AllBinary(num) => RelaxationSpec::with_binary((0..*num).filter(|&j| j != line)),
        }
    }
}

/// TBT-k with the heuristic cap computed first.
pub fn run_tbt(net: &Network, inst: &Instance, cfg: &TightenConfig) -> Result<TightenReport, TightenError> {
    if !matches!(cfg.mode, Mode::Tbt { .. }) {
        return Err(TightenError::Config("run_tbt needs a TBT mode".into()));
    }
    run_tightening(net, inst, cfg, None)
}

/// SBT-t with the heuristic cap computed first.
pub fn run_sbt(net: &Network, inst: &Instance, cfg: &TightenConfig) -> Result<TightenReport, TightenError> {
    if !matches!(cfg.mode, Mode::Sbt { .. }) {
        return Err(TightenError::Config("run_sbt needs an SBT mode".into()));
    }
    run_tightening(net, inst, cfg, None)
}

/// Full tightening run in either mode. A precomputed cap can be supplied so
/// several runs on the same instance share one heuristic solve.
pub fn run_tightening(
    net: &Network,
    inst: &Instance,
    cfg: &TightenConfig,
    cap: Option<CapInfo>,
) -> Result<TightenReport, TightenError> {
    cfg.validate()?;
    inst.validate_against(net)
        .map_err(|e| TightenError::Mismatch(e.to_string()))?;
    let bounds0 = initial_bounds(net);
    let cap = match cap {
        Some(c) => c,
        None => upper_bound_cost(net, inst, cfg.heuristic_budget)?,
    };
    let region = match cfg.mode {
        Mode::Tbt { k } => {
            let g: LineGraph = build_line_graph(net);
            Region::Neighborhoods(g.all_neighborhoods(k))
        }
        Mode::Sbt { .. } => Region::AllBinary(net.num_lines()),
    };
    let controls = cfg.subproblem_controls();
    let mut order: Vec<usize> = (0..net.num_lines()).collect();
    order.sort_by_key(|&l| net.lines()[l].id);

    let start = Instant::now();
    let mut bounds = bounds0.clone();
    let mut fixed: BTreeMap<usize, LineStatus> = BTreeMap::new();
    let mut per_line_log = Vec::new();
    for pass in 0..cfg.passes {
        let updates = match cfg.propagation {
            Propagation::Sequential => {
                let mut logs = Vec::with_capacity(order.len());
                for &l in &order {
                    let state = LineState {
                        net,
                        inst,
                        bounds: &bounds,
                        cap: cap.cap,
                        fixed: &fixed,
                    };
                    let up = tighten_line(state, l, &region.relax_for(l), &controls, cfg.improvement_epsilon)?;
                    *bounds.line_mut(l) = up.bounds;
                    if let Some(s) = up.fixed {
                        fixed.insert(l, s);
                    }
                    logs.push(up.log);
                }
                logs
            }
            Propagation::Batch => {
                let state = LineState {
                    net,
                    inst,
                    bounds: &bounds,
                    cap: cap.cap,
                    fixed: &fixed,
                };
                let results = run_batch(state, &order, &region, &controls, cfg)?;
                let mut merged = bounds.clone();
                let mut new_fixed = fixed.clone();
                let mut logs = Vec::with_capacity(order.len());
                for (&l, up) in order.iter().zip(results) {
                    let cur = merged.line_mut(l);
                    cur.f_lo = cur.f_lo.max(up.bounds.f_lo);
                    cur.f_hi = cur.f_hi.min(up.bounds.f_hi);
                    cur.m_lo = cur.m_lo.max(up.bounds.m_lo);
                    cur.m_hi = cur.m_hi.min(up.bounds.m_hi);
                    if let Some(s) = up.fixed {
                        new_fixed.insert(l, s);
                    }
                    logs.push(up.log);
                }
                bounds = merged;
                fixed = new_fixed;
                logs
            }
        };
        per_line_log.extend(updates.into_iter().map(|mut log| {
            log.pass = pass;
            log
        }));
    }
    let t_bound = start.elapsed().as_secs_f64();
    info!(
        "phase=tighten mode={} propagation={:?} passes={} lines={} fixed={} seconds={:.3}",
        cfg.mode,
        cfg.propagation,
        cfg.passes,
        net.num_lines(),
        fixed.len(),
        t_bound
    );
    Ok(TightenReport {
        network: net.name().to_string(),
        instance: inst.seed_info,
        config: *cfg,
        bounds0,
        bounds,
        cap,
        fixed_lines: fixed
            .iter()
            .map(|(&l, &status)| FixedLine {
                line: net.lines()[l].id,
                status,
            })
            .collect(),
        t_bound,
        per_line_log,
    })
}

/// Batch pass: every line against the same starting state, on up to
/// `cfg.jobs` threads. Results come back in `order`.
fn run_batch(
    state: LineState<'_>,
    order: &[usize],
    region: &Region,
    controls: &SolveControls,
    cfg: &TightenConfig,
) -> Result<Vec<LineUpdate>, TightenError> {
    crate::par::map_indexed(order.len(), cfg.jobs, |i| {
        let l = order[i];
        tighten_line(state, l, &region.relax_for(l), controls, cfg.improvement_epsilon)
    })
    .into_iter()
    .collect()
}

/// Outcome of the final switching solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub cost: Option<f64>,
    pub dual_bound: Option<f64>,
    /// Relative gap `(cost - dual_bound) / |cost|`, as a fraction.
    pub gap: Option<f64>,
    /// Closed (true) / open (false) per line, in network order.
    pub x: Option<Vec<bool>>,
    pub flows: Option<Vec<f64>>,
    /// Wall seconds of the solve.
    pub runtime: f64,
}

/// The final switching model: all statuses binary, fixings honored, no cost cap.
pub fn final_model(
    net: &Network,
    inst: &Instance,
    bounds: &Bounds,
    fixed: &BTreeMap<usize, LineStatus>,
) -> Result<OtsModel, TightenError> {
    let relax = RelaxationSpec::all_binary(net.num_lines()).with_fixed(fixed);
    Ok(build_ots(net, inst, bounds, &relax, CostCap::none())?)
}

pub fn solve_with_bounds(
    net: &Network,
    inst: &Instance,
    bounds: &Bounds,
    fixed: &BTreeMap<usize, LineStatus>,
    controls: &SolveControls,
    dump: Option<&Path>,
) -> Result<Solution, TightenError> {
    let model = final_model(net, inst, bounds, fixed)?;
    if let Some(path) = dump {
        model
            .spec
            .write_lp(path)
            .map_err(|e| TightenError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    let out = solve(&model.spec, controls)?;
    let x = statuses(&model, &out);
    let flows = out
        .primal
        .as_ref()
        .map(|p| model.vars.f.iter().map(|v| p[v.0]).collect());
    let gap = match (out.objective, out.dual_bound) {
        (Some(c), Some(d)) => Some(relative_gap(c, d)),
        _ => None,
    };
    debug!("phase=solve status={} cost={:?} seconds={:.3}", out.status, out.objective, out.runtime);
    Ok(Solution {
        status: out.status,
        cost: out.objective,
        dual_bound: out.dual_bound,
        gap,
        x,
        flows,
        runtime: out.runtime,
    })
}

/// `(cost - bound) / |cost|`, never negative, zero when both are zero.
pub fn relative_gap(cost: f64, bound: f64) -> f64 {
    let diff = (cost - bound).max(0.0);
    if diff == 0.0 {
        0.0
    } else if cost.abs() < 1e-12 {
        f64::INFINITY
    } else {
        diff / cost.abs()
    }
}

/// Final switching solve on a tightening report's bounds and fixings.
pub fn solve_ots(
    net: &Network,
    inst: &Instance,
    report: &TightenReport,
    controls: &SolveControls,
) -> Result<Solution, TightenError> {
    report.check_matches(net, inst)?;
    let fixed = report.fixed_positions(net)?;
    solve_with_bounds(net, inst, &report.bounds, &fixed, controls, None)
}
