//! Benchmark runner: every (instance, approach) pair is tightened (if the
//! approach tightens), solved, and scored. Results go to a flat CSV that
//! the summaries and performance profiles are computed from.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulation::{Bounds, LineStatus};
use crate::milp::{SolveControls, SolveStatus};
use crate::netmodel::{Instance, LineId, Network};
use crate::oracle::dcopf_cost;
use crate::tighten::{
    initial_bounds, relative_gap, run_tightening, solve_with_bounds, upper_bound_cost, CapInfo, Mode, Solution,
    TightenConfig, TightenReport,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("initial width of line {0} is zero")]
    ZeroWidth(LineId),
    #[error("bounds cover {got} lines, expected {expected}")]
    LineMismatch { expected: usize, got: usize },
    #[error("no incumbent")]
    NoIncumbent,
    #[error("invalid benchmark setup: {0}")]
    Setup(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed results file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Approach {
    /// Switching MILP with initial bounds, no tightening.
    Mip,
    Tbt(usize),
    Sbt(u64),
}

impl Approach {
    pub fn mode(self) -> Option<Mode> {
        match self {
            Approach::Mip => None,
            Approach::Tbt(k) => Some(Mode::Tbt { k }),
            Approach::Sbt(t_ms) => Some(Mode::Sbt { t_ms }),
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approach::Mip => f.write_str("MIP"),
            Approach::Tbt(k) => write!(f, "TBT-{k}"),
            Approach::Sbt(t) => write!(f, "SBT-{t}"),
        }
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("mip") {
            return Ok(Approach::Mip);
        }
        match s.parse::<Mode>()? {
            Mode::Tbt { k } => Ok(Approach::Tbt(k)),
            Mode::Sbt { t_ms } => Ok(Approach::Sbt(t_ms)),
        }
    }
}

/// Parses a comma-separated approach list such as `mip,tbt-0,sbt-25`.
pub fn parse_approaches(list: &str) -> Result<Vec<Approach>, String> {
    let mut out: Vec<Approach> = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let a: Approach = part.parse()?;
        if out.contains(&a) {
            return Err(format!("approach {a} listed twice"));
        }
        out.push(a);
    }
    if out.is_empty() {
        return Err("no approaches given".into());
    }
    Ok(out)
}

/// One row of the results file. Percentages are in percent, times in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub instance: u64,
    pub approach: String,
    /// A solve status, or `Error` when the row failed.
    pub status: String,
    pub cost: Option<f64>,
    pub gap_pct: Option<f64>,
    pub sub_pct: Option<f64>,
    pub dif_pct: Option<f64>,
    pub df_pct: f64,
    pub dm_pct: f64,
    pub t_b: f64,
    pub t_o: f64,
    pub t_t: f64,
}

pub const STATUS_ERROR: &str = "Error";

impl BenchmarkRecord {
    pub fn solved(&self) -> bool {
        self.status == SolveStatus::Optimal.as_str()
    }

    pub fn hit_time_limit(&self) -> bool {
        self.status == SolveStatus::FeasibleAtLimit.as_str() || self.status == SolveStatus::NoSolutionAtLimit.as_str()
    }
}

/// Average percent reduction of flow and big-M widths across lines.
pub fn compute_bound_metrics(bounds0: &Bounds, bounds: &Bounds) -> Result<(f64, f64), BenchError> {
    if bounds0.len() != bounds.len() {
        return Err(BenchError::LineMismatch {
            expected: bounds0.len(),
            got: bounds.len(),
        });
    }
    if bounds0.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mut df = 0.0;
    let mut dm = 0.0;
    for (b0, b) in bounds0.0.iter().zip(&bounds.0) {
        let (w0f, w0m) = (b0.flow_width(), b0.bigm_width());
        if !(w0f > 0.0) || !(w0m > 0.0) {
            return Err(BenchError::ZeroWidth(b0.line));
        }
        df += 1.0 - b.flow_width() / w0f;
        dm += 1.0 - b.bigm_width() / w0m;
    }
    let n = bounds0.len() as f64;
    Ok((100.0 * df / n, 100.0 * dm / n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionMetrics {
    pub gap_pct: Option<f64>,
    pub sub_pct: f64,
    pub dif_pct: Option<f64>,
}

fn relative_pct(value: f64, reference: f64) -> f64 {
    let diff = value - reference;
    if diff == 0.0 {
        0.0
    } else {
        100.0 * diff / reference.abs().max(1e-9)
    }
}

/// gap against the dual bound, sub against the best known cost, dif against
/// the fixed-topology re-dispatch of the incumbent. dif is 0 when both costs
/// are below 1e-9 and absent when the re-dispatch failed.
pub fn compute_solution_metrics(
    cost: Option<f64>,
    dual_bound: Option<f64>,
    best_cost: f64,
    refit_cost: Option<f64>,
) -> Result<SolutionMetrics, BenchError> {
    let cost = cost.ok_or(BenchError::NoIncumbent)?;
    let gap_pct = dual_bound.map(|d| 100.0 * relative_gap(cost, d));
    let sub_pct = relative_pct(cost, best_cost).max(0.0);
    let dif_pct = refit_cost.map(|r| {
        if cost.abs() < 1e-9 && r.abs() < 1e-9 {
            0.0
        } else {
            relative_pct(cost, r).abs()
        }
    });
    Ok(SolutionMetrics {
        gap_pct,
        sub_pct,
        dif_pct,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    /// Controls of the final switching solve.
    pub controls: SolveControls,
    /// Template for tightening approaches; its mode is replaced per approach.
    pub tighten: TightenConfig,
    /// Rows solved concurrently.
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            controls: SolveControls::default(),
            tighten: TightenConfig::tbt(0),
            jobs: 1,
        }
    }
}

/// Everything produced for one row, kept for inspection by callers.
#[derive(Debug, Clone)]
pub struct RowDetail {
    pub instance: u64,
    pub approach: Approach,
    pub report: Option<TightenReport>,
    pub solution: Option<Solution>,
    pub refit_cost: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BenchRun {
    pub records: Vec<BenchmarkRecord>,
    pub details: Vec<RowDetail>,
    /// Heuristic cost cap per instance, shared by all tightening approaches.
    pub caps: Vec<Option<CapInfo>>,
}

struct RowOutput {
    detail: RowDetail,
    df: f64,
    dm: f64,
    t_b: f64,
}

fn run_row(net: &Network, inst: &Instance, approach: Approach, cap: Option<CapInfo>, cfg: &BenchConfig) -> RowOutput {
    let mut out = RowOutput {
        detail: RowDetail {
            instance: inst.seed_info.index,
            approach,
            report: None,
            solution: None,
            refit_cost: None,
            error: None,
        },
        df: 0.0,
        dm: 0.0,
        t_b: 0.0,
    };
    let (bounds, fixed): (Bounds, BTreeMap<usize, LineStatus>) = match approach.mode() {
        None => (initial_bounds(net), BTreeMap::new()),
        Some(mode) => {
            let tcfg = TightenConfig { mode, ..cfg.tighten };
            let report = match run_tightening(net, inst, &tcfg, cap) {
                Ok(r) => r,
                Err(e) => {
                    out.detail.error = Some(e.to_string());
                    return out;
                }
            };
            match compute_bound_metrics(&report.bounds0, &report.bounds) {
                Ok((df, dm)) => (out.df, out.dm) = (df, dm),
                Err(e) => warn!("instance={} approach={approach} bound metrics unavailable: {e}", inst.seed_info.index),
            }
            out.t_b = report.t_bound;
            let fixed = report.fixed_positions(net).expect("report built from this network");
            let bounds = report.bounds.clone();
            out.detail.report = Some(report);
            (bounds, fixed)
        }
    };
    match solve_with_bounds(net, inst, &bounds, &fixed, &cfg.controls, None) {
        Ok(sol) => {
            if let Some(x) = &sol.x {
                match dcopf_cost(net, inst, x) {
                    Ok(r) => out.detail.refit_cost = r.map(|(c, _)| c),
                    Err(e) => warn!("instance={} approach={approach} refit failed: {e}", inst.seed_info.index),
                }
            }
            out.detail.solution = Some(sol);
        }
        Err(e) => out.detail.error = Some(e.to_string()),
    }
    out
}

/// Runs every approach on every instance. Failures are recorded as rows
/// with status `Error`; the run continues. Records are ordered by
/// (instance index, approach name).
pub fn run_benchmark_detailed(
    net: &Network,
    instances: &[Instance],
    approaches: &[Approach],
    cfg: &BenchConfig,
) -> Result<BenchRun, BenchError> {
    if instances.is_empty() || approaches.is_empty() {
        return Err(BenchError::Setup("need at least one instance and one approach".into()));
    }
    let mut names: Vec<String> = approaches.iter().map(|a| a.to_string()).collect();
    names.sort();
    names.dedup();
    if names.len() != approaches.len() {
        return Err(BenchError::Setup("approach names must be unique".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    if !instances.iter().all(|i| seen.insert(i.seed_info.index)) {
        return Err(BenchError::Setup("instance indices must be unique".into()));
    }
    cfg.controls.validate().map_err(|e| BenchError::Setup(e.to_string()))?;
    cfg.tighten.validate().map_err(|e| BenchError::Setup(e.to_string()))?;
    if cfg.jobs == 0 {
        return Err(BenchError::Setup("jobs must be at least 1".into()));
    }

    let needs_cap = approaches.iter().any(|a| a.mode().is_some());
    let caps: Vec<Option<CapInfo>> = crate::par::map_indexed(instances.len(), cfg.jobs, |i| {
        if !needs_cap {
            return None;
        }
        match upper_bound_cost(net, &instances[i], cfg.tighten.heuristic_budget) {
            Ok(c) => Some(c),
            Err(e) => {
                warn!("instance={} heuristic failed: {e}", instances[i].seed_info.index);
                None
            }
        }
    });

    let mut pairs: Vec<(usize, Approach)> = (0..instances.len())
        .flat_map(|i| approaches.iter().map(move |&a| (i, a)))
        .collect();
    pairs.sort_by(|a, b| {
        (instances[a.0].seed_info.index, a.1.to_string()).cmp(&(instances[b.0].seed_info.index, b.1.to_string()))
    });
    let rows = crate::par::map_indexed(pairs.len(), cfg.jobs, |r| {
        let (i, a) = pairs[r];
        let row = run_row(net, &instances[i], a, caps[i], cfg);
        info!(
            "phase=bench instance={} approach={} status={} seconds={:.3}",
            instances[i].seed_info.index,
            a,
            row.detail.solution.as_ref().map_or(STATUS_ERROR, |s| s.status.as_str()),
            row.t_b + row.detail.solution.as_ref().map_or(0.0, |s| s.runtime)
        );
        row
    });

    let mut best: BTreeMap<u64, f64> = BTreeMap::new();
    for row in &rows {
        if let Some(c) = row.detail.solution.as_ref().and_then(|s| s.cost) {
            let e = best.entry(row.detail.instance).or_insert(c);
            *e = e.min(c);
        }
    }
    let mut records = Vec::with_capacity(rows.len());
    let mut details = Vec::with_capacity(rows.len());
    for row in rows {
        let d = &row.detail;
        let mut rec = BenchmarkRecord {
            instance: d.instance,
            approach: d.approach.to_string(),
            status: STATUS_ERROR.to_string(),
            cost: None,
            gap_pct: None,
            sub_pct: None,
            dif_pct: None,
            df_pct: row.df,
            dm_pct: row.dm,
            t_b: row.t_b,
            t_o: 0.0,
            t_t: row.t_b,
        };
        if let Some(e) = &d.error {
            warn!("instance={} approach={} error={e}", d.instance, d.approach);
        }
        if let Some(sol) = &d.solution {
            rec.status = sol.status.as_str().to_string();
            rec.cost = sol.cost;
            rec.t_o = sol.runtime;
            rec.t_t = rec.t_b + rec.t_o;
            if let Ok(m) = compute_solution_metrics(sol.cost, sol.dual_bound, best[&d.instance], d.refit_cost) {
                rec.gap_pct = m.gap_pct;
                rec.sub_pct = Some(m.sub_pct);
                rec.dif_pct = m.dif_pct;
            }
        }
        records.push(rec);
        details.push(row.detail);
    }
    Ok(BenchRun {
        records,
        details,
        caps,
    })
}

pub fn run_benchmark(
    net: &Network,
    instances: &[Instance],
    approaches: &[Approach],
    cfg: &BenchConfig,
) -> Result<Vec<BenchmarkRecord>, BenchError> {
    Ok(run_benchmark_detailed(net, instances, approaches, cfg)?.records)
}

pub const RESULTS_HEADER: [&str; 12] = [
    "instance", "approach", "status", "cost", "gap_pct", "sub_pct", "dif_pct", "dF_pct", "dM_pct", "tB_s", "tO_s",
    "tT_s",
];

/// Columns holding wall times.
pub const TIMING_COLUMNS: [&str; 3] = ["tB_s", "tO_s", "tT_s"];

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_records<W: Write>(out: W, records: &[BenchmarkRecord]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record([
            r.instance.to_string(),
            r.approach.clone(),
            r.status.clone(),
            fmt_opt(r.cost),
            fmt_opt(r.gap_pct),
            fmt_opt(r.sub_pct),
            fmt_opt(r.dif_pct),
            r.df_pct.to_string(),
            r.dm_pct.to_string(),
            r.t_b.to_string(),
            r.t_o.to_string(),
            r.t_t.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn records_to_csv(records: &[BenchmarkRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchmarkRecord>, BenchError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(BenchError::Format(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (n, row) in rdr.records().enumerate() {
        let row = row?;
        let line = n + 2;
        let num = |i: usize| -> Result<f64, BenchError> {
            row[i]
                .parse::<f64>()
                .map_err(|_| BenchError::Format(format!("line {line}: bad {} value {:?}", RESULTS_HEADER[i], &row[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>, BenchError> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        out.push(BenchmarkRecord {
            instance: row[0]
                .parse()
                .map_err(|_| BenchError::Format(format!("line {line}: bad instance {:?}", &row[0])))?,
            approach: row[1].to_string(),
            status: row[2].to_string(),
            cost: opt(3)?,
            gap_pct: opt(4)?,
            sub_pct: opt(5)?,
            dif_pct: opt(6)?,
            df_pct: num(7)?,
            dm_pct: num(8)?,
            t_b: num(9)?,
            t_o: num(10)?,
            t_t: num(11)?,
        });
    }
    Ok(out)
}

/// Per-approach aggregates: means (`mean_*`) and maxima (`max_*`) over the
/// rows where the value is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub approach: String,
    pub rows: usize,
    pub mean_df: f64,
    pub mean_dm: f64,
    pub mean_gap: Option<f64>,
    pub max_gap: Option<f64>,
    pub mean_dif: Option<f64>,
    pub max_dif: Option<f64>,
    pub mean_sub: Option<f64>,
    pub max_sub: Option<f64>,
    pub mean_tb: f64,
    pub mean_to: f64,
    pub mean_tt: f64,
    /// Rows that stopped at the time limit.
    pub n_tl: usize,
    /// Rows not solved to optimality (time limit, error, or infeasible).
    pub n_unsolved: usize,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn max(v: impl Iterator<Item = f64>) -> Option<f64> {
    v.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
}

/// Approach names in order of first appearance.
fn approach_order(records: &[BenchmarkRecord]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in records {
        if !names.contains(&r.approach) {
            names.push(r.approach.clone());
        }
    }
    names
}

pub fn summarize(records: &[BenchmarkRecord]) -> Vec<SummaryRow> {
    approach_order(records)
        .into_iter()
        .map(|name| {
            let rs: Vec<&BenchmarkRecord> = records.iter().filter(|r| r.approach == name).collect();
            SummaryRow {
                rows: rs.len(),
                mean_df: mean(rs.iter().map(|r| r.df_pct)).unwrap_or(0.0),
                mean_dm: mean(rs.iter().map(|r| r.dm_pct)).unwrap_or(0.0),
                mean_gap: mean(rs.iter().filter_map(|r| r.gap_pct)),
                max_gap: max(rs.iter().filter_map(|r| r.gap_pct)),
                mean_dif: mean(rs.iter().filter_map(|r| r.dif_pct)),
                max_dif: max(rs.iter().filter_map(|r| r.dif_pct)),
                mean_sub: mean(rs.iter().filter_map(|r| r.sub_pct)),
                max_sub: max(rs.iter().filter_map(|r| r.sub_pct)),
                mean_tb: mean(rs.iter().map(|r| r.t_b)).unwrap_or(0.0),
                mean_to: mean(rs.iter().map(|r| r.t_o)).unwrap_or(0.0),
                mean_tt: mean(rs.iter().map(|r| r.t_t)).unwrap_or(0.0),
                n_tl: rs.iter().filter(|r| r.hit_time_limit()).count(),
                n_unsolved: rs.iter().filter(|r| !r.solved()).count(),
                approach: name,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub hard: Vec<u64>,
    pub easy: Vec<u64>,
}

/// Ranks instances by mean total time across approaches. The slowest
/// `round(fraction * N)` are hard, the fastest as many are easy. Ties break
/// on instance index.
pub fn split_instances(records: &[BenchmarkRecord], fraction: f64) -> Result<Split, BenchError> {
    if !(0.0..=0.5).contains(&fraction) {
        return Err(BenchError::Setup(format!("split fraction must be in [0, 0.5], got {fraction}")));
    }
    let mut times: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in records {
        times.entry(r.instance).or_default().push(r.t_t);
    }
    let mut ranked: Vec<(u64, f64)> = times
        .into_iter()
        .map(|(i, t)| (i, mean(t.into_iter()).unwrap_or(0.0)))
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let count = (fraction * ranked.len() as f64).round() as usize;
    let easy = ranked[..count].iter().map(|r| r.0).collect();
    let hard = ranked[ranked.len() - count..].iter().rev().map(|r| r.0).collect();
    Ok(Split { hard, easy })
}

/// Summary restricted to the given instances.
pub fn summarize_subset(records: &[BenchmarkRecord], instances: &[u64]) -> Vec<SummaryRow> {
    let subset: Vec<BenchmarkRecord> = records
        .iter()
        .filter(|r| instances.contains(&r.instance))
        .cloned()
        .collect();
    summarize(&subset)
}

const SUMMARY_HEADER: [&str; 15] = [
    "approach", "rows", "mean_dF_pct", "mean_dM_pct", "mean_gap_pct", "max_gap_pct", "mean_dif_pct", "max_dif_pct",
    "mean_sub_pct", "max_sub_pct", "mean_tB_s", "mean_tO_s", "mean_tT_s", "n_TL", "n_unsolved",
];

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER).expect("writing to memory");
    for r in rows {
        w.write_record([
            r.approach.clone(),
            r.rows.to_string(),
            r.mean_df.to_string(),
            r.mean_dm.to_string(),
            fmt_opt(r.mean_gap),
            fmt_opt(r.max_gap),
            fmt_opt(r.mean_dif),
            fmt_opt(r.max_dif),
            fmt_opt(r.mean_sub),
            fmt_opt(r.max_sub),
            r.mean_tb.to_string(),
            r.mean_to.to_string(),
            r.mean_tt.to_string(),
            r.n_tl.to_string(),
            r.n_unsolved.to_string(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

/// Fixed-width table with two decimals, one row per approach.
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<10} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>9} {:>9} {:>9} {:>4}\n",
        "approach", "dF", "dM", "gap", "gap^", "dif", "dif^", "sub", "sub^", "tB", "tO", "tT", "#TL"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>9.2} {:>9.2} {:>9.2} {:>4}\n",
            r.approach,
            cell(Some(r.mean_df)),
            cell(Some(r.mean_dm)),
            cell(r.mean_gap),
            cell(r.max_gap),
            cell(r.mean_dif),
            cell(r.max_dif),
            cell(r.mean_sub),
            cell(r.max_sub),
            r.mean_tb,
            r.mean_to,
            r.mean_tt,
            r.n_tl
        ));
    }
    out
}

/// Time-only table for a subset of instances; `#NL` counts rows not solved.
pub fn render_split_summary(rows: &[SummaryRow]) -> String {
    let mut out = format!("{:<10} {:>9} {:>9} {:>9} {:>4}\n", "approach", "tB", "tO", "tT", "#NL");
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:>9.2} {:>9.2} {:>9.2} {:>4}\n",
            r.approach, r.mean_tb, r.mean_to, r.mean_tt, r.n_unsolved
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub approach: String,
    pub time_s: f64,
    pub solved: usize,
}

/// Step curves of instances solved within each total time, per approach.
/// Each curve starts at `(0, 0)`, rises at every solved row's total time and
/// ends at `(time_limit, n_solved)`; unsolved rows never count.
pub fn performance_profile(records: &[BenchmarkRecord], time_limit: f64) -> Vec<ProfilePoint> {
    let mut out = Vec::new();
    for name in approach_order(records) {
        let mut times: Vec<f64> = records
            .iter()
            .filter(|r| r.approach == name && r.solved())
            .map(|r| r.t_t)
            .collect();
        times.sort_by(f64::total_cmp);
        out.push(ProfilePoint {
            approach: name.clone(),
            time_s: 0.0,
            solved: 0,
        });
        for (i, t) in times.iter().enumerate() {
            out.push(ProfilePoint {
                approach: name.clone(),
                time_s: *t,
                solved: i + 1,
            });
        }
        let end = times.last().map_or(time_limit, |t| t.max(time_limit));
        out.push(ProfilePoint {
            approach: name.clone(),
            time_s: end,
            solved: times.len(),
        });
    }
    out
}

pub fn profile_to_csv(points: &[ProfilePoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["approach", "time_s", "solved"]).expect("writing to memory");
    for p in points {
        w.write_record([p.approach.clone(), p.time_s.to_string(), p.solved.to_string()])
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}
