//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. `ACCEPTANCE_ONLY=1,3b` restricts the run to the
//! listed criteria. The 118-bus benchmark runs when 4, 5 or 6 is selected;
//! criteria 3c and 7 then cover its rows as well.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use ots_core::bench::{
    read_records, records_to_csv, run_benchmark_detailed, Approach, BenchConfig, BenchRun, BenchmarkRecord,
};
use ots_core::formulation::{Bounds, CostCap, LineStatus, RelaxationSpec};
use ots_core::milp::{SolveControls, SolveStatus};
use ots_core::netmodel::{generate_instances, load_network, Instance, Network};
use ots_core::oracle::{brute_force, enumerate_topologies, verify_bounds_with, TopologyTable, DEFAULT_MAX_LINES};
use ots_core::tighten::{
    initial_bounds, run_tightening, tighten_line, LineState, Mode, Propagation, TightenConfig, TightenReport,
};
use ots_core::topo::build_line_graph;

const SMALL_NETWORKS: [&str; 4] = ["triangle", "five_bus", "six_bus", "tree"];
const SMALL_PER_NETWORK: usize = 13;
const SMALL_SEED: u64 = 20_240_601;
const SMALL_SPREAD: f64 = 0.2;
const LARGE_INSTANCES: usize = 20;
const LARGE_SEED: u64 = 118;
const LARGE_TIME_LIMIT: f64 = 60.0;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(format!("{name}.json"))
}

fn work_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

struct Verdict {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

struct Suite {
    only: Option<BTreeSet<String>>,
    verdicts: Vec<Verdict>,
}

impl Suite {
    fn wants(&self, id: &str) -> bool {
        self.only.as_ref().is_none_or(|s| s.contains(id))
    }

    fn record(&mut self, id: &'static str, name: &'static str, start: Instant, result: Result<String, String>) {
        let seconds = start.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        println!(
            "{} criterion {id} ({name}): {detail} [{seconds:.1}s]",
            if pass { "PASS" } else { "FAIL" }
        );
        self.verdicts.push(Verdict {
            id,
            name,
            pass,
            detail,
        });
    }
}

/// One small network with its instances and enumeration ground truth.
struct SmallCase {
    name: &'static str,
    net: Network,
    instances: Vec<Instance>,
    optimum: Vec<f64>,
    tables: Vec<TopologyTable>,
}

fn small_cases() -> Vec<SmallCase> {
    SMALL_NETWORKS
        .iter()
        .map(|&name| {
            let net = load_network(data(name)).expect("small network loads");
            let instances = generate_instances(&net, SMALL_PER_NETWORK, SMALL_SEED, SMALL_SPREAD).expect("instances");
            let optimum = instances
                .iter()
                .map(|i| brute_force(&net, i, DEFAULT_MAX_LINES).expect("oracle").cost)
                .collect();
            let tables = instances
                .iter()
                .map(|i| enumerate_topologies(&net, i, DEFAULT_MAX_LINES).expect("enumeration"))
                .collect();
            SmallCase {
                name,
                net,
                instances,
                optimum,
                tables,
            }
        })
        .collect()
}

fn exact_controls() -> SolveControls {
    SolveControls {
        time_limit: 60.0,
        rel_gap: 0.0,
        threads: 1,
        heuristic_effort: None,
    }
}

fn small_bench_config() -> BenchConfig {
    BenchConfig {
        controls: exact_controls(),
        tighten: TightenConfig {
            per_problem_time_limit: 5.0,
            heuristic_budget: 10.0,
            ..TightenConfig::tbt(0)
        },
        jobs: 1,
    }
}

fn small_approaches() -> Vec<Approach> {
    vec![
        Approach::Mip,
        Approach::Tbt(0),
        Approach::Tbt(1),
        Approach::Tbt(2),
        Approach::Tbt(3),
        Approach::Sbt(100),
    ]
}

fn run_small(cases: &[SmallCase]) -> Vec<BenchRun> {
    let cfg = small_bench_config();
    cases
        .iter()
        .map(|c| run_benchmark_detailed(&c.net, &c.instances, &small_approaches(), &cfg).expect("benchmark runs"))
        .collect()
}

fn reports(run: &BenchRun) -> impl Iterator<Item = &TightenReport> {
    run.details.iter().filter_map(|d| d.report.as_ref())
}

fn criterion_oracle(cases: &[SmallCase], runs: &[BenchRun]) -> Result<String, String> {
    let mut rows = 0;
    let mut failures = Vec::new();
    for (case, run) in cases.iter().zip(runs) {
        for r in &run.records {
            rows += 1;
            let opt = case.optimum[r.instance as usize];
            let ok = r.status == SolveStatus::Optimal.as_str() && r.cost.is_some_and(|c| close(c, opt, 1e-6));
            if !ok {
                failures.push(format!(
                    "{}#{} {} status={} cost={:?} oracle={opt}",
                    case.name, r.instance, r.approach, r.status, r.cost
                ));
            }
        }
    }
    let instances: usize = cases.iter().map(|c| c.instances.len()).sum();
    if failures.is_empty() {
        Ok(format!("{rows} rows over {instances} instances match the enumeration optimum within 1e-6"))
    } else {
        Err(format!("{} of {rows} rows differ: {}", failures.len(), failures.join("; ")))
    }
}

/// Every fixing must agree with each topology whose cost is within the cap.
fn fixing_violation(net: &Network, report: &TightenReport, table: &TopologyTable) -> Option<String> {
    let fixed = report.fixed_positions(net).expect("report fixings name network lines");
    let cap = report.cap.cap;
    for (x, cost) in &table.entries {
        let Some(c) = *cost else { continue };
        if c > cap + 1e-6 * cap.abs().max(1.0) {
            continue;
        }
        for (&l, &s) in &fixed {
            if x[l] != (s == LineStatus::Closed) {
                return Some(format!("line {} fixed {s:?} but topology {x:?} costs {c} <= cap {cap}", net.lines()[l].id));
            }
        }
    }
    None
}

fn criterion_validity(cases: &[SmallCase], runs: &[BenchRun]) -> Result<String, String> {
    let mut checks = 0;
    let mut topologies = 0;
    let mut failures = Vec::new();
    for (case, run) in cases.iter().zip(runs) {
        let b0 = initial_bounds(&case.net);
        for (i, inst) in case.instances.iter().enumerate() {
            let chk = verify_bounds_with(&case.net, inst, &b0, CostCap::none(), &case.tables[i]).map_err(|e| e.to_string())?;
            checks += 1;
            topologies += chk.checked;
            if let Some(v) = chk.violation {
                failures.push(format!("{}#{i} initial bounds cut {:?}", case.name, v));
            }
        }
        for rep in reports(run) {
            let i = rep.instance.index as usize;
            let inst = &case.instances[i];
            let chk = verify_bounds_with(&case.net, inst, &rep.bounds, CostCap::at(rep.cap.cap), &case.tables[i])
                .map_err(|e| e.to_string())?;
            checks += 1;
            topologies += chk.checked;
            if let Some(v) = chk.violation {
                failures.push(format!("{}#{i} {} cuts {:?}", case.name, rep.config.mode, v));
            }
            if let Some(msg) = fixing_violation(&case.net, rep, &case.tables[i]) {
                failures.push(format!("{}#{i} {}: {msg}", case.name, rep.config.mode));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{checks} bound sets admit all {topologies} topologies within their caps; fixings agree"))
    } else {
        Err(failures.join("; "))
    }
}

/// Line-graph distances by breadth-first search over lines sharing a bus,
/// built from the raw line endpoints.
fn line_distances(net: &Network) -> Vec<Vec<usize>> {
    let n = net.num_lines();
    let mut at_bus: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for l in 0..n {
        let (a, b) = net.line_ends(l);
        at_bus.entry(a).or_default().push(l);
        at_bus.entry(b).or_default().push(l);
    }
    (0..n)
        .map(|src| {
            let mut dist = vec![usize::MAX; n];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(cur) = queue.pop_front() {
                let (a, b) = net.line_ends(cur);
                for bus in [a, b] {
                    for &next in &at_bus[&bus] {
                        if dist[next] == usize::MAX {
                            dist[next] = dist[cur] + 1;
                            queue.push_back(next);
                        }
                    }
                }
            }
            dist
        })
        .collect()
}

fn criterion_nesting(large: &Network) -> Result<String, String> {
    let g = build_line_graph(large);
    let dist = line_distances(large);
    let mut checked = 0;
    for (l, dist_l) in dist.iter().enumerate() {
        let mut prev: BTreeSet<usize> = BTreeSet::new();
        for k in 0..=6 {
            let cur: BTreeSet<usize> = g.neighborhood_positions(l, k).into_iter().collect();
            if cur.contains(&l) {
                return Err(format!("line position {l} lies in its own level-{k} neighborhood"));
            }
            if !prev.is_subset(&cur) {
                return Err(format!("level {} of line position {l} is not inside level {k}", k - 1));
            }
            let expected: BTreeSet<usize> = (0..large.num_lines())
                .filter(|&j| j != l && dist_l[j] <= k)
                .collect();
            if cur != expected {
                return Err(format!("level-{k} neighborhood of line position {l} differs from the distance oracle"));
            }
            checked += 1;
            prev = cur;
        }
    }
    Ok(format!(
        "{checked} neighborhoods on {} lines nest, exclude their line, and match distances",
        large.num_lines()
    ))
}

/// Flow and big-M widths of one line after a call, counting a side that
/// was proven infeasible (and so fixed away) as zero width.
fn effective_widths(bounds: &ots_core::formulation::LineBounds, fixed: Option<LineStatus>) -> (f64, f64) {
    let wf = if fixed == Some(LineStatus::Open) { 0.0 } else { bounds.flow_width() };
    let wm = if fixed == Some(LineStatus::Closed) { 0.0 } else { bounds.bigm_width() };
    (wf, wm)
}

fn criterion_width_in_k(cases: &[SmallCase], runs: &[BenchRun]) -> Result<String, String> {
    let controls = exact_controls();
    let no_fixings = BTreeMap::new();
    let mut calls = 0;
    for (case, run) in cases.iter().zip(runs) {
        let g = build_line_graph(&case.net);
        let b0 = initial_bounds(&case.net);
        for (i, inst) in case.instances.iter().enumerate() {
            let cap = run.caps[i].as_ref().ok_or_else(|| format!("{}#{i} has no cap", case.name))?.cap;
            let state = LineState {
                net: &case.net,
                inst,
                bounds: &b0,
                cap,
                fixed: &no_fixings,
            };
            for l in 0..case.net.num_lines() {
                let mut prev: Option<(f64, f64)> = None;
                for k in 0..=4 {
                    let relax = RelaxationSpec::with_binary(g.neighborhood_positions(l, k));
                    let up = tighten_line(state, l, &relax, &controls, 1e-9).map_err(|e| e.to_string())?;
                    calls += 1;
                    let w = effective_widths(&up.bounds, up.fixed);
                    if let Some(p) = prev {
                        let tol = |x: f64| 1e-5 * x.abs().max(1.0);
                        if w.0 > p.0 + tol(p.0) || w.1 > p.1 + tol(p.1) {
                            return Err(format!(
                                "{}#{i} line {}: widths {p:?} at k={} grow to {w:?} at k={k}",
                                case.name,
                                case.net.lines()[l].id,
                                k - 1
                            ));
                        }
                    }
                    prev = Some(w);
                }
            }
        }
    }
    Ok(format!("{calls} single-line calls for k = 0..4 never widen as k grows"))
}

fn contained(inner: &Bounds, outer: &Bounds) -> Option<usize> {
    inner.0.iter().zip(&outer.0).position(|(a, b)| {
        a.f_lo < b.f_lo || a.f_hi > b.f_hi || a.m_lo < b.m_lo || a.m_hi > b.m_hi
    })
}

fn criterion_clamp(cases: &[SmallCase], runs: &[BenchRun], large: Option<&LargeRun>) -> Result<String, String> {
    let mut checked = 0;
    for rep in runs.iter().flat_map(reports) {
        checked += 1;
        if let Some(l) = contained(&rep.bounds, &rep.bounds0) {
            return Err(format!("{} {} widened line position {l}", rep.network, rep.config.mode));
        }
    }
    // Second passes start from the first pass and may only shrink it further.
    let modes = [
        (Mode::Tbt { k: 1 }, Propagation::Sequential),
        (Mode::Tbt { k: 1 }, Propagation::Batch),
        (Mode::Sbt { t_ms: 100 }, Propagation::Sequential),
        (Mode::Sbt { t_ms: 100 }, Propagation::Batch),
    ];
    for (case, run) in cases.iter().zip(runs) {
        for (i, inst) in case.instances.iter().enumerate().take(3) {
            for (mode, propagation) in modes {
                let cfg = |passes| TightenConfig {
                    propagation,
                    passes,
                    ..TightenConfig::new(mode)
                };
                let one = run_tightening(&case.net, inst, &cfg(1), run.caps[i]).map_err(|e| e.to_string())?;
                let two = run_tightening(&case.net, inst, &cfg(2), run.caps[i]).map_err(|e| e.to_string())?;
                checked += 2;
                if let Some(l) = contained(&one.bounds, &one.bounds0).or(contained(&two.bounds, &one.bounds)) {
                    return Err(format!("{}#{i} {mode} {propagation:?} widened line position {l}", case.name));
                }
            }
        }
    }
    // The 118-bus rows only expose the width reductions, which must stay in [0, 100].
    for r in large.iter().flat_map(|l| l.records.iter()) {
        checked += 1;
        if !(0.0..=100.0).contains(&r.df_pct) || !(0.0..=100.0).contains(&r.dm_pct) {
            return Err(format!("118-bus instance {} {}: dF {} dM {}", r.instance, r.approach, r.df_pct, r.dm_pct));
        }
    }
    Ok(format!("{checked} tightening runs (sequential, batch, one and two passes) only shrink widths"))
}

fn mean_by_approach(records: &[BenchmarkRecord], approach: &str, f: impl Fn(&BenchmarkRecord) -> f64) -> Option<f64> {
    let v: Vec<f64> = records.iter().filter(|r| r.approach == approach).map(f).collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

struct LargeRun {
    records: Vec<BenchmarkRecord>,
    summary: String,
    exit_ok: bool,
    stderr_tail: String,
}

fn run_large_cli() -> Result<LargeRun, String> {
    let dir = work_dir();
    let ots = env!("CARGO_BIN_EXE_ots");
    let net = data("ieee118");
    let inst = dir.join("ieee118_instances.json");
    let results = dir.join("ieee118_results.csv");
    let summary = dir.join("ieee118_summary.csv");
    let profiles = dir.join("ieee118_profiles.csv");
    let gen = Command::new(ots)
        .args(["gen", "--network"])
        .arg(&net)
        .args(["--count", &LARGE_INSTANCES.to_string(), "--seed", &LARGE_SEED.to_string(), "--spread", "0.1", "--out"])
        .arg(&inst)
        .output()
        .map_err(|e| format!("cannot run ots gen: {e}"))?;
    if !gen.status.success() {
        return Err(format!("ots gen failed: {}", String::from_utf8_lossy(&gen.stderr)));
    }
    let out = Command::new(ots)
        .env("RUST_LOG", "warn")
        .args(["bench", "--network"])
        .arg(&net)
        .arg("--instances")
        .arg(&inst)
        .args([
            "--approaches",
            "mip,tbt-0,tbt-2,sbt-25",
            "--time-limit",
            &LARGE_TIME_LIMIT.to_string(),
            "--per-problem-limit",
            "5",
            "--out",
        ])
        .arg(&results)
        .arg("--summary")
        .arg(&summary)
        .arg("--profiles")
        .arg(&profiles)
        .output()
        .map_err(|e| format!("cannot run ots bench: {e}"))?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    let tail: Vec<&str> = stderr.lines().rev().take(5).collect();
    let records = match fs::File::open(&results) {
        Ok(f) => read_records(f).map_err(|e| e.to_string())?,
        Err(_) => Vec::new(),
    };
    println!("{}", String::from_utf8_lossy(&out.stdout));
    Ok(LargeRun {
        records,
        summary: fs::read_to_string(&summary).unwrap_or_default(),
        exit_ok: out.status.success(),
        stderr_tail: tail.into_iter().rev().collect::<Vec<_>>().join(" | "),
    })
}

fn criterion_tbt0_inert(run: &LargeRun) -> Result<String, String> {
    let dm = mean_by_approach(&run.records, "TBT-0", |r| r.dm_pct).ok_or("no TBT-0 rows")?;
    let n = run.records.iter().filter(|r| r.approach == "TBT-0").count();
    if n < 10 {
        return Err(format!("only {n} TBT-0 rows"));
    }
    if dm <= 0.5 {
        Ok(format!("mean dM of TBT-0 over {n} instances is {dm:.4}% (<= 0.5%)"))
    } else {
        Err(format!("mean dM of TBT-0 over {n} instances is {dm:.4}% (> 0.5%)"))
    }
}

fn criterion_tbt_trend(run: &LargeRun) -> Result<String, String> {
    let get = |a: &str, f: fn(&BenchmarkRecord) -> f64| mean_by_approach(&run.records, a, f).ok_or(format!("no {a} rows"));
    let (df0, dm0) = (get("TBT-0", |r| r.df_pct)?, get("TBT-0", |r| r.dm_pct)?);
    let (df2, dm2) = (get("TBT-2", |r| r.df_pct)?, get("TBT-2", |r| r.dm_pct)?);
    let detail = format!("TBT-2 dF {df2:.3}% dM {dm2:.3}% vs TBT-0 dF {df0:.3}% dM {dm0:.3}%");
    if df2 > df0 && dm2 > dm0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_table_shape(run: &LargeRun) -> Result<String, String> {
    if !run.exit_ok {
        return Err(format!("ots bench exited with failure: {}", run.stderr_tail));
    }
    let approaches = ["MIP", "SBT-25", "TBT-0", "TBT-2"];
    let mut pairs = BTreeSet::new();
    for r in &run.records {
        pairs.insert((r.instance, r.approach.clone()));
        if r.status == ots_core::bench::STATUS_ERROR {
            return Err(format!("instance {} {} errored", r.instance, r.approach));
        }
    }
    let want = LARGE_INSTANCES * approaches.len();
    if run.records.len() != want || pairs.len() != want {
        return Err(format!("{} rows ({} distinct), expected {want}", run.records.len(), pairs.len()));
    }
    let mut lines = run.summary.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let columns = [
        "mean_dF_pct", "mean_dM_pct", "mean_gap_pct", "max_gap_pct", "mean_dif_pct", "max_dif_pct", "mean_sub_pct",
        "max_sub_pct", "mean_tB_s", "mean_tO_s", "mean_tT_s", "n_TL",
    ];
    if let Some(c) = columns.iter().find(|c| !header.contains(c)) {
        return Err(format!("summary lacks column {c}"));
    }
    let tl_col = header.iter().position(|&c| c == "n_TL").expect("checked above");
    let mut seen = 0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let approach = cells[0];
        let reported: usize = cells[tl_col].parse().map_err(|_| format!("bad n_TL cell {line}"))?;
        let counted = run
            .records
            .iter()
            .filter(|r| r.approach == approach && r.hit_time_limit())
            .count();
        if reported != counted {
            return Err(format!("{approach}: n_TL {reported} but {counted} rows stopped at the limit"));
        }
        seen += 1;
    }
    if seen != approaches.len() {
        return Err(format!("summary has {seen} approach rows"));
    }
    let tl: usize = run.records.iter().filter(|r| r.hit_time_limit()).count();
    Ok(format!("{want} rows, summary with all columns, n_TL consistent ({tl} rows at the limit)"))
}

fn criterion_dif(small: &[BenchRun], large: Option<&LargeRun>) -> Result<String, String> {
    let rows = small
        .iter()
        .flat_map(|r| r.records.iter())
        .chain(large.into_iter().flat_map(|l| l.records.iter()))
        .filter(|r| r.solved());
    let mut n = 0;
    let mut worst: f64 = 0.0;
    for r in rows {
        n += 1;
        let dif = r.dif_pct.ok_or(format!("instance {} {} has no refit", r.instance, r.approach))?;
        worst = worst.max(dif);
        if dif > 0.01 {
            return Err(format!("instance {} {} dif {dif}%", r.instance, r.approach));
        }
    }
    Ok(format!("{n} optimal rows, max dif {worst:.2e}%"))
}

fn without_timing(records: &[BenchmarkRecord]) -> String {
    let stripped: Vec<BenchmarkRecord> = records
        .iter()
        .map(|r| BenchmarkRecord {
            t_b: 0.0,
            t_o: 0.0,
            t_t: 0.0,
            ..r.clone()
        })
        .collect();
    records_to_csv(&stripped)
}

fn criterion_determinism(cases: &[SmallCase], first: &[BenchRun]) -> Result<String, String> {
    let second = run_small(cases);
    let mut rows = 0;
    for ((case, a), b) in cases.iter().zip(first).zip(&second) {
        let (ca, cb) = (without_timing(&a.records), without_timing(&b.records));
        rows += a.records.len();
        if ca != cb {
            let diff = ca
                .lines()
                .zip(cb.lines())
                .find(|(x, y)| x != y)
                .map(|(x, y)| format!("{x} vs {y}"))
                .unwrap_or_else(|| "row count".into());
            return Err(format!("{}: rerun differs: {diff}", case.name));
        }
    }
    Ok(format!("rerun of {rows} rows is byte-identical outside the timing columns"))
}

fn main() -> ExitCode {
    let begin = Instant::now();
    let only = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').map(|x| x.trim().to_string()).collect());
    let mut suite = Suite {
        only,
        verdicts: Vec::new(),
    };
    let small_ids = ["1", "2", "3b", "3c", "7", "8"];
    let large_ids = ["4", "5", "6"];

    let mut cases = Vec::new();
    let mut small = Vec::new();
    if small_ids.iter().any(|id| suite.wants(id)) {
        let start = Instant::now();
        cases = small_cases();
        small = run_small(&cases);
        println!("small suite solved in {:.1}s", start.elapsed().as_secs_f64());
    }
    let large_net = load_network(data("ieee118")).expect("118-bus network loads");

    let t = Instant::now();
    if suite.wants("1") {
        suite.record("1", "oracle equivalence", t, criterion_oracle(&cases, &small));
    }
    let t = Instant::now();
    if suite.wants("2") {
        suite.record("2", "bound validity", t, criterion_validity(&cases, &small));
    }
    let t = Instant::now();
    if suite.wants("3a") {
        suite.record("3a", "neighborhood nesting", t, criterion_nesting(&large_net));
    }
    let t = Instant::now();
    if suite.wants("3b") {
        suite.record("3b", "width monotone in k", t, criterion_width_in_k(&cases, &small));
    }

    let large = if large_ids.iter().any(|id| suite.wants(id)) {
        let start = Instant::now();
        match run_large_cli() {
            Ok(run) => {
                println!("118-bus benchmark finished in {:.1}s", start.elapsed().as_secs_f64());
                Some(run)
            }
            Err(e) => {
                println!("118-bus benchmark could not run: {e}");
                None
            }
        }
    } else {
        None
    };
    let missing = || Err("118-bus benchmark did not run".to_string());

    let t = Instant::now();
    if suite.wants("3c") {
        suite.record("3c", "tightening clamp", t, criterion_clamp(&cases, &small, large.as_ref()));
    }
    let t = Instant::now();
    if suite.wants("4") {
        suite.record("4", "TBT-0 big-M inertness", t, large.as_ref().map_or_else(missing, criterion_tbt0_inert));
    }
    let t = Instant::now();
    if suite.wants("5") {
        suite.record("5", "TBT-k trend", t, large.as_ref().map_or_else(missing, criterion_tbt_trend));
    }
    let t = Instant::now();
    if suite.wants("6") {
        suite.record("6", "table shape", t, large.as_ref().map_or_else(missing, criterion_table_shape));
    }
    let t = Instant::now();
    if suite.wants("7") {
        suite.record("7", "dif integrity", t, criterion_dif(&small, large.as_ref()));
    }
    let t = Instant::now();
    if suite.wants("8") {
        suite.record("8", "determinism", t, criterion_determinism(&cases, &small));
    }

    let failed: Vec<&Verdict> = suite.verdicts.iter().filter(|v| !v.pass).collect();
    println!(
        "acceptance: {} passed, {} failed, {:.1}s wall clock",
        suite.verdicts.len() - failed.len(),
        failed.len(),
        begin.elapsed().as_secs_f64()
    );
    for v in &failed {
        println!("failed criterion {} ({}): {}", v.id, v.name, v.detail);
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
