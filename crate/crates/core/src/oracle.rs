//! Ground truth by enumeration: every topology's DC-OPF is solved and the
//! cheapest feasible one wins. Also checks that a set of bounds keeps every
//! topology under a cost cap representable in the big-M model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulation::{build_dcopf_fixed, build_ots, Bounds, CostCap, LineStatus, RelaxationSpec};
use crate::milp::{solve, SolveControls, SolveStatus, SolverError};
use crate::netmodel::{Instance, LineId, Network};
use crate::tighten::initial_bounds;

pub const DEFAULT_MAX_LINES: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("network has {lines} lines, enumeration is capped at {max}")]
    TooLarge { lines: usize, max: usize },
    #[error("no topology admits a feasible dispatch")]
    InfeasibleEverywhere,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid input: {0}")]
    Input(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub cost: f64,
    /// Closed (true) / open (false) per line, in network order.
    pub x_opt: Vec<bool>,
    pub closed_lines: Vec<LineId>,
    pub flows: Vec<f64>,
    pub n_feasible: usize,
    pub n_topologies: usize,
}

/// Topology for Gray-code step `i`: bit `l` of `i ^ (i >> 1)` closes line `l`.
fn gray_topology(i: u64, num_lines: usize) -> Vec<bool> {
    let g = i ^ (i >> 1);
    (0..num_lines).map(|l| g >> l & 1 == 1).collect()
}

fn check_size(net: &Network, max_lines: usize) -> Result<(), OracleError> {
    if net.num_lines() > max_lines || net.num_lines() >= 64 {
        return Err(OracleError::TooLarge {
            lines: net.num_lines(),
            max: max_lines,
        });
    }
    Ok(())
}

fn oracle_controls() -> SolveControls {
    SolveControls {
        rel_gap: 0.0,
        ..SolveControls::default()
    }
}

/// Optimal DC-OPF cost at a fixed topology, `None` when infeasible.
pub fn dcopf_cost(net: &Network, inst: &Instance, closed: &[bool]) -> Result<Option<(f64, Vec<f64>)>, OracleError> {
    let m = build_dcopf_fixed(net, inst, closed);
    let out = solve(&m.spec, &oracle_controls())?;
    match out.status {
        SolveStatus::Optimal => {
            let primal = out.primal.expect("optimal outcome carries a primal");
            let flows = m.f.iter().map(|v| primal[v.0]).collect();
            Ok(Some((out.objective.expect("optimal outcome carries an objective"), flows)))
        }
        SolveStatus::Infeasible => Ok(None),
        other => Err(OracleError::Solver(SolverError::Backend(format!(
            "fixed-topology dispatch ended with status {other}"
        )))),
    }
}

/// Every topology in Gray-code order, paired with its DC-OPF result.
fn enumerate(
    net: &Network,
    inst: &Instance,
    mut visit: impl FnMut(Vec<bool>, Option<(f64, Vec<f64>)>) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    inst.validate_against(net).map_err(|e| OracleError::Input(e.to_string()))?;
    for i in 0..(1u64 << net.num_lines()) {
        let x = gray_topology(i, net.num_lines());
        let r = dcopf_cost(net, inst, &x)?;
        visit(x, r)?;
    }
    Ok(())
}

fn same_cost(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Exact optimum over all `2^|L|` topologies. Ties go to the
/// lexicographically largest status vector, i.e. the most lines closed
/// starting from the first line.
pub fn brute_force(net: &Network, inst: &Instance, max_lines: usize) -> Result<OracleResult, OracleError> {
    check_size(net, max_lines)?;
    let mut best: Option<(f64, Vec<bool>, Vec<f64>)> = None;
    let mut n_feasible = 0;
    enumerate(net, inst, |x, r| {
        if let Some((cost, flows)) = r {
            n_feasible += 1;
            let better = match &best {
                None => true,
                Some((bc, bx, _)) => {
                    if same_cost(cost, *bc) {
                        x > *bx
                    } else {
                        cost < *bc
                    }
                }
            };
            if better {
                best = Some((cost, x, flows));
            }
        }
        Ok(())
    })?;
    let (cost, x_opt, flows) = best.ok_or(OracleError::InfeasibleEverywhere)?;
    Ok(OracleResult {
        cost,
        closed_lines: net
            .lines()
            .iter()
            .zip(&x_opt)
            .filter(|(_, &c)| c)
            .map(|(l, _)| l.id)
            .collect(),
        x_opt,
        flows,
        n_feasible,
        n_topologies: 1 << net.num_lines(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsViolation {
    pub x: Vec<bool>,
    /// The line whose bounds alone cut the topology off, when there is one.
    pub line: Option<LineId>,
    pub dcopf_cost: f64,
    pub model_status: SolveStatus,
    pub model_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub checked: usize,
    pub violation: Option<BoundsViolation>,
}

impl BoundsCheck {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Solves the big-M model with every status pinned to `x` and returns its
/// status and cost.
fn pinned_cost(net: &Network, inst: &Instance, bounds: &Bounds, x: &[bool]) -> Result<(SolveStatus, Option<f64>), OracleError> {
    let mut relax = RelaxationSpec::all_relaxed();
    for (l, &c) in x.iter().enumerate() {
        let status = if c { LineStatus::Closed } else { LineStatus::Open };
        relax.fixed.insert(l, status);
    }
    let m = build_ots(net, inst, bounds, &relax, CostCap::none()).map_err(|e| OracleError::Input(e.to_string()))?;
    let out = solve(&m.spec, &oracle_controls())?;
    Ok((out.status, out.objective))
}

fn admits(dcopf: f64, status: SolveStatus, cost: Option<f64>) -> bool {
    status == SolveStatus::Optimal && cost.is_some_and(|c| c <= dcopf + 1e-6 * dcopf.abs().max(1.0))
}

/// DC-OPF result of every topology, in Gray-code order. Costs are `None`
/// for infeasible topologies.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyTable {
    pub entries: Vec<(Vec<bool>, Option<f64>)>,
}

pub fn enumerate_topologies(net: &Network, inst: &Instance, max_lines: usize) -> Result<TopologyTable, OracleError> {
    check_size(net, max_lines)?;
    let mut entries = Vec::with_capacity(1 << net.num_lines());
    enumerate(net, inst, |x, r| {
        entries.push((x, r.map(|(c, _)| c)));
        Ok(())
    })?;
    Ok(TopologyTable { entries })
}

/// For each topology whose DC-OPF cost is within `cap`, checks that the
/// big-M model under `bounds` with that topology pinned reaches the same
/// cost. Stops at the first topology that is cut off.
pub fn verify_bounds(
    net: &Network,
    inst: &Instance,
    bounds: &Bounds,
    cap: CostCap,
    max_lines: usize,
) -> Result<BoundsCheck, OracleError> {
    let table = enumerate_topologies(net, inst, max_lines)?;
    verify_bounds_with(net, inst, bounds, cap, &table)
}

/// [`verify_bounds`] against a precomputed topology table for `inst`.
pub fn verify_bounds_with(
    net: &Network,
    inst: &Instance,
    bounds: &Bounds,
    cap: CostCap,
    table: &TopologyTable,
) -> Result<BoundsCheck, OracleError> {
    bounds.check(net).map_err(|e| OracleError::Input(e.to_string()))?;
    let reference = initial_bounds(net);
    let mut checked = 0;
    for (x, r) in &table.entries {
        let Some(dcopf) = *r else { continue };
        if let Some(c) = cap.0 {
            if dcopf > c + 1e-6 * c.abs().max(1.0) {
                continue;
            }
        }
        checked += 1;
        let (status, cost) = pinned_cost(net, inst, bounds, x)?;
        if admits(dcopf, status, cost) {
            continue;
        }
        let mut culprit = None;
        for l in 0..net.num_lines() {
            let mut widened = bounds.clone();
            *widened.line_mut(l) = *reference.line(l);
            let (s, c) = pinned_cost(net, inst, &widened, x)?;
            if admits(dcopf, s, c) {
                culprit = Some(net.lines()[l].id);
                break;
            }
        }
        return Ok(BoundsCheck {
            checked,
            violation: Some(BoundsViolation {
                x: x.clone(),
                line: culprit,
                dcopf_cost: dcopf,
                model_status: status,
                model_cost: cost,
            }),
        });
    }
    Ok(BoundsCheck {
        checked,
        violation: None,
    })
}
