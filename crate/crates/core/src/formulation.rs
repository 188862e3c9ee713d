//! Model builders for the big-M switching MILP, the per-line bounding
//! problems, and the fixed-topology DC-OPF.
//!
//! Variable names are stable: `p_{bus}`, `theta_{bus}`, `f_{line}`,
//! `ftil_{line}` and `x_{line}`, using the ids from the network file.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{ModelSpec, Relation, Sense, VarId, VarKind};
use crate::netmodel::{Instance, LineId, Network};

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("bounds missing or misaligned for line {0}")]
    MissingBounds(LineId),
    #[error("inconsistent fixing of line {0}")]
    InconsistentFixing(LineId),
    #[error("instance has {got} demand entries, network has {expected} buses")]
    DemandMismatch { expected: usize, got: usize },
}

/// Flow and big-M bounds of one line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineBounds {
    pub line: LineId,
    pub f_lo: f64,
    pub f_hi: f64,
    pub m_lo: f64,
    pub m_hi: f64,
}

impl LineBounds {
    pub fn flow_width(&self) -> f64 {
        self.f_hi - self.f_lo
    }

    pub fn bigm_width(&self) -> f64 {
        self.m_hi - self.m_lo
    }
}

/// Per-line bounds, one entry per line in network order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bounds(pub Vec<LineBounds>);

impl Bounds {
    pub fn line(&self, pos: usize) -> &LineBounds {
        &self.0[pos]
    }

    pub fn line_mut(&mut self, pos: usize) -> &mut LineBounds {
        &mut self.0[pos]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks alignment with `net` and that every line bound contains zero
    /// and stays inside the thermal limits.
    pub fn check(&self, net: &Network) -> Result<(), BuildError> {
        for (pos, line) in net.lines().iter().enumerate() {
            let b = self.0.get(pos).ok_or(BuildError::MissingBounds(line.id))?;
            let ok = b.line == line.id
                && b.f_lo <= 0.0
                && 0.0 <= b.f_hi
                && b.m_lo <= 0.0
                && 0.0 <= b.m_hi
                && b.f_lo >= line.f_min
                && b.f_hi <= line.f_max
                && [b.f_lo, b.f_hi, b.m_lo, b.m_hi].iter().all(|v| v.is_finite());
            if !ok {
                return Err(BuildError::MissingBounds(line.id));
            }
        }
        if self.0.len() != net.num_lines() {
            return Err(BuildError::MissingBounds(self.0[net.num_lines()].line));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineStatus {
    Open,
    Closed,
}

impl LineStatus {
    pub fn value(self) -> f64 {
        match self {
            LineStatus::Open => 0.0,
            LineStatus::Closed => 1.0,
        }
    }
}

/// Which switching variables are integral, and which are pinned.
///
/// Lines are addressed by network position. Lines outside `binary_lines`
/// get a continuous status in `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxationSpec {
    pub binary_lines: BTreeSet<usize>,
    pub fixed: BTreeMap<usize, LineStatus>,
}

impl RelaxationSpec {
    pub fn all_binary(num_lines: usize) -> Self {
        RelaxationSpec {
            binary_lines: (0..num_lines).collect(),
            fixed: BTreeMap::new(),
        }
    }

    pub fn all_relaxed() -> Self {
        RelaxationSpec::default()
    }

    pub fn with_binary(lines: impl IntoIterator<Item = usize>) -> Self {
        RelaxationSpec {
            binary_lines: lines.into_iter().collect(),
            fixed: BTreeMap::new(),
        }
    }

    pub fn with_fixed(mut self, fixed: &BTreeMap<usize, LineStatus>) -> Self {
        self.fixed.extend(fixed.iter().map(|(k, v)| (*k, *v)));
        self
    }

    /// Pins `line`; fails if it is already pinned to the other status.
    pub fn fix(&mut self, line: usize, status: LineStatus, id: LineId) -> Result<(), BuildError> {
        match self.fixed.insert(line, status) {
            Some(prev) if prev != status => Err(BuildError::InconsistentFixing(id)),
            _ => Ok(()),
        }
    }
}

/// Upper bound on the optimal generation cost, when known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostCap(pub Option<f64>);

impl CostCap {
    pub fn none() -> Self {
        CostCap(None)
    }

    pub fn at(cap: f64) -> Self {
        CostCap(Some(cap))
    }
}

/// Handles to the variables of a switching model.
#[derive(Debug, Clone, PartialEq)]
pub struct OtsVars {
    pub p: Vec<VarId>,
    pub theta: Vec<VarId>,
    pub f: Vec<VarId>,
    pub ftil: Vec<VarId>,
    pub x: Vec<VarId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtsModel {
    pub spec: ModelSpec,
    pub vars: OtsVars,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundTarget {
    /// Physical flow `f_l`, with the line forced closed.
    Flow,
    /// Dummy flow `ftil_l`, with the line forced open.
    Dummy,
}

fn check_inputs(net: &Network, inst: &Instance, bounds: &Bounds, relax: &RelaxationSpec) -> Result<(), BuildError> {
    if inst.demand.len() != net.num_buses() {
        return Err(BuildError::DemandMismatch {
            expected: net.num_buses(),
            got: inst.demand.len(),
        });
    }
    bounds.check(net)?;
    if let Some(&bad) = relax
        .fixed
        .keys()
        .chain(relax.binary_lines.iter())
        .find(|&&l| l >= net.num_lines())
    {
        return Err(BuildError::InconsistentFixing(LineId(bad as u32)));
    }
    Ok(())
}

/// Generation variables, angles (reference fixed at zero) and the cost objective.
fn add_dispatch(m: &mut ModelSpec, net: &Network) -> (Vec<VarId>, Vec<VarId>) {
    let p: Vec<VarId> = net
        .buses()
        .iter()
        .map(|b| m.add_var(format!("p_{}", b.id), b.p_min, b.p_max, VarKind::Continuous))
        .collect();
    let reference = net.reference_bus();
    let theta: Vec<VarId> = net
        .buses()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (lo, hi) = if i == reference {
                (0.0, 0.0)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            };
            m.add_var(format!("theta_{}", b.id), lo, hi, VarKind::Continuous)
        })
        .collect();
    m.set_objective(
        Sense::Minimize,
        net.buses().iter().zip(&p).map(|(b, &v)| (v, b.cost)),
    );
    (p, theta)
}

/// `p_n - d_n = sum of flows leaving n - sum of flows entering n`.
fn add_balance(m: &mut ModelSpec, net: &Network, inst: &Instance, p: &[VarId], f: &[VarId]) {
    let mut rows: Vec<Vec<(VarId, f64)>> = p.iter().map(|&v| vec![(v, 1.0)]).collect();
    for (l, &fv) in f.iter().enumerate() {
        let (from, to) = net.line_ends(l);
        rows[from].push((fv, -1.0));
        rows[to].push((fv, 1.0));
    }
    for ((bus, row), d) in net.buses().iter().zip(rows).zip(&inst.demand) {
        m.add_constraint(format!("balance_{}", bus.id), row, Relation::Eq, *d);
    }
}

fn add_cost_cap(m: &mut ModelSpec, net: &Network, p: &[VarId], cap: CostCap) {
    if let Some(c) = cap.0 {
        m.add_constraint(
            "cost_cap",
            net.buses().iter().zip(p).map(|(b, &v)| (v, b.cost)),
            Relation::Le,
            c,
        );
    }
}

/// The big-M switching MILP: Kirchhoff on the dummy flows, nodal balance,
/// the big-M coupling between `f` and `ftil`, and flow limits scaled by `x`.
pub fn build_ots(
    net: &Network,
    inst: &Instance,
    bounds: &Bounds,
    relax: &RelaxationSpec,
    cap: CostCap,
) -> Result<OtsModel, BuildError> {
    check_inputs(net, inst, bounds, relax)?;
    let mut m = ModelSpec::new();
    let (p, theta) = add_dispatch(&mut m, net);

    let f: Vec<VarId> = net
        .lines()
        .iter()
        .map(|l| m.add_var(format!("f_{}", l.id), f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous))
        .collect();
    let ftil: Vec<VarId> = net
        .lines()
        .iter()
        .map(|l| m.add_var(format!("ftil_{}", l.id), f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous))
        .collect();
    let x: Vec<VarId> = net
        .lines()
        .iter()
        .enumerate()
        .map(|(pos, l)| {
            let kind = if relax.binary_lines.contains(&pos) {
                VarKind::Binary
            } else {
                VarKind::Continuous
            };
            let (lo, hi) = match relax.fixed.get(&pos) {
                Some(s) => (s.value(), s.value()),
                None => (0.0, 1.0),
            };
            m.add_var(format!("x_{}", l.id), lo, hi, kind)
        })
        .collect();

    for (pos, line) in net.lines().iter().enumerate() {
        let (from, to) = net.line_ends(pos);
        let b = line.susceptance;
        m.add_constraint(
            format!("kirchhoff_{}", line.id),
            [(ftil[pos], 1.0), (theta[from], -b), (theta[to], b)],
            Relation::Eq,
            0.0,
        );
    }
    add_balance(&mut m, net, inst, &p, &f);
    for (pos, line) in net.lines().iter().enumerate() {
        let lb = bounds.line(pos);
        // (1 - x) m_lo <= -f + ftil <= (1 - x) m_hi
        m.add_constraint(
            format!("bigm_lo_{}", line.id),
            [(f[pos], -1.0), (ftil[pos], 1.0), (x[pos], lb.m_lo)],
            Relation::Ge,
            lb.m_lo,
        );
        m.add_constraint(
            format!("bigm_hi_{}", line.id),
            [(f[pos], -1.0), (ftil[pos], 1.0), (x[pos], lb.m_hi)],
            Relation::Le,
            lb.m_hi,
        );
        // x f_lo <= f <= x f_hi
        m.add_constraint(
            format!("flow_lo_{}", line.id),
            [(f[pos], 1.0), (x[pos], -lb.f_lo)],
            Relation::Ge,
            0.0,
        );
        m.add_constraint(
            format!("flow_hi_{}", line.id),
            [(f[pos], 1.0), (x[pos], -lb.f_hi)],
            Relation::Le,
            0.0,
        );
    }
    add_cost_cap(&mut m, net, &p, cap);

    Ok(OtsModel {
        spec: m,
        vars: OtsVars { p, theta, f, ftil, x },
    })
}

/// One bounding problem for line `line` (network position): optimize `f_l`
/// with the line closed, or `ftil_l` with the line open, over the switching
/// region described by `relax` intersected with the cost cap.
#[allow(clippy::too_many_arguments)]
pub fn build_bounding(
    net: &Network,
    inst: &Instance,
    bounds: &Bounds,
    line: usize,
    target: BoundTarget,
    sense: Sense,
    relax: &RelaxationSpec,
    cap: CostCap,
) -> Result<OtsModel, BuildError> {
    let id = net
        .lines()
        .get(line)
        .map(|l| l.id)
        .ok_or(BuildError::MissingBounds(LineId(line as u32)))?;
    let side = match target {
        BoundTarget::Flow => LineStatus::Closed,
        BoundTarget::Dummy => LineStatus::Open,
    };
    let mut relax = relax.clone();
    relax.fix(line, side, id)?;
    let mut model = build_ots(net, inst, bounds, &relax, cap)?;
    let var = match target {
        BoundTarget::Flow => model.vars.f[line],
        BoundTarget::Dummy => model.vars.ftil[line],
    };
    model.spec.set_objective(sense, [(var, 1.0)]);
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcopfModel {
    pub spec: ModelSpec,
    pub p: Vec<VarId>,
    pub theta: Vec<VarId>,
    pub f: Vec<VarId>,
}

/// Linear DC-OPF for a fixed topology (`closed[l]`), with thermal limits at
/// full width and no big-M constants. Open lines carry zero flow and impose
/// no angle relation; each island gets its own angle reference at its lowest
/// bus id.
pub fn build_dcopf_fixed(net: &Network, inst: &Instance, closed: &[bool]) -> DcopfModel {
    assert_eq!(closed.len(), net.num_lines(), "one status per line");
    assert_eq!(inst.demand.len(), net.num_buses(), "one demand per bus");
    let mut m = ModelSpec::new();
    let p: Vec<VarId> = net
        .buses()
        .iter()
        .map(|b| m.add_var(format!("p_{}", b.id), b.p_min, b.p_max, VarKind::Continuous))
        .collect();

    let labels = net.components(|l| closed[l]);
    let mut island_ref: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, b) in net.buses().iter().enumerate() {
        island_ref
            .entry(labels[i])
            .and_modify(|r| {
                if b.id < net.buses()[*r].id {
                    *r = i;
                }
            })
            .or_insert(i);
    }
    let theta: Vec<VarId> = net
        .buses()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (lo, hi) = if island_ref[&labels[i]] == i {
                (0.0, 0.0)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            };
            m.add_var(format!("theta_{}", b.id), lo, hi, VarKind::Continuous)
        })
        .collect();
    let f: Vec<VarId> = net
        .lines()
        .iter()
        .zip(closed)
        .map(|(l, &on)| {
            let (lo, hi) = if on { (l.f_min, l.f_max) } else { (0.0, 0.0) };
            m.add_var(format!("f_{}", l.id), lo, hi, VarKind::Continuous)
        })
        .collect();
    m.set_objective(
        Sense::Minimize,
        net.buses().iter().zip(&p).map(|(b, &v)| (v, b.cost)),
    );
    for (pos, line) in net.lines().iter().enumerate() {
        if !closed[pos] {
            continue;
        }
        let (from, to) = net.line_ends(pos);
        let b = line.susceptance;
        m.add_constraint(
            format!("kirchhoff_{}", line.id),
            [(f[pos], 1.0), (theta[from], -b), (theta[to], b)],
            Relation::Eq,
            0.0,
        );
    }
    add_balance(&mut m, net, inst, &p, &f);
    DcopfModel { spec: m, p, theta, f }
}
