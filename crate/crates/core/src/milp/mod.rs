//! Solver-agnostic linear / mixed-integer model representation.
//!
//! A [`ModelSpec`] is a plain value: variables with bounds and integrality,
//! linear rows, and a linear objective. [`solve`] hands it to the single
//! backend behind this module; nothing outside `milp` names the solver.

mod highs;
mod lp_format;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::highs::backend_identity;

/// Errors raised while validating or solving a model.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("backend error: {0}")]
    Backend(String),
}

/// Index of a variable inside its [`ModelSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// Sparse coefficients; each variable appears at most once.
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub sense: Sense,
    pub terms: Vec<(VarId, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self::new()
    }
}

impl ModelSpec {
    pub fn new() -> Self {
        ModelSpec {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective {
                sense: Sense::Minimize,
                terms: Vec::new(),
            },
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, kind: VarKind) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            kind,
        });
        VarId(self.variables.len() - 1)
    }

    /// Adds a row. Repeated variables in `terms` are merged and exact zeros dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        self.constraints.push(Constraint {
            name: name.into(),
            terms: merge_terms(terms),
            relation,
            rhs,
        });
    }

    pub fn set_objective(&mut self, sense: Sense, terms: impl IntoIterator<Item = (VarId, f64)>) {
        self.objective = Objective {
            sense,
            terms: merge_terms(terms),
        };
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn var_mut(&mut self, id: VarId) -> &mut Variable {
        &mut self.variables[id.0]
    }

    pub fn num_binary(&self) -> usize {
        self.variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    /// Copy of the model with every binary variable made continuous.
    pub fn relaxed(&self) -> ModelSpec {
        let mut copy = self.clone();
        for v in &mut copy.variables {
            v.kind = VarKind::Continuous;
        }
        copy
    }

    /// Copy of the model with the integrality of the listed variables replaced.
    pub fn with_integrality(&self, changes: impl IntoIterator<Item = (VarId, VarKind)>) -> ModelSpec {
        let mut copy = self.clone();
        for (id, kind) in changes {
            copy.variables[id.0].kind = kind;
        }
        copy
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.variables.len();
        for v in &self.variables {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(SolverError::InvalidModel(format!(
                    "variable {} has bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(SolverError::InvalidModel(format!(
                    "binary variable {} has bounds [{}, {}] outside [0, 1]",
                    v.name, v.lower, v.upper
                )));
            }
        }
        let check_terms = |owner: &str, terms: &[(VarId, f64)]| -> Result<(), SolverError> {
            for (id, coef) in terms {
                if id.0 >= n {
                    return Err(SolverError::InvalidModel(format!(
                        "{owner} references undeclared variable #{}",
                        id.0
                    )));
                }
                if !coef.is_finite() {
                    return Err(SolverError::InvalidModel(format!(
                        "{owner} has non-finite coefficient on {}",
                        self.variables[id.0].name
                    )));
                }
            }
            Ok(())
        };
        for c in &self.constraints {
            check_terms(&format!("constraint {}", c.name), &c.terms)?;
            if c.rhs.is_nan() {
                return Err(SolverError::InvalidModel(format!("constraint {} has NaN rhs", c.name)));
            }
        }
        check_terms("objective", &self.objective.terms)?;
        Ok(())
    }

    /// Renders the model in CPLEX LP format.
    pub fn to_lp_string(&self) -> String {
        lp_format::render(self)
    }

    pub fn write_lp(&self, path: &std::path::Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_lp_string())
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective
            .terms
            .iter()
            .map(|(id, c)| c * values[id.0])
            .sum()
    }
}

fn merge_terms(terms: impl IntoIterator<Item = (VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut out: Vec<(VarId, f64)> = Vec::new();
    for (id, coef) in terms {
        match out.iter_mut().find(|(j, _)| *j == id) {
            Some(entry) => entry.1 += coef,
            None => out.push((id, coef)),
        }
    }
    out.retain(|(_, c)| *c != 0.0);
    out
}

/// Limits applied to a single solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveControls {
    /// Wall-clock limit in seconds; fractional values are honored.
    pub time_limit: f64,
    /// Relative MIP gap at which the search stops.
    pub rel_gap: f64,
    pub threads: usize,
    /// Share of search effort given to primal heuristics, in `[0, 1]`.
    /// `None` keeps the backend default.
    pub heuristic_effort: Option<f64>,
}

impl Default for SolveControls {
    fn default() -> Self {
        SolveControls {
            time_limit: 3600.0,
            rel_gap: 1e-4,
            threads: 1,
            heuristic_effort: None,
        }
    }
}

impl SolveControls {
    pub fn with_time_limit(time_limit: f64) -> Self {
        SolveControls {
            time_limit,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.time_limit > 0.0) {
            return Err(SolverError::InvalidModel(format!(
                "time limit must be positive, got {}",
                self.time_limit
            )));
        }
        if !(self.rel_gap >= 0.0) {
            return Err(SolverError::InvalidModel(format!(
                "relative gap must be non-negative, got {}",
                self.rel_gap
            )));
        }
        if self.threads == 0 {
            return Err(SolverError::InvalidModel("thread count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    FeasibleAtLimit,
    NoSolutionAtLimit,
    Infeasible,
    Unbounded,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleAtLimit)
    }

    pub fn hit_limit(self) -> bool {
        matches!(self, SolveStatus::FeasibleAtLimit | SolveStatus::NoSolutionAtLimit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::FeasibleAtLimit => "FeasibleAtLimit",
            SolveStatus::NoSolutionAtLimit => "NoSolutionAtLimit",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::Unbounded => "Unbounded",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "Optimal" => SolveStatus::Optimal,
            "FeasibleAtLimit" => SolveStatus::FeasibleAtLimit,
            "NoSolutionAtLimit" => SolveStatus::NoSolutionAtLimit,
            "Infeasible" => SolveStatus::Infeasible,
            "Unbounded" => SolveStatus::Unbounded,
            other => return Err(format!("unknown solve status {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Values indexed by [`VarId`]; present when `status.has_solution()`.
    pub primal: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Best proven bound on the optimum (lower for min, upper for max).
    pub dual_bound: Option<f64>,
    /// Wall seconds.
    pub runtime: f64,
}

impl SolveOutcome {
    pub fn value(&self, id: VarId) -> Option<f64> {
        self.primal.as_ref().map(|p| p[id.0])
    }
}

/// Whether the backend supports indicator constraints natively.
pub const SUPPORTS_INDICATOR_CONSTRAINTS: bool = false;

pub fn solve(model: &ModelSpec, controls: &SolveControls) -> Result<SolveOutcome, SolverError> {
    model.validate()?;
    controls.validate()?;
    highs::solve(model, controls)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-7 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn single_variable_lower_bound() {
        let mut m = ModelSpec::new();
        let x = m.add_var("x", 0.0, 10.0, VarKind::Continuous);
        m.add_constraint("lb", [(x, 1.0)], Relation::Ge, 3.0);
        m.set_objective(Sense::Minimize, [(x, 1.0)]);
        let out = solve(&m, &SolveControls::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_close(out.objective.unwrap(), 3.0);
        assert_close(out.dual_bound.unwrap(), 3.0);
        assert_close(out.value(x).unwrap(), 3.0);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut m = ModelSpec::new();
        let x = m.add_var("x", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous);
        m.add_constraint("a", [(x, 1.0)], Relation::Ge, 2.0);
        m.add_constraint("b", [(x, 1.0)], Relation::Le, 1.0);
        m.set_objective(Sense::Minimize, [(x, 1.0)]);
        let out = solve(&m, &SolveControls::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.primal.is_none());
    }

    #[test]
    fn binary_cover() {
        let mut m = ModelSpec::new();
        let x = m.add_var("x", 0.0, 1.0, VarKind::Binary);
        let y = m.add_var("y", 0.0, 1.0, VarKind::Binary);
        m.add_constraint("cover", [(x, 1.0), (y, 1.0)], Relation::Ge, 1.0);
        m.set_objective(Sense::Minimize, [(x, 1.0), (y, 1.0)]);
        let out = solve(&m, &SolveControls::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_close(out.objective.unwrap(), 1.0);
        let p = out.primal.unwrap();
        for v in p {
            assert!((v - v.round()).abs() < 1e-6);
        }
    }

    #[test]
    fn maximization_dual_bound_is_upper() {
        // max x + y, x + 2y <= 3.5, integer-ish via binaries scaled
        let mut m = ModelSpec::new();
        let a = m.add_var("a", 0.0, 1.0, VarKind::Binary);
        let b = m.add_var("b", 0.0, 1.0, VarKind::Binary);
        let c = m.add_var("c", 0.0, 1.0, VarKind::Binary);
        m.add_constraint("knap", [(a, 2.0), (b, 2.0), (c, 3.0)], Relation::Le, 4.0);
        m.set_objective(Sense::Maximize, [(a, 3.0), (b, 2.0), (c, 4.0)]);
        let out = solve(&m, &SolveControls::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_close(out.objective.unwrap(), 5.0);
        assert!(out.dual_bound.unwrap() >= out.objective.unwrap() - 1e-9);
    }

    #[test]
    fn unbounded_is_reported() {
        let mut m = ModelSpec::new();
        let x = m.add_var("x", 0.0, f64::INFINITY, VarKind::Continuous);
        m.set_objective(Sense::Maximize, [(x, 1.0)]);
        let out = solve(&m, &SolveControls::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Unbounded);
    }

    #[test]
    fn relaxed_copy_drops_integrality_only() {
        let mut m = ModelSpec::new();
        let x = m.add_var("x", 0.0, 1.0, VarKind::Binary);
        m.add_constraint("half", [(x, 2.0)], Relation::Le, 1.0);
        m.set_objective(Sense::Maximize, [(x, 1.0)]);
        let r = m.relaxed();
        assert_eq!(r.num_binary(), 0);
        assert_eq!(r.constraints, m.constraints);
        let mip = solve(&m, &SolveControls::default()).unwrap();
        let lp = solve(&r, &SolveControls::default()).unwrap();
        assert_close(mip.objective.unwrap(), 0.0);
        assert_close(lp.objective.unwrap(), 0.5);
    }

    #[test]
    fn validation_rejects_bad_models() {
        let mut m = ModelSpec::new();
        m.add_var("x", 1.0, 0.0, VarKind::Continuous);
        assert!(matches!(m.validate(), Err(SolverError::InvalidModel(_))));

        let mut m = ModelSpec::new();
        m.add_var("z", 0.0, 2.0, VarKind::Binary);
        assert!(m.validate().is_err());

        let mut m = ModelSpec::new();
        m.add_var("x", 0.0, 1.0, VarKind::Continuous);
        m.add_constraint("ghost", [(VarId(7), 1.0)], Relation::Le, 1.0);
        assert!(m.validate().is_err());

        let bad = SolveControls {
            time_limit: 0.0,
            ..SolveControls::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn merge_terms_combines_duplicates() {
        let mut m = ModelSpec::new();
        let x = m.add_var("x", 0.0, 1.0, VarKind::Continuous);
        let y = m.add_var("y", 0.0, 1.0, VarKind::Continuous);
        m.add_constraint("r", [(x, 1.0), (y, 2.0), (x, -1.0), (y, 0.5)], Relation::Le, 1.0);
        assert_eq!(m.constraints[0].terms, vec![(y, 2.5)]);
    }

    #[test]
    fn resolve_is_repeatable() {
        let mut m = ModelSpec::new();
        let vars: Vec<_> = (0..8)
            .map(|i| m.add_var(format!("x{i}"), 0.0, 1.0, VarKind::Binary))
            .collect();
        m.add_constraint(
            "cap",
            vars.iter().enumerate().map(|(i, v)| (*v, 1.0 + i as f64 * 0.7)),
            Relation::Le,
            9.3,
        );
        m.set_objective(
            Sense::Maximize,
            vars.iter().enumerate().map(|(i, v)| (*v, 2.0 + ((i * 7) % 5) as f64)),
        );
        let a = solve(&m, &SolveControls::default()).unwrap();
        let b = solve(&m, &SolveControls::default()).unwrap();
        assert_eq!(a.status, b.status);
        assert!((a.objective.unwrap() - b.objective.unwrap()).abs() <= 1e-9);
    }
}
