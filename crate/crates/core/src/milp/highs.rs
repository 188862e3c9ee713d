//! HiGHS adapter. The only file in the crate that talks to a solver.

use std::ffi::{c_void, CStr, CString};
use std::time::Instant;

use highs_sys::*;

use super::{ModelSpec, Relation, Sense, SolveControls, SolveOutcome, SolveStatus, SolverError, VarKind};

/// Owned HiGHS instance; destroyed on drop.
struct Env(*mut c_void);

impl Env {
    fn new() -> Result<Self, SolverError> {
        // SAFETY: Highs_create has no preconditions.
        let ptr = unsafe { Highs_create() };
        if ptr.is_null() {
            return Err(SolverError::Backend("Highs_create returned null".into()));
        }
        Ok(Env(ptr))
    }

    fn check(&self, status: HighsInt, what: &str) -> Result<(), SolverError> {
        if status == STATUS_ERROR {
            Err(SolverError::Backend(format!("{what} failed")))
        } else {
            Ok(())
        }
    }

    fn set_bool(&self, name: &str, value: bool) -> Result<(), SolverError> {
        let key = CString::new(name).expect("option names have no NUL");
        // SAFETY: self.0 is a live instance and key is NUL-terminated.
        let st = unsafe { Highs_setBoolOptionValue(self.0, key.as_ptr(), value as HighsInt) };
        self.check(st, name)
    }

    fn set_int(&self, name: &str, value: HighsInt) -> Result<(), SolverError> {
        let key = CString::new(name).expect("option names have no NUL");
        // SAFETY: as above.
        let st = unsafe { Highs_setIntOptionValue(self.0, key.as_ptr(), value) };
        self.check(st, name)
    }

    fn set_double(&self, name: &str, value: f64) -> Result<(), SolverError> {
        let key = CString::new(name).expect("option names have no NUL");
        // SAFETY: as above.
        let st = unsafe { Highs_setDoubleOptionValue(self.0, key.as_ptr(), value) };
        self.check(st, name)
    }

    fn set_string(&self, name: &str, value: &str) -> Result<(), SolverError> {
        let key = CString::new(name).expect("option names have no NUL");
        let val = CString::new(value).expect("option values have no NUL");
        // SAFETY: as above.
        let st = unsafe { Highs_setStringOptionValue(self.0, key.as_ptr(), val.as_ptr()) };
        self.check(st, name)
    }

    fn double_info(&self, name: &str) -> Option<f64> {
        let key = CString::new(name).expect("info names have no NUL");
        let mut out = 0.0;
        // SAFETY: as above; out is a valid f64 slot.
        let st = unsafe { Highs_getDoubleInfoValue(self.0, key.as_ptr(), &mut out) };
        (st == STATUS_OK).then_some(out)
    }

    fn int_info(&self, name: &str) -> Option<HighsInt> {
        let key = CString::new(name).expect("info names have no NUL");
        let mut out: HighsInt = 0;
        // SAFETY: as above.
        let st = unsafe { Highs_getIntInfoValue(self.0, key.as_ptr(), &mut out) };
        (st == STATUS_OK).then_some(out)
    }
}

impl Drop for Env {
    fn drop(&mut self) {
        // SAFETY: the pointer came from Highs_create and is dropped once.
        unsafe { Highs_destroy(self.0) }
    }
}

/// Backend name and version, e.g. `HiGHS 1.11.0`.
pub fn backend_identity() -> String {
    // SAFETY: Highs_version returns a static NUL-terminated string.
    let version = unsafe { CStr::from_ptr(Highs_version()) };
    format!("HiGHS {}", version.to_string_lossy())
}

fn to_highs_bound(v: f64) -> f64 {
    if v == f64::INFINITY {
        1e30
    } else if v == f64::NEG_INFINITY {
        -1e30
    } else {
        v
    }
}

fn configure(env: &Env, controls: &SolveControls, presolve: bool) -> Result<(), SolverError> {
    env.set_bool("output_flag", false)?;
    env.set_double("time_limit", controls.time_limit)?;
    env.set_double("mip_rel_gap", controls.rel_gap)?;
    env.set_int("threads", controls.threads as HighsInt)?;
    env.set_int("random_seed", 0)?;
    if let Some(effort) = controls.heuristic_effort {
        env.set_double("mip_heuristic_effort", effort.clamp(0.0, 1.0))?;
    }
    if !presolve {
        env.set_string("presolve", "off")?;
    }
    Ok(())
}

fn pass_model(env: &Env, model: &ModelSpec) -> Result<(), SolverError> {
    let num_col = model.variables.len();
    let num_row = model.constraints.len();

    let mut cost = vec![0.0; num_col];
    for (id, c) in &model.objective.terms {
        cost[id.0] += c;
    }
    let col_lower: Vec<f64> = model.variables.iter().map(|v| to_highs_bound(v.lower)).collect();
    let col_upper: Vec<f64> = model.variables.iter().map(|v| to_highs_bound(v.upper)).collect();
    let integrality: Vec<HighsInt> = model
        .variables
        .iter()
        .map(|v| match v.kind {
            VarKind::Continuous => kHighsVarTypeContinuous,
            VarKind::Binary => kHighsVarTypeInteger,
        })
        .collect();

    let mut row_lower = Vec::with_capacity(num_row);
    let mut row_upper = Vec::with_capacity(num_row);
    let mut a_start: Vec<HighsInt> = Vec::with_capacity(num_row + 1);
    let mut a_index: Vec<HighsInt> = Vec::new();
    let mut a_value: Vec<f64> = Vec::new();
    for c in &model.constraints {
        let rhs = to_highs_bound(c.rhs);
        let (lo, hi) = match c.relation {
            Relation::Le => (-1e30, rhs),
            Relation::Ge => (rhs, 1e30),
            Relation::Eq => (rhs, rhs),
        };
        row_lower.push(lo);
        row_upper.push(hi);
        a_start.push(a_index.len() as HighsInt);
        for (id, v) in &c.terms {
            a_index.push(id.0 as HighsInt);
            a_value.push(*v);
        }
    }
    a_start.push(a_index.len() as HighsInt);

    let sense = match model.objective.sense {
        Sense::Minimize => kHighsObjSenseMinimize,
        Sense::Maximize => kHighsObjSenseMaximize,
    };
    let has_integer = integrality.iter().any(|&t| t != kHighsVarTypeContinuous);

    // SAFETY: every array has the length HiGHS expects for the given counts,
    // and all of them outlive the call (HiGHS copies the data).
    let st = unsafe {
        Highs_passMip(
            env.0,
            num_col as HighsInt,
            num_row as HighsInt,
            a_value.len() as HighsInt,
            MATRIX_FORMAT_ROW_WISE,
            sense,
            0.0,
            cost.as_ptr(),
            col_lower.as_ptr(),
            col_upper.as_ptr(),
            row_lower.as_ptr(),
            row_upper.as_ptr(),
            a_start.as_ptr(),
            a_index.as_ptr(),
            a_value.as_ptr(),
            if has_integer {
                integrality.as_ptr()
            } else {
                std::ptr::null()
            },
        )
    };
    env.check(st, "Highs_passMip")
}

fn run_once(model: &ModelSpec, controls: &SolveControls, presolve: bool) -> Result<(HighsInt, Env), SolverError> {
    let env = Env::new()?;
    configure(&env, controls, presolve)?;
    pass_model(&env, model)?;
    // SAFETY: env holds a fully specified model.
    let st = unsafe { Highs_run(env.0) };
    env.check(st, "Highs_run")?;
    // SAFETY: as above.
    let model_status = unsafe { Highs_getModelStatus(env.0) };
    Ok((model_status, env))
}

pub(super) fn solve(model: &ModelSpec, controls: &SolveControls) -> Result<SolveOutcome, SolverError> {
    let start = Instant::now();
    if model.variables.is_empty() {
        let feasible = model.constraints.iter().all(|c| match c.relation {
            Relation::Le => 0.0 <= c.rhs,
            Relation::Ge => 0.0 >= c.rhs,
            Relation::Eq => c.rhs == 0.0,
        });
        return Ok(SolveOutcome {
            status: if feasible { SolveStatus::Optimal } else { SolveStatus::Infeasible },
            primal: feasible.then(Vec::new),
            objective: feasible.then_some(0.0),
            dual_bound: feasible.then_some(0.0),
            runtime: start.elapsed().as_secs_f64(),
        });
    }

    let (mut model_status, mut env) = run_once(model, controls, true)?;
    if model_status == MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE {
        // Presolve cannot always tell the two apart; the plain solver can.
        let remaining = (controls.time_limit - start.elapsed().as_secs_f64()).max(1e-3);
        let retry = SolveControls {
            time_limit: remaining,
            ..*controls
        };
        (model_status, env) = run_once(model, &retry, false)?;
    }

    let is_mip = model.variables.iter().any(|v| v.kind == VarKind::Binary);
    let primal_feasible = env.int_info("primal_solution_status") == Some(SOLUTION_STATUS_FEASIBLE);

    let status = match model_status {
        MODEL_STATUS_OPTIMAL | MODEL_STATUS_MODEL_EMPTY => SolveStatus::Optimal,
        MODEL_STATUS_INFEASIBLE => SolveStatus::Infeasible,
        MODEL_STATUS_UNBOUNDED => SolveStatus::Unbounded,
        MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE => {
            return Err(SolverError::Backend(
                "backend could not distinguish unbounded from infeasible".into(),
            ))
        }
        MODEL_STATUS_REACHED_TIME_LIMIT
        | MODEL_STATUS_REACHED_ITERATION_LIMIT
        | MODEL_STATUS_REACHED_SOLUTION_LIMIT
        | MODEL_STATUS_REACHED_INTERRUPT
        | MODEL_STATUS_OBJECTIVE_BOUND
        | MODEL_STATUS_OBJECTIVE_TARGET
        | MODEL_STATUS_UNKNOWN => {
            if primal_feasible {
                SolveStatus::FeasibleAtLimit
            } else {
                SolveStatus::NoSolutionAtLimit
            }
        }
        other => {
            return Err(SolverError::Backend(format!("HiGHS model status {other}")));
        }
    };

    let primal = if status.has_solution() {
        let n = model.variables.len();
        let m = model.constraints.len();
        let mut col_value = vec![0.0; n];
        let mut col_dual = vec![0.0; n];
        let mut row_value = vec![0.0; m];
        let mut row_dual = vec![0.0; m];
        // SAFETY: buffers are sized to the model dimensions.
        let st = unsafe {
            Highs_getSolution(
                env.0,
                col_value.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row_value.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            )
        };
        env.check(st, "Highs_getSolution")?;
        Some(col_value)
    } else {
        None
    };

    let objective = primal.as_ref().map(|p| model.objective_value(p));

    let dual_bound = match status {
        SolveStatus::Optimal if !is_mip => objective,
        SolveStatus::Optimal | SolveStatus::FeasibleAtLimit | SolveStatus::NoSolutionAtLimit if is_mip => env
            .double_info("mip_dual_bound")
            .filter(|b| b.is_finite() && b.abs() < 1e29),
        _ => None,
    };

    Ok(SolveOutcome {
        status,
        primal,
        objective,
        dual_bound,
        runtime: start.elapsed().as_secs_f64(),
    })
}
