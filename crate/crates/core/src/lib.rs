//! DC optimal transmission switching with big-M bound tightening.
//!
//! Modules, bottom up: [`milp`] (model representation and the solver
//! adapter), [`netmodel`] (network and instance data), [`topo`] (line-graph
//! neighborhoods), [`formulation`] (model builders), [`tighten`] (bound
//! tightening and the final solve), [`oracle`] (enumeration ground truth),
//! [`bench`] (benchmark runner and metrics).

// Validation uses `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod formulation;
pub mod milp;
pub mod netmodel;
pub mod oracle;
mod par;
pub mod tighten;
pub mod topo;

use thiserror::Error;

/// Any library failure, grouped the way callers report them.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] netmodel::DataError),
    #[error(transparent)]
    Topo(#[from] topo::TopoError),
    #[error(transparent)]
    Build(#[from] formulation::BuildError),
    #[error(transparent)]
    Solver(#[from] milp::SolverError),
    #[error(transparent)]
    Tighten(#[from] tighten::TightenError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Bench(#[from] bench::BenchError),
}

impl Error {
    /// True when the failure came from the solver backend rather than the input.
    pub fn is_backend(&self) -> bool {
        use tighten::TightenError as T;
        matches!(
            self,
            Error::Solver(milp::SolverError::Backend(_))
                | Error::Tighten(T::Backend { .. } | T::Solver(milp::SolverError::Backend(_)))
                | Error::Oracle(oracle::OracleError::Solver(milp::SolverError::Backend(_)))
        )
    }
}
