//! MILP backends.
//!
//! Every backend returns a [`MilpSolution`]; [`solve`] re-checks any point
//! a backend reports against the problem before handing it on, so a buggy
//! or misconfigured backend cannot leak an infeasible design.

mod branch_bound;
mod highs;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{check_solution, CheckViolation, MilpProblem, MilpSolution, FEAS_TOL};

pub use branch_bound::BranchAndBound;
pub use highs::{HighsBridge, HIGHS_COMMAND_ENV};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub time_limit: Option<Duration>,
    /// Relative optimality gap at which the search may stop.
    pub rel_gap: f64,
    /// Worker threads for backends that can use them; 0 means backend default.
    pub threads: usize,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            time_limit: None,
            rel_gap: 1e-6,
            threads: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    /// Largest column count the backend accepts.
    pub max_columns: Option<usize>,
    pub time_limit: bool,
    pub threads: bool,
    /// Runs outside this process.
    pub external: bool,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("backend {backend} unavailable: {reason}")]
    Unavailable { backend: String, reason: String },
    #[error("model has {columns} columns, backend {backend} accepts at most {limit}; use an external backend such as `highs`")]
    TooLarge {
        backend: String,
        columns: usize,
        limit: usize,
    },
    #[error("backend {backend} failed: {reason}")]
    Failed { backend: String, reason: String },
    #[error("backend {backend} returned a point violating the model: {violations:?}")]
    Verification {
        backend: String,
        violations: Vec<CheckViolation>,
    },
}

pub trait Backend {
    fn name(&self) -> &'static str;
    fn capabilities(&self) -> Capabilities;
    /// Solve without post-verification. Use [`solve`] instead.
    fn solve_unchecked(
        &self,
        problem: &MilpProblem,
        params: &SolverParams,
    ) -> Result<MilpSolution, SolverError>;
}

/// Tolerance for verifying reported points. Backends work at 1e-6 on
/// scaled rows; a Big-M row scaled by `M` may drift by a bit more.
pub const VERIFY_TOL: f64 = 1e-5;

/// Solve `problem` on `backend` and verify any reported point.
pub fn solve(
    backend: &dyn Backend,
    problem: &MilpProblem,
    params: &SolverParams,
) -> Result<MilpSolution, SolverError> {
    if let Some(limit) = backend.capabilities().max_columns {
        if problem.num_vars() > limit {
            return Err(SolverError::TooLarge {
                backend: backend.name().into(),
                columns: problem.num_vars(),
                limit,
            });
        }
    }
    let mut sol = backend.solve_unchecked(problem, params)?;
    if sol.status.has_point() {
        let violations = check_solution(problem, &sol.values, VERIFY_TOL.max(FEAS_TOL));
        if !violations.is_empty() {
            return Err(SolverError::Verification {
                backend: backend.name().into(),
                violations,
            });
        }
        sol.objective_value = problem.objective_value(&sol.values);
    }
    Ok(sol)
}

/// Backend by name: `"bb"` for the built-in branch-and-bound, `"highs"` for
/// the external HiGHS bridge.
pub fn backend_by_name(name: &str) -> Option<Box<dyn Backend>> {
    match name {
        "bb" | "reference" => Some(Box::new(BranchAndBound::default())),
        "highs" => Some(Box::new(HighsBridge::default())),
        _ => None,
    }
}

/// Snap integral columns to the nearest integer.
pub(crate) fn snap_integral(problem: &MilpProblem, values: &mut [f64]) {
    for (v, k) in values.iter_mut().zip(&problem.kinds) {
        if k.is_integral() {
            *v = v.round();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{Relation, Sense, SolveStatus, VarKind};

    struct Liar;

    impl Backend for Liar {
        fn name(&self) -> &'static str {
            "liar"
        }
        fn capabilities(&self) -> Capabilities {
            Capabilities {
                max_columns: Some(3),
                time_limit: false,
                threads: false,
                external: false,
            }
        }
        fn solve_unchecked(&self, p: &MilpProblem, _: &SolverParams) -> Result<MilpSolution, SolverError> {
            Ok(MilpSolution {
                status: SolveStatus::Optimal,
                values: vec![0.0; p.num_vars()],
                objective_value: -1.0,
                gap: 0.0,
            })
        }
    }

    #[test]
    fn infeasible_reports_are_caught() {
        let mut p = MilpProblem::new(Sense::Minimize);
        let x = p.add_column(VarKind::Binary, 0.0, 1.0).unwrap();
        p.add_row(vec![(x, 1.0)], Relation::Ge, 1.0).unwrap();
        assert!(matches!(
            solve(&Liar, &p, &SolverParams::default()),
            Err(SolverError::Verification { .. })
        ));
    }

    #[test]
    fn column_limit_is_enforced() {
        let mut p = MilpProblem::new(Sense::Minimize);
        for _ in 0..4 {
            p.add_column(VarKind::Binary, 0.0, 1.0).unwrap();
        }
        assert!(matches!(
            solve(&Liar, &p, &SolverParams::default()),
            Err(SolverError::TooLarge {
                columns: 4,
                limit: 3,
                ..
            })
        ));
    }

    #[test]
    fn objective_is_recomputed_from_the_point() {
        let mut p = MilpProblem::new(Sense::Minimize);
        let x = p.add_column(VarKind::Binary, 0.0, 1.0).unwrap();
        p.set_objective(Sense::Minimize, vec![(x, 5.0)]);
        let sol = solve(&Liar, &p, &SolverParams::default()).unwrap();
        assert_eq!(sol.objective_value, 0.0);
    }
}
