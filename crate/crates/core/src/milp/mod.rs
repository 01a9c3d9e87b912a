//! Solver-neutral mixed-integer linear programs.
//!
//! Rows keep the relation they were written with; nothing here rescales or
//! canonicalizes. [`check_solution`] is the independent feasibility test every
//! backend result goes through.

mod lp_format;
mod registry;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lp_format::{lp_column_name, write_lp};
pub use registry::VariableRegistry;

/// Absolute tolerance for row satisfaction and integrality.
pub const FEAS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Column index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Col(pub usize);

/// Sparse linear expression `Σ coeff·x_col`. Repeated columns are allowed
/// and summed on evaluation.
pub type LinExpr = Vec<(Col, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: LinExpr,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(c, a)| a * values[c.0]).sum()
    }

    /// Amount by which `values` violate the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MilpError {
    #[error("variable name `{0}` already registered")]
    DuplicateName(String),
    #[error("row references unknown column {0}")]
    UnknownColumn(usize),
    #[error("column {col}: lower bound {lower} exceeds upper bound {upper}")]
    InvertedBounds { col: usize, lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpProblem {
    pub kinds: Vec<VarKind>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Sparse objective coefficients.
    pub objective: LinExpr,
    pub sense: Sense,
    pub rows: Vec<Row>,
}

impl Default for MilpProblem {
    fn default() -> Self {
        Self::new(Sense::Minimize)
    }
}

impl MilpProblem {
    pub fn new(sense: Sense) -> Self {
        MilpProblem {
            kinds: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
            sense,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Append an unnamed column. Binary columns are clamped into [0, 1].
    pub fn add_column(&mut self, kind: VarKind, lower: f64, upper: f64) -> Result<Col, MilpError> {
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            _ => (lower, upper),
        };
        if lower > upper {
            return Err(MilpError::InvertedBounds {
                col: self.kinds.len(),
                lower,
                upper,
            });
        }
        self.kinds.push(kind);
        self.lower.push(lower);
        self.upper.push(upper);
        Ok(Col(self.kinds.len() - 1))
    }

    /// Append a row verbatim.
    pub fn add_row(&mut self, coeffs: LinExpr, relation: Relation, rhs: f64) -> Result<usize, MilpError> {
        if let Some(&(c, _)) = coeffs.iter().find(|(c, _)| c.0 >= self.kinds.len()) {
            return Err(MilpError::UnknownColumn(c.0));
        }
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        Ok(self.rows.len() - 1)
    }

    pub fn set_objective(&mut self, sense: Sense, objective: LinExpr) {
        self.sense = sense;
        self.objective = objective;
    }

    /// Objective value `c·x`.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(c, a)| a * values[c.0]).sum()
    }

    /// Column counts by kind: (binary, integer, continuous).
    pub fn kind_counts(&self) -> (usize, usize, usize) {
        self.kinds.iter().fold((0, 0, 0), |(b, i, c), k| match k {
            VarKind::Binary => (b + 1, i, c),
            VarKind::Integer => (b, i + 1, c),
            VarKind::Continuous => (b, i, c + 1),
        })
    }

    /// Flip the optimization sense and negate every objective coefficient.
    /// The feasible set and the optimal points are unchanged; the optimal
    /// value changes sign.
    pub fn negate_objective(mut self) -> Self {
        self.sense = match self.sense {
            Sense::Minimize => Sense::Maximize,
            Sense::Maximize => Sense::Minimize,
        };
        for (_, a) in &mut self.objective {
            *a = -*a;
        }
        self
    }

    /// Same problem stated as a maximization.
    pub fn into_maximization(self) -> Self {
        match self.sense {
            Sense::Maximize => self,
            Sense::Minimize => self.negate_objective(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Proven optimal within the requested relative gap.
    Optimal,
    /// Feasible incumbent, gap not closed when the search stopped.
    FeasibleGap,
    Infeasible,
    Unbounded,
    /// Stopped without any feasible point.
    Timeout,
}

impl SolveStatus {
    pub fn has_point(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleGap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub gap: f64,
}

impl MilpSolution {
    pub fn without_point(status: SolveStatus) -> Self {
        MilpSolution {
            status,
            values: Vec::new(),
            objective_value: f64::NAN,
            gap: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckViolation {
    WrongLength { expected: usize, got: usize },
    NotFinite { col: usize },
    Bound { col: usize, value: f64 },
    Integrality { col: usize, value: f64 },
    Row { row: usize, excess: f64 },
}

/// Independent feasibility check of a point against a problem: bounds, rows
/// and integrality, all within `tol` absolute.
pub fn check_solution(problem: &MilpProblem, values: &[f64], tol: f64) -> Vec<CheckViolation> {
    if values.len() != problem.num_vars() {
        return vec![CheckViolation::WrongLength {
            expected: problem.num_vars(),
            got: values.len(),
        }];
    }
    let mut out = Vec::new();
    for (j, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            out.push(CheckViolation::NotFinite { col: j });
            continue;
        }
        if v < problem.lower[j] - tol || v > problem.upper[j] + tol {
            out.push(CheckViolation::Bound { col: j, value: v });
        }
        if problem.kinds[j].is_integral() && (v - v.round()).abs() > tol {
            out.push(CheckViolation::Integrality { col: j, value: v });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (i, row) in problem.rows.iter().enumerate() {
        let excess = row.violation(values);
        if excess > tol {
            out.push(CheckViolation::Row { row: i, excess });
        }
    }
    out
}
