//! Best-bound branch-and-bound on top of the `minilp` dual simplex.
//!
//! Each open node keeps its own LP solver state, so a child is one bound
//! change and a warm-started dual simplex away from its parent. Branching
//! is on the most fractional integral column; equal bounds are explored
//! deepest first, then in creation order, which makes runs reproducible.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::time::Instant;

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Variable};

use super::{snap_integral, Backend, Capabilities, SolverError, SolverParams};
use crate::milp::{
    check_solution, MilpProblem, MilpSolution, Relation, Sense, SolveStatus, VarKind, FEAS_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchAndBound {
    /// Models beyond this size are refused; the search would not finish.
    pub max_columns: usize,
    pub node_limit: Option<usize>,
}

impl Default for BranchAndBound {
    fn default() -> Self {
        BranchAndBound {
            max_columns: 2000,
            node_limit: None,
        }
    }
}

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    lp: minilp::Solution,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap pops the greatest: lowest bound, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

fn op(rel: Relation) -> ComparisonOp {
    match rel {
        Relation::Le => ComparisonOp::Le,
        Relation::Eq => ComparisonOp::Eq,
        Relation::Ge => ComparisonOp::Ge,
    }
}

struct Search<'a> {
    problem: &'a MilpProblem,
    vars: Vec<Variable>,
    /// +1 for minimization, −1 when a maximization was negated.
    sign: f64,
    integral_objective: bool,
    rel_gap: f64,
    incumbent: Option<(f64, Vec<f64>)>,
    /// Lowest bound among nodes discarded only because of `rel_gap`.
    gap_floor: f64,
}

impl Search<'_> {
    fn effective(&self, bound: f64) -> f64 {
        if self.integral_objective {
            (bound - 1e-6).ceil()
        } else {
            bound
        }
    }

    /// True if a node with LP bound `bound` cannot improve the incumbent.
    fn prune(&mut self, bound: f64) -> bool {
        let Some((inc, _)) = self.incumbent else {
            return false;
        };
        let b = self.effective(bound);
        if b >= inc - 1e-9 {
            return true;
        }
        if b >= inc - self.rel_gap * inc.abs() {
            self.gap_floor = self.gap_floor.min(b);
            return true;
        }
        false
    }

    fn values(&self, lp: &minilp::Solution) -> Vec<f64> {
        self.vars.iter().map(|&v| *lp.var_value(v)).collect()
    }

    fn branching_column(&self, values: &[f64]) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (j, &v) in values.iter().enumerate() {
            if !self.problem.kinds[j].is_integral() {
                continue;
            }
            let frac = v - v.floor();
            let dist = frac.min(1.0 - frac);
            if dist <= FEAS_TOL {
                continue;
            }
            if best.is_none_or(|(d, _)| dist > d + 1e-12) {
                best = Some((dist, j));
            }
        }
        best.map(|(_, j)| j)
    }

    fn offer(&mut self, lp: &minilp::Solution) {
        let mut x = self.values(lp);
        snap_integral(self.problem, &mut x);
        if !check_solution(self.problem, &x, super::VERIFY_TOL).is_empty() {
            return;
        }
        let obj = self.sign * self.problem.objective_value(&x);
        if self.incumbent.as_ref().is_none_or(|(inc, _)| obj < *inc - 1e-9) {
            self.incumbent = Some((obj, x));
        }
    }
}

impl Backend for BranchAndBound {
    fn name(&self) -> &'static str {
        "bb"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            max_columns: Some(self.max_columns),
            time_limit: true,
            threads: false,
            external: false,
        }
    }

    fn solve_unchecked(
        &self,
        problem: &MilpProblem,
        params: &SolverParams,
    ) -> Result<MilpSolution, SolverError> {
        let start = Instant::now();
        let sign = match problem.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut obj = vec![0.0; problem.num_vars()];
        for &(c, a) in &problem.objective {
            obj[c.0] += sign * a;
        }
        let mut lp = minilp::Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = (0..problem.num_vars())
            .map(|j| lp.add_var(obj[j], (problem.lower[j], problem.upper[j])))
            .collect();
        for row in &problem.rows {
            if row.coeffs.is_empty() {
                if row.violation(&[]) > FEAS_TOL {
                    return Ok(MilpSolution::without_point(SolveStatus::Infeasible));
                }
                continue;
            }
            // minilp rejects repeated columns within a row
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            for &(c, a) in &row.coeffs {
                *merged.entry(c.0).or_default() += a;
            }
            let e: LinearExpr = merged.into_iter().map(|(c, a)| (vars[c], a)).collect();
            lp.add_constraint(e, op(row.relation), row.rhs);
        }
        let integral_objective = obj
            .iter()
            .enumerate()
            .all(|(j, &a)| a == 0.0 || (problem.kinds[j].is_integral() && a == a.round()));

        let root = match lp.solve() {
            Ok(s) => s,
            Err(minilp::Error::Infeasible) => {
                return Ok(MilpSolution::without_point(SolveStatus::Infeasible))
            }
            Err(minilp::Error::Unbounded) => return Ok(MilpSolution::without_point(SolveStatus::Unbounded)),
        };

        let mut search = Search {
            problem,
            vars,
            sign,
            integral_objective,
            rel_gap: params.rel_gap.max(0.0),
            incumbent: None,
            gap_floor: f64::INFINITY,
        };
        let mut heap = BinaryHeap::new();
        let mut seq = 0;
        heap.push(Node {
            bound: root.objective(),
            depth: 0,
            seq,
            lp: root,
        });
        let mut explored = 0usize;
        let mut stopped = false;

        while let Some(node) = heap.pop() {
            let out_of_time = params.time_limit.is_some_and(|t| start.elapsed() >= t);
            let out_of_nodes = self.node_limit.is_some_and(|n| explored >= n);
            if out_of_time || out_of_nodes {
                heap.push(node);
                stopped = true;
                break;
            }
            explored += 1;
            if search.prune(node.bound) {
                continue;
            }
            let x = search.values(&node.lp);
            let Some(j) = search.branching_column(&x) else {
                search.offer(&node.lp);
                continue;
            };
            let (down, up) = (x[j].floor(), x[j].ceil());
            let var = search.vars[j];
            let children = [(down, Relation::Le), (up, Relation::Ge)];
            for (value, rel) in children {
                let child = if problem.kinds[j] == VarKind::Binary {
                    node.lp.clone().fix_var(var, value)
                } else {
                    node.lp.clone().add_constraint([(var, 1.0)], op(rel), value)
                };
                match child {
                    Ok(lp) => {
                        let bound = lp.objective();
                        if search.prune(bound) {
                            continue;
                        }
                        seq += 1;
                        heap.push(Node {
                            bound,
                            depth: node.depth + 1,
                            seq,
                            lp,
                        });
                    }
                    Err(minilp::Error::Infeasible) => {}
                    Err(minilp::Error::Unbounded) => {
                        return Ok(MilpSolution::without_point(SolveStatus::Unbounded));
                    }
                }
            }
        }

        let Some((inc, values)) = search.incumbent.take() else {
            let status = if stopped {
                SolveStatus::Timeout
            } else {
                SolveStatus::Infeasible
            };
            return Ok(MilpSolution::without_point(status));
        };
        let open_floor = heap
            .iter()
            .map(|n| search.effective(n.bound))
            .fold(f64::INFINITY, f64::min);
        let floor = open_floor.min(search.gap_floor).min(inc);
        let gap = if inc == floor {
            0.0
        } else {
            (inc - floor) / inc.abs().max(1e-10)
        };
        let status = if stopped && gap > search.rel_gap {
            SolveStatus::FeasibleGap
        } else {
            SolveStatus::Optimal
        };
        Ok(MilpSolution {
            status,
            objective_value: sign * inc,
            values,
            gap,
        })
    }
}
