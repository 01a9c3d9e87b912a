//! Bridge to the HiGHS MILP solver through its Python bindings.
//!
//! The model is written as an LP file, a short embedded script solves it
//! with `highspy` and prints the result as plain text. Column names carry
//! their index (`x<col>_...`) so the result maps back regardless of the
//! column order HiGHS reads them in.

use std::io::Write as _;
use std::process::Command;

use super::{Backend, Capabilities, SolverError, SolverParams};
use crate::milp::{lp_column_name, write_lp, MilpProblem, MilpSolution, SolveStatus};

/// Environment variable naming the Python interpreter to run.
pub const HIGHS_COMMAND_ENV: &str = "FIBERTOPO_PYTHON";

const SCRIPT: &str = r#"
import sys
try:
    import highspy
except ImportError as e:
    print("unavailable", e)
    sys.exit(3)
path, time_limit, gap, seed, threads = sys.argv[1:6]
h = highspy.Highs()
h.setOptionValue("output_flag", False)
if float(time_limit) > 0:
    h.setOptionValue("time_limit", float(time_limit))
h.setOptionValue("mip_rel_gap", float(gap))
h.setOptionValue("random_seed", int(seed) % 2147483647)
if int(threads) > 0:
    h.setOptionValue("threads", int(threads))
if h.readModel(path) == highspy.HighsStatus.kError:
    print("error cannot-read-model")
    sys.exit(4)
h.run()
S = highspy.HighsModelStatus
ms = h.getModelStatus()
info = h.getInfo()
has_point = info.primal_solution_status == 2
if ms == S.kOptimal:
    status = "optimal"
elif ms == S.kInfeasible:
    status = "infeasible"
elif ms in (S.kUnbounded, S.kUnboundedOrInfeasible):
    status = "unbounded"
elif ms in (S.kTimeLimit, S.kIterationLimit, S.kSolutionLimit, S.kInterrupt):
    status = "limit"
else:
    status = "error-" + h.modelStatusToString(ms).replace(" ", "_")
print("status", status)
print("has_point", 1 if has_point else 0)
print("objective", repr(info.objective_function_value))
print("gap", repr(info.mip_gap))
if has_point:
    names = h.getLp().col_names_
    values = h.getSolution().col_value
    for n, v in zip(names, values):
        print(n, repr(v))
"#;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HighsBridge {
    /// Interpreter to run; `None` reads the environment, then `python3`.
    pub python: Option<String>,
}

impl HighsBridge {
    fn interpreter(&self) -> String {
        self.python
            .clone()
            .or_else(|| std::env::var(HIGHS_COMMAND_ENV).ok())
            .unwrap_or_else(|| "python3".to_string())
    }

    fn failed(reason: impl Into<String>) -> SolverError {
        SolverError::Failed {
            backend: "highs".into(),
            reason: reason.into(),
        }
    }
}

fn column_of(name: &str) -> Option<usize> {
    name.strip_prefix('x')?.split('_').next()?.parse().ok()
}

/// Parse the bridge script's output into a solution for `num_vars` columns.
fn parse_output(text: &str, num_vars: usize) -> Result<MilpSolution, SolverError> {
    let mut status = None;
    let mut has_point = false;
    let mut objective = f64::NAN;
    let mut gap = f64::INFINITY;
    let mut values = vec![0.0; num_vars];
    let mut seen = vec![false; num_vars];
    for line in text.lines() {
        let Some((key, value)) = line.trim().split_once(' ') else {
            continue;
        };
        let num = || {
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| HighsBridge::failed(format!("bad number in `{line}`")))
        };
        match key {
            "status" => status = Some(value.trim().to_string()),
            "has_point" => has_point = value.trim() == "1",
            "objective" => objective = num()?,
            "gap" => gap = num()?,
            _ => {
                let col = column_of(key)
                    .filter(|&c| c < num_vars)
                    .ok_or_else(|| HighsBridge::failed(format!("unknown column `{key}`")))?;
                values[col] = num()?;
                seen[col] = true;
            }
        }
    }
    let status = status.ok_or_else(|| HighsBridge::failed("no status line"))?;
    let point_status = match status.as_str() {
        "optimal" => SolveStatus::Optimal,
        "limit" if has_point => SolveStatus::FeasibleGap,
        "limit" => SolveStatus::Timeout,
        "infeasible" => return Ok(MilpSolution::without_point(SolveStatus::Infeasible)),
        "unbounded" => return Ok(MilpSolution::without_point(SolveStatus::Unbounded)),
        other => return Err(HighsBridge::failed(other.to_string())),
    };
    if !point_status.has_point() {
        return Ok(MilpSolution::without_point(point_status));
    }
    // Columns that appear in no row or objective are dropped by the LP
    // reader only if they never occur; every column has a bounds line, so
    // all should be present.
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(HighsBridge::failed(format!(
            "column {missing} missing from output"
        )));
    }
    Ok(MilpSolution {
        status: point_status,
        values,
        objective_value: objective,
        gap,
    })
}

impl Backend for HighsBridge {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            max_columns: None,
            time_limit: true,
            threads: true,
            external: true,
        }
    }

    fn solve_unchecked(
        &self,
        problem: &MilpProblem,
        params: &SolverParams,
    ) -> Result<MilpSolution, SolverError> {
        let names: Vec<String> = (0..problem.num_vars())
            .map(|j| lp_column_name(crate::milp::Col(j), &format!("c{j}")))
            .collect();
        let text = write_lp(problem, Some(&names));
        let mut file = tempfile::Builder::new()
            .prefix("fibertopo-")
            .suffix(".lp")
            .tempfile()
            .map_err(|e| Self::failed(e.to_string()))?;
        file.write_all(text.as_bytes())
            .map_err(|e| Self::failed(e.to_string()))?;
        file.flush().map_err(|e| Self::failed(e.to_string()))?;

        let python = self.interpreter();
        let output = Command::new(&python)
            .arg("-c")
            .arg(SCRIPT)
            .arg(file.path())
            .arg(params.time_limit.map_or(0.0, |t| t.as_secs_f64()).to_string())
            .arg(params.rel_gap.to_string())
            .arg(params.seed.to_string())
            .arg(params.threads.to_string())
            .output()
            .map_err(|e| SolverError::Unavailable {
                backend: "highs".into(),
                reason: format!("cannot run {python}: {e}"),
            })?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        match output.status.code() {
            Some(0) => parse_output(&stdout, problem.num_vars()),
            Some(3) => Err(SolverError::Unavailable {
                backend: "highs".into(),
                reason: stdout.trim().to_string(),
            }),
            _ => Err(Self::failed(format!(
                "exit {:?}: {}{}",
                output.status.code(),
                stdout.trim(),
                String::from_utf8_lossy(&output.stderr).trim()
            ))),
        }
    }
}
