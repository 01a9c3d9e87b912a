//! Scenario in, audited topology out, plus the result file that carries it.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::build::{build, BuildArtifacts, BuildError};
use crate::milp::{MilpSolution, SolveStatus};
use crate::scenario::{expand_max_topology, MaxTopology, Scenario, ScenarioError, ScenarioFile};
use crate::solver::{solve, Backend, SolverError, SolverParams};
use crate::validate::{audit, decode, DecodeError, Topology, ValidationReport};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub backend: String,
    pub status: SolveStatus,
    pub rows: usize,
    pub binary: usize,
    pub integer: usize,
    pub continuous: usize,
    pub p_lim: f64,
    pub wall_seconds: f64,
    pub gap: f64,
}

pub struct Outcome {
    pub max: MaxTopology,
    pub artifacts: BuildArtifacts,
    pub solution: MilpSolution,
    pub topology: Option<Topology>,
    pub report: Option<ValidationReport>,
    pub stats: SolveStats,
}

impl Outcome {
    pub fn objective(&self) -> Option<f64> {
        self.topology.as_ref().map(|t| t.objective_value)
    }

    pub fn result_file(&self) -> ResultFile {
        ResultFile {
            scenario: ScenarioFile::from_scenario(&self.max.scenario),
            stats: self.stats.clone(),
            topology: self.topology.clone(),
            report: self.report.clone(),
        }
    }
}

/// Expand, build, solve, decode and audit.
pub fn optimize(
    scenario: &Scenario,
    backend: &dyn Backend,
    params: &SolverParams,
) -> Result<Outcome, PipelineError> {
    let max = expand_max_topology(scenario)?;
    let artifacts = build(&max)?;
    let (binary, integer, continuous) = artifacts.problem.kind_counts();
    let start = Instant::now();
    let solution = solve(backend, &artifacts.problem, params)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let (topology, report) = if solution.status.has_point() {
        let t = decode(&solution, &max, &artifacts)?;
        let r = audit(&t, &max.scenario);
        (Some(t), Some(r))
    } else {
        (None, None)
    };
    let stats = SolveStats {
        backend: backend.name().to_string(),
        status: solution.status,
        rows: artifacts.problem.num_rows(),
        binary,
        integer,
        continuous,
        p_lim: artifacts.power.p_lim,
        wall_seconds,
        gap: solution.gap,
    };
    Ok(Outcome {
        max,
        artifacts,
        solution,
        topology,
        report,
        stats,
    })
}

/// Everything needed to inspect a run offline: the expanded scenario, the
/// solver statistics, the decoded topology and its audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub scenario: ScenarioFile,
    pub stats: SolveStats,
    #[serde(default)]
    pub topology: Option<Topology>,
    #[serde(default)]
    pub report: Option<ValidationReport>,
}

#[derive(Debug, Error)]
pub enum ResultFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed result file: {0}")]
    Parse(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

impl ResultFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result file is serializable")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ResultFileError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|source| ResultFileError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResultFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ResultFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| ResultFileError::Parse(e.to_string()))
    }

    /// The embedded scenario, validated again.
    pub fn scenario(&self) -> Result<Scenario, ResultFileError> {
        Ok(self.scenario.clone().into_scenario()?)
    }
}
