//! The bundled validation scenarios and the expectations pinned for them.
//!
//! Objectives were pinned from verified solves (reference solver and HiGHS
//! agree, audit clean). Structural checks describe the shape of each
//! optimum; a few compare against another case of the same run, which is why
//! cases are solved in file order.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::{optimize, Outcome};
use crate::scenario::{parse_scenario, Scenario, ScenarioError};
use crate::solver::{Backend, SolverParams};
use crate::validate::{exhaustive_oracle, OracleLimits, Topology};

pub const SCENARIOS: &[(&str, &str)] = &[
    ("scenario1", include_str!("../../../corpus/scenario1.json")),
    ("scenario2", include_str!("../../../corpus/scenario2.json")),
    ("scenario3", include_str!("../../../corpus/scenario3.json")),
    ("scenario4", include_str!("../../../corpus/scenario4.json")),
    ("scenario5", include_str!("../../../corpus/scenario5.json")),
    ("ife", include_str!("../../../corpus/ife.json")),
];

pub const EXPECTATIONS: &str = include_str!("../../../corpus/expectations.json");

/// Relative tolerance on pinned objectives.
pub const OBJECTIVE_RTOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus scenario `{0}`")]
    UnknownScenario(String),
    #[error("malformed expectations: {0}")]
    Expectations(String),
    #[error("corpus scenario {name}: {source}")]
    Scenario { name: String, source: ScenarioError },
}

pub fn scenario_text(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn scenario(name: &str) -> Result<Scenario, CorpusError> {
    let text = scenario_text(name).ok_or_else(|| CorpusError::UnknownScenario(name.to_string()))?;
    parse_scenario(text).map_err(|source| CorpusError::Scenario {
        name: name.to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    AuditPasses,
    /// `device_type: null` asserts the slot is not instantiated.
    DeviceType {
        device: String,
        device_type: Option<String>,
    },
    CableType {
        cable: String,
        cable_type: Option<String>,
    },
    DeviceTypeCount {
        device_type: Option<String>,
        count: usize,
    },
    CableTypeCount {
        cable_type: String,
        count: usize,
    },
    CableCount {
        count: usize,
    },
    RouteVia {
        signal: String,
        device: String,
    },
    NoCableTypeOnRoutes {
        cable_type: String,
    },
    /// The union of cables on the listed routes has `count` members, all of
    /// `cable_type`.
    CablesOnRoutes {
        signals: Vec<String>,
        count: usize,
        cable_type: String,
    },
    /// Same hops, and same types on those hops and their devices, as in the
    /// named earlier case.
    RouteUnchanged {
        signal: String,
        scenario: String,
    },
    ObjectiveAtMost {
        scenario: String,
    },
    /// This objective minus the named case's equals `delta`.
    ObjectiveDelta {
        scenario: String,
        delta: f64,
    },
    /// The exhaustive oracle finds the same optimal cost.
    MatchesOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub scenario: String,
    #[serde(default)]
    pub objective: Option<f64>,
    /// Too large for a routine run; only solved on request.
    #[serde(default)]
    pub heavy: bool,
    #[serde(default)]
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub cases: Vec<Expectation>,
}

impl Expectations {
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let e: Expectations =
            serde_json::from_str(text).map_err(|e| CorpusError::Expectations(e.to_string()))?;
        for case in &e.cases {
            if scenario_text(&case.scenario).is_none() {
                return Err(CorpusError::UnknownScenario(case.scenario.clone()));
            }
        }
        Ok(e)
    }

    pub fn bundled() -> Self {
        Self::parse(EXPECTATIONS).expect("bundled expectations parse")
    }

    pub fn case(&self, scenario: &str) -> Option<&Expectation> {
        self.cases.iter().find(|c| c.scenario == scenario)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub scenario: String,
    pub passed: bool,
    pub objective: Option<f64>,
    pub status: String,
    pub wall_seconds: f64,
    pub failures: Vec<String>,
}

/// Solved cases kept around for cross-case checks.
#[derive(Default)]
struct Solved {
    topologies: BTreeMap<String, Topology>,
}

fn source_of(scenario: &Scenario, signal: &str) -> Option<String> {
    scenario
        .signals
        .iter()
        .find(|s| s.id == signal)
        .map(|s| s.source.clone())
}

fn check(c: &Check, outcome: &Outcome, topo: &Topology, solved: &Solved) -> Result<(), String> {
    let scenario = &outcome.max.scenario;
    let route = |signal: &str| {
        topo.route(signal)
            .ok_or_else(|| format!("signal {signal} has no route"))
    };
    match c {
        Check::AuditPasses => match &outcome.report {
            Some(r) if r.passes => Ok(()),
            Some(r) => Err(format!(
                "audit failed: {}",
                r.violations
                    .iter()
                    .map(|v| format!("{}: {}", v.rule, v.detail))
                    .collect::<Vec<_>>()
                    .join("; ")
            )),
            None => Err("no audit report".into()),
        },
        Check::DeviceType { device, device_type } => {
            let got = topo.device(device).ok_or_else(|| format!("no device {device}"))?;
            if &got.device_type == device_type {
                Ok(())
            } else {
                Err(format!(
                    "device {device} is {:?}, expected {device_type:?}",
                    got.device_type
                ))
            }
        }
        Check::CableType { cable, cable_type } => {
            let got = topo.cable(cable).ok_or_else(|| format!("no cable {cable}"))?;
            if &got.cable_type == cable_type {
                Ok(())
            } else {
                Err(format!(
                    "cable {cable} is {:?}, expected {cable_type:?}",
                    got.cable_type
                ))
            }
        }
        Check::DeviceTypeCount { device_type, count } => {
            let n = topo
                .devices
                .iter()
                .filter(|d| &d.device_type == device_type)
                .count();
            (n == *count)
                .then_some(())
                .ok_or_else(|| format!("{n} devices of type {device_type:?}, expected {count}"))
        }
        Check::CableTypeCount { cable_type, count } => {
            let n = topo
                .cables
                .iter()
                .filter(|c| c.cable_type.as_deref() == Some(cable_type))
                .count();
            (n == *count)
                .then_some(())
                .ok_or_else(|| format!("{n} cables of type {cable_type}, expected {count}"))
        }
        Check::CableCount { count } => {
            let n = topo.existing_cables().count();
            (n == *count)
                .then_some(())
                .ok_or_else(|| format!("{n} cables, expected {count}"))
        }
        Check::RouteVia { signal, device } => {
            let r = route(signal)?;
            let src = source_of(scenario, signal).ok_or_else(|| format!("no signal {signal}"))?;
            let path = topo.route_devices(r, &src);
            if path[1..path.len().saturating_sub(1)].contains(device) {
                Ok(())
            } else {
                Err(format!(
                    "signal {signal} runs {}, not via {device}",
                    path.join("-")
                ))
            }
        }
        Check::NoCableTypeOnRoutes { cable_type } => {
            for r in &topo.routes {
                for h in &r.hops {
                    if topo.cable(&h.cable).and_then(|c| c.cable_type.as_deref()) == Some(cable_type) {
                        return Err(format!(
                            "signal {} uses {} of type {cable_type}",
                            r.signal, h.cable
                        ));
                    }
                }
            }
            Ok(())
        }
        Check::CablesOnRoutes {
            signals,
            count,
            cable_type,
        } => {
            let mut on = std::collections::BTreeSet::new();
            for s in signals {
                on.extend(route(s)?.hops.iter().map(|h| h.cable.clone()));
            }
            if on.len() != *count {
                return Err(format!(
                    "routes of {} use {} cables, expected {count}",
                    signals.join(","),
                    on.len()
                ));
            }
            for c in &on {
                let t = topo.cable(c).and_then(|c| c.cable_type.clone());
                if t.as_deref() != Some(cable_type) {
                    return Err(format!("cable {c} is {t:?}, expected {cable_type}"));
                }
            }
            Ok(())
        }
        Check::RouteUnchanged {
            signal,
            scenario: other,
        } => {
            let before = solved
                .topologies
                .get(other)
                .ok_or_else(|| format!("case {other} has not been solved in this run"))?;
            let (r0, r1) = (
                before
                    .route(signal)
                    .ok_or_else(|| format!("{other} has no route {signal}"))?,
                route(signal)?,
            );
            if r0.hops != r1.hops {
                return Err(format!("signal {signal} route changed from {other}"));
            }
            for h in &r1.hops {
                let (a, b) = (before.cable(&h.cable), topo.cable(&h.cable));
                if a.map(|c| &c.cable_type) != b.map(|c| &c.cable_type) {
                    return Err(format!("cable {} changed type from {other}", h.cable));
                }
            }
            let src = source_of(scenario, signal).ok_or_else(|| format!("no signal {signal}"))?;
            for d in topo.route_devices(r1, &src) {
                let (a, b) = (before.device(&d), topo.device(&d));
                if a.map(|x| &x.device_type) != b.map(|x| &x.device_type) {
                    return Err(format!("device {d} changed type from {other}"));
                }
            }
            Ok(())
        }
        Check::ObjectiveAtMost { scenario: other } => {
            let bound = solved
                .topologies
                .get(other)
                .ok_or_else(|| format!("case {other} has not been solved in this run"))?
                .objective_value;
            (topo.objective_value <= bound + 1e-6)
                .then_some(())
                .ok_or_else(|| format!("objective {} exceeds {other}'s {bound}", topo.objective_value))
        }
        Check::ObjectiveDelta {
            scenario: other,
            delta,
        } => {
            let base = solved
                .topologies
                .get(other)
                .ok_or_else(|| format!("case {other} has not been solved in this run"))?
                .objective_value;
            let got = topo.objective_value - base;
            ((got - delta).abs() <= 1e-6 * delta.abs().max(1.0))
                .then_some(())
                .ok_or_else(|| format!("objective exceeds {other}'s by {got}, expected {delta}"))
        }
        Check::MatchesOracle => {
            let oracle =
                exhaustive_oracle(&outcome.max, OracleLimits::default()).map_err(|e| e.to_string())?;
            match oracle.objective() {
                Some(o) if (o - topo.objective_value).abs() <= 1e-6 * o.abs().max(1.0) => Ok(()),
                Some(o) => Err(format!("oracle optimum {o}, solver {}", topo.objective_value)),
                None => Err("oracle says infeasible".into()),
            }
        }
    }
}

/// Solve every case in order and evaluate its expectations. Heavy cases are
/// skipped unless `include_heavy`. A failing solve fails its case but does
/// not stop the run.
pub fn run_corpus(
    backend: &dyn Backend,
    params: &SolverParams,
    expectations: &Expectations,
    include_heavy: bool,
) -> Result<Vec<CaseResult>, CorpusError> {
    let mut solved = Solved::default();
    let mut results = Vec::new();
    for exp in &expectations.cases {
        if exp.heavy && !include_heavy {
            continue;
        }
        let sc = scenario(&exp.scenario)?;
        let start = Instant::now();
        let mut result = CaseResult {
            scenario: exp.scenario.clone(),
            passed: false,
            objective: None,
            status: String::new(),
            wall_seconds: 0.0,
            failures: Vec::new(),
        };
        match optimize(&sc, backend, params) {
            Err(e) => {
                result.status = "error".into();
                result.failures.push(e.to_string());
            }
            Ok(outcome) => {
                result.status = format!("{:?}", outcome.stats.status).to_lowercase();
                match &outcome.topology {
                    None => result.failures.push(format!("no solution ({})", result.status)),
                    Some(topo) => {
                        result.objective = Some(topo.objective_value);
                        if let Some(want) = exp.objective {
                            if (topo.objective_value - want).abs() > OBJECTIVE_RTOL * want.abs().max(1.0) {
                                result
                                    .failures
                                    .push(format!("objective {}, expected {want}", topo.objective_value));
                            }
                        }
                        for c in &exp.checks {
                            if let Err(msg) = check(c, &outcome, topo, &solved) {
                                result.failures.push(msg);
                            }
                        }
                        solved.topologies.insert(exp.scenario.clone(), topo.clone());
                    }
                }
            }
        }
        result.wall_seconds = start.elapsed().as_secs_f64();
        result.passed = result.failures.is_empty();
        results.push(result);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        for (name, _) in SCENARIOS {
            scenario(name).unwrap();
        }
        let e = Expectations::bundled();
        assert_eq!(e.cases.len(), SCENARIOS.len());
        assert!(e.case("ife").unwrap().heavy);
    }

    #[test]
    fn corrupt_expectations_are_rejected() {
        assert!(matches!(
            Expectations::parse("{\"cases\": [{"),
            Err(CorpusError::Expectations(_))
        ));
        assert!(matches!(
            Expectations::parse(r#"{"cases":[{"scenario":"nope"}]}"#),
            Err(CorpusError::UnknownScenario(_))
        ));
        assert!(
            Expectations::parse(r#"{"cases":[{"scenario":"scenario1","checks":[{"check":"bogus"}]}]}"#)
                .is_err()
        );
    }
}
