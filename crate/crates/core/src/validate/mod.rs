//! Decoding solver output into a topology and checking it without the MILP.

mod audit;
pub mod micro;
mod oracle;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::build::BuildArtifacts;
use crate::milp::{MilpSolution, FEAS_TOL};
use crate::scenario::MaxTopology;

pub use audit::{audit, ValidationReport, Violation};
pub use oracle::{exhaustive_oracle, OracleError, OracleLimits, OracleResult};
pub use trace::{power_trace, PowerTrace, TraceError, TracePoint, TraceStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "AB")]
    AB,
    #[serde(rename = "BA")]
    BA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceAssignment {
    pub id: String,
    /// Assigned type name; `None` when the slot is not instantiated.
    pub device_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableAssignment {
    pub id: String,
    pub endpoint_a: String,
    pub endpoint_b: String,
    pub cable_type: Option<String>,
    /// Signals routed A→B and B→A.
    pub use_ab: u32,
    pub use_ba: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hop {
    pub cable: String,
    pub direction: Direction,
}

/// Transmit power chosen by an opaque sender for one signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Emission {
    pub device: String,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalRoute {
    pub signal: String,
    pub hops: Vec<Hop>,
    /// One entry per opaque device that sends the signal: the source and
    /// every opaque relay, in path order.
    pub emissions: Vec<Emission>,
}

impl SignalRoute {
    pub fn emission(&self, device: &str) -> Option<f64> {
        self.emissions
            .iter()
            .find(|e| e.device == device)
            .map(|e| e.power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub devices: Vec<DeviceAssignment>,
    pub cables: Vec<CableAssignment>,
    pub routes: Vec<SignalRoute>,
    pub objective_value: f64,
    /// Non-fatal decode observations, such as closed indicator cycles that
    /// are detached from a signal's path and were dropped.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Topology {
    pub fn device(&self, id: &str) -> Option<&DeviceAssignment> {
        self.devices.iter().find(|d| d.id == id)
    }

    pub fn cable(&self, id: &str) -> Option<&CableAssignment> {
        self.cables.iter().find(|c| c.id == id)
    }

    pub fn route(&self, signal: &str) -> Option<&SignalRoute> {
        self.routes.iter().find(|r| r.signal == signal)
    }

    /// Cables that are instantiated.
    pub fn existing_cables(&self) -> impl Iterator<Item = &CableAssignment> {
        self.cables.iter().filter(|c| c.cable_type.is_some())
    }

    /// Device ids along a route, source first.
    pub fn route_devices(&self, route: &SignalRoute, source: &str) -> Vec<String> {
        let mut at = source.to_string();
        let mut out = vec![at.clone()];
        for hop in &route.hops {
            let Some(c) = self.cable(&hop.cable) else { break };
            at = match hop.direction {
                Direction::AB => c.endpoint_b.clone(),
                Direction::BA => c.endpoint_a.clone(),
            };
            out.push(at.clone());
        }
        out
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("solution has no point (status {0:?})")]
    NoPoint(crate::milp::SolveStatus),
    #[error("solution has {got} values, model has {expected} columns")]
    WrongLength { expected: usize, got: usize },
    #[error("{name} = {value} is not within {FEAS_TOL} of an integer")]
    NotIntegral { name: String, value: f64 },
    #[error("{element} has {count} types selected")]
    MultipleTypes { element: String, count: usize },
    #[error("signal {signal}: broken path at device {device}: {detail}")]
    BrokenPath {
        signal: String,
        device: String,
        detail: String,
    },
}

fn binary(sol: &[f64], art: &BuildArtifacts, col: crate::milp::Col) -> Result<bool, DecodeError> {
    Ok(integral(sol, art, col)? >= 1)
}

fn integral(sol: &[f64], art: &BuildArtifacts, col: crate::milp::Col) -> Result<i64, DecodeError> {
    let v = sol[col.0];
    let r = v.round();
    if (v - r).abs() > FEAS_TOL {
        return Err(DecodeError::NotIntegral {
            name: art.registry.name(col).to_string(),
            value: v,
        });
    }
    Ok(r as i64)
}

fn selected_type(
    sol: &[f64],
    art: &BuildArtifacts,
    cols: &[crate::milp::Col],
    element: &str,
) -> Result<Option<usize>, DecodeError> {
    let mut chosen = Vec::new();
    for (t, &c) in cols.iter().enumerate() {
        if binary(sol, art, c)? {
            chosen.push(t);
        }
    }
    match chosen.len() {
        0 => Ok(None),
        1 => Ok(Some(chosen[0])),
        count => Err(DecodeError::MultipleTypes {
            element: element.to_string(),
            count,
        }),
    }
}

/// Read a solver point back into a topology.
///
/// Integral columns must lie within [`FEAS_TOL`] of an integer; anything
/// else is an error rather than a silent rounding. Each signal's path is
/// followed from its source along the set direction indicators. Indicator
/// cycles that do not touch the path carry no signal; they are reported as
/// warnings and left out of the route and the core counts.
pub fn decode(
    solution: &MilpSolution,
    topo: &MaxTopology,
    art: &BuildArtifacts,
) -> Result<Topology, DecodeError> {
    if !solution.status.has_point() {
        return Err(DecodeError::NoPoint(solution.status));
    }
    let x = &solution.values;
    if x.len() != art.problem.num_vars() {
        return Err(DecodeError::WrongLength {
            expected: art.problem.num_vars(),
            got: x.len(),
        });
    }
    for (j, kind) in art.problem.kinds.iter().enumerate() {
        if kind.is_integral() {
            integral(x, art, crate::milp::Col(j))?;
        }
    }
    let tt = topo.type_table();
    let v = &art.vars;

    let mut device_types = Vec::with_capacity(topo.devices().len());
    let mut devices = Vec::with_capacity(topo.devices().len());
    for (k, slot) in topo.devices().iter().enumerate() {
        let t = selected_type(x, art, &v.device_type[k], &slot.id)?;
        device_types.push(t);
        devices.push(DeviceAssignment {
            id: slot.id.clone(),
            device_type: t.map(|t| tt.device_types[t].name.clone()),
        });
    }
    let mut cables = Vec::with_capacity(topo.cables().len());
    for (j, slot) in topo.cables().iter().enumerate() {
        let t = selected_type(x, art, &v.cable_type[j], &slot.id)?;
        cables.push(CableAssignment {
            id: slot.id.clone(),
            endpoint_a: slot.endpoint_a.clone(),
            endpoint_b: slot.endpoint_b.clone(),
            cable_type: t.map(|t| tt.cable_types[t].name.clone()),
            use_ab: 0,
            use_ba: 0,
        });
    }

    let mut routes = Vec::with_capacity(topo.signals().len());
    let mut warnings = Vec::new();
    for (i, signal) in topo.signals().iter().enumerate() {
        let (src, dst) = topo.signal_ends[i];
        let mut set: Vec<(usize, Direction)> = Vec::new();
        for j in 0..topo.cables().len() {
            if binary(x, art, v.sig_ab[i][j])? {
                set.push((j, Direction::AB));
            }
            if binary(x, art, v.sig_ba[i][j])? {
                set.push((j, Direction::BA));
            }
        }
        let broken = |device: usize, detail: String| DecodeError::BrokenPath {
            signal: signal.id.clone(),
            device: topo.devices()[device].id.clone(),
            detail,
        };
        let mut visited = vec![false; topo.devices().len()];
        let mut at = src;
        visited[at] = true;
        let mut hops = Vec::new();
        let mut used = vec![false; set.len()];
        while at != dst {
            let out: Vec<usize> = set
                .iter()
                .enumerate()
                .filter(|&(_, &(j, d))| {
                    let (a, b) = topo.cable_ends[j];
                    (d == Direction::AB && a == at) || (d == Direction::BA && b == at)
                })
                .map(|(n, _)| n)
                .collect();
            if out.len() != 1 {
                return Err(broken(at, format!("{} outgoing transmissions", out.len())));
            }
            let n = out[0];
            used[n] = true;
            let (j, d) = set[n];
            let (a, b) = topo.cable_ends[j];
            let next = if d == Direction::AB { b } else { a };
            if visited[next] {
                return Err(broken(next, "device visited twice".into()));
            }
            visited[next] = true;
            hops.push(Hop {
                cable: topo.cables()[j].id.clone(),
                direction: d,
            });
            match d {
                Direction::AB => cables[j].use_ab += 1,
                Direction::BA => cables[j].use_ba += 1,
            }
            at = next;
        }
        let stray: Vec<String> = set
            .iter()
            .zip(&used)
            .filter(|(_, &u)| !u)
            .map(|(&(j, d), _)| format!("{}:{:?}", topo.cables()[j].id, d))
            .collect();
        if !stray.is_empty() {
            warnings.push(format!(
                "signal {}: detached indicator cycle over {} dropped",
                signal.id,
                stray.join(", ")
            ));
        }

        let mut emissions = Vec::new();
        let mut walk = vec![src];
        for h in &hops {
            let j = topo
                .cables()
                .iter()
                .position(|c| c.id == h.cable)
                .expect("hop cable exists");
            let (a, b) = topo.cable_ends[j];
            walk.push(if h.direction == Direction::AB { b } else { a });
        }
        for &k in &walk[..walk.len() - 1] {
            let opaque = device_types[k].is_some_and(|t| !tt.device_types[t].translucent);
            if opaque {
                emissions.push(Emission {
                    device: topo.devices()[k].id.clone(),
                    power: x[v.transmit[i][k].0],
                });
            }
        }
        routes.push(SignalRoute {
            signal: signal.id.clone(),
            hops,
            emissions,
        });
    }

    Ok(Topology {
        devices,
        cables,
        routes,
        objective_value: art.problem.objective_value(x),
        warnings,
    })
}
