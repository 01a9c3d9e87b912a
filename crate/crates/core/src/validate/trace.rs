//! Piecewise power level of one signal along its path.
//!
//! The trace starts at the source's transmit power, drops by each cable's
//! attenuation, drops again inside translucent devices, and jumps to a new
//! transmit power at every opaque relay. Idle translucent devices transmit
//! nothing; the model writes that as 0 dBm, which is a placeholder and not
//! one milliwatt. Traces only cover devices that carry the signal, so the
//! placeholder never appears here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Topology;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStep {
    /// Power launched by the source.
    Transmit,
    /// Power at the far end of a cable.
    Cable,
    /// Power after a translucent device's internal loss.
    Device,
    /// New launch power at an opaque relay.
    Repower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: TraceStep,
    /// Device or cable id the step belongs to.
    pub element: String,
    /// dBm
    pub power: f64,
    /// Attenuation applied by this step (dB); zero for launches.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTrace {
    pub signal: String,
    pub points: Vec<TracePoint>,
}

impl PowerTrace {
    pub fn powers(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.power).collect()
    }

    /// Power arriving at the target.
    pub fn received(&self) -> Option<f64> {
        self.points.last().map(|p| p.power)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("unknown signal {0}")]
    UnknownSignal(String),
    #[error("signal {0} is not routed")]
    Unrouted(String),
    #[error("signal {signal}: {detail}")]
    Inconsistent { signal: String, detail: String },
}

pub fn power_trace(topology: &Topology, scenario: &Scenario, signal: &str) -> Result<PowerTrace, TraceError> {
    let s = scenario
        .signals
        .iter()
        .find(|s| s.id == signal)
        .ok_or_else(|| TraceError::UnknownSignal(signal.into()))?;
    let route = topology
        .route(signal)
        .ok_or_else(|| TraceError::Unrouted(signal.into()))?;
    if route.hops.is_empty() {
        return Err(TraceError::Unrouted(signal.into()));
    }
    let bad = |detail: String| TraceError::Inconsistent {
        signal: signal.into(),
        detail,
    };
    let tt = &scenario.type_table;
    let dev = |id: &str| {
        topology
            .device(id)
            .and_then(|d| d.device_type.as_ref())
            .and_then(|n| tt.device_type_index(n))
            .map(|t| &tt.device_types[t])
    };
    let devices = topology.route_devices(route, &s.source);
    if devices.len() != route.hops.len() + 1 {
        return Err(bad("route leaves the topology".into()));
    }

    let launch = route
        .emission(&s.source)
        .ok_or_else(|| bad(format!("no transmit power at source {}", s.source)))?;
    let mut points = vec![TracePoint {
        step: TraceStep::Transmit,
        element: s.source.clone(),
        power: launch,
        delta: 0.0,
    }];
    let mut p = launch;
    for (n, hop) in route.hops.iter().enumerate() {
        let ct = topology
            .cable(&hop.cable)
            .and_then(|c| c.cable_type.as_ref())
            .and_then(|n| tt.cable_type_index(n))
            .map(|t| &tt.cable_types[t])
            .ok_or_else(|| bad(format!("cable {} has no type", hop.cable)))?;
        p += ct.delta;
        points.push(TracePoint {
            step: TraceStep::Cable,
            element: hop.cable.clone(),
            power: p,
            delta: ct.delta,
        });
        let id = &devices[n + 1];
        if n + 1 == route.hops.len() {
            break;
        }
        let dt = dev(id).ok_or_else(|| bad(format!("device {id} has no type")))?;
        if dt.translucent {
            p += dt.delta;
            points.push(TracePoint {
                step: TraceStep::Device,
                element: id.clone(),
                power: p,
                delta: dt.delta,
            });
        } else {
            p = route
                .emission(id)
                .ok_or_else(|| bad(format!("no transmit power at relay {id}")))?;
            points.push(TracePoint {
                step: TraceStep::Repower,
                element: id.clone(),
                power: p,
                delta: 0.0,
            });
        }
    }
    Ok(PowerTrace {
        signal: signal.into(),
        points,
    })
}
