//! Independent re-check of a decoded topology.
//!
//! Nothing here reads MILP data. Every rule is recomputed from the scenario
//! and the topology alone, so the audit can disagree with the optimizer.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Direction, Topology};
use crate::scenario::{expand_max_topology, CableType, DeviceType, MaxTopology, Scenario};

/// Slack for comparing recomputed powers against bounds; solver points carry
/// ~1e−6 drift.
const POWER_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub element: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passes: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            passes: violations.is_empty(),
            violations,
        }
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

struct Auditor<'a> {
    max: MaxTopology,
    topo: &'a Topology,
    out: Vec<Violation>,
}

fn fmt_dbm(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    format!("{r}")
}

impl<'a> Auditor<'a> {
    fn flag(&mut self, rule: &str, element: impl Into<String>, detail: impl Into<String>) {
        self.out.push(Violation {
            rule: rule.into(),
            element: element.into(),
            detail: detail.into(),
        });
    }

    fn device_type(&self, id: &str) -> Option<&DeviceType> {
        let name = self.topo.device(id)?.device_type.as_ref()?;
        let t = self.max.type_table().device_type_index(name)?;
        Some(&self.max.type_table().device_types[t])
    }

    fn cable_type(&self, id: &str) -> Option<&CableType> {
        let name = self.topo.cable(id)?.cable_type.as_ref()?;
        let t = self.max.type_table().cable_type_index(name)?;
        Some(&self.max.type_table().cable_types[t])
    }

    fn check_types(&mut self) {
        let tt = self.max.type_table().clone();
        let slots = self.max.devices().to_vec();
        let known: HashSet<&str> = slots.iter().map(|s| s.id.as_str()).collect();
        for d in &self.topo.devices {
            if !known.contains(d.id.as_str()) {
                self.flag("slot.unknown", &d.id, "device not in scenario");
            }
        }
        for slot in &slots {
            let assigned = self.topo.device(&slot.id).and_then(|d| d.device_type.clone());
            let Some(name) = assigned else {
                if slot.must_exist {
                    self.flag("type.must_exist", &slot.id, "required device not instantiated");
                }
                continue;
            };
            let Some(t) = tt.device_type_index(&name) else {
                self.flag("type.unknown", &slot.id, format!("unknown device type {name}"));
                continue;
            };
            if !slot.allowed_types[t] {
                self.flag(
                    "type.forbidden",
                    &slot.id,
                    format!("type {name} not allowed here"),
                );
            }
            if slot.fixed_type.is_some_and(|f| f != t) {
                self.flag(
                    "type.fixed",
                    &slot.id,
                    format!("type {name} differs from the fixed type"),
                );
            }
        }

        let slots = self.max.cables().to_vec();
        let known: HashSet<&str> = slots.iter().map(|s| s.id.as_str()).collect();
        for c in &self.topo.cables {
            if !known.contains(c.id.as_str()) {
                self.flag("slot.unknown", &c.id, "cable not in scenario");
            }
        }
        for slot in &slots {
            let assigned = self.topo.cable(&slot.id).and_then(|c| c.cable_type.clone());
            let Some(name) = assigned else {
                if slot.must_exist {
                    self.flag("type.must_exist", &slot.id, "required cable not instantiated");
                }
                continue;
            };
            let Some(t) = tt.cable_type_index(&name) else {
                self.flag("type.unknown", &slot.id, format!("unknown cable type {name}"));
                continue;
            };
            if !slot.allowed_types[t] {
                self.flag(
                    "type.forbidden",
                    &slot.id,
                    format!("type {name} not allowed here"),
                );
            }
            if slot.fixed_type.is_some_and(|f| f != t) {
                self.flag(
                    "type.fixed",
                    &slot.id,
                    format!("type {name} differs from the fixed type"),
                );
            }
        }
    }

    fn check_ports(&mut self) {
        let mut count: HashMap<String, u32> = HashMap::new();
        for (j, slot) in self.max.cables().iter().enumerate() {
            if self.topo.cable(&slot.id).is_some_and(|c| c.cable_type.is_some()) {
                let (a, b) = self.max.cable_ends[j];
                *count.entry(self.max.devices()[a].id.clone()).or_default() += 1;
                *count.entry(self.max.devices()[b].id.clone()).or_default() += 1;
            }
        }
        let ids: Vec<String> = self.max.devices().iter().map(|d| d.id.clone()).collect();
        for id in ids {
            let n = count.get(&id).copied().unwrap_or(0);
            let ports = self.device_type(&id).map_or(0, |t| t.ports);
            if n > ports {
                self.flag("ports", &id, format!("{n} cables on {ports} ports"));
            }
        }
    }

    /// Core usage per cable, counted from the routes themselves.
    fn check_cores_and_direction(&mut self) {
        let mut usage: HashMap<&str, (u32, u32)> = HashMap::new();
        for r in &self.topo.routes {
            for h in &r.hops {
                let e = usage.entry(h.cable.as_str()).or_default();
                match h.direction {
                    Direction::AB => e.0 += 1,
                    Direction::BA => e.1 += 1,
                }
            }
        }
        let mut found = Vec::new();
        for c in &self.topo.cables {
            let (ab, ba) = usage.get(c.id.as_str()).copied().unwrap_or((0, 0));
            if (ab, ba) != (c.use_ab, c.use_ba) {
                found.push((
                    "cores.count",
                    c.id.clone(),
                    format!("declared use {}/{} but routes give {ab}/{ba}", c.use_ab, c.use_ba),
                ));
            }
            let Some(t) = self.cable_type(&c.id) else {
                if ab + ba > 0 {
                    found.push((
                        "cores",
                        c.id.clone(),
                        format!("{} signals on a missing cable", ab + ba),
                    ));
                }
                continue;
            };
            if ab + ba > t.cores {
                found.push((
                    "cores",
                    c.id.clone(),
                    format!("{} signals on {} cores", ab + ba, t.cores),
                ));
            }
            if ab > 0 && !t.allow_ab {
                found.push(("direction", c.id.clone(), "A→B not allowed by type".to_string()));
            }
            if ba > 0 && !t.allow_ba {
                found.push(("direction", c.id.clone(), "B→A not allowed by type".to_string()));
            }
            if t.uni && ab > 0 && ba > 0 {
                found.push((
                    "direction",
                    c.id.clone(),
                    "unidirectional cable used both ways".to_string(),
                ));
            }
        }
        for (rule, el, d) in found {
            self.flag(rule, el, d);
        }
    }

    fn check_routes(&mut self) {
        let signals = self.max.signals().to_vec();
        let routed: HashSet<&str> = self.topo.routes.iter().map(|r| r.signal.as_str()).collect();
        for s in &signals {
            if !routed.contains(s.id.as_str()) {
                self.flag("path.missing", &s.id, "signal not routed");
            }
        }
        let routes = self.topo.routes.clone();
        for route in &routes {
            let Some(signal) = signals.iter().find(|s| s.id == route.signal) else {
                self.flag("slot.unknown", &route.signal, "route for unknown signal");
                continue;
            };
            for end in [&signal.source, &signal.target] {
                match self.device_type(end) {
                    None => self.flag(
                        "path.endpoint",
                        &signal.id,
                        format!("endpoint {end} not instantiated"),
                    ),
                    Some(t) if t.translucent => self.flag(
                        "path.endpoint",
                        &signal.id,
                        format!("endpoint {end} is translucent"),
                    ),
                    _ => {}
                }
            }
            // continuity and simplicity
            let mut at = signal.source.clone();
            let mut seen = HashSet::from([at.clone()]);
            let mut ok = true;
            for h in &route.hops {
                let Some(c) = self.topo.cable(&h.cable) else {
                    self.flag(
                        "path.continuity",
                        &signal.id,
                        format!("unknown cable {}", h.cable),
                    );
                    ok = false;
                    break;
                };
                let (from, to) = match h.direction {
                    Direction::AB => (&c.endpoint_a, &c.endpoint_b),
                    Direction::BA => (&c.endpoint_b, &c.endpoint_a),
                };
                if *from != at {
                    self.flag(
                        "path.continuity",
                        &signal.id,
                        format!("hop over {} starts at {from}, path is at {at}", c.id),
                    );
                    ok = false;
                    break;
                }
                if c.cable_type.is_none() {
                    self.flag(
                        "path.continuity",
                        &signal.id,
                        format!("cable {} not instantiated", c.id),
                    );
                }
                if self.device_type(to).is_none() {
                    self.flag(
                        "path.continuity",
                        &signal.id,
                        format!("device {to} not instantiated"),
                    );
                }
                at = to.clone();
                if !seen.insert(at.clone()) {
                    self.flag("path.simple", &signal.id, format!("device {at} visited twice"));
                    ok = false;
                    break;
                }
            }
            if ok && at != signal.target {
                self.flag(
                    "path.continuity",
                    &signal.id,
                    format!("path ends at {at}, not {}", signal.target),
                );
                ok = false;
            }
            if ok {
                self.check_power(route, &signal.source);
            }
        }
    }

    /// Link budget along one route: transmit at each opaque sender, add
    /// every cable and translucent device attenuation, check the window at
    /// every opaque receiver.
    fn check_power(&mut self, route: &super::SignalRoute, source: &str) {
        let devices = self.topo.route_devices(route, source);
        let mut power: Option<f64> = None;
        for (n, id) in devices.iter().enumerate() {
            let Some(t) = self.device_type(id).cloned() else {
                return;
            };
            if n > 0 {
                let hop = &route.hops[n - 1];
                let Some(ct) = self.cable_type(&hop.cable) else {
                    return;
                };
                let p = power.expect("power set before first hop") + ct.delta;
                if t.translucent {
                    power = Some(p + t.delta);
                } else {
                    if p < t.rx_min - POWER_TOL {
                        self.flag(
                            "power.rx",
                            format!("{}@{id}", route.signal),
                            format!("Rx = {} dBm < {} dBm", fmt_dbm(p), fmt_dbm(t.rx_min)),
                        );
                    } else if p > t.rx_max + POWER_TOL {
                        self.flag(
                            "power.rx",
                            format!("{}@{id}", route.signal),
                            format!("Rx = {} dBm > {} dBm", fmt_dbm(p), fmt_dbm(t.rx_max)),
                        );
                    }
                    power = Some(p);
                }
            }
            let last = n + 1 == devices.len();
            if !last && !t.translucent {
                let Some(tx) = route.emission(id) else {
                    self.flag(
                        "power.tx",
                        format!("{}@{id}", route.signal),
                        "no transmit power chosen",
                    );
                    return;
                };
                if tx < t.tx_min - POWER_TOL || tx > t.tx_max + POWER_TOL {
                    self.flag(
                        "power.tx",
                        format!("{}@{id}", route.signal),
                        format!(
                            "Tx = {} dBm outside [{}, {}]",
                            fmt_dbm(tx),
                            fmt_dbm(t.tx_min),
                            fmt_dbm(t.tx_max)
                        ),
                    );
                }
                power = Some(tx);
            }
        }
    }

    fn check_objective(&mut self) {
        let mut cost = 0.0;
        for d in &self.topo.devices {
            cost += self.device_type(&d.id).map_or(0.0, |t| t.cost);
        }
        for c in &self.topo.cables {
            cost += self.cable_type(&c.id).map_or(0.0, |t| t.cost);
        }
        let tol = 1e-6 * cost.abs().max(1.0);
        if (cost - self.topo.objective_value).abs() > tol {
            self.flag(
                "objective",
                "topology",
                format!(
                    "recomputed cost {cost} differs from reported {}",
                    self.topo.objective_value
                ),
            );
        }
    }
}

/// Check `topology` against every structural and link-budget rule of
/// `scenario`.
pub fn audit(topology: &Topology, scenario: &Scenario) -> ValidationReport {
    let max = match expand_max_topology(scenario) {
        Ok(m) => m,
        Err(e) => {
            return ValidationReport::from_violations(vec![Violation {
                rule: "scenario".into(),
                element: scenario.name.clone(),
                detail: e.to_string(),
            }])
        }
    };
    let mut a = Auditor {
        max,
        topo: topology,
        out: Vec::new(),
    };
    a.check_types();
    a.check_ports();
    a.check_cores_and_direction();
    a.check_routes();
    a.check_objective();
    ValidationReport::from_violations(a.out)
}
