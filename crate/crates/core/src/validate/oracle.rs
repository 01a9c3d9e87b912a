//! Brute-force ground truth for tiny instances.
//!
//! Every combination of device and cable types is visited in order of total
//! cost (ties broken by the assignment's index vector). For each one, every
//! simple directed path of every signal is enumerated and power-checked,
//! then paths are combined under the core and direction limits. The first
//! combination that admits a routing, and passes [`audit`], is optimal.
//! No MILP code is involved.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{audit, CableAssignment, DeviceAssignment, Direction, Emission, Hop, SignalRoute, Topology};
use crate::scenario::{CableType, DeviceType, MaxTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_devices: usize,
    pub max_cables: usize,
    pub max_signals: usize,
    pub max_types: usize,
}

impl Default for OracleLimits {
    /// Five devices so that the five-switch validation model fits.
    fn default() -> Self {
        OracleLimits {
            max_devices: 5,
            max_cables: 5,
            max_signals: 3,
            max_types: 3,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what}: {got} exceeds the limit of {limit}")]
    LimitExceeded {
        what: &'static str,
        got: usize,
        limit: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleResult {
    Optimal(Topology),
    Infeasible,
}

impl OracleResult {
    pub fn objective(&self) -> Option<f64> {
        match self {
            OracleResult::Optimal(t) => Some(t.objective_value),
            OracleResult::Infeasible => None,
        }
    }
}

/// One candidate directed path with the transmit power each opaque sender
/// uses on it.
#[derive(Debug, Clone)]
struct Path {
    hops: Vec<(usize, Direction)>,
    /// `(device, power)` for the source and every opaque relay.
    emissions: Vec<(usize, f64)>,
}

struct Instance<'a> {
    max: &'a MaxTopology,
    dev: Vec<Option<&'a DeviceType>>,
    cab: Vec<Option<&'a CableType>>,
}

const EPS: f64 = 1e-9;

impl Instance<'_> {
    fn ports_ok(&self) -> bool {
        let mut count = vec![0u32; self.dev.len()];
        for (j, c) in self.cab.iter().enumerate() {
            if c.is_some() {
                let (a, b) = self.max.cable_ends[j];
                count[a] += 1;
                count[b] += 1;
            }
        }
        count
            .iter()
            .zip(&self.dev)
            .all(|(&n, d)| n <= d.map_or(0, |t| t.ports))
    }

    fn opaque(&self, k: usize) -> Option<&DeviceType> {
        self.dev[k].filter(|t| !t.translucent)
    }

    /// Pick transmit powers for each opaque-to-opaque segment of `hops`, or
    /// `None` if some receiver window cannot be met.
    fn power(&self, src: usize, hops: &[(usize, Direction)]) -> Option<Vec<(usize, f64)>> {
        let mut emissions = Vec::new();
        let mut sender = src;
        let mut loss = 0.0;
        for &(j, d) in hops {
            let (a, b) = self.max.cable_ends[j];
            let next = if d == Direction::AB { b } else { a };
            loss += self.cab[j]?.delta;
            let t = self.dev[next]?;
            if t.translucent {
                loss += t.delta;
                continue;
            }
            let s = self.opaque(sender)?;
            let lo = s.tx_min.max(t.rx_min - loss);
            let hi = s.tx_max.min(t.rx_max - loss);
            if lo > hi + EPS {
                return None;
            }
            emissions.push((sender, hi.max(lo)));
            sender = next;
            loss = 0.0;
        }
        Some(emissions)
    }

    fn paths(&self, src: usize, dst: usize) -> Vec<Path> {
        let mut out = Vec::new();
        let mut visited = vec![false; self.dev.len()];
        visited[src] = true;
        let mut stack = Vec::new();
        self.dfs(src, src, dst, &mut visited, &mut stack, &mut out);
        out
    }

    fn dfs(
        &self,
        src: usize,
        at: usize,
        dst: usize,
        visited: &mut [bool],
        stack: &mut Vec<(usize, Direction)>,
        out: &mut Vec<Path>,
    ) {
        if at == dst {
            if let Some(emissions) = self.power(src, stack) {
                out.push(Path {
                    hops: stack.clone(),
                    emissions,
                });
            }
            return;
        }
        for (j, &(a, b)) in self.max.cable_ends.iter().enumerate() {
            let Some(ct) = self.cab[j] else { continue };
            let step = if a == at && ct.allow_ab {
                Some((b, Direction::AB))
            } else if b == at && ct.allow_ba {
                Some((a, Direction::BA))
            } else {
                None
            };
            let Some((next, d)) = step else { continue };
            if visited[next] || self.dev[next].is_none() {
                continue;
            }
            visited[next] = true;
            stack.push((j, d));
            self.dfs(src, next, dst, visited, stack, out);
            stack.pop();
            visited[next] = false;
        }
    }

    fn fits(&self, usage: &[(u32, u32)], j: usize) -> bool {
        let ct = self.cab[j].expect("used cable exists");
        let (ab, ba) = usage[j];
        ab + ba <= ct.cores && !(ct.uni && ab > 0 && ba > 0)
    }

    fn combine(
        &self,
        options: &[Vec<Path>],
        i: usize,
        usage: &mut Vec<(u32, u32)>,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if i == options.len() {
            return true;
        }
        for (n, p) in options[i].iter().enumerate() {
            for &(j, d) in &p.hops {
                match d {
                    Direction::AB => usage[j].0 += 1,
                    Direction::BA => usage[j].1 += 1,
                }
            }
            let ok = p.hops.iter().all(|&(j, _)| self.fits(usage, j));
            if ok {
                chosen.push(n);
                if self.combine(options, i + 1, usage, chosen) {
                    return true;
                }
                chosen.pop();
            }
            for &(j, d) in &p.hops {
                match d {
                    Direction::AB => usage[j].0 -= 1,
                    Direction::BA => usage[j].1 -= 1,
                }
            }
        }
        false
    }

    fn route(&self) -> Option<Vec<Path>> {
        let mut options = Vec::new();
        for &(s, t) in &self.max.signal_ends {
            if self.opaque(s).is_none() || self.opaque(t).is_none() {
                return None;
            }
            let p = self.paths(s, t);
            if p.is_empty() {
                return None;
            }
            options.push(p);
        }
        let mut usage = vec![(0, 0); self.cab.len()];
        let mut chosen = Vec::new();
        if !self.combine(&options, 0, &mut usage, &mut chosen) {
            return None;
        }
        Some(
            chosen
                .iter()
                .zip(options)
                .map(|(&n, mut o)| o.swap_remove(n))
                .collect(),
        )
    }

    fn topology(&self, routes: Vec<Path>, cost: f64) -> Topology {
        let max = self.max;
        let devices = max
            .devices()
            .iter()
            .zip(&self.dev)
            .map(|(s, t)| DeviceAssignment {
                id: s.id.clone(),
                device_type: t.map(|t| t.name.clone()),
            })
            .collect();
        let mut cables: Vec<CableAssignment> = max
            .cables()
            .iter()
            .zip(&self.cab)
            .map(|(s, t)| CableAssignment {
                id: s.id.clone(),
                endpoint_a: s.endpoint_a.clone(),
                endpoint_b: s.endpoint_b.clone(),
                cable_type: t.map(|t| t.name.clone()),
                use_ab: 0,
                use_ba: 0,
            })
            .collect();
        let mut out = Vec::new();
        for (signal, p) in max.signals().iter().zip(routes) {
            for &(j, d) in &p.hops {
                match d {
                    Direction::AB => cables[j].use_ab += 1,
                    Direction::BA => cables[j].use_ba += 1,
                }
            }
            out.push(SignalRoute {
                signal: signal.id.clone(),
                hops: p
                    .hops
                    .iter()
                    .map(|&(j, d)| Hop {
                        cable: max.cables()[j].id.clone(),
                        direction: d,
                    })
                    .collect(),
                emissions: p
                    .emissions
                    .iter()
                    .map(|&(k, power)| Emission {
                        device: max.devices()[k].id.clone(),
                        power,
                    })
                    .collect(),
            });
        }
        Topology {
            devices,
            cables,
            routes: out,
            objective_value: cost,
            warnings: Vec::new(),
        }
    }
}

fn check(what: &'static str, got: usize, limit: usize) -> Result<(), OracleError> {
    if got > limit {
        return Err(OracleError::LimitExceeded { what, got, limit });
    }
    Ok(())
}

/// Options for one slot: `None` (absent) unless it must exist, then every
/// allowed type.
fn slot_options(must_exist: bool, fixed: Option<usize>, mask: &[bool]) -> Vec<Option<usize>> {
    if let Some(f) = fixed {
        return vec![Some(f)];
    }
    let mut v = Vec::new();
    if !must_exist {
        v.push(None);
    }
    v.extend(mask.iter().enumerate().filter(|(_, &a)| a).map(|(t, _)| Some(t)));
    v
}

/// All combinations of per-slot options with their cost, cheapest first.
fn combinations(
    options: &[Vec<Option<usize>>],
    cost: impl Fn(usize, usize) -> f64,
) -> Vec<(f64, Vec<usize>)> {
    let mut out = vec![(0.0, Vec::new())];
    for (slot, opts) in options.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for (c, idx) in &out {
            for (n, o) in opts.iter().enumerate() {
                let mut idx = idx.clone();
                idx.push(n);
                next.push((c + o.map_or(0.0, |t| cost(slot, t)), idx));
            }
        }
        out = next;
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out
}

pub fn exhaustive_oracle(max: &MaxTopology, limits: OracleLimits) -> Result<OracleResult, OracleError> {
    let tt = max.type_table();
    check("devices", max.devices().len(), limits.max_devices)?;
    check("cable slots", max.cables().len(), limits.max_cables)?;
    check("signals", max.signals().len(), limits.max_signals)?;
    check("device types", tt.device_types.len(), limits.max_types)?;
    check("cable types", tt.cable_types.len(), limits.max_types)?;

    let dev_opts: Vec<_> = max
        .devices()
        .iter()
        .map(|s| slot_options(s.must_exist, s.fixed_type, &s.allowed_types))
        .collect();
    let cab_opts: Vec<_> = max
        .cables()
        .iter()
        .map(|s| slot_options(s.must_exist, s.fixed_type, &s.allowed_types))
        .collect();
    let dev_combos = combinations(&dev_opts, |_, t| tt.device_types[t].cost);
    let cab_combos = combinations(&cab_opts, |_, t| tt.cable_types[t].cost);

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dev_combos.len() * cab_combos.len());
    for (d, (dc, _)) in dev_combos.iter().enumerate() {
        for (c, (cc, _)) in cab_combos.iter().enumerate() {
            pairs.push((dc + cc, d, c));
        }
    }
    // both lists are already sorted by (cost, encoding), so their positions
    // are a valid lexicographic tie-break
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    for (cost, d, c) in pairs {
        let inst = Instance {
            max,
            dev: dev_combos[d]
                .1
                .iter()
                .enumerate()
                .map(|(k, &n)| dev_opts[k][n].map(|t| &tt.device_types[t]))
                .collect(),
            cab: cab_combos[c]
                .1
                .iter()
                .enumerate()
                .map(|(j, &n)| cab_opts[j][n].map(|t| &tt.cable_types[t]))
                .collect(),
        };
        if !inst.ports_ok() {
            continue;
        }
        let Some(routes) = inst.route() else { continue };
        let topo = inst.topology(routes, cost);
        if audit(&topo, &max.scenario).passes {
            return Ok(OracleResult::Optimal(topo));
        }
    }
    Ok(OracleResult::Infeasible)
}
