//! On-disk scenario format.
//!
//! A scenario file is a JSON document. Types are referenced by name; a slot
//! that omits `allowed_types` admits every type of its class.
//!
//! ```json
//! {
//!   "name": "example",
//!   "device_types": [{"name": "opaque", "ports": 4, "rx_min": -14, "rx_max": 0.5,
//!                     "tx_min": -5, "tx_max": 0, "translucent": false, "cost": 300}],
//!   "cable_types": [{"name": "bi3", "cores": 3, "delta": -2, "cost": 50,
//!                    "uni": false, "allow_ab": true, "allow_ba": true}],
//!   "devices": [{"id": "0"}, {"id": "1", "fixed_type": "opaque"}],
//!   "cables": [{"id": "F0", "endpoint_a": "0", "endpoint_b": "1"}],
//!   "signals": [{"id": "A", "source": "0", "target": "1"}],
//!   "options": {"auto_complete": false, "objective": "cost"}
//! }
//! ```

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{CableSlot, CableType, DeviceSlot, DeviceType, Objective, Scenario, Signal, TypeTable};
use super::{validate_type_table, ScenarioError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    pub device_types: Vec<DeviceType>,
    pub cable_types: Vec<CableType>,
    pub devices: Vec<DeviceSlotSpec>,
    #[serde(default)]
    pub cables: Vec<CableSlotSpec>,
    #[serde(default)]
    pub signals: Vec<Signal>,
    #[serde(default)]
    pub options: ScenarioOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSlotSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_types: Option<Vec<String>>,
    #[serde(default)]
    pub must_exist: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CableSlotSpec {
    pub id: String,
    pub endpoint_a: String,
    pub endpoint_b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_types: Option<Vec<String>>,
    #[serde(default)]
    pub must_exist: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOptions {
    #[serde(default)]
    pub auto_complete: bool,
    #[serde(default)]
    pub objective: Objective,
}

/// Read and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

/// Parse and validate scenario JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    file.into_scenario()
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let type_table = TypeTable {
            device_types: self.device_types,
            cable_types: self.cable_types,
        };
        check_unique(
            "device type",
            type_table.device_types.iter().map(|t| t.name.as_str()),
        )?;
        check_unique(
            "cable type",
            type_table.cable_types.iter().map(|t| t.name.as_str()),
        )?;
        let violations = validate_type_table(&type_table);
        if !violations.is_empty() {
            return Err(ScenarioError::TypeTable(violations));
        }

        check_unique("device", self.devices.iter().map(|d| d.id.as_str()))?;
        check_unique("cable", self.cables.iter().map(|c| c.id.as_str()))?;
        check_unique("signal", self.signals.iter().map(|s| s.id.as_str()))?;

        let device_ids: HashSet<&str> = self.devices.iter().map(|d| d.id.as_str()).collect();

        let devices = self
            .devices
            .iter()
            .map(|d| {
                let (fixed_type, allowed_types) = resolve_mask(
                    &d.id,
                    d.fixed_type.as_deref(),
                    d.allowed_types.as_deref(),
                    |n| type_table.device_type_index(n),
                    type_table.device_types.len(),
                )?;
                Ok(DeviceSlot {
                    id: d.id.clone(),
                    fixed_type,
                    allowed_types,
                    must_exist: d.must_exist || fixed_type.is_some(),
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        let cables = self
            .cables
            .iter()
            .map(|c| {
                for end in [&c.endpoint_a, &c.endpoint_b] {
                    if !device_ids.contains(end.as_str()) {
                        return Err(ScenarioError::DanglingReference {
                            element: c.id.clone(),
                            reference: end.clone(),
                        });
                    }
                }
                if c.endpoint_a == c.endpoint_b {
                    return Err(ScenarioError::SelfLoop(c.id.clone()));
                }
                let (fixed_type, allowed_types) = resolve_mask(
                    &c.id,
                    c.fixed_type.as_deref(),
                    c.allowed_types.as_deref(),
                    |n| type_table.cable_type_index(n),
                    type_table.cable_types.len(),
                )?;
                Ok(CableSlot {
                    id: c.id.clone(),
                    endpoint_a: c.endpoint_a.clone(),
                    endpoint_b: c.endpoint_b.clone(),
                    fixed_type,
                    allowed_types,
                    must_exist: c.must_exist || fixed_type.is_some(),
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;

        for s in &self.signals {
            for end in [&s.source, &s.target] {
                if !device_ids.contains(end.as_str()) {
                    return Err(ScenarioError::DanglingReference {
                        element: s.id.clone(),
                        reference: end.clone(),
                    });
                }
            }
            if s.source == s.target {
                return Err(ScenarioError::SignalLoop(s.id.clone()));
            }
        }

        Ok(Scenario {
            name: self.name,
            type_table,
            devices,
            cables,
            signals: self.signals,
            auto_complete: self.options.auto_complete,
            objective: self.options.objective,
        })
    }

    /// Inverse of [`ScenarioFile::into_scenario`]; masks that admit every
    /// type are written as an omitted `allowed_types`.
    pub fn from_scenario(s: &Scenario) -> Self {
        let dev_names: Vec<&str> = s
            .type_table
            .device_types
            .iter()
            .map(|t| t.name.as_str())
            .collect();
        let cab_names: Vec<&str> = s.type_table.cable_types.iter().map(|t| t.name.as_str()).collect();
        ScenarioFile {
            name: s.name.clone(),
            device_types: s.type_table.device_types.clone(),
            cable_types: s.type_table.cable_types.clone(),
            devices: s
                .devices
                .iter()
                .map(|d| DeviceSlotSpec {
                    id: d.id.clone(),
                    fixed_type: d.fixed_type.map(|t| dev_names[t].to_string()),
                    allowed_types: mask_names(&d.allowed_types, &dev_names),
                    must_exist: d.must_exist,
                })
                .collect(),
            cables: s
                .cables
                .iter()
                .map(|c| CableSlotSpec {
                    id: c.id.clone(),
                    endpoint_a: c.endpoint_a.clone(),
                    endpoint_b: c.endpoint_b.clone(),
                    fixed_type: c.fixed_type.map(|t| cab_names[t].to_string()),
                    allowed_types: mask_names(&c.allowed_types, &cab_names),
                    must_exist: c.must_exist,
                })
                .collect(),
            signals: s.signals.clone(),
            options: ScenarioOptions {
                auto_complete: s.auto_complete,
                objective: s.objective,
            },
        }
    }
}

fn mask_names(mask: &[bool], names: &[&str]) -> Option<Vec<String>> {
    if mask.iter().all(|&m| m) {
        None
    } else {
        Some(
            mask.iter()
                .zip(names)
                .filter(|(m, _)| **m)
                .map(|(_, n)| n.to_string())
                .collect(),
        )
    }
}

fn check_unique<'a>(what: &'static str, ids: impl Iterator<Item = &'a str>) -> Result<(), ScenarioError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ScenarioError::DuplicateId {
                kind: what,
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

fn resolve_mask(
    element: &str,
    fixed: Option<&str>,
    allowed: Option<&[String]>,
    lookup: impl Fn(&str) -> Option<usize>,
    type_count: usize,
) -> Result<(Option<usize>, Vec<bool>), ScenarioError> {
    let unknown = |name: &str| ScenarioError::UnknownType {
        element: element.to_string(),
        type_name: name.to_string(),
    };
    let mut mask = match allowed {
        None => vec![true; type_count],
        Some(names) => {
            let mut m = vec![false; type_count];
            for n in names {
                m[lookup(n).ok_or_else(|| unknown(n))?] = true;
            }
            m
        }
    };
    let fixed_type = match fixed {
        None => None,
        Some(n) => {
            let t = lookup(n).ok_or_else(|| unknown(n))?;
            if !mask[t] {
                return Err(ScenarioError::FixedTypeMasked {
                    element: element.to_string(),
                    type_name: n.to_string(),
                });
            }
            mask.iter_mut().enumerate().for_each(|(i, m)| *m = i == t);
            Some(t)
        }
    };
    Ok((fixed_type, mask))
}
