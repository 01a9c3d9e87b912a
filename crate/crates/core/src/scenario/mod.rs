//! Domain model: device and cable types, candidate slots, signals, and the
//! expansion of a scenario into its maximum topology.

mod file;
mod types;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub use file::{load_scenario, parse_scenario, CableSlotSpec, DeviceSlotSpec, ScenarioFile, ScenarioOptions};
pub use types::{
    direction_row_allowed, CableProperty, CableSlot, CableType, DeviceProperty, DeviceSlot, DeviceType,
    ElementKind, MaxTopology, Objective, Scenario, Signal, TypeTable, CABLE_PROPERTY_COUNT,
    DEVICE_PROPERTY_COUNT,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("{element}: unknown type `{type_name}`")]
    UnknownType { element: String, type_name: String },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{element}: reference to unknown device `{reference}`")]
    DanglingReference { element: String, reference: String },
    #[error("cable {0}: both endpoints are the same device")]
    SelfLoop(String),
    #[error("signal {0}: source and target are the same device")]
    SignalLoop(String),
    #[error("{element}: fixed type `{type_name}` is excluded by its allowed types")]
    FixedTypeMasked { element: String, type_name: String },
    #[error("inconsistent type table: {}", join(.0))]
    TypeTable(Vec<TypeViolation>),
}

fn join(v: &[TypeViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeRule {
    /// Opaque devices carry no internal attenuation.
    OpaqueDelta,
    /// Translucent devices have all power bounds at zero.
    TranslucentPowerBounds,
    RxOrder,
    TxOrder,
    /// (uni, allow_ab, allow_ba) is not an admissible direction setting.
    CableDirection,
    ZeroCores,
    NegativeCost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeViolation {
    pub kind: ElementKind,
    pub type_name: String,
    pub rule: TypeRule,
}

impl fmt::Display for TypeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ElementKind::Device => "device type",
            ElementKind::Cable => "cable type",
        };
        write!(f, "{what} `{}` violates {:?}", self.type_name, self.rule)
    }
}

/// Check every type against the property consistency rules. Violations are
/// returned as data; an empty list means the table is usable.
pub fn validate_type_table(tt: &TypeTable) -> Vec<TypeViolation> {
    let mut out = Vec::new();
    for t in &tt.device_types {
        let mut push = |rule| {
            out.push(TypeViolation {
                kind: ElementKind::Device,
                type_name: t.name.clone(),
                rule,
            })
        };
        if !t.translucent && t.delta != 0.0 {
            push(TypeRule::OpaqueDelta);
        }
        if t.translucent && [t.rx_min, t.rx_max, t.tx_min, t.tx_max].iter().any(|&v| v != 0.0) {
            push(TypeRule::TranslucentPowerBounds);
        }
        if t.rx_min > t.rx_max {
            push(TypeRule::RxOrder);
        }
        if t.tx_min > t.tx_max {
            push(TypeRule::TxOrder);
        }
        if t.cost < 0.0 {
            push(TypeRule::NegativeCost);
        }
    }
    for t in &tt.cable_types {
        let mut push = |rule| {
            out.push(TypeViolation {
                kind: ElementKind::Cable,
                type_name: t.name.clone(),
                rule,
            })
        };
        if !t.direction_is_consistent() {
            push(TypeRule::CableDirection);
        }
        if t.cores == 0 {
            push(TypeRule::ZeroCores);
        }
        if t.cost < 0.0 {
            push(TypeRule::NegativeCost);
        }
    }
    out
}

/// Current properties of an element: the property matrix times its type
/// vector. An all-zero type vector (element absent) yields all-zero
/// properties.
///
/// Panics if `type_vector` does not have one entry per type of `kind`.
pub fn element_properties(tt: &TypeTable, kind: ElementKind, type_vector: &[f64]) -> Vec<f64> {
    assert_eq!(
        type_vector.len(),
        tt.type_count(kind),
        "type vector length must match the number of {kind:?} types"
    );
    tt.matrix(kind)
        .iter()
        .map(|row| row.iter().zip(type_vector).map(|(p, x)| p * x).sum())
        .collect()
}

/// Resolve endpoints and, when `auto_complete` is set, add one optional
/// candidate cable for every unordered device pair that has none. Generated
/// cables take the device declared first as endpoint A.
pub fn expand_max_topology(s: &Scenario) -> Result<MaxTopology, ScenarioError> {
    let mut scenario = s.clone();
    let resolve = |element: &str, id: &str| {
        s.device_index(id)
            .ok_or_else(|| ScenarioError::DanglingReference {
                element: element.to_string(),
                reference: id.to_string(),
            })
    };

    let mut cable_ends = Vec::with_capacity(s.cables.len());
    for c in &s.cables {
        let a = resolve(&c.id, &c.endpoint_a)?;
        let b = resolve(&c.id, &c.endpoint_b)?;
        if a == b {
            return Err(ScenarioError::SelfLoop(c.id.clone()));
        }
        cable_ends.push((a, b));
    }

    if s.auto_complete {
        let covered: HashSet<(usize, usize)> =
            cable_ends.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let mut taken: HashSet<String> = s.cables.iter().map(|c| c.id.clone()).collect();
        let n_types = s.type_table.cable_types.len();
        let n = s.devices.len();
        for a in 0..n {
            for b in a + 1..n {
                if covered.contains(&(a, b)) {
                    continue;
                }
                let base = format!("auto_{}_{}", s.devices[a].id, s.devices[b].id);
                let mut id = base.clone();
                let mut k = 1;
                while taken.contains(&id) {
                    id = format!("{base}#{k}");
                    k += 1;
                }
                taken.insert(id.clone());
                scenario.cables.push(CableSlot {
                    id,
                    endpoint_a: s.devices[a].id.clone(),
                    endpoint_b: s.devices[b].id.clone(),
                    fixed_type: None,
                    allowed_types: vec![true; n_types],
                    must_exist: false,
                });
                cable_ends.push((a, b));
            }
        }
    }

    let signal_ends = s
        .signals
        .iter()
        .map(|sig| Ok((resolve(&sig.id, &sig.source)?, resolve(&sig.id, &sig.target)?)))
        .collect::<Result<Vec<_>, ScenarioError>>()?;

    Ok(MaxTopology {
        scenario,
        cable_ends,
        signal_ends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn table5_6() -> TypeTable {
        TypeTable {
            device_types: vec![
                DeviceType {
                    name: "opaque".into(),
                    ports: 4,
                    delta: 0.0,
                    rx_min: -14.0,
                    rx_max: 0.5,
                    tx_min: -5.0,
                    tx_max: 0.0,
                    translucent: false,
                    cost: 300.0,
                },
                DeviceType {
                    name: "translucent".into(),
                    ports: 2,
                    delta: -0.5,
                    rx_min: 0.0,
                    rx_max: 0.0,
                    tx_min: 0.0,
                    tx_max: 0.0,
                    translucent: true,
                    cost: 100.0,
                },
            ],
            cable_types: vec![
                cable("bi1", 1, -15.0, 1.0, false),
                cable("bi2", 2, -2.0, 30.0, false),
                cable("uni2", 2, -2.0, 30.0, true),
                cable("bi3", 3, -2.0, 50.0, false),
            ],
        }
    }

    fn cable(name: &str, cores: u32, delta: f64, cost: f64, uni: bool) -> CableType {
        CableType {
            name: name.into(),
            cores,
            delta,
            cost,
            uni,
            allow_ab: true,
            allow_ba: true,
        }
    }

    #[test]
    fn validation_types_are_consistent() {
        assert!(validate_type_table(&table5_6()).is_empty());
    }

    #[test]
    fn translucent_with_rx_bound_is_one_violation() {
        let mut tt = table5_6();
        tt.device_types[1].rx_min = -14.0;
        let v = validate_type_table(&tt);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, TypeRule::TranslucentPowerBounds);
    }

    #[test]
    fn inverted_tx_range_is_one_violation() {
        let mut tt = table5_6();
        tt.device_types[0].tx_min = 1.0;
        tt.device_types[0].tx_max = 0.0;
        let v = validate_type_table(&tt);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, TypeRule::TxOrder);
    }

    #[test]
    fn opaque_with_attenuation_is_rejected() {
        let mut tt = table5_6();
        tt.device_types[0].delta = -1.0;
        assert_eq!(validate_type_table(&tt)[0].rule, TypeRule::OpaqueDelta);
    }

    #[test]
    fn direction_table_all_eight_rows() {
        let expected = [
            // (uni, ab, ba) -> allowed
            ((false, true, true), true),
            ((true, true, true), true),
            ((true, true, false), true),
            ((true, false, true), true),
            ((false, false, false), false),
            ((true, false, false), false),
            ((false, false, true), false),
            ((false, true, false), false),
        ];
        for ((uni, ab, ba), ok) in expected {
            assert_eq!(direction_row_allowed(uni, ab, ba), ok, "row ({uni}, {ab}, {ba})");
            let mut tt = table5_6();
            tt.cable_types[0].uni = uni;
            tt.cable_types[0].allow_ab = ab;
            tt.cable_types[0].allow_ba = ba;
            assert_eq!(validate_type_table(&tt).is_empty(), ok);
        }
    }

    #[test]
    fn opaque_property_vector() {
        let tt = table5_6();
        let p = element_properties(&tt, ElementKind::Device, &[1.0, 0.0]);
        assert_eq!(p, vec![4.0, 0.0, -14.0, 0.5, -5.0, 0.0, 0.0, 300.0]);
    }

    #[test]
    fn absent_element_has_zero_properties() {
        let tt = table5_6();
        assert_eq!(
            element_properties(&tt, ElementKind::Device, &[0.0, 0.0]),
            vec![0.0; 8]
        );
        assert_eq!(
            element_properties(&tt, ElementKind::Cable, &[0.0; 4]),
            vec![0.0; 6]
        );
    }

    #[test]
    fn bidirectional_three_core_property_vector() {
        let tt = table5_6();
        let p = element_properties(&tt, ElementKind::Cable, &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(p, vec![3.0, -2.0, 50.0, 0.0, 1.0, 1.0]);
    }

    fn five_devices(auto: bool, cables: Vec<(&str, &str)>) -> Scenario {
        let tt = table5_6();
        Scenario {
            name: "t".into(),
            devices: (0..5)
                .map(|i| DeviceSlot {
                    id: i.to_string(),
                    fixed_type: None,
                    allowed_types: vec![true; 2],
                    must_exist: false,
                })
                .collect(),
            cables: cables
                .iter()
                .enumerate()
                .map(|(j, (a, b))| CableSlot {
                    id: format!("F{j}"),
                    endpoint_a: a.to_string(),
                    endpoint_b: b.to_string(),
                    fixed_type: None,
                    allowed_types: vec![true; 4],
                    must_exist: false,
                })
                .collect(),
            signals: vec![],
            auto_complete: auto,
            objective: Objective::Cost,
            type_table: tt,
        }
    }

    #[test]
    fn declared_cables_are_kept_without_auto_complete() {
        let s = five_devices(
            false,
            vec![("0", "1"), ("1", "2"), ("0", "3"), ("3", "2"), ("3", "4")],
        );
        assert_eq!(expand_max_topology(&s).unwrap().cable_ends.len(), 5);
    }

    #[test]
    fn full_mesh_for_five_devices() {
        let s = five_devices(true, vec![]);
        let m = expand_max_topology(&s).unwrap();
        // independent count: all unordered pairs
        let mut pairs = 0;
        for a in 0..5 {
            for b in 0..5 {
                if a < b {
                    pairs += 1;
                }
            }
        }
        assert_eq!(m.cable_ends.len(), pairs);
        assert!(m.cable_ends.iter().all(|&(a, b)| a < b));
    }

    #[test]
    fn single_device_has_no_candidates() {
        let mut s = five_devices(true, vec![]);
        s.devices.truncate(1);
        assert!(expand_max_topology(&s).unwrap().cable_ends.is_empty());
    }

    #[test]
    fn expansion_is_idempotent() {
        let s = five_devices(true, vec![("1", "0"), ("2", "4")]);
        let once = expand_max_topology(&s).unwrap();
        let twice = expand_max_topology(&once.scenario).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn parallel_declared_cables_are_legal() {
        let s = five_devices(false, vec![("0", "1"), ("0", "1")]);
        assert_eq!(expand_max_topology(&s).unwrap().cable_ends, vec![(0, 1), (0, 1)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn element_properties_are_linear(
                u in proptest::collection::vec(-3.0f64..3.0, 4),
                v in proptest::collection::vec(-3.0f64..3.0, 4),
                alpha in -2.0f64..2.0,
                beta in -2.0f64..2.0,
            ) {
                let tt = table5_6();
                let mix: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
                let lhs = element_properties(&tt, ElementKind::Cable, &mix);
                let pu = element_properties(&tt, ElementKind::Cable, &u);
                let pv = element_properties(&tt, ElementKind::Cable, &v);
                for i in 0..lhs.len() {
                    let rhs = alpha * pu[i] + beta * pv[i];
                    prop_assert!((lhs[i] - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
                }
            }
        }
    }
}
