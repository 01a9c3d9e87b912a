use serde::{Deserialize, Serialize};

/// Number of entries in a device property vector.
pub const DEVICE_PROPERTY_COUNT: usize = 8;
/// Number of entries in a cable property vector.
pub const CABLE_PROPERTY_COUNT: usize = 6;

/// Rows of the device property matrix, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceProperty {
    Ports = 0,
    Delta = 1,
    RxMin = 2,
    RxMax = 3,
    TxMin = 4,
    TxMax = 5,
    Translucent = 6,
    Cost = 7,
}

/// Rows of the cable property matrix, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CableProperty {
    Cores = 0,
    Delta = 1,
    Cost = 2,
    Uni = 3,
    AllowAb = 4,
    AllowBa = 5,
}

/// A switch or end-system type.
///
/// Power values are dBm, `delta` is dB (negative is loss).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceType {
    pub name: String,
    pub ports: u32,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub rx_min: f64,
    #[serde(default)]
    pub rx_max: f64,
    #[serde(default)]
    pub tx_min: f64,
    #[serde(default)]
    pub tx_max: f64,
    #[serde(default)]
    pub translucent: bool,
    #[serde(default)]
    pub cost: f64,
}

impl DeviceType {
    pub fn property(&self, p: DeviceProperty) -> f64 {
        self.properties()[p as usize]
    }

    /// Column of the device property matrix for this type.
    pub fn properties(&self) -> [f64; DEVICE_PROPERTY_COUNT] {
        [
            f64::from(self.ports),
            self.delta,
            self.rx_min,
            self.rx_max,
            self.tx_min,
            self.tx_max,
            bool_value(self.translucent),
            self.cost,
        ]
    }
}

/// A multi-core fiber cable type. `delta` is the end-to-end attenuation
/// including connectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableType {
    pub name: String,
    pub cores: u32,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub cost: f64,
    #[serde(default)]
    pub uni: bool,
    #[serde(default = "default_true")]
    pub allow_ab: bool,
    #[serde(default = "default_true")]
    pub allow_ba: bool,
}

fn default_true() -> bool {
    true
}

impl CableType {
    pub fn property(&self, p: CableProperty) -> f64 {
        self.properties()[p as usize]
    }

    pub fn properties(&self) -> [f64; CABLE_PROPERTY_COUNT] {
        [
            f64::from(self.cores),
            self.delta,
            self.cost,
            bool_value(self.uni),
            bool_value(self.allow_ab),
            bool_value(self.allow_ba),
        ]
    }

    /// Whether the (uni, allow_ab, allow_ba) triple is one of the four
    /// admissible direction settings.
    pub fn direction_is_consistent(&self) -> bool {
        direction_row_allowed(self.uni, self.allow_ab, self.allow_ba)
    }
}

/// Admissible direction settings: bidirectional requires both directions,
/// unidirectional requires at least one.
pub fn direction_row_allowed(uni: bool, allow_ab: bool, allow_ba: bool) -> bool {
    if uni {
        allow_ab || allow_ba
    } else {
        allow_ab && allow_ba
    }
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Device,
    Cable,
}

/// Ordered device and cable types. Index `t` in either list is the type id
/// used by every type vector.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeTable {
    pub device_types: Vec<DeviceType>,
    pub cable_types: Vec<CableType>,
}

impl TypeTable {
    pub fn type_count(&self, kind: ElementKind) -> usize {
        match kind {
            ElementKind::Device => self.device_types.len(),
            ElementKind::Cable => self.cable_types.len(),
        }
    }

    pub fn device_type_index(&self, name: &str) -> Option<usize> {
        self.device_types.iter().position(|t| t.name == name)
    }

    pub fn cable_type_index(&self, name: &str) -> Option<usize> {
        self.cable_types.iter().position(|t| t.name == name)
    }

    /// Property matrix of one element class, one row per property and one
    /// column per type.
    pub fn matrix(&self, kind: ElementKind) -> Vec<Vec<f64>> {
        let columns: Vec<Vec<f64>> = match kind {
            ElementKind::Device => self
                .device_types
                .iter()
                .map(|t| t.properties().to_vec())
                .collect(),
            ElementKind::Cable => self.cable_types.iter().map(|t| t.properties().to_vec()).collect(),
        };
        let rows = match kind {
            ElementKind::Device => DEVICE_PROPERTY_COUNT,
            ElementKind::Cable => CABLE_PROPERTY_COUNT,
        };
        (0..rows)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect()
    }

    /// Largest value of a device property across all device types.
    pub fn device_max(&self, p: DeviceProperty) -> f64 {
        fold_or_zero(self.device_types.iter().map(|t| t.property(p)), f64::max)
    }

    pub fn device_min(&self, p: DeviceProperty) -> f64 {
        fold_or_zero(self.device_types.iter().map(|t| t.property(p)), f64::min)
    }

    pub fn cable_max(&self, p: CableProperty) -> f64 {
        fold_or_zero(self.cable_types.iter().map(|t| t.property(p)), f64::max)
    }

    pub fn cable_min(&self, p: CableProperty) -> f64 {
        fold_or_zero(self.cable_types.iter().map(|t| t.property(p)), f64::min)
    }

    /// Largest core count over all cable types.
    pub fn max_cores(&self) -> u32 {
        self.cable_types.iter().map(|t| t.cores).max().unwrap_or(0)
    }
}

fn fold_or_zero(mut it: impl Iterator<Item = f64>, f: fn(f64, f64) -> f64) -> f64 {
    match it.next() {
        Some(first) => it.fold(first, f),
        None => 0.0,
    }
}

/// Candidate device position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSlot {
    pub id: String,
    pub fixed_type: Option<usize>,
    /// One entry per device type; `false` forbids the type on this slot.
    pub allowed_types: Vec<bool>,
    pub must_exist: bool,
}

/// Candidate cable route between two distinct devices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableSlot {
    pub id: String,
    pub endpoint_a: String,
    pub endpoint_b: String,
    pub fixed_type: Option<usize>,
    pub allowed_types: Vec<bool>,
    pub must_exist: bool,
}

/// A unidirectional point-to-point demand. Each signal occupies one core on
/// every cable it traverses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signal {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Cost,
}

/// A validated design problem: types, candidate slots and demands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub type_table: TypeTable,
    pub devices: Vec<DeviceSlot>,
    pub cables: Vec<CableSlot>,
    pub signals: Vec<Signal>,
    pub auto_complete: bool,
    pub objective: Objective,
}

impl Scenario {
    pub fn device_index(&self, id: &str) -> Option<usize> {
        self.devices.iter().position(|d| d.id == id)
    }

    pub fn cable_index(&self, id: &str) -> Option<usize> {
        self.cables.iter().position(|c| c.id == id)
    }

    pub fn signal_index(&self, id: &str) -> Option<usize> {
        self.signals.iter().position(|s| s.id == id)
    }
}

/// Scenario after candidate-cable expansion, with endpoints resolved to
/// device indices. This is the element set the optimizer selects from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxTopology {
    pub scenario: Scenario,
    /// `(a, b)` device indices per cable slot.
    pub cable_ends: Vec<(usize, usize)>,
    /// `(source, target)` device indices per signal.
    pub signal_ends: Vec<(usize, usize)>,
}

impl MaxTopology {
    pub fn type_table(&self) -> &TypeTable {
        &self.scenario.type_table
    }

    pub fn devices(&self) -> &[DeviceSlot] {
        &self.scenario.devices
    }

    pub fn cables(&self) -> &[CableSlot] {
        &self.scenario.cables
    }

    pub fn signals(&self) -> &[Signal] {
        &self.scenario.signals
    }

    /// Cable slots whose endpoint A is `device`.
    pub fn cables_starting_at(&self, device: usize) -> impl Iterator<Item = usize> + '_ {
        self.cable_ends
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.0 == device)
            .map(|(j, _)| j)
    }

    /// Cable slots whose endpoint B is `device`.
    pub fn cables_ending_at(&self, device: usize) -> impl Iterator<Item = usize> + '_ {
        self.cable_ends
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.1 == device)
            .map(|(j, _)| j)
    }

    /// Cable slots touching `device` at either end.
    pub fn incident_cables(&self, device: usize) -> impl Iterator<Item = usize> + '_ {
        self.cable_ends
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.0 == device || e.1 == device)
            .map(|(j, _)| j)
    }

    /// Devices that are the source or target of at least one signal.
    pub fn signal_endpoints(&self) -> Vec<bool> {
        let mut flags = vec![false; self.devices().len()];
        for &(s, t) in &self.signal_ends {
            flags[s] = true;
            flags[t] = true;
        }
        flags
    }
}
