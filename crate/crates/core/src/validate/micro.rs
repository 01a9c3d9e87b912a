//! Random micro-instances small enough for the exhaustive oracle.
//!
//! Costs are integers in 1..=100, attenuations come from
//! {−15, −2, −0.5, 0} dB and power windows from the ranges of the
//! validation models, so instances stay in realistic regimes while still
//! hitting infeasible corners.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::{
    CableSlotSpec, CableType, DeviceSlotSpec, DeviceType, Objective, Scenario, ScenarioFile, ScenarioOptions,
    Signal,
};

const DELTAS: [f64; 4] = [-15.0, -2.0, -0.5, 0.0];
const RX_MIN: [f64; 3] = [-14.0, -10.0, -4.0];
const TX_MIN: [f64; 2] = [-5.0, -3.0];
/// The four consistent (uni, allow_ab, allow_ba) rows; bidirectional twice
/// so it is drawn more often.
const DIRECTIONS: [(bool, bool, bool); 5] = [
    (false, true, true),
    (false, true, true),
    (true, true, true),
    (true, true, false),
    (true, false, true),
];

fn cost(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.gen_range(1..=100u32))
}

fn opaque(rng: &mut ChaCha8Rng, name: String) -> DeviceType {
    DeviceType {
        name,
        ports: rng.gen_range(1..=3),
        delta: 0.0,
        rx_min: *RX_MIN.choose(rng).unwrap(),
        rx_max: 0.5,
        tx_min: *TX_MIN.choose(rng).unwrap(),
        tx_max: 0.0,
        translucent: false,
        cost: cost(rng),
    }
}

fn translucent(rng: &mut ChaCha8Rng, name: String) -> DeviceType {
    DeviceType {
        name,
        ports: rng.gen_range(2..=3),
        delta: *[-2.0, -0.5, 0.0].choose(rng).unwrap(),
        rx_min: 0.0,
        rx_max: 0.0,
        tx_min: 0.0,
        tx_max: 0.0,
        translucent: true,
        cost: cost(rng),
    }
}

/// Draw one instance from `seed`. Deterministic per seed.
pub fn micro_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_dev = rng.gen_range(2..=4usize);
    let n_dev_types = rng.gen_range(1..=3usize);
    let n_cab_types = rng.gen_range(1..=3usize);

    let mut device_types = vec![opaque(&mut rng, "op0".into())];
    for t in 1..n_dev_types {
        let ty = if rng.gen_bool(0.5) {
            translucent(&mut rng, format!("tr{t}"))
        } else {
            opaque(&mut rng, format!("op{t}"))
        };
        device_types.push(ty);
    }
    let cable_types: Vec<CableType> = (0..n_cab_types)
        .map(|t| {
            let (uni, allow_ab, allow_ba) = *DIRECTIONS.choose(&mut rng).unwrap();
            CableType {
                name: format!("c{t}"),
                cores: rng.gen_range(1..=3),
                delta: *DELTAS.choose(&mut rng).unwrap(),
                cost: cost(&mut rng),
                uni,
                allow_ab,
                allow_ba,
            }
        })
        .collect();

    let devices: Vec<DeviceSlotSpec> = (0..n_dev)
        .map(|k| DeviceSlotSpec {
            id: k.to_string(),
            fixed_type: None,
            allowed_types: None,
            must_exist: rng.gen_bool(0.1),
        })
        .collect();

    let n_cab = rng.gen_range(1..=5usize);
    let mut cables = Vec::with_capacity(n_cab);
    for j in 0..n_cab {
        let a = rng.gen_range(0..n_dev);
        let mut b = rng.gen_range(0..n_dev - 1);
        if b >= a {
            b += 1;
        }
        let (a, b) = (a.min(b), a.max(b));
        let fixed = rng
            .gen_bool(0.1)
            .then(|| cable_types.choose(&mut rng).unwrap().name.clone());
        let allowed = if fixed.is_none() && n_cab_types > 1 && rng.gen_bool(0.15) {
            Some(vec![cable_types.choose(&mut rng).unwrap().name.clone()])
        } else {
            None
        };
        cables.push(CableSlotSpec {
            id: format!("F{j}"),
            endpoint_a: a.to_string(),
            endpoint_b: b.to_string(),
            must_exist: fixed.is_some(),
            fixed_type: fixed,
            allowed_types: allowed,
        });
    }

    let n_sig = rng.gen_range(1..=3usize);
    let signals = (0..n_sig)
        .map(|i| {
            let s = rng.gen_range(0..n_dev);
            let mut t = rng.gen_range(0..n_dev - 1);
            if t >= s {
                t += 1;
            }
            Signal {
                id: format!("S{i}"),
                source: s.to_string(),
                target: t.to_string(),
            }
        })
        .collect();

    ScenarioFile {
        name: format!("micro-{seed}"),
        device_types,
        cable_types,
        devices,
        cables,
        signals,
        options: ScenarioOptions {
            auto_complete: false,
            objective: Objective::Cost,
        },
    }
    .into_scenario()
    .expect("generator only emits consistent instances")
}
