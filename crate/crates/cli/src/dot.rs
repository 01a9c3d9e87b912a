//! Graphviz rendering of a decoded topology.
//!
//! Output depends only on the topology and scenario and lists nodes and
//! edges in slot order, so the same result always renders byte-identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use fibertopo::validate::{Direction, Topology};
use fibertopo::Scenario;

const PALETTE: [&str; 8] = [
    "#9ecae1", "#fdae6b", "#a1d99b", "#bcbddc", "#fc9272", "#fdd0a2", "#c7e9c0", "#d9d9d9",
];

/// Labels use `\n` as Graphviz line breaks, so only quotes are escaped.
fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

pub fn render(topology: &Topology, scenario: &Scenario) -> String {
    let tt = &scenario.type_table;
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(&scenario.name)).unwrap();
    writeln!(out, "  graph [rankdir=LR];").unwrap();
    writeln!(out, "  node [style=filled, fontname=\"Helvetica\"];").unwrap();
    writeln!(out, "  edge [fontname=\"Helvetica\", fontsize=10];").unwrap();

    for d in &topology.devices {
        let Some(name) = &d.device_type else { continue };
        let idx = tt.device_type_index(name);
        let color = idx.map_or("#ffffff", |i| PALETTE[i % PALETTE.len()]);
        let shape = match idx.map(|i| tt.device_types[i].translucent) {
            Some(true) => "ellipse",
            _ => "box",
        };
        writeln!(
            out,
            "  {} [label={}, shape={shape}, fillcolor=\"{color}\"];",
            quote(&d.id),
            quote(&format!("{}\\n{}", d.id, name))
        )
        .unwrap();
    }

    // Signals per cable in route order, for the edge annotation.
    let mut letters: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in &topology.routes {
        for h in &r.hops {
            letters
                .entry(h.cable.as_str())
                .or_default()
                .push(r.signal.as_str());
        }
    }

    for c in topology.existing_cables() {
        let name = c.cable_type.as_deref().unwrap_or_default();
        let ty = tt.cable_type_index(name).map(|i| &tt.cable_types[i]);
        let cores = ty.map_or(0, |t| t.cores);
        let uni = ty.is_some_and(|t| t.uni);
        // A unidirectional cable points the way it is used, or else the way
        // its type allows.
        let dir = if uni {
            let ab = if c.use_ab + c.use_ba > 0 {
                c.use_ab > 0
            } else {
                ty.is_none_or(|t| t.allow_ab)
            };
            if ab {
                Some(Direction::AB)
            } else {
                Some(Direction::BA)
            }
        } else {
            None
        };
        let (tail, head) = match dir {
            Some(Direction::BA) => (&c.endpoint_b, &c.endpoint_a),
            _ => (&c.endpoint_a, &c.endpoint_b),
        };
        let mut label = format!("{}\\n{} {}+{}/{} cores", c.id, name, c.use_ab, c.use_ba, cores);
        if let Some(sigs) = letters.get(c.id.as_str()) {
            label.push_str("\\n");
            label.push_str(&sigs.join(","));
        }
        let arrow = if dir.is_some() { "forward" } else { "none" };
        writeln!(
            out,
            "  {} -> {} [label={}, dir={arrow}];",
            quote(tail),
            quote(head),
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
