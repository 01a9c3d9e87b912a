use std::time::Duration;

use approx::assert_abs_diff_eq;
use fibertopo::corpus;
use fibertopo::solver::{solve, Backend, BranchAndBound, HighsBridge, SolverError, SolverParams};
use fibertopo::validate::{audit, decode, power_trace, TraceStep};
use fibertopo::{build, expand_max_topology, optimize, parse_scenario, ResultFile, SolveStatus};

fn reference(name: &str) -> fibertopo::Outcome {
    let sc = corpus::scenario(name).unwrap();
    optimize(&sc, &BranchAndBound::default(), &SolverParams::default()).unwrap()
}

/// HiGHS if its Python bindings are importable; tests that need it skip
/// themselves otherwise.
fn highs() -> Option<HighsBridge> {
    let probe = fibertopo::MilpProblem::default();
    match solve(&HighsBridge::default(), &probe, &SolverParams::default()) {
        Err(SolverError::Unavailable { reason, .. }) => {
            eprintln!("HiGHS unavailable, skipping: {reason}");
            None
        }
        _ => Some(HighsBridge::default()),
    }
}

#[test]
fn every_corpus_optimum_passes_audit() {
    for name in ["scenario1", "scenario2", "scenario3", "scenario4", "scenario5"] {
        let o = reference(name);
        assert_eq!(o.stats.status, SolveStatus::Optimal, "{name}");
        let report = o.report.as_ref().unwrap();
        assert!(report.passes, "{name}: {:?}", report.violations);
        assert!(o.topology.as_ref().unwrap().warnings.is_empty(), "{name}");
    }
}

#[test]
fn backends_agree_on_the_corpus() {
    let Some(h) = highs() else { return };
    for name in ["scenario1", "scenario2", "scenario3", "scenario4", "scenario5"] {
        let sc = corpus::scenario(name).unwrap();
        let params = SolverParams::default();
        let a = optimize(&sc, &BranchAndBound::default(), &params).unwrap();
        let b = optimize(&sc, &h, &params).unwrap();
        let (oa, ob) = (a.objective().unwrap(), b.objective().unwrap());
        assert!(
            (oa - ob).abs() <= 1e-6f64.max(params.rel_gap * oa.abs()),
            "{name}: {oa} vs {ob}"
        );
        assert!(b.report.unwrap().passes, "{name}");
    }
}

#[test]
fn tiny_time_limit_on_ife_is_never_reported_optimal() {
    let Some(h) = highs() else { return };
    let sc = corpus::scenario("ife").unwrap();
    let params = SolverParams {
        time_limit: Some(Duration::from_millis(1)),
        ..SolverParams::default()
    };
    let o = optimize(&sc, &h, &params).unwrap();
    assert!(
        matches!(o.stats.status, SolveStatus::Timeout | SolveStatus::FeasibleGap),
        "{:?}",
        o.stats.status
    );
}

#[test]
fn reference_backend_refuses_ife() {
    let sc = corpus::scenario("ife").unwrap();
    let max = expand_max_topology(&sc).unwrap();
    let art = build(&max).unwrap();
    let bb = BranchAndBound::default();
    assert!(art.problem.num_vars() > bb.capabilities().max_columns.unwrap());
    assert!(matches!(
        solve(&bb, &art.problem, &SolverParams::default()),
        Err(SolverError::TooLarge { .. })
    ));
}

#[test]
fn result_file_round_trips_and_revalidates() {
    let o = reference("scenario2");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s2.json");
    let file = o.result_file();
    file.save(&path).unwrap();
    let back = ResultFile::load(&path).unwrap();
    assert_eq!(back, file);
    let sc = back.scenario().unwrap();
    assert!(audit(back.topology.as_ref().unwrap(), &sc).passes);
    assert!(ResultFile::load(dir.path().join("missing.json")).is_err());
    std::fs::write(&path, "{ not json").unwrap();
    assert!(ResultFile::load(&path).is_err());
}

#[test]
fn scenario2_signal_a_trace_at_zero_transmit() {
    let o = reference("scenario2");
    let mut t = o.topology.clone().unwrap();
    let route = t.routes.iter_mut().find(|r| r.signal == "A").unwrap();
    route.emissions[0].power = 0.0;
    let trace = power_trace(&t, &o.max.scenario, "A").unwrap();
    let want = [0.0, -2.0, -2.5, -4.5];
    assert_eq!(trace.points.len(), want.len());
    for (got, want) in trace.powers().iter().zip(want) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
    }
    let steps: Vec<_> = trace.points.iter().map(|p| p.step).collect();
    assert_eq!(
        steps,
        [
            TraceStep::Transmit,
            TraceStep::Cable,
            TraceStep::Device,
            TraceStep::Cable
        ]
    );
    // Each step changes the power by exactly its element's attenuation.
    for w in trace.points.windows(2) {
        if w[1].step != TraceStep::Repower {
            assert_abs_diff_eq!(w[1].power - w[0].power, w[1].delta, epsilon = 1e-9);
        }
    }
}

#[test]
fn scenario1_decodes_to_a_cycle_of_unidirectional_cables() {
    let o = reference("scenario1");
    let t = o.topology.as_ref().unwrap();
    let mut edges: Vec<(String, String)> = t
        .existing_cables()
        .map(|c| {
            if c.use_ab > 0 {
                (c.endpoint_a.clone(), c.endpoint_b.clone())
            } else {
                (c.endpoint_b.clone(), c.endpoint_a.clone())
            }
        })
        .collect();
    edges.sort();
    // Every device has exactly one outgoing and one incoming cable.
    for d in ["0", "1", "2"] {
        assert_eq!(edges.iter().filter(|e| e.0 == d).count(), 1, "{edges:?}");
        assert_eq!(edges.iter().filter(|e| e.1 == d).count(), 1, "{edges:?}");
    }
}

#[test]
fn zero_signal_scenario_types_only_required_devices() {
    let text = r#"{
      "name": "quiet",
      "device_types": [{"name": "op", "ports": 2, "delta": 0, "rx_min": -14, "rx_max": 0.5,
                        "tx_min": -5, "tx_max": 0, "translucent": false, "cost": 10}],
      "cable_types": [{"name": "c", "cores": 1, "delta": -2, "cost": 1, "uni": false,
                       "allow_ab": true, "allow_ba": true}],
      "devices": [{"id": "a", "must_exist": true}, {"id": "b"}],
      "cables": [{"id": "F", "endpoint_a": "a", "endpoint_b": "b"}],
      "signals": []
    }"#;
    let sc = parse_scenario(text).unwrap();
    let o = optimize(&sc, &BranchAndBound::default(), &SolverParams::default()).unwrap();
    let t = o.topology.unwrap();
    assert!(t.routes.is_empty());
    assert_eq!(t.device("a").unwrap().device_type.as_deref(), Some("op"));
    assert_eq!(t.device("b").unwrap().device_type, None);
    assert_eq!(t.existing_cables().count(), 0);
    assert_eq!(t.objective_value, 10.0);
}

#[test]
fn decode_rejects_fractional_binaries() {
    let o = reference("scenario1");
    let mut sol = o.solution.clone();
    let col = o.artifacts.vars.device_type[0][0];
    sol.values[col.0] = 0.5;
    assert!(decode(&sol, &o.max, &o.artifacts).is_err());
}
