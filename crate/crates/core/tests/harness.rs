//! Scenario files, exports and the verification report.

use std::fs;

use proptime_core::harness::{load_scenario, run_verification, trace_csv, Run, Scenario, CSV_HEADER};
use proptime_core::Limits;

#[test]
fn scenario_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("examples.json");
    let original = Scenario::builtin("examples").unwrap();
    fs::write(&path, original.to_json()).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), original);
}

#[test]
fn bad_direction_is_reported_with_its_location() {
    let text = Scenario::builtin("example1")
        .unwrap()
        .to_json()
        .replacen("\"dir\": 1", "\"dir\": 0", 1);
    let err = Scenario::from_json(&text).unwrap_err().to_string();
    assert!(err.contains("worlds[0].placements[0].dir"), "{err}");
}

#[test]
fn horizon_cap_is_enforced() {
    let scenario = Scenario::builtin("example2").unwrap();
    assert!(Run::with_horizon(100, scenario, &Limits { max_steps: 99 }).is_err());
}

#[test]
fn csv_reparses_to_the_unit_budget() {
    let run = Run::new(Scenario::builtin("free").unwrap(), &Limits::default()).unwrap();
    let csv = trace_csv(&run.traces[0]).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * (run.scenario.horizon as usize + 1));
    for row in &rows {
        let t: i64 = row[0].parse().unwrap();
        let tau: i64 = row[6].parse().unwrap();
        let s: i64 = row[7].parse().unwrap();
        assert_eq!(t, tau + s);
        assert_eq!(row[4], "+1");
    }
}

#[test]
fn empty_world_emits_only_the_header() {
    let mut scenario = Scenario::builtin("free").unwrap();
    scenario.worlds[0].placements.clear();
    scenario.bodies.clear();
    let run = Run::new(scenario, &Limits::default()).unwrap();
    assert_eq!(trace_csv(&run.traces[0]).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn negative_control_fails_only_its_record() {
    let mut scenario = Scenario::builtin("examples").unwrap();
    scenario.expect.frames[1].w = Some(proptime_core::rational::q(3, 4));
    let report = run_verification(&scenario);
    let failed: Vec<_> = report
        .failed()
        .map(|r| (r.check.as_str(), r.subject.as_str()))
        .collect();
    assert_eq!(failed, vec![("expected-frame", "A1 in A2")]);
}

#[test]
fn report_json_is_stable() {
    let scenario = Scenario::builtin("examples").unwrap();
    let a = run_verification(&scenario).to_json();
    let b = run_verification(&scenario).to_json();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
}
