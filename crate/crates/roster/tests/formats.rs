use roster::fuzz::fuzz_case;
use roster::io::{
    constraints_to_json, instance_to_json, parse_constraints, parse_instance, parse_problem_b_params, parse_schedule,
    problem_b_records, schedule_to_json, ConstraintRecord, FormatError, PROBLEM_B_PARAMS_JSON,
};
use roster_core::generators::{build_problem_a, build_problem_b_with, ProblemASpec, ProblemBSpec};
use roster_core::{eval_all, GcInstance, PersonId, RosterInstance, Schedule};

fn round_trip(inst: &RosterInstance, cons: &[GcInstance]) {
    let back = parse_instance(&instance_to_json(inst)).unwrap();
    assert_eq!(&back, inst);
    let records: Vec<ConstraintRecord> = cons.iter().map(ConstraintRecord::from_instance).collect();
    let parsed = parse_constraints(&constraints_to_json(&records), &back).unwrap();
    assert_eq!(parsed, cons);
}

#[test]
fn problem_a_round_trips() {
    for (n, p) in [(6, 4), (13, 5), (36, 10)] {
        let (i, c) = build_problem_a(ProblemASpec { num_shifts: n, num_staff: p }).unwrap();
        round_trip(&i, &c);
    }
}

#[test]
fn problem_b_round_trips_with_provenance() {
    let file = parse_problem_b_params(PROBLEM_B_PARAMS_JSON).unwrap();
    let (i, c) = build_problem_b_with(ProblemBSpec { num_days: 3 }, &file.clone().into_params()).unwrap();
    round_trip(&i, &c);
    let records = problem_b_records(&c, &file);
    let tagged = records.iter().filter(|r| !r.provenance.is_empty()).count();
    assert!(tagged >= 6, "only {tagged} records carry provenance");
    let json = constraints_to_json(&records);
    assert!(json.contains("repo-default"));
    assert_eq!(parse_constraints(&json, &i).unwrap(), c);
}

#[test]
fn fuzz_cases_round_trip() {
    for seed in 0..100 {
        let f = fuzz_case(seed);
        round_trip(&f.instance, &f.constraints);
    }
}

#[test]
fn schedules_round_trip() {
    let (i, _) = build_problem_a(ProblemASpec { num_shifts: 12, num_staff: 3 }).unwrap();
    let s = Schedule::from_vec((0..12).map(|k| (k % 4 != 0).then_some(PersonId(k % 3 + 1))).collect());
    assert_eq!(parse_schedule(&schedule_to_json(&s), &i).unwrap(), s);
}

#[test]
fn malformed_files_are_rejected() {
    let (i, _) = build_problem_a(ProblemASpec { num_shifts: 6, num_staff: 2 }).unwrap();
    let good = instance_to_json(&i);
    let bad_time = good.replacen("\"06:00\"", "\"6 am\"", 1);
    assert!(parse_instance(&bad_time).is_err());
    let extra = good.replacen('{', "{\"colour\": 1,", 1);
    assert!(parse_instance(&extra).is_err());
    assert!(matches!(parse_instance("{"), Err(FormatError::Json(_))));
    let unknown_shift = r#"{"assignments": [{"shift": 99, "person": 1}]}"#;
    assert!(parse_schedule(unknown_shift, &i).is_err());
    // unknown persons parse and are left to the validator
    let unknown_person = parse_schedule(r#"{"assignments": [{"shift": 1, "person": 9}]}"#, &i).unwrap();
    assert!(!eval_all(&[], &i, &unknown_person).unwrap().satisfied());
    let unknown_kind = r#"[{"kind": "GC12", "label": "x"}]"#;
    assert!(parse_constraints(unknown_kind, &i).is_err());
}
