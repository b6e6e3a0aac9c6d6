use umbral_core::identities::{check, check_all, list_identities, Outcome, Overrides};

#[test]
fn every_entry_passes_at_defaults() {
    let cases = check_all(&Overrides::default()).unwrap();
    let ids: Vec<_> = list_identities().iter().map(|e| e.id).collect();
    assert_eq!(cases.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ids);
    for case in &cases {
        assert!(case.result.passed(), "{}: {:?}", case.id, case.result);
    }
}

#[test]
fn counterexample_is_flagged() {
    let case = check("remark1_left_dist_counterexample", &Overrides::default()).unwrap();
    assert!(case.counterexample);
    assert_eq!(case.result, Outcome::Pass);
    let json = serde_json::to_value(&case).unwrap();
    assert_eq!(json["result"]["status"], "pass");
}

#[test]
fn seed_override_is_recorded() {
    let o = Overrides {
        seed: Some(1),
        ..Default::default()
    };
    let cases = check_all(&o).unwrap();
    assert!(cases.iter().all(|c| c.parameters.seed == 1 && c.result.passed()));
}
