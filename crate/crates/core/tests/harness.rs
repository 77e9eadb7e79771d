use stable_cover::harness::{random_stream, run, verify, EngineKind, RandomStreamParams, RunConfig};

#[test]
fn every_engine_runs_clean_and_verifies() {
    let events = random_stream(&RandomStreamParams {
        events: 80,
        bbox: 12.0,
        clusters: 3,
        spread: 1.5,
        delete_prob: 0.25,
        seed: 31,
    })
    .unwrap();
    for engine in [EngineKind::Sas, EngineKind::TwoStable, EngineKind::ExactMaintainer] {
        let mut cfg = RunConfig::new(engine, 3, 0.25);
        if engine == EngineKind::Sas {
            cfg.scaled = Some("c_star=1,trivial_threshold=0".into());
        }
        let out = run(&cfg, &events).unwrap();
        assert!(out.violations.is_empty(), "{engine:?}: {:?}", out.violations);
        assert_eq!(out.rows.len(), events.len());
        let text = out.render();
        let v = verify(&text, &events).unwrap();
        assert!(v.problems.is_empty(), "{:?}", v.problems);
        assert_eq!(v.rows_checked, events.len());
        let dropped: String = text.lines().take(text.lines().count() - 2).map(|l| format!("{l}\n")).collect();
        assert!(!verify(&dropped, &events).unwrap().problems.is_empty());
    }
}

#[test]
fn report_for_another_stream_is_rejected() {
    let a = random_stream(&RandomStreamParams { events: 30, bbox: 6.0, seed: 1, ..Default::default() }).unwrap();
    let b = random_stream(&RandomStreamParams { events: 30, bbox: 6.0, seed: 2, ..Default::default() }).unwrap();
    let report = run(&RunConfig::new(EngineKind::TwoStable, 2, 0.25), &a).unwrap().render();
    let v = verify(&report, &b).unwrap();
    assert!(!v.problems.is_empty());
}
