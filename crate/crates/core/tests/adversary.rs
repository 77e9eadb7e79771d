use stable_cover::adversary::{
    adaptive_line_stream, evaluate_hitting, greedy_probe, lower_bound_stream_against, lower_bound_verdict,
    measure_churn, measure_line_churn, negative_control, random_expander, sampled_expansion_check, Frozen,
    GreedyHitting, LineConstruction, Side, Trigger,
};
use stable_cover::baseline::TwoStable;
use stable_cover::exact::ExactMaintainer;
use stable_cover::harness::{random_stream, RandomStreamParams};
use stable_cover::Oracle;

#[test]
fn probe_decides_the_closing_side() {
    let cons = LineConstruction::new(6, 3).unwrap();
    let m = cons.m;
    for (probe_points, side) in [
        (cons.right_points().to_vec(), Side::Right),
        (cons.left_points().to_vec(), Side::Left),
    ] {
        let mut probe = |_: &[Vec<_>]| probe_points.clone();
        let stream = adaptive_line_stream(&cons, &mut probe).unwrap();
        assert_eq!(stream.side, side);
        assert_eq!(stream.steps.len(), m + m / 3);
        assert!(stream.steps.iter().all(|s| s.len() == 3));
        let lines = stream.lines();
        assert_eq!(stream.structural_opt(stream.steps.len()), 4 * m);
        // The side the probe avoided stabs every line.
        let stabbing = match side {
            Side::Left => cons.right_points(),
            Side::Right => cons.left_points(),
        };
        assert_eq!(evaluate_hitting(stabbing, &lines), 4 * m);
        assert!(evaluate_hitting(&probe_points, &lines) < 4 * m);
    }
}

#[test]
fn short_probe_is_rejected() {
    let cons = LineConstruction::new(3, 0).unwrap();
    let mut probe = |_: &[Vec<_>]| Vec::new();
    assert!(adaptive_line_stream(&cons, &mut probe).is_err());
    assert!(LineConstruction::new(4, 0).is_err());
}

#[test]
fn greedy_hitting_against_the_line_stream() {
    let m = 9;
    let cons = LineConstruction::new(m, 5).unwrap();
    let stream = adaptive_line_stream(&cons, &mut greedy_probe(m)).unwrap();
    let mut g = GreedyHitting::new(m);
    let records = measure_line_churn(&mut g, &stream);
    assert_eq!(records.len(), stream.steps.len());
    for (k, r) in records.iter().enumerate() {
        assert_eq!(r.t, k + 1);
        assert!(r.alg <= r.opt && r.churn <= 2 * m);
    }
    let v = lower_bound_verdict(&records, m, 0.1);
    assert!(v.consistent, "{v:?}");
    assert!(v.min_ratio <= 1.0);
}

#[test]
fn frozen_disks_never_move() {
    let events = random_stream(&RandomStreamParams {
        events: 40,
        bbox: 10.0,
        delete_prob: 0.3,
        seed: 2,
        ..Default::default()
    })
    .unwrap();
    let recs = measure_churn(&mut Frozen::new(3), &events, Oracle::exact()).unwrap();
    assert_eq!(recs.len(), 40);
    assert!(recs.iter().all(|r| r.churn == 0 && r.alg == 0));
    assert!(recs.iter().any(|r| r.opt > 0));
}

#[test]
fn trigger_choice_against_engines() {
    for m in 1..=4 {
        let two = TwoStable::new(m, Oracle::exact()).unwrap();
        let (stream, _, churn) = lower_bound_stream_against(m, &two).unwrap();
        assert_eq!(stream.len(), 2 * m + 1);
        assert!(churn <= 2);
        let exact = ExactMaintainer::new(m, Oracle::exact()).unwrap();
        let (stream, trigger, churn) = lower_bound_stream_against(m, &exact).unwrap();
        let recs = measure_churn(&mut ExactMaintainer::new(m, Oracle::exact()).unwrap(), &stream, Oracle::exact())
            .unwrap();
        assert_eq!(recs.last().unwrap().churn, churn);
        assert_eq!(recs.last().unwrap().opt, 2 * m + 1);
        assert!(recs.iter().all(|r| r.alg == r.opt));
        assert_eq!(stream.last().unwrap().point(), trigger.point(m));
    }
    assert_eq!("far".parse::<Trigger>().unwrap(), Trigger::Far);
    assert!("near".parse::<Trigger>().is_err());
}

#[test]
fn expanders_pass_and_control_fails() {
    for (n, seed) in [(30, 1), (99, 2), (201, 3)] {
        let g = random_expander(n, seed).unwrap();
        assert!(g.is_cubic() && g.graph.is_bipartite());
        assert!(sampled_expansion_check(&g, g.alpha, 3000, seed + 100));
    }
    let control = negative_control(12);
    assert!(control.is_cubic());
    assert!(!sampled_expansion_check(&control, control.alpha, 3000, 7));
}
