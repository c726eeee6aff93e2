use std::sync::Arc;

use dynwalk_core::congest::{CongestionPolicy, Engine, SimConfig};
use dynwalk_core::graph::{dynamic_diameter, GraphSchedule, NodeId};
use dynwalk_core::mixing::{
    default_samples, epsilon_prime, estimate_mixing_time, min_samples, sample_endpoints,
    spectral_gap_bounds, uniformity_test, Verdict, EPSILON,
};
use dynwalk_core::rng::{stream, Purpose};
use dynwalk_core::spectral::{evolve, mixing_time_oracle, DistributionVector, MIX_EPS};
use dynwalk_core::walks::WalkParams;
use rand::Rng;

fn engine(s: &Arc<GraphSchedule>, seed: u64) -> Engine {
    let n = s.n();
    let phi = dynamic_diameter(s, 16).unwrap();
    Engine::new(
        s.clone(),
        SimConfig::new(n, phi, seed).with_policy(CongestionPolicy::Queue),
    )
}

#[test]
fn endpoint_samples_follow_walk_law() {
    let s = Arc::new(GraphSchedule::parse("static:K4", 0).unwrap());
    let k = default_samples(4, EPSILON);
    for len in [1u64, 10] {
        let mut ends = Vec::new();
        for seed in 0..(30_000 / k as u64 + 1) {
            ends.extend(
                sample_endpoints(
                    &mut engine(&s, seed),
                    NodeId(0),
                    len,
                    k,
                    &WalkParams::new(len),
                )
                .unwrap(),
            );
        }
        let exact = evolve(&DistributionVector::point(4, NodeId(0)), &s, 1, len).unwrap();
        let tv = DistributionVector::empirical(4, ends).tv_distance(&exact);
        assert!(tv <= 0.02, "length {len}: tv {tv}");
    }
}

#[test]
fn tester_calibration() {
    for n in [9usize, 16, 64] {
        let k = default_samples(n, EPSILON);
        assert!(k >= min_samples(n, EPSILON));
        let mut rng = stream(n as u64, 0, Purpose::Trial, 0);
        let passes = (0..200)
            .filter(|_| {
                let s: Vec<NodeId> = (0..k).map(|_| NodeId::from(rng.gen_range(0..n))).collect();
                uniformity_test(&s, n, EPSILON).unwrap().verdict == Verdict::Pass
            })
            .count();
        assert!(passes >= 190, "n = {n}: {passes}/200");
        // Half the mass on one node sits far inside the FAIL band.
        let fails = (0..200)
            .filter(|_| {
                let s: Vec<NodeId> = (0..k)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            NodeId(0)
                        } else {
                            NodeId::from(rng.gen_range(0..n))
                        }
                    })
                    .collect();
                uniformity_test(&s, n, EPSILON).unwrap().verdict == Verdict::Fail
            })
            .count();
        assert_eq!(fails, 200, "n = {n}");
    }
}

fn oracle_bracket(s: &GraphSchedule) -> (u64, u64) {
    let n = s.n();
    (
        mixing_time_oracle(s, NodeId(0), MIX_EPS).unwrap(),
        mixing_time_oracle(s, NodeId(0), epsilon_prime(n)).unwrap(),
    )
}

#[test]
fn estimates_fall_in_oracle_bracket() {
    for spec in ["static:K4", "static:C9"] {
        let s = Arc::new(GraphSchedule::parse(spec, 0).unwrap());
        let n = s.n();
        let (lo, hi) = oracle_bracket(&s);
        for seed in 0..10 {
            let est = estimate_mixing_time(
                &mut engine(&s, seed),
                NodeId(0),
                EPSILON,
                default_samples(n, EPSILON),
                &WalkParams::new(1),
            )
            .unwrap();
            assert!(
                (lo..=hi).contains(&est.tau_tilde),
                "{spec} seed {seed}: {} not in [{lo}, {hi}]",
                est.tau_tilde
            );
            assert_eq!(est.bracket.1, est.tau_tilde);
            assert_eq!(est.bracket.0 + 1, est.bracket.1);
            let pass_at = |len| est.probes.iter().find(|p| p.len == len).map(|p| p.verdict);
            assert_eq!(pass_at(est.bracket.1), Some(Verdict::Pass));
            assert_ne!(pass_at(est.bracket.0), Some(Verdict::Pass));
        }
    }
}

#[test]
fn gap_interval_from_estimates() {
    let s = Arc::new(GraphSchedule::parse("static:C9", 0).unwrap());
    let ln9 = 9f64.ln();
    for seed in 0..5 {
        let est = estimate_mixing_time(
            &mut engine(&s, seed),
            NodeId(0),
            EPSILON,
            default_samples(9, EPSILON),
            &WalkParams::new(1),
        )
        .unwrap();
        let t = est.tau_tilde as f64;
        let b = spectral_gap_bounds(est.tau_tilde, 9);
        assert!(est.tau_tilde > 3);
        assert_eq!(b.gap, (1.0 / t, ln9 / t));
        assert_eq!(b.conductance, (1.0 / t, (ln9 / t).sqrt()));
    }
    // ln 9 / 2 > 1 clamps the upper end.
    assert_eq!(spectral_gap_bounds(2, 9).gap, (0.5, 1.0));
}

#[test]
fn epsilon_prime_and_trivial_bounds() {
    let want = 1.0 / (6912.0 * std::f64::consts::E * 4.0 * 16f64.ln());
    assert!((epsilon_prime(16) - want).abs() < 1e-18);
    assert_eq!(spectral_gap_bounds(1, 16).gap, (1.0, 1.0));
}

#[test]
fn oracle_distances_shrink_on_static_graphs() {
    for spec in ["static:C9", "static:petersen", "static:rr:n=16,d=3"] {
        let s = GraphSchedule::parse(spec, 4).unwrap();
        let mut p = DistributionVector::point(s.n(), NodeId(0));
        let mut prev = p.l2_to_uniform();
        for t in 1..60 {
            p = evolve(&p, &s, t, 1).unwrap();
            let d = p.l2_to_uniform();
            assert!(d <= prev + 1e-12, "{spec} round {t}");
            prev = d;
        }
        let (lo, hi) = oracle_bracket(&s);
        assert!(lo <= hi);
    }
}
