use std::f64::consts::{E, PI};

use dynwalk_core::graph::{
    circulant, complete, cycle, star, Graph, GraphSchedule, NodeId, ScheduleError,
};
use dynwalk_core::rng::{stream, Purpose};
use dynwalk_core::spectral::{
    dynamic_mixing_bound, evolve, mixing_cap, mixing_time_oracle, segment_matrix, spectral_summary,
    static_mixing_time, summarize_symmetric, DistributionVector, TransitionMatrix, MIX_EPS,
};
use proptest::prelude::*;
use rand::Rng;

type Dense = Vec<Vec<f64>>;

/// Walk matrix built from the edge list.
fn dense(g: &Graph) -> Dense {
    let n = g.n();
    let mut deg = vec![0.0; n];
    for &(u, v) in g.edges() {
        deg[u.index()] += 1.0;
        deg[v.index()] += 1.0;
    }
    let mut m = vec![vec![0.0; n]; n];
    for &(u, v) in g.edges() {
        m[u.index()][v.index()] = 1.0 / deg[u.index()];
        m[v.index()][u.index()] = 1.0 / deg[v.index()];
    }
    m
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn l2_to_uniform(row: &[f64]) -> f64 {
    let n = row.len() as f64;
    row.iter()
        .map(|x| (x - 1.0 / n).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Worst-source mixing time by repeated dense multiplication.
fn dense_mixing_time(g: &Graph, eps: f64) -> u64 {
    let p = dense(g);
    let mut m = identity(g.n());
    let mut t = 0;
    while m.iter().any(|row| l2_to_uniform(row) >= eps) {
        m = mul(&m, &p);
        t += 1;
    }
    t
}

fn matrix_close(a: &TransitionMatrix, b: &Dense, tol: f64) {
    for (i, row) in b.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert!(
                (a.get(i, j) - x).abs() <= tol,
                "({i},{j}): {} vs {x}",
                a.get(i, j)
            );
        }
    }
}

#[test]
fn k4_distributions() {
    let s = GraphSchedule::parse("static:K4", 0).unwrap();
    let x = DistributionVector::point(4, NodeId(0));
    let p1 = evolve(&x, &s, 1, 1).unwrap();
    let p2 = evolve(&x, &s, 1, 2).unwrap();
    let m2 = mul(&dense(&complete(4)), &dense(&complete(4)));
    for v in 0..4 {
        assert!((p1.entries()[v] - [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0][v]).abs() < 1e-15);
        assert!((p2.entries()[v] - m2[0][v]).abs() < 1e-15);
    }
    assert!(
        (p2.entries()[0] - 1.0 / 3.0).abs() < 1e-15 && (p2.entries()[1] - 2.0 / 9.0).abs() < 1e-15
    );
    assert!((x.l2_to_uniform() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    let direct = ((0.25f64).powi(2) + 3.0 * (1.0 / 3.0 - 0.25f64).powi(2)).sqrt();
    assert!((p1.l2_to_uniform() - direct).abs() < 1e-15);
    assert!((p1.l2_to_uniform() - 0.2887).abs() < 1e-4);
    assert_eq!(DistributionVector::uniform(4).l2_to_uniform(), 0.0);
}

#[test]
fn eigenvalues_match_closed_forms() {
    let k4 = spectral_summary(&complete(4)).unwrap();
    assert!((k4.lambda2_abs - 1.0 / 3.0).abs() < 1e-9);
    assert!((k4.lambda2_signed + 1.0 / 3.0).abs() < 1e-9);
    // Circulant walk eigenvalues are cos(2πj/n); for n = 5 the largest magnitude below 1 is |cos(4π/5)| = cos(π/5).
    let c5 = spectral_summary(&cycle(5)).unwrap();
    let analytic = (1..5)
        .map(|j| (2.0 * PI * j as f64 / 5.0).cos().abs())
        .fold(0.0, f64::max);
    assert!((c5.lambda2_abs - analytic).abs() < 1e-9);
    assert!((c5.lambda2_abs - 0.8090).abs() < 1e-4);
    assert!(c5.lambda2_signed <= 1.0 - 1.0 / 20.0);
    for (n, offsets) in [
        (9usize, vec![1usize]),
        (12, vec![1, 5]),
        (16, vec![1, 3, 8]),
    ] {
        let g = circulant(n, &offsets).unwrap();
        let d = g.regular_degree().unwrap() as f64;
        let ev: Vec<f64> = (0..n)
            .map(|j| {
                offsets
                    .iter()
                    .map(|&o| {
                        let c = (2.0 * PI * (j * o) as f64 / n as f64).cos();
                        if 2 * o == n {
                            c
                        } else {
                            2.0 * c
                        }
                    })
                    .sum::<f64>()
                    / d
            })
            .collect();
        let mut sorted = ev.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let s = spectral_summary(&g).unwrap();
        assert!((s.lambda2_signed - sorted[1]).abs() < 1e-9, "n={n}");
        assert!(
            (s.lambda2_abs - sorted[1].max(-sorted[n - 1])).abs() < 1e-9,
            "n={n}"
        );
    }
}

#[test]
fn mixing_time_examples() {
    let k4 = GraphSchedule::parse("static:K4", 0).unwrap();
    assert_eq!(mixing_time_oracle(&k4, NodeId(0), MIX_EPS).unwrap(), 2);
    assert!((MIX_EPS - 1.0 / (2.0 * E)).abs() < 1e-15);
    assert_eq!(mixing_time_oracle(&k4, NodeId(0), 1.0).unwrap(), 0);
    let c9 = GraphSchedule::parse("static:C9", 0).unwrap();
    let want = dense_mixing_time(&cycle(9), MIX_EPS);
    assert_eq!(mixing_time_oracle(&c9, NodeId(0), MIX_EPS).unwrap(), want);
    assert_eq!(static_mixing_time(&cycle(9), MIX_EPS).unwrap(), want);
    assert_eq!(dynamic_mixing_bound(&c9, 10).unwrap(), want);
}

#[test]
fn periodic_mixing_bound_is_worst_member() {
    let a = circulant(9, &[1, 2]).unwrap();
    let b = circulant(9, &[1, 4]).unwrap();
    let s = GraphSchedule::periodic(vec![a.clone(), b.clone()]).unwrap();
    let want = dense_mixing_time(&a, MIX_EPS).max(dense_mixing_time(&b, MIX_EPS));
    assert_eq!(dynamic_mixing_bound(&s, 8).unwrap(), want);
    // Graphs of different orders cannot share a schedule.
    assert!(matches!(
        GraphSchedule::periodic(vec![complete(4), cycle(5)]),
        Err(ScheduleError::NodeCountMismatch { .. })
    ));
}

#[test]
fn mixing_bound_stays_below_cap() {
    for seed in 0..10 {
        let s = GraphSchedule::parse("rr:n=12,d=3", seed).unwrap();
        assert!(dynamic_mixing_bound(&s, 16).unwrap() <= mixing_cap(12));
        let g = s.snapshot_at(1).unwrap();
        assert!(spectral_summary(&g).unwrap().lambda2_signed <= 1.0 - 1.0 / 144.0);
    }
}

#[test]
fn segment_matrix_examples() {
    let s = GraphSchedule::parse("static:petersen", 0).unwrap();
    let p = dense(&s.snapshot_at(1).unwrap());
    matrix_close(&segment_matrix(&s, 1).unwrap(), &p, 1e-15);
    let p2 = mul(&p, &p);
    let p3 = mul(&p2, &p);
    let avg: Dense = p2
        .iter()
        .zip(&p3)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect())
        .collect();
    matrix_close(&segment_matrix(&s, 2).unwrap(), &avg, 1e-12);

    let graphs = [
        circulant(8, &[1, 4]).unwrap(),
        circulant(8, &[3, 4]).unwrap(),
        circulant(8, &[1, 4])
            .unwrap()
            .relabel(&[0, 2, 4, 6, 1, 3, 5, 7]),
    ];
    let periodic = GraphSchedule::periodic(graphs.to_vec()).unwrap();
    let mut prod = identity(8);
    let mut acc = vec![vec![0.0; 8]; 8];
    for t in 1..=5 {
        prod = mul(&prod, &dense(&graphs[(t - 1) % 3]));
        if t >= 3 {
            for i in 0..8 {
                for j in 0..8 {
                    acc[i][j] += prod[i][j] / 3.0;
                }
            }
        }
    }
    let m = segment_matrix(&periodic, 3).unwrap();
    matrix_close(&m, &acc, 1e-12);
    assert!(m.is_doubly_stochastic(1e-12));
}

#[test]
fn lazy_star_is_uniform_stationary() {
    let g = star(4);
    let m = TransitionMatrix::lazy(&g, 4).unwrap();
    assert!((m.get(0, 0) - 1.0 / 5.0).abs() < 1e-15);
    for leaf in 1..5 {
        assert!((m.get(leaf, leaf) - 4.0 / 5.0).abs() < 1e-15);
        assert!((m.get(leaf, 0) - 1.0 / 5.0).abs() < 1e-15);
    }
    let u = DistributionVector::uniform(5);
    let next = m.apply(&u);
    assert!(next.entries().iter().all(|x| (x - 0.2).abs() < 1e-15));
    // The stationary distribution is unique: the second eigenvalue is below 1.
    let s = summarize_symmetric(&m);
    assert!(s.lambda2_signed < 1.0 - 1e-6);
    let far = m.pow(400).row(NodeId(1));
    assert!(far.tv_to_uniform() < 1e-9);
}

fn random_schedule(seed: u64, kind: u8) -> GraphSchedule {
    match kind {
        0 => GraphSchedule::parse("static:rr:n=14,d=3", seed).unwrap(),
        1 => GraphSchedule::parse("rr:n=16,d=4", seed).unwrap(),
        _ => GraphSchedule::parse("perm:base=petersen", seed).unwrap(),
    }
}

fn random_start(n: usize, seed: u64) -> DistributionVector {
    let mut rng = stream(seed, 0, Purpose::Trial, 1);
    let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = w.iter().sum();
    DistributionVector::new(w.iter().map(|x| x / s).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contraction_and_monotonicity(seed in any::<u64>(), kind in 0u8..3) {
        let s = random_schedule(seed, kind);
        let n = s.n();
        let p0 = random_start(n, seed);
        let d0 = p0.l2_to_uniform();
        let lam = (1..=50)
            .map(|t| spectral_summary(&s.snapshot_at(t).unwrap()).unwrap().lambda2_abs)
            .fold(0.0, f64::max);
        let mut p = p0;
        let mut prev = d0;
        for t in 1..=50u64 {
            p = evolve(&p, &s, t, 1).unwrap();
            let d = p.l2_to_uniform();
            prop_assert!(d <= lam.powi(t as i32) * d0 + 1e-7);
            prop_assert!(d <= prev + 1e-7);
            prev = d;
        }
    }

    #[test]
    fn uniform_is_stationary(seed in any::<u64>(), kind in 0u8..3, steps in 0u64..80) {
        let s = random_schedule(seed, kind);
        let u = evolve(&DistributionVector::uniform(s.n()), &s, 1, steps).unwrap();
        let target = 1.0 / s.n() as f64;
        prop_assert!(u.entries().iter().all(|x| (x - target).abs() <= 1e-12));
    }

    #[test]
    fn sparse_and_dense_evolution_agree(seed in any::<u64>(), steps in 1u64..12) {
        let s = random_schedule(seed, 1);
        let x = DistributionVector::point(16, NodeId(3));
        let sparse = evolve(&x, &s, 1, steps).unwrap();
        let mut m = identity(16);
        for t in 1..=steps {
            m = mul(&m, &dense(&s.snapshot_at(t).unwrap()));
        }
        for (a, b) in sparse.entries().iter().zip(&m[3]) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
