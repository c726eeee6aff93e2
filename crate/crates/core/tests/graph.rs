use dynwalk_core::graph::{
    circulant, complete, cycle, dynamic_diameter, flooding_time, validate_snapshot, Graph,
    GraphSchedule, NodeId, ScheduleError,
};
use proptest::prelude::*;

fn edge_set(g: &Graph) -> Vec<(NodeId, NodeId)> {
    let mut e = g.edges().to_vec();
    e.sort_unstable();
    e
}

/// Temporal flooding by repeated edge scans, independent of the library's bitset routine.
fn brute_flood(s: &GraphSchedule, source: usize, start: u64) -> u64 {
    let n = s.n();
    let mut informed = vec![false; n];
    informed[source] = true;
    let mut t = start;
    while informed.iter().any(|b| !b) {
        let g = s.snapshot_at(t).unwrap();
        let before = informed.clone();
        for &(u, v) in g.edges() {
            if before[u.index()] {
                informed[v.index()] = true;
            }
            if before[v.index()] {
                informed[u.index()] = true;
            }
        }
        t += 1;
    }
    t - start
}

fn brute_diameter(s: &GraphSchedule, starts: u64) -> u64 {
    (0..s.n())
        .flat_map(|x| (1..=starts).map(move |t| (x, t)))
        .map(|(x, t)| brute_flood(s, x, t))
        .max()
        .unwrap()
}

/// All-pairs BFS diameter by Floyd–Warshall.
fn floyd_diameter(g: &Graph) -> u64 {
    let n = g.n();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in g.edges() {
        d[u.index()][v.index()] = 1;
        d[v.index()][u.index()] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d.iter().flatten().copied().max().unwrap()
}

#[test]
fn static_schedule_is_constant() {
    let s = GraphSchedule::parse("static:C5", 0).unwrap();
    let first = edge_set(&s.snapshot_at(1).unwrap());
    for t in [2, 7, 1000] {
        assert_eq!(edge_set(&s.snapshot_at(t).unwrap()), first);
    }
    assert_eq!(first, edge_set(&cycle(5)));
}

#[test]
fn periodic_schedule_repeats() {
    let c5 = cycle(5);
    let other = circulant(5, &[2]).unwrap();
    let s = GraphSchedule::periodic(vec![c5.clone(), other.clone()]).unwrap();
    assert_eq!(edge_set(&s.snapshot_at(3).unwrap()), edge_set(&c5));
    assert_eq!(edge_set(&s.snapshot_at(4).unwrap()), edge_set(&other));
    assert_eq!(s.period(), Some(2));
}

#[test]
fn random_regular_is_deterministic() {
    let a = GraphSchedule::parse("rr:n=8,d=3", 42).unwrap();
    let b = GraphSchedule::parse("rr:n=8,d=3", 42).unwrap();
    assert_eq!(
        edge_set(&a.snapshot_at(1).unwrap()),
        edge_set(&a.snapshot_at(1).unwrap())
    );
    assert_eq!(
        edge_set(&a.snapshot_at(1).unwrap()),
        edge_set(&b.snapshot_at(1).unwrap())
    );
}

#[test]
fn round_zero_is_rejected() {
    let s = GraphSchedule::parse("static:K4", 0).unwrap();
    assert!(matches!(s.snapshot_at(0), Err(ScheduleError::RoundZero)));
}

#[test]
fn validation_examples() {
    let r = validate_snapshot(&cycle(5), Some(2));
    assert!(r.connected && !r.bipartite && r.regular_degree == Some(2));
    assert!(validate_snapshot(&cycle(4), Some(2)).bipartite);
    let triangles = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
    assert!(!validate_snapshot(&triangles, Some(2)).connected);
}

#[test]
fn flooding_and_diameter_examples() {
    let k4 = GraphSchedule::parse("static:K4", 0).unwrap();
    let c5 = GraphSchedule::parse("static:C5", 0).unwrap();
    for x in 0..4 {
        assert_eq!(flooding_time(&k4, NodeId(x), 1).unwrap(), 1);
    }
    for x in 0..5 {
        assert_eq!(flooding_time(&c5, NodeId(x), 1).unwrap(), 2);
    }
    assert_eq!(dynamic_diameter(&k4, 100).unwrap(), 1);
    assert_eq!(dynamic_diameter(&c5, 100).unwrap(), 2);
}

#[test]
fn alternating_eight_node_schedule_matches_brute_force() {
    let s = GraphSchedule::periodic(vec![
        circulant(8, &[1, 4]).unwrap(),
        circulant(8, &[3, 4]).unwrap(),
    ])
    .unwrap();
    let want = brute_diameter(&s, 2);
    assert_eq!(dynamic_diameter(&s, 64).unwrap(), want);
    for x in 0..8 {
        for t in 1..=4 {
            assert_eq!(
                flooding_time(&s, NodeId(x), t).unwrap(),
                brute_flood(&s, x as usize, t)
            );
        }
    }
}

#[test]
fn random_regular_diameter_matches_brute_force() {
    let s = GraphSchedule::parse("rr:n=8,d=3", 7).unwrap();
    assert_eq!(dynamic_diameter(&s, 32).unwrap(), brute_diameter(&s, 32));
}

#[test]
fn static_diameter_matches_all_pairs_on_fifty_instances() {
    for seed in 0..50u64 {
        let n = 6 + (seed as usize % 14) * 2;
        let d = 3 + (seed as usize % 2);
        let s = GraphSchedule::parse(&format!("static:rr:n={n},d={d}"), seed).unwrap();
        let g = s.snapshot_at(1).unwrap();
        assert_eq!(
            dynamic_diameter(&s, 1).unwrap(),
            floyd_diameter(&g),
            "seed {seed}"
        );
    }
}

#[test]
fn named_graphs() {
    assert_eq!(
        edge_set(
            &GraphSchedule::parse("static:K4", 0)
                .unwrap()
                .snapshot_at(1)
                .unwrap()
        ),
        edge_set(&complete(4))
    );
    let p = GraphSchedule::parse("static:petersen", 0).unwrap();
    assert_eq!(floyd_diameter(&p.snapshot_at(1).unwrap()), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snapshots_are_deterministic(seed in any::<u64>(), t in 1u64..500, kind in 0usize..2) {
        let spec = ["rr:n=12,d=3", "perm:base=petersen"][kind];
        let a = GraphSchedule::parse(spec, seed).unwrap();
        let b = GraphSchedule::parse(spec, seed).unwrap();
        prop_assert_eq!(edge_set(&a.snapshot_at(t).unwrap()), edge_set(&b.snapshot_at(t).unwrap()));
    }

    #[test]
    fn flooding_grows_every_round(seed in any::<u64>(), src in 0u32..10, start in 1u64..50) {
        let s = GraphSchedule::parse("rr:n=10,d=3", seed).unwrap();
        let mut informed = vec![false; 10];
        informed[src as usize] = true;
        let mut t = start;
        while informed.iter().any(|b| !b) {
            let before = informed.iter().filter(|&&b| b).count();
            let g = s.snapshot_at(t).unwrap();
            let prev = informed.clone();
            for &(u, v) in g.edges() {
                if prev[u.index()] { informed[v.index()] = true; }
                if prev[v.index()] { informed[u.index()] = true; }
            }
            prop_assert!(informed.iter().filter(|&&b| b).count() > before);
            t += 1;
        }
        prop_assert_eq!(flooding_time(&s, NodeId(src), start).unwrap(), t - start);
    }
}

/// 1000 sampled `(seed, t)` pairs per generator.
#[test]
fn generated_snapshots_are_valid() {
    let specs = [
        ("rr:n=16,d=4", 4),
        ("rr:n=9,d=4", 4),
        ("perm:base=petersen", 3),
        ("perm:base=K6", 5),
    ];
    for (spec, d) in specs {
        for i in 0..1000u64 {
            let s = GraphSchedule::parse(spec, i / 10).unwrap();
            let g = s.snapshot_at(1 + i * 7 % 997).unwrap();
            let r = validate_snapshot(&g, Some(d));
            assert!(
                r.is_valid(),
                "{spec} seed {} round {}: {r:?}",
                i / 10,
                1 + i * 7 % 997
            );
        }
    }
}
