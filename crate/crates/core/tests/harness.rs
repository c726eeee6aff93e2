use std::fs;

use dynwalk_core::congest::CongestionPolicy;
use dynwalk_core::harness::{
    aggregate, gossip_rows, run_experiment, write_artifacts, Algorithm, Detail, ExperimentConfig,
    LemmaScope, TauSource,
};
use proptest::prelude::*;

fn config(lines: &str) -> ExperimentConfig {
    ExperimentConfig::parse(lines).unwrap()
}

#[test]
fn zero_length_naive_walk_takes_no_rounds() {
    let r = run_experiment(&config(
        "schedule = static:C9\nalgo = naive\ntau = 0\nseeds = 3\n",
    ))
    .unwrap();
    assert!(r.passed);
    assert_eq!(r.records.len(), 3);
    for rec in &r.records {
        assert_eq!(rec.rounds, 0);
        match &rec.detail {
            Detail::Naive { destinations } => {
                assert_eq!(destinations, &vec![dynwalk_core::graph::NodeId(0)])
            }
            other => panic!("unexpected detail {other:?}"),
        }
    }
}

#[test]
fn spectral_suite_passes_on_fifty_instances() {
    let r = run_experiment(&config(
        "schedule = static:K4\nalgo = lemma-suite\nseeds = 50\nsuite = spectral\n",
    ))
    .unwrap();
    let lemmas = r.lemmas.as_ref().unwrap();
    assert_eq!(lemmas.config.scope, LemmaScope::Spectral);
    assert!(!lemmas.checks.is_empty());
    for c in &lemmas.checks {
        assert_eq!(c.instances, 50, "{}", c.name);
        assert!(c.passed, "{c:?}");
    }
    assert!(r.passed);
}

fn gossip_config() -> ExperimentConfig {
    config("schedule = rr:n=16,d=4\nalgo = gossip\nk = 2,4,8\nseeds = 3\nseed_base = 40\npolicy = queue\ntau = 16\n")
}

#[test]
fn gossip_csv_has_one_row_per_k_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_experiment(&gossip_config()).unwrap();
    let written = write_artifacts(&r, dir.path()).unwrap();
    assert_eq!(written.len(), 3);
    let mut rd = csv::Reader::from_path(dir.path().join("gossip.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "n",
            "d",
            "k",
            "tau",
            "phi",
            "f",
            "rounds_rw",
            "rounds_trivial",
            "winner",
            "coverage_rw",
            "seed"
        ]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    let keys: Vec<(String, String)> = rows
        .iter()
        .map(|x| (x[2].to_string(), x[10].to_string()))
        .collect();
    let mut want = Vec::new();
    for k in [2, 4, 8] {
        for s in 40..43 {
            want.push((k.to_string(), s.to_string()));
        }
    }
    assert_eq!(keys, want);
    assert!(rows
        .iter()
        .all(|x| &x[0] == "16" && &x[1] == "4" && &x[3] == "16"));
    assert_eq!(gossip_rows(&r).len(), 9);
    let lines = fs::read_to_string(dir.path().join("seeds.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 9);
}

#[test]
fn artifacts_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_artifacts(&run_experiment(&gossip_config()).unwrap(), a.path()).unwrap();
    write_artifacts(&run_experiment(&gossip_config()).unwrap(), b.path()).unwrap();
    for f in ["seeds.jsonl", "gossip.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn aggregates_match_records() {
    let r = run_experiment(&config(
        "schedule = static:petersen\nalgo = many\nk = 1,3\nseeds = 7\ntau = 30\npolicy = queue\n",
    ))
    .unwrap();
    assert_eq!(r.aggregates, aggregate(&r.records));
    for a in &r.aggregates {
        let mut rounds: Vec<u64> = r
            .records
            .iter()
            .filter(|x| x.k == a.k)
            .map(|x| x.rounds)
            .collect();
        rounds.sort_unstable();
        assert_eq!(a.seeds, 7);
        assert_eq!(a.rounds_median, rounds[3] as f64);
        assert_eq!(a.rounds_mean, rounds.iter().sum::<u64>() as f64 / 7.0);
        assert!(a.rounds_q10 <= a.rounds_median && a.rounds_median <= a.rounds_q90);
    }
}

#[test]
fn oracle_comparison_brackets_estimates() {
    let r = run_experiment(&config("schedule = static:petersen\nalgo = estimate-mix\nseeds = 4\npolicy = queue\noracle = true\n")).unwrap();
    let o = r.oracle.unwrap();
    let (lo, hi) = o.bracket.unwrap();
    assert!(lo <= o.tau_mix && o.tau_mix <= hi);
    let inside = r
        .records
        .iter()
        .filter(|x| matches!(&x.detail, Detail::EstimateMix { estimate } if (lo..=hi).contains(&estimate.tau_tilde)))
        .count();
    assert_eq!(o.bracket_freq.unwrap(), inside as f64 / 4.0);
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        "schedule =\n",
        "schedule = static:K4\nseeds = 0\n",
        "schedule = static:K4\nk = 0\n",
        "schedule = static:K4\nbogus = 1\n",
        "schedule = static:K4\nlambda_c = -1\n",
        "schedule static:K4\n",
    ] {
        let e = ExperimentConfig::parse(text).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{text:?}");
    }
    let e = run_experiment(&config("schedule = static:nosuch\nalgo = naive\n")).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        prop::sample::select(vec![
            "static:K4",
            "rr:n=16,d=4",
            "perm:base=petersen",
            "static:C9",
        ]),
        prop::sample::select(vec![
            Algorithm::Naive,
            Algorithm::Single,
            Algorithm::Many,
            Algorithm::Gossip,
            Algorithm::EstimateMix,
            Algorithm::LemmaSuite,
        ]),
        prop_oneof![
            Just(TauSource::Oracle),
            Just(TauSource::Worstcase),
            (0u64..5000).prop_map(TauSource::Value)
        ],
        (1u32..400).prop_map(|x| x as f64 / 16.0),
        proptest::option::of(1u64..100),
        proptest::collection::vec(1usize..64, 1..4),
        (1u64..500, any::<u64>()),
        (
            proptest::option::of(1u64..1000),
            any::<bool>(),
            proptest::option::of(1u64..20),
        ),
        (
            1u64..1000,
            0usize..8,
            1u64..1000,
            prop::sample::select(vec![
                LemmaScope::All,
                LemmaScope::Spectral,
                LemmaScope::Walks,
            ]),
        ),
        (proptest::option::of("[a-z]{1,8}"), any::<bool>()),
    )
        .prop_map(
            |(
                schedule,
                algo,
                tau,
                lambda_c,
                lambda,
                ks,
                (seeds, seed_base),
                (bandwidth, queue, phi),
                (horizon, source, trials, suite),
                (out, oracle),
            )| ExperimentConfig {
                schedule: schedule.to_string(),
                algo,
                tau,
                lambda_c,
                lambda,
                ks,
                seeds,
                seed_base,
                bandwidth,
                policy: if queue {
                    CongestionPolicy::Queue
                } else {
                    CongestionPolicy::Strict
                },
                phi,
                horizon,
                source,
                trials,
                suite,
                out,
                oracle,
            },
        )
}

proptest! {
    #[test]
    fn config_text_round_trips(c in arb_config()) {
        let back = ExperimentConfig::parse(&c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }
}
