//! Seed sweeps over one configured algorithm.

use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, ExperimentConfig, TauSource};
use super::lemma_suite::{lemma_suite, LemmaConfig, LemmaReport};
use super::HarnessError;
use crate::congest::{default_bandwidth, Engine, SimConfig};
use crate::gossip::{k_gossip_race, GossipParams, TokenAssignment, Winner};
use crate::graph::{dynamic_diameter, GraphSchedule, NodeId};
use crate::mixing::{
    default_samples, epsilon_prime, estimate_mixing_time, MixingEstimate, EPSILON,
};
use crate::spectral::{
    dynamic_mixing_bound, evolve, mixing_time_oracle, DistributionVector, MAX_ORACLE_N, MIX_EPS,
};
use crate::stats::{frequency, median, quantile};
use crate::walks::{
    concurrent_naive_walks, connector_bound, many_random_walks, single_random_walk, visit_stats,
    visits_bound, WalkCase, WalkParams, WalkResult,
};

/// Folded into the base seed to derive the schedule seed.
pub const ADVERSARY_TAG: u64 = 0xad5e_75a7_0b11_0000;

/// Seed of the `i`-th run of a sweep.
pub fn algorithm_seed(base: u64, i: u64) -> u64 {
    base.wrapping_add(i)
}

pub fn adversary_seed(base: u64) -> u64 {
    base ^ ADVERSARY_TAG
}

/// `⌈n² ln n⌉`.
pub fn worstcase_tau(n: usize) -> u64 {
    let n = n as f64;
    (n * n * n.ln()).ceil() as u64
}

/// Quantities fixed before the first seed runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolved {
    pub n: usize,
    pub degree: Option<usize>,
    pub schedule_seed: u64,
    pub phi: u64,
    pub tau: Option<u64>,
    pub bandwidth: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum Detail {
    Naive {
        destinations: Vec<NodeId>,
    },
    Single {
        destination: NodeId,
        lambda: u64,
        connectors: usize,
        fallbacks: u64,
        visits_violation: bool,
        connector_violation: bool,
    },
    Many {
        destinations: Vec<NodeId>,
        case: WalkCase,
        lambda: u64,
        phase1_rounds: u64,
        max_edge_coupons: u64,
        fallbacks: u64,
        visits_violation: bool,
        connector_violation: bool,
    },
    Gossip {
        f: usize,
        broadcast_rounds: u64,
        rounds_rw: u64,
        rounds_trivial: u64,
        winner: Winner,
        coverage_rw: bool,
    },
    EstimateMix {
        estimate: MixingEstimate,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub k: usize,
    pub rounds: u64,
    /// Engine accounting; absent for gossip races, which run two engines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_edge_bits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub congestion_events: Option<u64>,
    #[serde(flatten)]
    pub detail: Detail,
}

impl SeedRecord {
    fn flags(&self) -> Option<(bool, bool)> {
        match self.detail {
            Detail::Single {
                visits_violation,
                connector_violation,
                ..
            }
            | Detail::Many {
                visits_violation,
                connector_violation,
                ..
            } => Some((visits_violation, connector_violation)),
            _ => None,
        }
    }
}

/// Statistics over the records sharing one `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub k: usize,
    pub seeds: usize,
    pub rounds_median: f64,
    pub rounds_q10: f64,
    pub rounds_q90: f64,
    pub rounds_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visits_violation_freq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connector_violation_freq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_freq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rw_win_freq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds_rw_median: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds_trivial_median: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_tilde_median: Option<f64>,
}

/// Groups records by `k` (in first-seen order) and summarizes each group.
pub fn aggregate(records: &[SeedRecord]) -> Vec<Aggregate> {
    let mut ks: Vec<usize> = Vec::new();
    for r in records {
        if !ks.contains(&r.k) {
            ks.push(r.k);
        }
    }
    ks.into_iter()
        .map(|k| {
            let group: Vec<&SeedRecord> = records.iter().filter(|r| r.k == k).collect();
            let rounds: Vec<f64> = group.iter().map(|r| r.rounds as f64).collect();
            let flags: Vec<(bool, bool)> = group.iter().filter_map(|r| r.flags()).collect();
            let gossip: Vec<(u64, u64, Winner, bool)> = group
                .iter()
                .filter_map(|r| match r.detail {
                    Detail::Gossip {
                        rounds_rw,
                        rounds_trivial,
                        winner,
                        coverage_rw,
                        ..
                    } => Some((rounds_rw, rounds_trivial, winner, coverage_rw)),
                    _ => None,
                })
                .collect();
            let taus: Vec<f64> = group
                .iter()
                .filter_map(|r| match &r.detail {
                    Detail::EstimateMix { estimate } => Some(estimate.tau_tilde as f64),
                    _ => None,
                })
                .collect();
            let some_if = |nonempty: bool, v: f64| nonempty.then_some(v);
            Aggregate {
                k,
                seeds: group.len(),
                rounds_median: median(&rounds),
                rounds_q10: quantile(&rounds, 0.1),
                rounds_q90: quantile(&rounds, 0.9),
                rounds_mean: rounds.iter().sum::<f64>() / rounds.len() as f64,
                visits_violation_freq: some_if(
                    !flags.is_empty(),
                    frequency(flags.iter().map(|f| f.0)),
                ),
                connector_violation_freq: some_if(
                    !flags.is_empty(),
                    frequency(flags.iter().map(|f| f.1)),
                ),
                coverage_freq: some_if(!gossip.is_empty(), frequency(gossip.iter().map(|g| g.3))),
                rw_win_freq: some_if(
                    !gossip.is_empty(),
                    frequency(gossip.iter().map(|g| g.2 == Winner::Rw)),
                ),
                rounds_rw_median: (!gossip.is_empty())
                    .then(|| median(&gossip.iter().map(|g| g.0 as f64).collect::<Vec<_>>())),
                rounds_trivial_median: (!gossip.is_empty())
                    .then(|| median(&gossip.iter().map(|g| g.1 as f64).collect::<Vec<_>>())),
                tau_tilde_median: (!taus.is_empty()).then(|| median(&taus)),
            }
        })
        .collect()
}

/// Oracle quantities compared against the sweep (`n ≤ 512`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub tau_mix: u64,
    pub phi: u64,
    /// TV between pooled walk destinations and the exact walk distribution from the source.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub destination_tv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<(u64, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket_freq: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub generated_unix: u64,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub header: ReportHeader,
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    pub records: Vec<SeedRecord>,
    pub aggregates: Vec<Aggregate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<LemmaReport>,
    pub passed: bool,
}

fn resolve_tau(config: &ExperimentConfig, schedule: &GraphSchedule) -> Result<u64, HarnessError> {
    Ok(match config.tau {
        TauSource::Value(t) => t,
        TauSource::Worstcase => worstcase_tau(schedule.n()),
        TauSource::Oracle => dynamic_mixing_bound(schedule, config.horizon)?,
    })
}

fn needs_tau(algo: Algorithm) -> bool {
    !matches!(algo, Algorithm::EstimateMix | Algorithm::LemmaSuite)
}

pub fn resolve(config: &ExperimentConfig) -> Result<(Arc<GraphSchedule>, Resolved), HarnessError> {
    config.validate()?;
    let schedule_seed = adversary_seed(config.seed_base);
    let schedule = Arc::new(GraphSchedule::parse(&config.schedule, schedule_seed)?);
    let n = schedule.n();
    if config.source >= n {
        return Err(HarnessError::Config(format!(
            "source {} is not a node of an n = {n} schedule",
            config.source
        )));
    }
    if config.oracle && n > MAX_ORACLE_N {
        return Err(HarnessError::Config(format!(
            "oracle comparisons need n ≤ {MAX_ORACLE_N}"
        )));
    }
    let phi = match config.phi {
        Some(p) => p,
        None => dynamic_diameter(&schedule, config.horizon)?,
    };
    let tau = if needs_tau(config.algo) {
        Some(resolve_tau(config, &schedule)?)
    } else {
        None
    };
    let resolved = Resolved {
        n,
        degree: schedule.degree(),
        schedule_seed,
        phi,
        tau,
        bandwidth: config.bandwidth.unwrap_or_else(|| default_bandwidth(n)),
    };
    Ok((schedule, resolved))
}

fn walk_flags(
    n: usize,
    d: usize,
    walks: &[WalkResult],
    len: u64,
    lambda: u64,
    stitched: bool,
) -> (bool, bool) {
    let stats = visit_stats(n, walks);
    let visits = stats.max_visits() as f64 > visits_bound(n, d, walks.len(), len);
    let connectors = stitched
        && stats
            .visits
            .iter()
            .zip(&stats.connectors)
            .any(|(&t, &c)| t > 0 && c as f64 > connector_bound(n, t, lambda));
    (visits, connectors)
}

fn run_seed(
    config: &ExperimentConfig,
    schedule: &Arc<GraphSchedule>,
    resolved: &Resolved,
    k: usize,
    seed: u64,
) -> Result<SeedRecord, HarnessError> {
    let n = resolved.n;
    let sim = SimConfig::new(n, resolved.phi, seed)
        .with_policy(config.policy)
        .with_bandwidth(resolved.bandwidth);
    let tau = resolved.tau.unwrap_or(1);
    let mut walk = WalkParams::new(tau).with_lambda_c(config.lambda_c);
    if let Some(l) = config.lambda {
        walk = walk.with_lambda(l);
    }
    let d = resolved.degree.unwrap_or(1);
    let source = NodeId::from(config.source);
    let mut engine = Engine::new(schedule.clone(), sim.clone());
    let detail = match config.algo {
        Algorithm::Naive => {
            let walks = concurrent_naive_walks(&mut engine, &vec![source; k], tau, walk.stepper)?;
            Detail::Naive {
                destinations: walks.iter().map(|w| w.destination).collect(),
            }
        }
        Algorithm::Single => {
            let w = single_random_walk(&mut engine, source, &walk)?;
            let lambda = walk.lambda_for(1, resolved.phi);
            let (visits_violation, connector_violation) =
                walk_flags(n, d, std::slice::from_ref(&w), tau, lambda, lambda < tau);
            Detail::Single {
                destination: w.destination,
                lambda,
                connectors: w.connectors.len() - 1,
                fallbacks: w.fallbacks,
                visits_violation,
                connector_violation,
            }
        }
        Algorithm::Many => {
            let out = many_random_walks(&mut engine, &vec![source; k], &walk)?;
            let stitched = out.case == WalkCase::Stitched;
            let (visits_violation, connector_violation) =
                walk_flags(n, d, &out.walks, tau, out.lambda_walk, stitched);
            Detail::Many {
                destinations: out.walks.iter().map(|w| w.destination).collect(),
                case: out.case,
                lambda: out.lambda_walk,
                phase1_rounds: out.phase1_rounds,
                max_edge_coupons: out.max_edge_coupons,
                fallbacks: out.walks.iter().map(|w| w.fallbacks).sum(),
                visits_violation,
                connector_violation,
            }
        }
        Algorithm::Gossip => {
            let params = GossipParams::derive(n, k, tau, resolved.phi);
            let assignment = TokenAssignment::one_per_node(k, n)?;
            let race = k_gossip_race(schedule.clone(), sim, &assignment, &params, &walk)?;
            let record = SeedRecord {
                seed,
                k,
                rounds: race.rounds,
                max_edge_bits: None,
                congestion_events: None,
                detail: Detail::Gossip {
                    f: params.f,
                    broadcast_rounds: params.broadcast_rounds,
                    rounds_rw: race.rounds_rw,
                    rounds_trivial: race.rounds_trivial,
                    winner: race.winner,
                    coverage_rw: race.coverage_rw,
                },
            };
            return Ok(record);
        }
        Algorithm::EstimateMix => {
            let samples = default_samples(n, EPSILON);
            let estimate = estimate_mixing_time(&mut engine, source, EPSILON, samples, &walk)?;
            Detail::EstimateMix { estimate }
        }
        Algorithm::LemmaSuite => unreachable!("lemma suite has no per-seed runs"),
    };
    let summary = engine.log().summary();
    Ok(SeedRecord {
        seed,
        k,
        rounds: engine.round(),
        max_edge_bits: Some(summary.max_edge_bits),
        congestion_events: Some(summary.congestion_events),
        detail,
    })
}

fn oracle_comparison(
    config: &ExperimentConfig,
    schedule: &GraphSchedule,
    resolved: &Resolved,
    records: &mut [SeedRecord],
) -> Result<OracleComparison, HarnessError> {
    let n = resolved.n;
    let source = NodeId::from(config.source);
    let tau_mix = dynamic_mixing_bound(schedule, config.horizon)?;
    let mut out = OracleComparison {
        tau_mix,
        phi: resolved.phi,
        destination_tv: None,
        bracket: None,
        bracket_freq: None,
    };
    let destinations: Vec<NodeId> = records
        .iter()
        .flat_map(|r| match &r.detail {
            Detail::Naive { destinations } | Detail::Many { destinations, .. } => {
                destinations.clone()
            }
            Detail::Single { destination, .. } => vec![*destination],
            _ => Vec::new(),
        })
        .collect();
    if let (Some(tau), false) = (resolved.tau, destinations.is_empty()) {
        let exact = evolve(&DistributionVector::point(n, source), schedule, 1, tau)?;
        out.destination_tv =
            Some(DistributionVector::empirical(n, destinations).tv_distance(&exact));
    }
    if config.algo == Algorithm::EstimateMix {
        let bracket = (
            mixing_time_oracle(schedule, source, MIX_EPS)?,
            mixing_time_oracle(schedule, source, epsilon_prime(n))?,
        );
        let mut hits = Vec::new();
        for r in records.iter_mut() {
            if let Detail::EstimateMix { estimate } = &mut r.detail {
                estimate.oracle_bracket = Some(bracket);
                hits.push((bracket.0..=bracket.1).contains(&estimate.tau_tilde));
            }
        }
        out.bracket = Some(bracket);
        out.bracket_freq = Some(frequency(hits));
    }
    Ok(out)
}

/// Runs the configured sweep; records are ordered by `k`, then seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let header = ReportHeader {
        generated_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    if config.algo == Algorithm::LemmaSuite {
        config.validate()?;
        let lemmas = lemma_suite(&LemmaConfig {
            scope: config.suite,
            instances: config.seeds,
            trials: config.trials,
            seed: config.seed_base,
        })?;
        let schedule_seed = adversary_seed(config.seed_base);
        let resolved = Resolved {
            n: 0,
            degree: None,
            schedule_seed,
            phi: 0,
            tau: None,
            bandwidth: 0,
        };
        return Ok(RunReport {
            header,
            config: config.clone(),
            resolved,
            records: Vec::new(),
            aggregates: Vec::new(),
            oracle: None,
            passed: lemmas.passed(),
            lemmas: Some(lemmas),
        });
    }
    let (schedule, resolved) = resolve(config)?;
    let ks: Vec<usize> = match config.algo {
        Algorithm::Single | Algorithm::EstimateMix => vec![1],
        _ => config.ks.clone(),
    };
    if config.algo == Algorithm::Gossip {
        if let Some(&k) = ks.iter().find(|&&k| k > resolved.n) {
            return Err(HarnessError::Config(format!(
                "k = {k} tokens exceeds n = {}",
                resolved.n
            )));
        }
    }
    let mut records = Vec::new();
    for &k in &ks {
        let batch = (0..config.seeds)
            .into_par_iter()
            .map(|i| {
                run_seed(
                    config,
                    &schedule,
                    &resolved,
                    k,
                    algorithm_seed(config.seed_base, i),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        records.extend(batch);
    }
    let oracle = if config.oracle {
        Some(oracle_comparison(
            config,
            &schedule,
            &resolved,
            &mut records,
        )?)
    } else {
        None
    };
    Ok(RunReport {
        header,
        config: config.clone(),
        resolved,
        aggregates: aggregate(&records),
        records,
        oracle,
        lemmas: None,
        passed: true,
    })
}
