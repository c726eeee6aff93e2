//! Randomized checks of the spectral and walk-count properties.

use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::congest::{CongestionPolicy, Engine, SimConfig};
use crate::graph::{dynamic_diameter, random_regular, Graph, GraphSchedule, NodeId};
use crate::rng::{mix, stream, Purpose, Rng};
use crate::spectral::{spectral_summary, step, DistributionVector, SpectralError};
use crate::walks::{connector_bound, many_random_walks, visit_stats, visits_bound, WalkParams};

/// Slack on every floating-point property.
pub const TOLERANCE: f64 = 1e-7;
/// Slack on stationarity of the uniform distribution.
pub const STATIONARY_TOLERANCE: f64 = 1e-12;
/// Steps checked per contraction/monotonicity instance.
pub const STEPS: u64 = 50;
/// Constant in the mixing-time bound `c ln n / (1 − λ)`.
pub const MIXING_CONSTANT: f64 = 3.0;
/// Extra frequency allowed over the nominal failure probability in censuses.
pub const CENSUS_SLACK: f64 = 0.02;

/// Which properties a suite run covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaScope {
    #[default]
    All,
    /// Distribution-evolution and eigenvalue properties only.
    Spectral,
    /// Visits and connector censuses only.
    Walks,
}

impl std::str::FromStr for LemmaScope {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Self::All),
            "spectral" => Ok(Self::Spectral),
            "walks" => Ok(Self::Walks),
            other => Err(HarnessError::Config(format!("unknown suite {other:?}"))),
        }
    }
}

impl std::fmt::Display for LemmaScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::All => "all",
            Self::Spectral => "spectral",
            Self::Walks => "walks",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub scope: LemmaScope,
    pub instances: u64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub instances: u64,
    pub violations: u64,
    /// Violations tolerated: 0 for exact properties, a frequency budget for censuses.
    pub allowed_frequency: f64,
    /// Least slack observed (bound minus measurement); negative on violation.
    pub margin: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub config: LemmaConfig,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Tally {
    name: String,
    instances: u64,
    violations: u64,
    margin: f64,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            instances: 0,
            violations: 0,
            margin: f64::INFINITY,
        }
    }

    /// Records one instance whose least slack was `slack`.
    fn record(&mut self, slack: f64, tol: f64) {
        self.instances += 1;
        self.margin = self.margin.min(slack);
        if slack < -tol {
            self.violations += 1;
        }
    }

    fn exact(self) -> LemmaCheck {
        LemmaCheck {
            passed: self.violations == 0,
            name: self.name,
            instances: self.instances,
            violations: self.violations,
            allowed_frequency: 0.0,
            margin: self.margin,
        }
    }

    fn census(self, allowed: f64) -> LemmaCheck {
        let freq = self.violations as f64 / self.instances.max(1) as f64;
        LemmaCheck {
            passed: freq <= allowed,
            name: self.name,
            instances: self.instances,
            violations: self.violations,
            allowed_frequency: allowed,
            margin: allowed - freq,
        }
    }
}

/// A random connected regular schedule with `n ≤ 32`: static, fresh random
/// regular graph per round, or a permuted base.
pub fn random_instance(rng: &mut Rng) -> Result<GraphSchedule, HarnessError> {
    let d = rng.gen_range(3..=4);
    let n = loop {
        let n = rng.gen_range(6..=32);
        if n * d % 2 == 0 {
            break n;
        }
    };
    let seed = rng.gen::<u64>();
    Ok(match rng.gen_range(0..3) {
        0 => GraphSchedule::static_graph(random_regular(n, d, rng)?)?,
        1 => GraphSchedule::random_regular(n, d, seed)?,
        _ => GraphSchedule::permuted(random_regular(n, d, rng)?, seed)?,
    })
}

/// A random distribution with independent uniform weights.
pub fn random_distribution(n: usize, rng: &mut Rng) -> DistributionVector {
    let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = w.iter().sum();
    DistributionVector::new(w.into_iter().map(|x| x / s).collect()).expect("normalized weights")
}

/// One step of `g ↦ A g` on a column vector: each node averages its neighbours.
fn average_step(f: &[f64], g: &Graph) -> Vec<f64> {
    (0..g.n())
        .map(|u| {
            let nbrs = g.neighbors(NodeId::from(u));
            nbrs.iter().map(|v| f[v.index()]).sum::<f64>() / nbrs.len() as f64
        })
        .collect()
}

fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct SpectralTallies {
    contraction: Tally,
    monotonicity: Tally,
    eigen_bound: Tally,
    second_eigen: Tally,
    sup_norm: Tally,
    mixing_bound: Tally,
    stationarity: Tally,
}

fn spectral_instance(
    s: &GraphSchedule,
    rng: &mut Rng,
    t: &mut SpectralTallies,
) -> Result<(), HarnessError> {
    let n = s.n();
    let lambdas: Vec<f64> = (1..=STEPS)
        .map(|r| Ok(spectral_summary(&s.snapshot_at(r)?.graph)?.lambda2_abs))
        .collect::<Result<_, HarnessError>>()?;

    // Contraction and monotonicity from a random start.
    let p0 = random_distribution(n, rng);
    let d0 = p0.l2_to_uniform();
    let (mut p, mut prev, mut lam_max) = (p0, d0, 0.0f64);
    let (mut contraction, mut monotone) = (f64::INFINITY, f64::INFINITY);
    for r in 1..=STEPS {
        lam_max = lam_max.max(lambdas[r as usize - 1]);
        p = step(&p, &s.snapshot_at(r)?.graph);
        let d = p.l2_to_uniform();
        contraction = contraction.min(lam_max.powi(r as i32) * d0 - d);
        monotone = monotone.min(prev - d);
        prev = d;
    }
    t.contraction.record(contraction, TOLERANCE);
    t.monotonicity.record(monotone, TOLERANCE);

    // Eigenvalue bounds on the first snapshot.
    let g = s.snapshot_at(1)?.graph;
    let summary = spectral_summary(&g)?;
    let d = g.regular_degree().ok_or(SpectralError::NotRegular)? as f64;
    let diam = g.diameter().expect("snapshots are connected") as f64;
    let nf = n as f64;
    t.eigen_bound.record(
        1.0 - 1.0 / (d * diam * nf) - summary.lambda2_signed,
        TOLERANCE,
    );
    t.second_eigen
        .record(1.0 - 1.0 / (nf * nf) - summary.lambda2_signed, TOLERANCE);

    // Sup norm of a random function under successive averaging.
    let mut f = random_distribution(n, rng).entries().to_vec();
    let mut sup = f64::INFINITY;
    for r in 1..=STEPS {
        let next = average_step(&f, &s.snapshot_at(r)?.graph);
        sup = sup.min(sup_norm(&f) - sup_norm(&next));
        f = next;
    }
    t.sup_norm.record(sup, TOLERANCE);

    // Mixing to 1/n from node 0 against c ln n / (1 − λ).
    let mut p = DistributionVector::point(n, NodeId(0));
    let mut steps = 0u64;
    let mut lam = 0.0f64;
    while p.l2_to_uniform() >= 1.0 / nf {
        steps += 1;
        let snap = s.snapshot_at(steps)?;
        lam = lam.max(match lambdas.get(steps as usize - 1) {
            Some(&l) => l,
            None => spectral_summary(&snap.graph)?.lambda2_abs,
        });
        p = step(&p, &snap.graph);
    }
    let bound = MIXING_CONSTANT * nf.ln() / (1.0 - lam.max(lambdas[0]));
    t.mixing_bound.record(bound - steps as f64, TOLERANCE);

    // The uniform distribution is fixed exactly.
    let mut u = DistributionVector::uniform(n);
    let mut worst = 0.0f64;
    for r in 1..=STEPS {
        u = step(&u, &s.snapshot_at(r)?.graph);
        worst = worst.max(
            u.entries()
                .iter()
                .map(|x| (x - 1.0 / nf).abs())
                .fold(0.0, f64::max),
        );
    }
    t.stationarity.record(-worst, STATIONARY_TOLERANCE);
    Ok(())
}

/// Walk configurations for the visits and connector censuses.
pub const CENSUS_SCHEDULES: [&str; 2] = ["static:C9", "static:rr:n=16,d=3"];
pub const CENSUS_WALKS: [(usize, u64); 3] = [(1, 40), (4, 40), (4, 160)];

/// Visits and connector censuses for one schedule and `(k, ℓ)`.
pub fn walk_census(
    schedule: &Arc<GraphSchedule>,
    k: usize,
    len: u64,
    trials: u64,
    seed: u64,
) -> Result<(LemmaCheck, LemmaCheck), HarnessError> {
    let n = schedule.n();
    let d = schedule.degree().ok_or(SpectralError::NotRegular)?;
    let phi = dynamic_diameter(schedule, 1)?;
    let label = format!("{} k={k} l={len}", schedule.spec());
    let mut visits = Tally::new(format!("visits-bound {label}"));
    let mut connectors = Tally::new(format!("connector-bound {label}"));
    let vb = visits_bound(n, d, k, len);
    for trial in 0..trials {
        let config = SimConfig::new(n, phi, mix(seed, trial)).with_policy(CongestionPolicy::Queue);
        let mut engine = Engine::new(schedule.clone(), config);
        let out = many_random_walks(&mut engine, &vec![NodeId(0); k], &WalkParams::new(len))?;
        let stats = visit_stats(n, &out.walks);
        visits.record(vb - stats.max_visits() as f64, 0.0);
        let slack = stats
            .visits
            .iter()
            .zip(&stats.connectors)
            .filter(|(&t, _)| t > 0)
            .map(|(&t, &c)| connector_bound(n, t, out.lambda_walk) - c as f64)
            .fold(f64::INFINITY, f64::min);
        connectors.record(slack, 0.0);
    }
    let nf = n as f64;
    Ok((
        visits.census(1.0 / nf + CENSUS_SLACK),
        connectors.census(1.0 / (nf * nf) + CENSUS_SLACK),
    ))
}

/// Spectral properties over `instances` random schedules and the walk censuses, as scoped.
pub fn lemma_suite(config: &LemmaConfig) -> Result<LemmaReport, HarnessError> {
    let mut checks = Vec::new();
    if config.scope != LemmaScope::Walks {
        checks.extend(spectral_checks(config)?);
    }
    if config.scope != LemmaScope::Spectral {
        checks.extend(walk_checks(config)?);
    }
    Ok(LemmaReport {
        config: *config,
        checks,
    })
}

fn spectral_checks(config: &LemmaConfig) -> Result<Vec<LemmaCheck>, HarnessError> {
    let mut t = SpectralTallies {
        contraction: Tally::new("contraction"),
        monotonicity: Tally::new("monotonicity"),
        eigen_bound: Tally::new("eigen-bound"),
        second_eigen: Tally::new("second-eigenvalue"),
        sup_norm: Tally::new("sup-norm"),
        mixing_bound: Tally::new("mixing-time-bound"),
        stationarity: Tally::new("stationarity"),
    };
    for i in 0..config.instances {
        let mut rng = stream(config.seed, i, Purpose::Trial, 0);
        let s = random_instance(&mut rng)?;
        spectral_instance(&s, &mut rng, &mut t)?;
    }
    Ok([
        t.contraction,
        t.monotonicity,
        t.eigen_bound,
        t.second_eigen,
        t.sup_norm,
        t.mixing_bound,
        t.stationarity,
    ]
    .into_iter()
    .map(Tally::exact)
    .collect())
}

fn walk_checks(config: &LemmaConfig) -> Result<Vec<LemmaCheck>, HarnessError> {
    let mut checks = Vec::new();
    for (si, spec) in CENSUS_SCHEDULES.iter().enumerate() {
        let schedule = Arc::new(GraphSchedule::parse(spec, mix(config.seed, si as u64))?);
        for &(k, len) in &CENSUS_WALKS {
            let (v, c) = walk_census(
                &schedule,
                k,
                len,
                config.trials,
                mix(config.seed, len * 31 + k as u64),
            )?;
            checks.push(v);
            checks.push(c);
        }
    }
    Ok(checks)
}
