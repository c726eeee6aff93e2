//! k-gossip: random-walk placement of token copies followed by per-token
//! broadcast, raced against sequential flooding.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congest::{Encoding, Engine, FloodSpec, Payload, SimConfig, SimError};
use crate::graph::{GraphSchedule, NodeId};
use crate::walks::{many_random_walks, WalkError, WalkParams};

#[derive(Debug, Error)]
pub enum GossipError {
    #[error("token {token} has no initial holder")]
    NoHolder { token: usize },
    #[error("k = {k} tokens exceeds n = {n}")]
    TooManyTokens { k: usize, n: usize },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Initial holders of each token; token ids are `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenAssignment {
    pub holders: Vec<Vec<NodeId>>,
}

impl TokenAssignment {
    pub fn new(holders: Vec<Vec<NodeId>>, n: usize) -> Result<Self, GossipError> {
        if holders.len() > n {
            return Err(GossipError::TooManyTokens {
                k: holders.len(),
                n,
            });
        }
        if let Some(token) = holders.iter().position(Vec::is_empty) {
            return Err(GossipError::NoHolder { token });
        }
        Ok(Self { holders })
    }

    /// Token `t` starts at node `t`.
    pub fn one_per_node(k: usize, n: usize) -> Result<Self, GossipError> {
        Self::new((0..k).map(|t| vec![NodeId::from(t)]).collect(), n)
    }

    pub fn k(&self) -> usize {
        self.holders.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GossipParams {
    pub k: usize,
    /// Copies per token placed by random walks.
    pub f: usize,
    /// Rounds each token is broadcast in the second phase.
    pub broadcast_rounds: u64,
}

impl GossipParams {
    /// `f = ⌈n^{2/3} (k / τΦ)^{1/3}⌉` and `broadcast_rounds = ⌈2 n ln n / f⌉`.
    pub fn derive(n: usize, k: usize, tau: u64, phi: u64) -> Self {
        let f = copies(n, k, tau, phi);
        Self {
            k,
            f,
            broadcast_rounds: broadcast_rounds(n, f),
        }
    }
}

pub fn copies(n: usize, k: usize, tau: u64, phi: u64) -> usize {
    let x = (n as f64).powi(2) * k as f64 / (tau.max(1) as f64 * phi.max(1) as f64);
    ((x.cbrt() - 1e-9).ceil() as usize).max(1)
}

pub fn broadcast_rounds(n: usize, f: usize) -> u64 {
    (2.0 * n as f64 * (n as f64).ln() / f as f64 - 1e-9)
        .ceil()
        .max(1.0) as u64
}

/// Which tokens each node holds at the end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub k: usize,
    /// `held[v][t]`.
    pub held: Vec<Vec<bool>>,
}

impl Coverage {
    fn from_assignment(n: usize, a: &TokenAssignment) -> Self {
        let mut held = vec![vec![false; a.k()]; n];
        for (t, hs) in a.holders.iter().enumerate() {
            for h in hs {
                held[h.index()][t] = true;
            }
        }
        Self { k: a.k(), held }
    }

    pub fn is_full(&self) -> bool {
        self.held.iter().all(|row| row.iter().all(|&b| b))
    }

    pub fn missing(&self) -> usize {
        self.held
            .iter()
            .map(|row| row.iter().filter(|&&b| !b).count())
            .sum()
    }

    fn holders(&self, t: usize) -> Vec<NodeId> {
        (0..self.held.len())
            .filter(|&v| self.held[v][t])
            .map(NodeId::from)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GossipOutcome {
    pub rounds: u64,
    pub placement_rounds: u64,
    pub broadcast_rounds: u64,
    pub coverage: Coverage,
}

/// Copies per token split round-robin among its holders.
fn walk_sources(a: &TokenAssignment, f: usize) -> (Vec<NodeId>, Vec<usize>) {
    let mut sources = Vec::with_capacity(a.k() * f);
    let mut tokens = Vec::with_capacity(a.k() * f);
    for (t, hs) in a.holders.iter().enumerate() {
        for j in 0..f {
            sources.push(hs[j % hs.len()]);
            tokens.push(t);
        }
    }
    (sources, tokens)
}

/// Places `f` copies of every token at walk destinations, then broadcasts each
/// token from all its holders for `broadcast_rounds` rounds, one token at a time.
pub fn k_gossip_rw(
    engine: &mut Engine,
    assignment: &TokenAssignment,
    params: &GossipParams,
    walk: &WalkParams,
) -> Result<GossipOutcome, GossipError> {
    let n = engine.n();
    let start = engine.round();
    let mut coverage = Coverage::from_assignment(n, assignment);
    if params.f >= n {
        // As many copies as nodes: every node is seeded directly.
        coverage
            .held
            .iter_mut()
            .for_each(|row| row.iter_mut().for_each(|b| *b = true));
    } else {
        let (sources, tokens) = walk_sources(assignment, params.f);
        let out = many_random_walks(engine, &sources, walk)?;
        for (w, &t) in out.walks.iter().zip(&tokens) {
            coverage.held[w.destination.index()][t] = true;
        }
    }
    let placement_rounds = engine.round() - start;
    engine.set_encoding(Encoding::new(n).with_tokens(assignment.k()));
    for t in 0..assignment.k() {
        let spec = FloodSpec {
            payload: Payload::Gossip { token: t as u32 },
            sources: coverage.holders(t),
        };
        let out = engine.flood_rounds(std::slice::from_ref(&spec), params.broadcast_rounds)?;
        for (v, at) in out[0].informed_at.iter().enumerate() {
            if at.is_some() {
                coverage.held[v][t] = true;
            }
        }
    }
    Ok(GossipOutcome {
        rounds: engine.round() - start,
        placement_rounds,
        broadcast_rounds: engine.round() - start - placement_rounds,
        coverage,
    })
}

/// Floods each token in turn from its holders until every node has it.
pub fn k_gossip_trivial(
    engine: &mut Engine,
    assignment: &TokenAssignment,
) -> Result<GossipOutcome, GossipError> {
    let n = engine.n();
    let start = engine.round();
    engine.set_encoding(Encoding::new(n).with_tokens(assignment.k()));
    let mut coverage = Coverage::from_assignment(n, assignment);
    for t in 0..assignment.k() {
        let spec = FloodSpec {
            payload: Payload::Gossip { token: t as u32 },
            sources: assignment.holders[t].clone(),
        };
        let (out, _) = engine.flood_until(std::slice::from_ref(&spec), n as u64 - 1)?;
        for (v, at) in out[0].informed_at.iter().enumerate() {
            coverage.held[v][t] = at.is_some();
        }
    }
    assert!(
        coverage.is_full(),
        "sequential flooding always completes on connected snapshots"
    );
    Ok(GossipOutcome {
        rounds: engine.round() - start,
        placement_rounds: 0,
        broadcast_rounds: engine.round() - start,
        coverage,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Rw,
    Trivial,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Winner::Rw => "rw",
            Winner::Trivial => "trivial",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaceReport {
    pub rounds_rw: u64,
    pub rounds_trivial: u64,
    pub coverage_rw: bool,
    pub winner: Winner,
    /// Rounds until the first algorithm stops.
    pub rounds: u64,
}

/// Runs both algorithms on independent engines over the same schedule; ties go to the trivial one.
pub fn k_gossip_race(
    schedule: Arc<GraphSchedule>,
    config: SimConfig,
    assignment: &TokenAssignment,
    params: &GossipParams,
    walk: &WalkParams,
) -> Result<RaceReport, GossipError> {
    let mut rw_engine = Engine::new(schedule.clone(), config.clone());
    let rw = k_gossip_rw(&mut rw_engine, assignment, params, walk)?;
    let mut trivial_engine = Engine::new(schedule, config);
    let trivial = k_gossip_trivial(&mut trivial_engine, assignment)?;
    let winner = if rw.rounds < trivial.rounds {
        Winner::Rw
    } else {
        Winner::Trivial
    };
    Ok(RaceReport {
        rounds_rw: rw.rounds,
        rounds_trivial: trivial.rounds,
        coverage_rw: rw.coverage.is_full(),
        winner,
        rounds: rw.rounds.min(trivial.rounds),
    })
}
