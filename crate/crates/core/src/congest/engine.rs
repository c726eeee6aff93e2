//! Lock-step round execution with per-edge bandwidth accounting.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use super::config::{CongestionPolicy, SimConfig};
use super::log::{RoundLog, RoundRecord};
use super::message::{Encoding, Envelope, Payload};
use crate::graph::{GraphSchedule, GraphSnapshot, NodeId, Round, ScheduleError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("congestion in round {round} on edge {from}->{to}: {bits} bits exceed B = {limit}")]
    Congestion {
        round: Round,
        from: NodeId,
        to: NodeId,
        bits: u64,
        limit: u64,
    },
    #[error("round limit of {max_rounds} rounds exceeded")]
    Timeout { max_rounds: u64 },
    #[error("round {round}: {from} and {to} are not adjacent")]
    NotAnEdge {
        round: Round,
        from: NodeId,
        to: NodeId,
    },
    #[error("a {bits}-bit message cannot fit in B = {limit} bits")]
    MessageTooLarge { bits: u64, limit: u64 },
    #[error("flood stalled in round {round} with {informed} of {n} nodes informed")]
    FloodStalled {
        round: Round,
        informed: usize,
        n: usize,
    },
    #[error("flood budget of {budget} rounds ended with {informed} of {n} nodes informed; phi is too small")]
    FloodBudgetExceeded {
        budget: u64,
        informed: usize,
        n: usize,
    },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Messages that crossed an edge in one round, and queued ones returned to their sender.
#[derive(Clone, Debug, Default)]
pub struct Exchange {
    pub round: Round,
    pub delivered: Vec<Envelope>,
    pub bounced: Vec<Envelope>,
}

/// One token flooded from a set of initial holders.
#[derive(Clone, Debug)]
pub struct FloodSpec {
    pub payload: Payload,
    pub sources: Vec<NodeId>,
}

/// Round in which each node first held the payload (`Some(start - 1)` for sources).
#[derive(Clone, Debug)]
pub struct FloodOutcome {
    pub informed_at: Vec<Option<Round>>,
}

impl FloodOutcome {
    pub fn informed(&self) -> usize {
        self.informed_at.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.informed_at.iter().all(Option::is_some)
    }
}

/// Dense per-round load table over directed edges.
#[derive(Debug)]
struct EdgeLoad {
    n: usize,
    bits: Vec<u64>,
    msgs: Vec<u64>,
    touched: Vec<usize>,
}

impl EdgeLoad {
    fn new(n: usize) -> Self {
        Self {
            n,
            bits: vec![0; n * n],
            msgs: vec![0; n * n],
            touched: Vec::new(),
        }
    }

    fn add(&mut self, from: NodeId, to: NodeId, bits: u64) -> u64 {
        let i = from.index() * self.n + to.index();
        if self.msgs[i] == 0 {
            self.touched.push(i);
        }
        self.msgs[i] += 1;
        self.bits[i] += bits;
        self.bits[i]
    }

    /// Folds the round into a record and clears the table.
    fn finish(&mut self, t: Round, record_edges: bool) -> RoundRecord {
        let mut rec = RoundRecord {
            t,
            ..Default::default()
        };
        let mut edges = record_edges.then(Vec::new);
        self.touched.sort_unstable();
        for &i in &self.touched {
            rec.msgs += self.msgs[i];
            rec.bits += self.bits[i];
            rec.max_edge_bits = rec.max_edge_bits.max(self.bits[i]);
            rec.max_edge_msgs = rec.max_edge_msgs.max(self.msgs[i]);
            if let Some(e) = edges.as_mut() {
                e.push((
                    NodeId::from(i / self.n),
                    NodeId::from(i % self.n),
                    self.msgs[i],
                ));
            }
            self.bits[i] = 0;
            self.msgs[i] = 0;
        }
        self.touched.clear();
        rec.edges = edges;
        rec
    }
}

/// A node's behavior under [`Engine::run`].
pub trait NodeProgram {
    type Output;

    /// Messages to send in `round`, given this round's neighbors.
    fn send(&mut self, round: Round, node: NodeId, neighbors: &[NodeId], out: &mut Vec<Envelope>);
    /// Called at the end of `round` for each message addressed to this node.
    fn receive(&mut self, round: Round, msg: &Envelope);
    fn halted(&self) -> bool;
    fn output(&self) -> Self::Output;
}

#[derive(Debug)]
pub struct Engine {
    schedule: Arc<GraphSchedule>,
    config: SimConfig,
    encoding: Encoding,
    round: Round,
    log: RoundLog,
    queues: BTreeMap<(NodeId, NodeId), VecDeque<Envelope>>,
    load: EdgeLoad,
}

impl Engine {
    pub fn new(schedule: Arc<GraphSchedule>, config: SimConfig) -> Self {
        let n = schedule.n();
        Self {
            encoding: Encoding::new(n),
            load: EdgeLoad::new(n),
            schedule,
            config,
            round: 0,
            log: RoundLog::default(),
            queues: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.schedule.n()
    }

    /// Rounds completed so far.
    pub fn round(&self) -> Round {
        self.round
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn schedule(&self) -> &Arc<GraphSchedule> {
        &self.schedule
    }

    pub fn encoding(&self) -> &Encoding {
        &self.encoding
    }

    pub fn set_encoding(&mut self, encoding: Encoding) {
        self.encoding = encoding;
    }

    pub fn log(&self) -> &RoundLog {
        &self.log
    }

    pub fn into_log(self) -> RoundLog {
        self.log
    }

    /// Snapshot of the round about to run.
    pub fn next_snapshot(&self) -> Result<GraphSnapshot, SimError> {
        Ok(self.schedule.snapshot_at(self.round + 1)?)
    }

    /// Messages still waiting in edge queues.
    pub fn pending(&self) -> usize {
        self.queues.values().map(VecDeque::len).sum()
    }

    fn begin_round(&self) -> Result<(Round, GraphSnapshot), SimError> {
        let t = self.round + 1;
        if t > self.config.max_rounds {
            return Err(SimError::Timeout {
                max_rounds: self.config.max_rounds,
            });
        }
        Ok((t, self.schedule.snapshot_at(t)?))
    }

    fn end_round(&mut self, t: Round) {
        let rec = self.load.finish(t, self.config.record_edges);
        self.log.records.push(rec);
        self.round = t;
    }

    fn size_of(&self, payload: &Payload) -> Result<u64, SimError> {
        let bits = payload.bit_size(&self.encoding) as u64;
        if bits > self.config.bandwidth_bits {
            return Err(SimError::MessageTooLarge {
                bits,
                limit: self.config.bandwidth_bits,
            });
        }
        Ok(bits)
    }

    /// Runs one round in which each envelope is sent over its edge.
    pub fn exchange(&mut self, sends: Vec<Envelope>) -> Result<Exchange, SimError> {
        let (t, g) = self.begin_round()?;
        let limit = self.config.bandwidth_bits;
        for e in &sends {
            if !g.has_edge(e.from, e.to) {
                return Err(SimError::NotAnEdge {
                    round: t,
                    from: e.from,
                    to: e.to,
                });
            }
            self.size_of(&e.payload)?;
        }
        let mut out = Exchange {
            round: t,
            ..Default::default()
        };
        match self.config.policy {
            CongestionPolicy::Strict => {
                for e in &sends {
                    let bits =
                        self.load
                            .add(e.from, e.to, e.payload.bit_size(&self.encoding) as u64);
                    if bits > limit {
                        return Err(SimError::Congestion {
                            round: t,
                            from: e.from,
                            to: e.to,
                            bits,
                            limit,
                        });
                    }
                }
                out.delivered = sends;
            }
            CongestionPolicy::Queue => {
                for e in sends {
                    self.queues.entry((e.from, e.to)).or_default().push_back(e);
                }
                let enc = self.encoding;
                for (&(from, to), queue) in self.queues.iter_mut() {
                    if !g.has_edge(from, to) {
                        out.bounced.extend(queue.drain(..));
                        continue;
                    }
                    let mut used = 0;
                    while let Some(front) = queue.front() {
                        let bits = front.payload.bit_size(&enc) as u64;
                        if used + bits > limit {
                            break;
                        }
                        used += bits;
                        self.load.add(from, to, bits);
                        out.delivered.extend(queue.pop_front());
                    }
                    if !queue.is_empty() {
                        self.log.congestion_events += 1;
                    }
                }
                self.queues.retain(|_, q| !q.is_empty());
            }
        }
        self.end_round(t);
        Ok(out)
    }

    /// Runs `rounds` rounds with no new sends.
    pub fn idle(&mut self, rounds: u64) -> Result<Vec<Exchange>, SimError> {
        (0..rounds).map(|_| self.exchange(Vec::new())).collect()
    }

    /// Floods every spec simultaneously for exactly `rounds` rounds.
    ///
    /// Each informed node sends the payload to all current neighbors every round.
    /// Every flood that is not yet complete must inform a new node each round.
    pub fn flood_rounds(
        &mut self,
        floods: &[FloodSpec],
        rounds: u64,
    ) -> Result<Vec<FloodOutcome>, SimError> {
        self.flood_inner(floods, rounds, false).map(|(o, _)| o)
    }

    /// Floods one payload from `source` for exactly `budget` rounds; every node must be informed.
    pub fn flood(
        &mut self,
        payload: Payload,
        source: NodeId,
        budget: u64,
    ) -> Result<FloodOutcome, SimError> {
        let spec = FloodSpec {
            payload,
            sources: vec![source],
        };
        let mut out = self.flood_rounds(std::slice::from_ref(&spec), budget)?;
        let outcome = out.pop().expect("one flood");
        if !outcome.is_complete() {
            return Err(SimError::FloodBudgetExceeded {
                budget,
                informed: outcome.informed(),
                n: self.n(),
            });
        }
        Ok(outcome)
    }

    /// Floods until every flood is complete or `cap` rounds pass; returns the rounds used.
    pub fn flood_until(
        &mut self,
        floods: &[FloodSpec],
        cap: u64,
    ) -> Result<(Vec<FloodOutcome>, u64), SimError> {
        self.flood_inner(floods, cap, true)
    }

    fn flood_inner(
        &mut self,
        floods: &[FloodSpec],
        rounds: u64,
        stop_when_complete: bool,
    ) -> Result<(Vec<FloodOutcome>, u64), SimError> {
        debug_assert_eq!(self.pending(), 0, "floods run on idle edges");
        let n = self.n();
        let start = self.round;
        let mut informed: Vec<Vec<bool>> = Vec::with_capacity(floods.len());
        let mut outcomes: Vec<FloodOutcome> = Vec::with_capacity(floods.len());
        let mut counts = Vec::with_capacity(floods.len());
        let mut bits = Vec::with_capacity(floods.len());
        for f in floods {
            let mut inf = vec![false; n];
            let mut at = vec![None; n];
            for s in &f.sources {
                inf[s.index()] = true;
                at[s.index()] = Some(start);
            }
            counts.push(inf.iter().filter(|&&b| b).count());
            informed.push(inf);
            outcomes.push(FloodOutcome { informed_at: at });
            bits.push(self.size_of(&f.payload)?);
        }
        let limit = self.config.bandwidth_bits;
        let mut used = 0;
        while used < rounds {
            if stop_when_complete && counts.iter().all(|&c| c == n) {
                break;
            }
            let (t, g) = self.begin_round()?;
            for (i, inf) in informed.iter_mut().enumerate() {
                let mut newly = Vec::new();
                for u in 0..n {
                    if !inf[u] {
                        continue;
                    }
                    let u = NodeId::from(u);
                    for &v in g.neighbors(u) {
                        let b = self.load.add(u, v, bits[i]);
                        if b > limit {
                            return Err(SimError::Congestion {
                                round: t,
                                from: u,
                                to: v,
                                bits: b,
                                limit,
                            });
                        }
                        if !inf[v.index()] {
                            newly.push(v);
                        }
                    }
                }
                let before = counts[i];
                for v in newly {
                    if !inf[v.index()] {
                        inf[v.index()] = true;
                        outcomes[i].informed_at[v.index()] = Some(t);
                        counts[i] += 1;
                    }
                }
                if before < n && counts[i] == before {
                    return Err(SimError::FloodStalled {
                        round: t,
                        informed: before,
                        n,
                    });
                }
            }
            self.end_round(t);
            used += 1;
        }
        Ok((outcomes, used))
    }

    /// Drives node programs until all halt (and queues drain) or `max` rounds pass.
    pub fn run<P: NodeProgram>(&mut self, programs: &mut [P], max: u64) -> Result<u64, SimError> {
        assert_eq!(programs.len(), self.n(), "one program per node");
        let mut used = 0;
        let mut sends = Vec::new();
        while used < max && !(programs.iter().all(P::halted) && self.pending() == 0) {
            let g = self.next_snapshot()?;
            for (v, p) in programs.iter_mut().enumerate() {
                if !p.halted() {
                    let node = NodeId::from(v);
                    p.send(self.round + 1, node, g.neighbors(node), &mut sends);
                }
            }
            let ex = self.exchange(std::mem::take(&mut sends))?;
            for m in &ex.delivered {
                programs[m.to.index()].receive(ex.round, m);
            }
            used += 1;
        }
        Ok(used)
    }
}

/// Runs `programs` over a fresh engine; returns each node's output and the log.
pub fn run<P: NodeProgram>(
    schedule: Arc<GraphSchedule>,
    programs: &mut [P],
    config: SimConfig,
    max: u64,
) -> Result<(Vec<P::Output>, RoundLog), SimError> {
    let mut engine = Engine::new(schedule, config);
    engine.run(programs, max)?;
    Ok((programs.iter().map(P::output).collect(), engine.into_log()))
}
