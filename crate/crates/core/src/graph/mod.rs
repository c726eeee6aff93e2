//! Evolving graphs: snapshots, adversary schedules and temporal reachability.

pub mod generators;
pub mod schedule;
pub mod snapshot;
pub mod temporal;

pub use generators::{circulant, complete, cycle, named, petersen, random_regular, star};
pub use schedule::{Generator, GraphSchedule};
pub use snapshot::{validate_snapshot, Graph, GraphSnapshot, NodeId, Round, ValidationReport};
pub use temporal::{dynamic_diameter, flooding_time};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    MultiEdge(usize, usize),
    #[error("no simple {d}-regular graph on {n} nodes")]
    InfeasibleRegular { n: usize, d: usize },
    #[error("no connected non-bipartite {d}-regular graph on {n} nodes after {retries} pairings")]
    RetriesExhausted { n: usize, d: usize, retries: usize },
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("rounds are 1-indexed; round 0 does not exist")]
    RoundZero,
    #[error("cannot build snapshot for round {round}: {source}")]
    Generation { round: Round, source: GraphError },
    #[error("round {round} is past the last scheduled round {last}")]
    RoundOutOfRange { round: Round, last: Round },
    #[error("schedule has no snapshots")]
    Empty,
    #[error("snapshot has {found} nodes, expected {expected}")]
    NodeCountMismatch { expected: usize, found: usize },
    #[error("snapshot {index} is disconnected")]
    Disconnected { index: usize },
    #[error("bad schedule spec: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
