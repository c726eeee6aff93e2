//! Per-round communication accounting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::graph::{NodeId, Round};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: Round,
    pub msgs: u64,
    pub bits: u64,
    pub max_edge_bits: u64,
    pub max_edge_msgs: u64,
    /// Messages per directed edge, when edge recording is on.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(NodeId, NodeId, u64)>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub total_rounds: u64,
    pub total_msgs: u64,
    pub total_bits: u64,
    pub max_edge_bits: u64,
    pub max_edge_msgs: u64,
    pub congestion_events: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundLog {
    pub records: Vec<RoundRecord>,
    /// Directed edge-rounds where offered load exceeded the budget (queue policy).
    pub congestion_events: u64,
}

#[derive(Serialize)]
struct JsonlRecord {
    t: Round,
    max_edge_bits: u64,
    msgs: u64,
}

impl RoundLog {
    pub fn total_rounds(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn summary(&self) -> RunSummary {
        let mut s = RunSummary {
            total_rounds: self.total_rounds(),
            congestion_events: self.congestion_events,
            ..Default::default()
        };
        for r in &self.records {
            s.total_msgs += r.msgs;
            s.total_bits += r.bits;
            s.max_edge_bits = s.max_edge_bits.max(r.max_edge_bits);
            s.max_edge_msgs = s.max_edge_msgs.max(r.max_edge_msgs);
        }
        s
    }

    /// Largest per-edge message count over rounds `from..=to`.
    pub fn max_edge_msgs_in(&self, from: Round, to: Round) -> u64 {
        self.records
            .iter()
            .filter(|r| r.t >= from && r.t <= to)
            .map(|r| r.max_edge_msgs)
            .max()
            .unwrap_or(0)
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            let line = JsonlRecord {
                t: r.t,
                max_edge_bits: r.max_edge_bits,
                msgs: r.msgs,
            };
            writeln!(out, "{}", serde_json::to_string(&line)?)?;
        }
        Ok(())
    }
}
