use serde::{Deserialize, Serialize};

use super::message::bits_for;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CongestionPolicy {
    /// Exceeding the per-edge budget is an error.
    #[default]
    Strict,
    /// Excess messages wait in a per-edge FIFO for later rounds.
    Queue,
}

impl std::str::FromStr for CongestionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Self::Strict),
            "queue" => Ok(Self::Queue),
            other => Err(format!("unknown congestion policy {other:?}")),
        }
    }
}

impl std::fmt::Display for CongestionPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Strict => "strict",
            Self::Queue => "queue",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Bits per directed edge per round.
    pub bandwidth_bits: u64,
    pub policy: CongestionPolicy,
    /// Algorithm seed; the schedule carries its own.
    pub seed: u64,
    /// Dynamic diameter, used as the flood budget.
    pub phi: u64,
    pub max_rounds: u64,
    /// Keep per-directed-edge message counts for every round.
    pub record_edges: bool,
}

/// `4 ⌈log₂ n⌉²`.
pub fn default_bandwidth(n: usize) -> u64 {
    let b = bits_for(n as u64) as u64;
    4 * b * b
}

impl SimConfig {
    pub fn new(n: usize, phi: u64, seed: u64) -> Self {
        Self {
            bandwidth_bits: default_bandwidth(n),
            policy: CongestionPolicy::Strict,
            seed,
            phi,
            max_rounds: u64::MAX,
            record_edges: false,
        }
    }

    pub fn with_policy(mut self, policy: CongestionPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_bandwidth(mut self, bits: u64) -> Self {
        self.bandwidth_bits = bits;
        self
    }

    pub fn with_max_rounds(mut self, rounds: u64) -> Self {
        self.max_rounds = rounds;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bandwidth_values() {
        assert_eq!(default_bandwidth(16), 64);
        assert_eq!(default_bandwidth(64), 144);
        assert_eq!(default_bandwidth(4), 16);
        assert_eq!(default_bandwidth(9), 64);
    }
}
