//! Random walks over an evolving graph: naive token walks, coupon distribution,
//! stitched single walks, many walks and the lazy stepper.

pub mod many;
pub mod naive;
pub mod phase1;
pub mod stats;
pub mod stitch;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congest::SimError;
use crate::graph::{NodeId, Round};

pub use many::{many_random_walks, ManyWalks, WalkCase};
pub use naive::{concurrent_naive_walks, naive_walk};
pub use phase1::{phase1_distribute, Coupon, CouponPlacement};
pub use stats::{connector_bound, visit_stats, visits_bound, VisitStats};
pub use stitch::{sample_coupon, single_random_walk, stitch_walk, Stitcher};

#[derive(Debug, Error)]
pub enum WalkError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("node {node} has degree {degree} above d_max = {d_max}")]
    DegreeAboveMax {
        node: NodeId,
        degree: usize,
        d_max: usize,
    },
}

/// How a walk picks its next position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stepper {
    /// Move to a uniform neighbor.
    #[default]
    Simple,
    /// Move to each neighbor with probability `1 / (d_max + 1)`, stay otherwise.
    Lazy { d_max: usize },
}

impl Stepper {
    /// Next position from `u`; `None` means the walk stays put this step.
    pub fn step<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        u: NodeId,
        nbrs: &[NodeId],
    ) -> Result<Option<NodeId>, WalkError> {
        match *self {
            Stepper::Simple => Ok(Some(nbrs[rng.gen_range(0..nbrs.len())])),
            Stepper::Lazy { d_max } => {
                if nbrs.len() > d_max {
                    return Err(WalkError::DegreeAboveMax {
                        node: u,
                        degree: nbrs.len(),
                        d_max,
                    });
                }
                let x = rng.gen_range(0..=d_max);
                Ok(nbrs.get(x).copied())
            }
        }
    }
}

/// `λ + r` is drawn from `[λ, 2λ − 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub tau: u64,
    /// Explicit short-walk length; derived from `lambda_c` when absent.
    pub lambda_walk: Option<u64>,
    pub lambda_c: f64,
    pub stepper: Stepper,
}

impl WalkParams {
    pub fn new(tau: u64) -> Self {
        Self {
            tau,
            lambda_walk: None,
            lambda_c: 1.0,
            stepper: Stepper::Simple,
        }
    }

    pub fn with_lambda(mut self, lambda_walk: u64) -> Self {
        self.lambda_walk = Some(lambda_walk);
        self
    }

    pub fn with_lambda_c(mut self, lambda_c: f64) -> Self {
        self.lambda_c = lambda_c;
        self
    }

    pub fn with_stepper(mut self, stepper: Stepper) -> Self {
        self.stepper = stepper;
        self
    }

    /// `⌈lambda_c · √(k τ Φ)⌉`, at least 1, unless set explicitly.
    pub fn lambda_for(&self, k: usize, phi: u64) -> u64 {
        self.lambda_walk
            .unwrap_or_else(|| {
                (self.lambda_c * ((k as f64) * (self.tau as f64) * (phi as f64)).sqrt()).ceil()
                    as u64
            })
            .max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    /// A Phase-1 coupon walk.
    Stitched,
    /// Live steps taken because the connector had no unused coupons.
    Fallback,
    /// Live steps finishing the walk.
    Naive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkResult {
    pub source: NodeId,
    pub destination: NodeId,
    /// Rounds consumed by this walk, including Phase 1 when it ran for this walk alone.
    pub rounds_used: u64,
    /// The source followed by the endpoint of every stitched or fallback segment.
    pub connectors: Vec<NodeId>,
    /// Snapshot round used by each step.
    pub step_rounds: Vec<Round>,
    /// Position after each step, starting with the source.
    pub path: Vec<NodeId>,
    pub segments: Vec<Segment>,
    pub fallbacks: u64,
}

impl WalkResult {
    pub fn at_source(source: NodeId) -> Self {
        Self {
            source,
            destination: source,
            rounds_used: 0,
            connectors: vec![source],
            step_rounds: Vec::new(),
            path: vec![source],
            segments: Vec::new(),
            fallbacks: 0,
        }
    }

    pub fn length(&self) -> u64 {
        self.step_rounds.len() as u64
    }

    pub fn trace(&self) -> WalkTrace {
        WalkTrace {
            source: self.source,
            destination: self.destination,
            connectors: self.connectors.clone(),
            segment_lengths: self.segments.iter().map(|s| s.length).collect(),
            fallbacks: self.fallbacks,
            rounds_used: self.rounds_used,
        }
    }
}

/// One line of the walk trace export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub source: NodeId,
    pub destination: NodeId,
    pub connectors: Vec<NodeId>,
    pub segment_lengths: Vec<u64>,
    pub fallbacks: u64,
    pub rounds_used: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_defaults() {
        let p = WalkParams::new(64);
        assert_eq!(p.lambda_for(1, 4), 16);
        assert_eq!(p.lambda_for(8, 1), 23);
        assert_eq!(p.with_lambda(3).lambda_for(8, 1), 3);
        assert_eq!(WalkParams::new(0).lambda_for(1, 1), 1);
    }
}
