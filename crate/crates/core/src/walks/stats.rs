//! Visit and connector counts over walk traces.

use serde::{Deserialize, Serialize};

use super::WalkResult;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitStats {
    /// Positions held by any walk at any step, including the start, per node.
    pub visits: Vec<u64>,
    /// Times each node ended a stitched or fallback segment.
    pub connectors: Vec<u64>,
}

impl VisitStats {
    pub fn max_visits(&self) -> u64 {
        self.visits.iter().copied().max().unwrap_or(0)
    }
}

pub fn visit_stats<'a, I>(n: usize, walks: I) -> VisitStats
where
    I: IntoIterator<Item = &'a WalkResult>,
{
    let mut stats = VisitStats {
        visits: vec![0; n],
        connectors: vec![0; n],
    };
    for w in walks {
        for v in &w.path {
            stats.visits[v.index()] += 1;
        }
        for v in &w.connectors[1..] {
            stats.connectors[v.index()] += 1;
        }
    }
    stats
}

/// `32 d √(kℓ + 1) ln n + k`.
pub fn visits_bound(n: usize, d: usize, k: usize, len: u64) -> f64 {
    32.0 * d as f64 * ((k as f64) * (len as f64) + 1.0).sqrt() * (n as f64).ln() + k as f64
}

/// `t (ln n)² / λ`.
pub fn connector_bound(n: usize, visits: u64, lambda_walk: u64) -> f64 {
    let ln = (n as f64).ln();
    visits as f64 * ln * ln / lambda_walk as f64
}
