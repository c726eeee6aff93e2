//! Decentralized mixing-time estimation from walk endpoint samples.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congest::Engine;
use crate::graph::NodeId;
use crate::spectral::mixing_cap;
use crate::walks::{many_random_walks, WalkError, WalkParams};

/// Closeness parameter of the uniformity test, `1 / 12e`.
pub const EPSILON: f64 = 1.0 / (12.0 * E);

/// Calibrated constant in `K = ⌈c √n ln n⌉`.
pub const SAMPLE_CONSTANT: f64 = 100.0;

#[derive(Debug, Error)]
pub enum MixError {
    #[error("{got} samples are fewer than the {needed} the test needs at n = {n}")]
    TooFewSamples { got: usize, needed: usize, n: usize },
    #[error("no walk length up to {cap} passed the uniformity test")]
    NoPass { cap: u64 },
    #[error(transparent)]
    Walk(#[from] WalkError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityVerdict {
    pub verdict: Verdict,
    /// Collision estimate of `‖X − U‖₂²`.
    pub statistic: f64,
    pub threshold: f64,
    /// L1 distances bounding the two bands the test must separate.
    pub pass_band: f64,
    pub fail_band: f64,
}

/// PASS band: L1 ≤ ε³ / (4 √n ln n).
pub fn pass_band(n: usize, epsilon: f64) -> f64 {
    let n = n as f64;
    epsilon.powi(3) / (4.0 * n.sqrt() * n.ln())
}

/// FAIL band: L1 ≥ 6ε.
pub fn fail_band(epsilon: f64) -> f64 {
    6.0 * epsilon
}

/// Threshold on the squared-L2 statistic: half of `(6ε)² / n`, the least squared
/// L2 distance of any distribution in the FAIL band.
pub fn threshold(n: usize, epsilon: f64) -> f64 {
    fail_band(epsilon).powi(2) / (2.0 * n as f64)
}

/// Samples that put the threshold two standard deviations from the uniform mean.
pub fn min_samples(n: usize, epsilon: f64) -> usize {
    let sd_scale = (2.0 / n as f64).sqrt();
    (2.0 * sd_scale / threshold(n, epsilon)).ceil() as usize
}

/// `max(⌈c √n ln n⌉, min_samples)`.
pub fn default_samples(n: usize, epsilon: f64) -> usize {
    let nf = n as f64;
    ((SAMPLE_CONSTANT * nf.sqrt() * nf.ln()).ceil() as usize).max(min_samples(n, epsilon))
}

/// Collision statistic: fraction of colliding sample pairs minus `1/n`.
pub fn collision_statistic(samples: &[NodeId], n: usize) -> f64 {
    let mut counts = vec![0u64; n];
    for s in samples {
        counts[s.index()] += 1;
    }
    let k = samples.len() as f64;
    let pairs: f64 = counts
        .iter()
        .map(|&c| (c * c.saturating_sub(1)) as f64 / 2.0)
        .sum();
    pairs / (k * (k - 1.0) / 2.0) - 1.0 / n as f64
}

pub fn uniformity_test(
    samples: &[NodeId],
    n: usize,
    epsilon: f64,
) -> Result<UniformityVerdict, MixError> {
    let needed = min_samples(n, epsilon);
    if samples.len() < needed {
        return Err(MixError::TooFewSamples {
            got: samples.len(),
            needed,
            n,
        });
    }
    let statistic = collision_statistic(samples, n);
    let threshold = threshold(n, epsilon);
    Ok(UniformityVerdict {
        verdict: if statistic <= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        statistic,
        threshold,
        pass_band: pass_band(n, epsilon),
        fail_band: fail_band(epsilon),
    })
}

/// Endpoints of `k` walks of length `len`, all from `source`.
pub fn sample_endpoints(
    engine: &mut Engine,
    source: NodeId,
    len: u64,
    k: usize,
    walk: &WalkParams,
) -> Result<Vec<NodeId>, MixError> {
    let params = WalkParams { tau: len, ..*walk };
    let out = many_random_walks(engine, &vec![source; k], &params)?;
    Ok(out.walks.iter().map(|w| w.destination).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub len: u64,
    pub verdict: Verdict,
    pub statistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingEstimate {
    pub source: NodeId,
    #[serde(rename = "K")]
    pub samples: usize,
    pub epsilon: f64,
    pub probes: Vec<Probe>,
    pub tau_tilde: u64,
    /// Longest failing and shortest passing length; consecutive integers.
    pub bracket: (u64, u64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_bracket: Option<(u64, u64)>,
    pub total_rounds: u64,
}

/// Doubles the walk length until the endpoints pass, then binary-searches the
/// last doubling interval for the shortest passing length.
pub fn estimate_mixing_time(
    engine: &mut Engine,
    source: NodeId,
    epsilon: f64,
    samples: usize,
    walk: &WalkParams,
) -> Result<MixingEstimate, MixError> {
    let n = engine.n();
    let cap = mixing_cap(n);
    let start = engine.round();
    let mut probes = Vec::new();
    let mut probe = |engine: &mut Engine, len: u64| -> Result<Verdict, MixError> {
        let ends = sample_endpoints(engine, source, len, samples, walk)?;
        let v = uniformity_test(&ends, n, epsilon)?;
        probes.push(Probe {
            len,
            verdict: v.verdict,
            statistic: v.statistic,
        });
        Ok(v.verdict)
    };
    let mut hi = 1;
    while probe(engine, hi)? == Verdict::Fail {
        if hi >= cap {
            return Err(MixError::NoPass { cap });
        }
        hi = (2 * hi).min(cap);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match probe(engine, mid)? {
            Verdict::Pass => hi = mid,
            Verdict::Fail => lo = mid,
        }
    }
    Ok(MixingEstimate {
        source,
        samples,
        epsilon,
        probes,
        tau_tilde: hi,
        bracket: (lo, hi),
        oracle_bracket: None,
        total_rounds: engine.round() - start,
    })
}

/// `1 / (6912 e √n ln n)`.
pub fn epsilon_prime(n: usize) -> f64 {
    let n = n as f64;
    1.0 / (6912.0 * E * n.sqrt() * n.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBounds {
    pub gap: (f64, f64),
    pub conductance: (f64, f64),
}

/// Spectral gap in `[1/τ̃, ln n / τ̃]` (clamped to `(0, 1]`) and conductance in
/// `[gap_lo, √gap_hi]`, with unit constants.
pub fn spectral_gap_bounds(tau_tilde: u64, n: usize) -> GapBounds {
    assert!(tau_tilde >= 1, "estimate must be positive");
    let t = tau_tilde as f64;
    let lo = (1.0 / t).min(1.0);
    let hi = ((n as f64).ln() / t).min(1.0).max(lo);
    GapBounds {
        gap: (lo, hi),
        conductance: (lo, hi.sqrt()),
    }
}
