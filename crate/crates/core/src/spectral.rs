//! Exact dense ground truth for walk distributions, eigenvalues and mixing times.

use std::f64::consts::E;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphSchedule, NodeId, Round, ScheduleError};

/// Largest node count the dense oracle accepts.
pub const MAX_ORACLE_N: usize = 512;

/// Distance threshold defining the mixing time.
pub const MIX_EPS: f64 = 1.0 / (2.0 * E);

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("snapshot is not regular; pass the lazy transition matrix instead")]
    NotRegular,
    #[error("dense oracle supports n <= {MAX_ORACLE_N}, got {0}")]
    TooLarge(usize),
    #[error("distribution is invalid: {0}")]
    InvalidDistribution(String),
    #[error("no t <= {cap} brings the walk within {eps} of uniform")]
    CapExceeded { cap: u64, eps: f64 },
    #[error("node {node} has degree {degree} above d_max = {d_max}")]
    DegreeAboveMax {
        node: usize,
        degree: usize,
        d_max: usize,
    },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// A probability vector over the `n` nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionVector(Vec<f64>);

impl DistributionVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, SpectralError> {
        if entries.is_empty() {
            return Err(SpectralError::InvalidDistribution("empty".into()));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(SpectralError::InvalidDistribution(format!("entry {x}")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(SpectralError::InvalidDistribution(format!("sums to {sum}")));
        }
        Ok(Self(entries))
    }

    pub fn point(n: usize, x: NodeId) -> Self {
        let mut v = vec![0.0; n];
        v[x.index()] = 1.0;
        Self(v)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Empirical distribution of node samples.
    pub fn empirical<I: IntoIterator<Item = NodeId>>(n: usize, samples: I) -> Self {
        let mut v = vec![0.0; n];
        let mut total = 0usize;
        for s in samples {
            v[s.index()] += 1.0;
            total += 1;
        }
        assert!(total > 0, "empirical distribution of zero samples");
        v.iter_mut().for_each(|x| *x /= total as f64);
        Self(v)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn l2_to_uniform(&self) -> f64 {
        let u = 1.0 / self.n() as f64;
        self.0.iter().map(|p| (p - u) * (p - u)).sum::<f64>().sqrt()
    }

    pub fn tv_distance(&self, other: &Self) -> f64 {
        assert_eq!(
            self.n(),
            other.n(),
            "distributions over different node sets"
        );
        0.5 * self
            .0
            .iter()
            .zip(&other.0)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }

    pub fn tv_to_uniform(&self) -> f64 {
        self.tv_distance(&Self::uniform(self.n()))
    }
}

pub fn l2_to_uniform(p: &DistributionVector) -> f64 {
    p.l2_to_uniform()
}

pub fn tv_distance(p: &DistributionVector, q: &DistributionVector) -> f64 {
    p.tv_distance(q)
}

/// Row-stochastic transition matrix of a walk on one snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix(DMatrix<f64>);

fn check_size(n: usize) -> Result<(), SpectralError> {
    if n > MAX_ORACLE_N {
        Err(SpectralError::TooLarge(n))
    } else {
        Ok(())
    }
}

impl TransitionMatrix {
    /// Simple random walk: `P(u, v) = 1 / d(u)` for every edge.
    pub fn simple(g: &Graph) -> Result<Self, SpectralError> {
        let n = g.n();
        check_size(n)?;
        let mut m = DMatrix::zeros(n, n);
        for u in 0..n {
            let nbrs = g.neighbors(NodeId::from(u));
            let w = 1.0 / nbrs.len() as f64;
            for v in nbrs {
                m[(u, v.index())] = w;
            }
        }
        Ok(Self(m))
    }

    /// Lazy walk: move to each neighbor with probability `1 / (d_max + 1)`, stay otherwise.
    pub fn lazy(g: &Graph, d_max: usize) -> Result<Self, SpectralError> {
        let n = g.n();
        check_size(n)?;
        let w = 1.0 / (d_max + 1) as f64;
        let mut m = DMatrix::zeros(n, n);
        for u in 0..n {
            let nbrs = g.neighbors(NodeId::from(u));
            if nbrs.len() > d_max {
                return Err(SpectralError::DegreeAboveMax {
                    node: u,
                    degree: nbrs.len(),
                    d_max,
                });
            }
            for v in nbrs {
                m[(u, v.index())] = w;
            }
            m[(u, u)] = 1.0 - nbrs.len() as f64 * w;
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.0[(u, v)]
    }

    /// Row `u` as a distribution.
    pub fn row(&self, u: NodeId) -> DistributionVector {
        DistributionVector(self.0.row(u.index()).iter().copied().collect())
    }

    /// `self · other`.
    pub fn then(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = DMatrix::identity(self.n(), self.n());
        for _ in 0..k {
            out = &out * &self.0;
        }
        Self(out)
    }

    /// `p · self`.
    pub fn apply(&self, p: &DistributionVector) -> DistributionVector {
        let n = self.n();
        let mut q = vec![0.0; n];
        for (u, &pu) in p.entries().iter().enumerate() {
            if pu != 0.0 {
                for (v, qv) in q.iter_mut().enumerate() {
                    *qv += pu * self.0[(u, v)];
                }
            }
        }
        DistributionVector(q)
    }

    fn max_deviation<F: Fn(usize) -> f64>(n: usize, sum: F) -> f64 {
        (0..n).map(|i| (sum(i) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn is_row_stochastic(&self, tol: f64) -> bool {
        self.0.iter().all(|&x| x >= -tol)
            && Self::max_deviation(self.n(), |i| self.0.row(i).sum()) <= tol
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        self.is_row_stochastic(tol)
            && Self::max_deviation(self.n(), |j| self.0.column(j).sum()) <= tol
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.0 - self.0.transpose()).amax() <= tol
    }
}

pub fn transition_matrix(g: &Graph) -> Result<TransitionMatrix, SpectralError> {
    TransitionMatrix::simple(g)
}

/// One simple-walk step of `p` on `g`, in `O(m)`.
pub fn step(p: &DistributionVector, g: &Graph) -> DistributionVector {
    let mut q = vec![0.0; g.n()];
    for (u, &pu) in p.entries().iter().enumerate() {
        if pu != 0.0 {
            let nbrs = g.neighbors(NodeId::from(u));
            let share = pu / nbrs.len() as f64;
            for v in nbrs {
                q[v.index()] += share;
            }
        }
    }
    DistributionVector(q)
}

/// Walk distribution after `steps` steps starting at round `start`.
pub fn evolve(
    p0: &DistributionVector,
    schedule: &GraphSchedule,
    start: Round,
    steps: u64,
) -> Result<DistributionVector, SpectralError> {
    let mut p = p0.clone();
    for i in 0..steps {
        p = step(&p, &schedule.snapshot_at(start + i)?.graph);
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda2_signed: f64,
    /// `max(λ₂, −λ_n)`.
    pub lambda2_abs: f64,
    pub gap: f64,
}

/// Eigenvalues of a symmetric matrix in descending order.
pub fn symmetric_eigenvalues(m: &TransitionMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.0.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Summary of a symmetric stochastic matrix (simple walk on a regular graph or any lazy walk).
pub fn summarize_symmetric(m: &TransitionMatrix) -> SpectralSummary {
    let ev = symmetric_eigenvalues(m);
    let lambda2_signed = ev.get(1).copied().unwrap_or(0.0);
    let lambda_n = ev.last().copied().unwrap_or(0.0);
    let lambda2_abs = lambda2_signed.max(-lambda_n);
    SpectralSummary {
        lambda2_signed,
        lambda2_abs,
        gap: 1.0 - lambda2_abs,
    }
}

pub fn spectral_summary(g: &Graph) -> Result<SpectralSummary, SpectralError> {
    if g.regular_degree().is_none() {
        return Err(SpectralError::NotRegular);
    }
    Ok(summarize_symmetric(&TransitionMatrix::simple(g)?))
}

/// Search cap for mixing times: `10 n² ln n`.
pub fn mixing_cap(n: usize) -> u64 {
    let n = n.max(2) as f64;
    (10.0 * n * n * n.ln()).ceil() as u64
}

/// Least `t` with `||p_t − u||₂ < eps` for the walk from `source` starting at round 1.
pub fn mixing_time_oracle(
    schedule: &GraphSchedule,
    source: NodeId,
    eps: f64,
) -> Result<u64, SpectralError> {
    assert!(eps > 0.0, "eps must be positive");
    let n = schedule.n();
    let cap = mixing_cap(n);
    let mut p = DistributionVector::point(n, source);
    let mut t = 0;
    while p.l2_to_uniform() >= eps {
        if t >= cap {
            return Err(SpectralError::CapExceeded { cap, eps });
        }
        t += 1;
        p = step(&p, &schedule.snapshot_at(t)?.graph);
    }
    Ok(t)
}

/// Worst-source mixing time of the static walk on `g` at threshold `eps`.
pub fn static_mixing_time(g: &Graph, eps: f64) -> Result<u64, SpectralError> {
    let n = g.n();
    let cap = mixing_cap(n);
    let mut worst = 0;
    for x in 0..n {
        let mut p = DistributionVector::point(n, NodeId::from(x));
        let mut t = 0;
        while p.l2_to_uniform() >= eps {
            if t >= cap {
                return Err(SpectralError::CapExceeded { cap, eps });
            }
            t += 1;
            p = step(&p, g);
        }
        worst = worst.max(t);
    }
    Ok(worst)
}

/// Largest static mixing time among the distinct snapshots in rounds `1..=horizon`.
pub fn dynamic_mixing_bound(
    schedule: &GraphSchedule,
    horizon: Round,
) -> Result<u64, SpectralError> {
    let mut worst = 0;
    for g in schedule.distinct_graphs(horizon)? {
        worst = worst.max(static_mixing_time(&g, MIX_EPS)?);
    }
    Ok(worst)
}

/// Average over `r ∈ [0, λ)` of the product `A(G_1) ⋯ A(G_{λ+r})`.
pub fn segment_matrix(
    schedule: &GraphSchedule,
    lambda_walk: u64,
) -> Result<TransitionMatrix, SpectralError> {
    assert!(
        lambda_walk >= 1,
        "segment length parameter must be positive"
    );
    let n = schedule.n();
    check_size(n)?;
    let mut prod = DMatrix::identity(n, n);
    let mut acc = DMatrix::zeros(n, n);
    for t in 1..=(2 * lambda_walk - 1) {
        prod = &prod * TransitionMatrix::simple(&schedule.snapshot_at(t)?.graph)?.0;
        if t >= lambda_walk {
            acc += &prod;
        }
    }
    Ok(TransitionMatrix(acc / lambda_walk as f64))
}
