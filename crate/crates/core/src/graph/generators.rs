//! Named graphs and the random regular generator.

use rand::seq::SliceRandom;
use rand::Rng;

use super::snapshot::{validate_snapshot, Graph};
use super::GraphError;

/// Rejection cap for the pairing model.
pub const MAX_PAIRING_RETRIES: usize = 10_000;

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("complete graph is simple")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 nodes");
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
}

/// Star with one center (node 0) and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star is simple")
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::from_edges(10, outer.chain(spokes).chain(inner)).expect("petersen is simple")
}

/// Circulant graph: `i ~ i ± s (mod n)` for each offset `s`.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for i in 0..n {
        for &s in offsets {
            let j = (i + s) % n;
            if i != j {
                edges.push((i.min(j), i.max(j)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::from_edges(n, edges)
}

/// Uniform simple `d`-regular graph by the pairing (configuration) model.
///
/// Pairings with a self-loop or multi-edge are discarded, as are graphs that are
/// disconnected or bipartite.
pub fn random_regular<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    if d >= n || (n * d) % 2 == 1 || d == 0 {
        return Err(GraphError::InfeasibleRegular { n, d });
    }
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut seen = vec![false; n * n];
    'attempt: for _ in 0..MAX_PAIRING_RETRIES {
        points.shuffle(rng);
        seen.iter_mut().for_each(|s| *s = false);
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || seen[u * n + v] {
                continue 'attempt;
            }
            seen[u * n + v] = true;
            edges.push((u, v));
        }
        let g = Graph::from_edges(n, edges)?;
        if validate_snapshot(&g, Some(d)).is_valid() {
            return Ok(g);
        }
    }
    Err(GraphError::RetriesExhausted {
        n,
        d,
        retries: MAX_PAIRING_RETRIES,
    })
}

/// Resolves a graph name: `K<n>`, `C<n>`, `star<k>`, `petersen`.
pub fn named(name: &str) -> Option<Graph> {
    let name = name.trim();
    if name.eq_ignore_ascii_case("petersen") {
        return Some(petersen());
    }
    if let Some(rest) = name.strip_prefix("star") {
        return rest.parse().ok().filter(|&k: &usize| k >= 1).map(star);
    }
    if let Some(rest) = name.strip_prefix('K') {
        return rest.parse().ok().filter(|&n: &usize| n >= 2).map(complete);
    }
    if let Some(rest) = name.strip_prefix('C') {
        return rest.parse().ok().filter(|&n: &usize| n >= 3).map(cycle);
    }
    None
}
