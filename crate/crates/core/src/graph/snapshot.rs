use std::collections::VecDeque;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Round number. Rounds are 1-indexed; round `t` communicates over `G_t`.
pub type Round = u64;

/// Index of a node in the fixed node set `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A simple undirected graph on `n` nodes with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange { node: u.max(v), n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            list.push((NodeId::from(a), NodeId::from(b)));
            adj[a].push(NodeId::from(b));
            adj[b].push(NodeId::from(a));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::MultiEdge(w[0].0.index(), w[0].1.index()));
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        Ok(Self {
            n,
            adj,
            edges: list,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u.index() < self.n && self.adj[u.index()].binary_search(&v).is_ok()
    }

    /// Common degree if every node has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first()?.len();
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Hop distances from `src`; `None` for unreachable nodes.
    pub fn bfs(&self, src: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[src.index()] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap_or(0);
            for &w in self.neighbors(u) {
                if dist[w.index()].is_none() {
                    dist[w.index()] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(NodeId(0)).iter().all(Option::is_some)
    }

    /// Exact bipartiteness by 2-coloring every component.
    pub fn is_bipartite(&self) -> bool {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap_or(false);
                for &w in &self.adj[u] {
                    match color[w.index()] {
                        None => {
                            color[w.index()] = Some(!cu);
                            queue.push_back(w.index());
                        }
                        Some(cw) if cw == cu => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    pub fn eccentricity(&self, v: NodeId) -> Option<usize> {
        self.bfs(v)
            .into_iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Graph diameter by all-pairs BFS; `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        (0..self.n).try_fold(0, |acc, v| {
            self.eccentricity(NodeId::from(v)).map(|e| acc.max(e))
        })
    }

    /// The graph with node `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        debug_assert_eq!(perm.len(), self.n);
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u.index()], perm[v.index()]));
        Graph::from_edges(self.n, edges).expect("relabeling preserves simplicity")
    }
}

/// Outcome of checking a snapshot against the model assumptions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub regular_degree: Option<usize>,
    pub bipartite: bool,
    /// Degree the caller expected, if any.
    pub declared_degree: Option<usize>,
}

impl ValidationReport {
    /// Connected, non-bipartite and (when declared) exactly `d`-regular.
    pub fn is_valid(&self) -> bool {
        self.connected
            && !self.bipartite
            && self
                .declared_degree
                .is_none_or(|d| self.regular_degree == Some(d))
    }
}

pub fn validate_snapshot(g: &Graph, declared_degree: Option<usize>) -> ValidationReport {
    ValidationReport {
        connected: g.is_connected(),
        regular_degree: g.regular_degree(),
        bipartite: g.is_bipartite(),
        declared_degree,
    }
}

/// The graph in force during one round.
#[derive(Clone, Debug)]
pub struct GraphSnapshot {
    pub round: Round,
    pub graph: Arc<Graph>,
}

impl Deref for GraphSnapshot {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.graph
    }
}
