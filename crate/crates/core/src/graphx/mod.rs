//! The user-connection graph: retweeter -> author edges, community
//! detection, centrality scores, force-directed layout, and isolation
//! diagnostics.

mod centrality;
mod layout;
mod walktrap;

pub use centrality::{betweenness, hits, pagerank};
pub use layout::{fr_layout, Layout};
pub use walktrap::walktrap;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::Corpus;

/// Default random-walk length for community detection.
pub const DEFAULT_WALK_STEPS: usize = 4;
/// Default PageRank damping factor.
pub const DEFAULT_DAMPING: f64 = 0.85;
/// Conductance below this marks a community as suspicious-isolated.
pub const DEFAULT_ISOLATION_THRESHOLD: f64 = 0.05;

/// Directed weighted retweet graph with a cached undirected projection.
///
/// Edges run retweeter -> author; the undirected projection sums the two
/// directions and backs every algorithm defined on undirected graphs
/// (communities, betweenness, layout).
#[derive(Clone, Debug)]
pub struct UserGraph {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    /// (source, target) -> weight
    edges: BTreeMap<(usize, usize), u64>,
    /// undirected adjacency: vertex -> sorted (neighbor, summed weight)
    undirected: Vec<Vec<(usize, f64)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    EmptyGraph,
    NoEdges,
    SingleCommunity,
    BadPartition(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::EmptyGraph => write!(f, "graph has no vertices"),
            GraphError::NoEdges => write!(f, "graph has no edges"),
            GraphError::SingleCommunity => {
                write!(f, "partition has a single community; no cut is defined")
            }
            GraphError::BadPartition(msg) => write!(f, "bad partition: {msg}"),
        }
    }
}

impl core::error::Error for GraphError {}

impl UserGraph {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&idx) = self.index.get(name) {
            return idx;
        }
        let idx = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), idx);
        idx
    }

    fn empty() -> Self {
        UserGraph {
            names: Vec::new(),
            index: BTreeMap::new(),
            edges: BTreeMap::new(),
            undirected: Vec::new(),
        }
    }

    /// Builds directly from (retweeter, author, weight) triples; self-loops
    /// are dropped. Mostly useful for tests and for re-importing edge lists.
    pub fn from_edges<'a, I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, u64)>,
    {
        let mut graph = UserGraph::empty();
        for (src, dst, weight) in edges {
            if src == dst || weight == 0 {
                continue;
            }
            let s = graph.intern(src);
            let d = graph.intern(dst);
            *graph.edges.entry((s, d)).or_insert(0) += weight;
        }
        graph.build_projection();
        graph
    }

    fn build_projection(&mut self) {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (&(s, d), &w) in &self.edges {
            let key = if s < d { (s, d) } else { (d, s) };
            *acc.entry(key).or_insert(0.0) += w as f64;
        }
        self.undirected = alloc::vec![Vec::new(); self.names.len()];
        for ((a, b), w) in acc {
            self.undirected[a].push((b, w));
            self.undirected[b].push((a, w));
        }
        for nb in self.undirected.iter_mut() {
            nb.sort_unstable_by_key(|&(v, _)| v);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertex_name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Directed (source, target, weight) triples in deterministic order.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(s, d), &w)| (s, d, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted undirected neighbors of `v` with summed weights.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.undirected[v]
    }

    /// Weighted degree in the undirected projection.
    pub fn strength(&self, v: usize) -> f64 {
        self.undirected[v].iter().map(|&(_, w)| w).sum()
    }

    /// Total undirected edge weight.
    pub fn total_weight(&self) -> f64 {
        self.undirected
            .iter()
            .flat_map(|nb| nb.iter().map(|&(_, w)| w))
            .sum::<f64>()
            / 2.0
    }
}

/// One directed edge per (retweeter, author) pair, weight = number of
/// retweets across the corpus; self-retweets dropped; authors appear as
/// vertices even when nobody retweeted them.
pub fn build_user_graph(corpus: &Corpus) -> UserGraph {
    let mut graph = UserGraph::empty();
    for tweet in corpus.tweets() {
        let author = graph.intern(&tweet.author);
        for retweeter in &tweet.retweeters {
            if retweeter == &tweet.author {
                continue;
            }
            let r = graph.intern(retweeter);
            *graph.edges.entry((r, author)).or_insert(0) += 1;
        }
    }
    graph.build_projection();
    graph
}

/// Disjoint community decomposition with its dendrogram.
#[derive(Clone, Debug, PartialEq)]
pub struct CommunityPartition {
    /// vertex -> community id, ids dense from 0
    pub assignment: Vec<usize>,
    /// merge history: (community a, community b, merged-at-step)
    pub merges: Vec<(usize, usize, usize)>,
    /// number of merges applied in the chosen cut
    pub cut_step: usize,
    /// modularity of the chosen cut
    pub modularity: f64,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.assignment.iter().copied().max().map_or(0, |m| m + 1)
    }
}

/// Weighted undirected modularity of an assignment on `graph`.
pub fn modularity(graph: &UserGraph, assignment: &[usize]) -> f64 {
    let n = graph.vertex_count();
    assert_eq!(assignment.len(), n, "assignment length mismatch");
    let m = graph.total_weight();
    if m == 0.0 {
        return 0.0;
    }
    let mut internal: BTreeMap<usize, f64> = BTreeMap::new();
    let mut volume: BTreeMap<usize, f64> = BTreeMap::new();
    for v in 0..n {
        *volume.entry(assignment[v]).or_insert(0.0) += graph.strength(v);
        for &(u, w) in graph.neighbors(v) {
            if u > v && assignment[u] == assignment[v] {
                *internal.entry(assignment[v]).or_insert(0.0) += w;
            }
        }
    }
    let mut q = 0.0;
    for (&community, &vol) in &volume {
        let inside = internal.get(&community).copied().unwrap_or(0.0);
        q += inside / m - (vol / (2.0 * m)) * (vol / (2.0 * m));
    }
    q
}

/// Per-community isolation verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct CommunityIsolation {
    pub community: usize,
    pub conductance: f64,
    pub suspicious: bool,
}

/// Conductance of every community: cut weight over the smaller side's
/// volume. Communities under `threshold` are flagged suspicious-isolated.
pub fn community_isolation(
    graph: &UserGraph,
    partition: &CommunityPartition,
    threshold: f64,
) -> Result<Vec<CommunityIsolation>, GraphError> {
    let n = graph.vertex_count();
    if partition.assignment.len() != n {
        return Err(GraphError::BadPartition(
            "assignment length differs from vertex count".to_string(),
        ));
    }
    let communities: alloc::collections::BTreeSet<usize> =
        partition.assignment.iter().copied().collect();
    if communities.len() < 2 {
        return Err(GraphError::SingleCommunity);
    }

    let total_volume: f64 = (0..n).map(|v| graph.strength(v)).sum();
    let mut out = Vec::new();
    for &community in &communities {
        let mut cut = 0.0;
        let mut volume = 0.0;
        for v in 0..n {
            if partition.assignment[v] != community {
                continue;
            }
            volume += graph.strength(v);
            for &(u, w) in graph.neighbors(v) {
                if partition.assignment[u] != community {
                    cut += w;
                }
            }
        }
        let denom = volume.min(total_volume - volume);
        let conductance = if cut == 0.0 { 0.0 } else { cut / denom };
        out.push(CommunityIsolation {
            community,
            conductance,
            suspicious: conductance < threshold,
        });
    }
    Ok(out)
}
