//! Conceptual neighborhood graph of RCC-8 under continuous motion and
//! deformation.

use std::collections::VecDeque;
use std::path::Path;

use thiserror::Error;

use crate::algebra::{BaseRelation, RelationSet};

pub const SHIPPED_CN_GRAPH_JSON: &str = include_str!("../assets/rcc8_cn_graph.json");

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed neighborhood graph: {0}")]
    MalformedGraph(String),
    #[error("neighborhood graph is disconnected: {0} unreachable from DC")]
    DisconnectedGraph(BaseRelation),
}

/// Undirected, loop-free, connected graph over the eight relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnGraph {
    adjacency: [RelationSet; 8],
    distances: [[u8; 8]; 8],
}

impl CnGraph {
    pub fn rcc8() -> Self {
        Self::from_json(SHIPPED_CN_GRAPH_JSON).expect("shipped neighborhood graph is valid")
    }

    pub fn from_json(source: &str) -> Result<Self, GraphError> {
        let pairs: Vec<Vec<String>> =
            serde_json::from_str(source).map_err(|e| GraphError::MalformedGraph(format!("invalid JSON: {e}")))?;
        let mut edges = Vec::with_capacity(pairs.len());
        for p in &pairs {
            let [a, b] = p.as_slice() else {
                return Err(GraphError::MalformedGraph(format!("edge {p:?} is not a pair")));
            };
            let lookup = |n: &str| {
                BaseRelation::from_name(n)
                    .ok_or_else(|| GraphError::MalformedGraph(format!("unknown relation name {n:?}")))
            };
            edges.push((lookup(a)?, lookup(b)?));
        }
        Self::from_edges(&edges)
    }

    pub fn load(path: &Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GraphError::MalformedGraph(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_edges(edges: &[(BaseRelation, BaseRelation)]) -> Result<Self, GraphError> {
        let mut adjacency = [RelationSet::EMPTY; 8];
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::MalformedGraph(format!("self-loop on {a}")));
            }
            if adjacency[a.index()].contains(b) {
                return Err(GraphError::MalformedGraph(format!("duplicate edge {a}-{b}")));
            }
            adjacency[a.index()].insert(b);
            adjacency[b.index()].insert(a);
        }
        let mut distances = [[u8::MAX; 8]; 8];
        for src in BaseRelation::ALL {
            let row = &mut distances[src.index()];
            row[src.index()] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(r) = queue.pop_front() {
                let d = row[r.index()];
                for n in adjacency[r.index()].iter() {
                    if row[n.index()] == u8::MAX {
                        row[n.index()] = d + 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        if let Some(r) = BaseRelation::ALL
            .into_iter()
            .find(|r| distances[0][r.index()] == u8::MAX)
        {
            return Err(GraphError::DisconnectedGraph(r));
        }
        Ok(CnGraph { adjacency, distances })
    }

    pub fn neighbors(&self, r: BaseRelation) -> RelationSet {
        self.adjacency[r.index()]
    }

    pub fn is_neighbor(&self, a: BaseRelation, b: BaseRelation) -> bool {
        self.adjacency[a.index()].contains(b)
    }

    /// Shortest edge-path length; 0 iff `a == b`.
    pub fn conceptual_distance(&self, a: BaseRelation, b: BaseRelation) -> u32 {
        self.distances[a.index()][b.index()] as u32
    }

    /// Unordered edges, each listed once with the smaller relation first.
    pub fn edges(&self) -> Vec<(BaseRelation, BaseRelation)> {
        BaseRelation::ALL
            .into_iter()
            .flat_map(|a| self.neighbors(a).iter().filter(move |b| *b > a).map(move |b| (a, b)))
            .collect()
    }

    /// Number of ordered (directed) links, i.e. twice the edge count.
    pub fn directed_link_count(&self) -> usize {
        self.adjacency.iter().map(|s| s.len()).sum()
    }
}

pub fn load_cn_graph(source: &str) -> Result<CnGraph, GraphError> {
    CnGraph::from_json(source)
}
