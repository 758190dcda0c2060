//! Overlap graphs between embeddings of one pattern.

use std::collections::HashMap;

use crate::netgraph::GNodeId;

use super::Embedding;

/// Node buckets: for every big-graph node, the embeddings covering it.
#[derive(Clone, Debug, Default)]
pub struct SBuckets {
    map: HashMap<GNodeId, Vec<usize>>,
}

impl SBuckets {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, index: usize, emb: &Embedding) {
        for &g in &emb.nodes {
            self.map.entry(g).or_default().push(index);
        }
    }

    pub fn bucket(&self, g: GNodeId) -> &[usize] {
        self.map.get(&g).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Vertices are embedding indices; two are adjacent when the embeddings
/// share a net-graph node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapGraph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl OverlapGraph {
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        OverlapGraph { adj, edge_count }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Vertex sets of connected components, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for s in 0..self.adj.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &w in &self.adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Adjacency restricted to `vertices` (sorted), renumbered by position.
    pub(crate) fn subgraph(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        vertices.iter().map(|&v| self.adj[v].iter().filter_map(|w| vertices.binary_search(w).ok()).collect()).collect()
    }
}

/// Registers every embedding in `buckets` and joins embeddings that share a
/// bucket.
pub fn build_overlap_graph(embeddings: &[Embedding], buckets: &mut SBuckets) -> OverlapGraph {
    for (i, e) in embeddings.iter().enumerate() {
        buckets.insert(i, e);
    }
    let mut adj = vec![Vec::new(); embeddings.len()];
    for list in buckets.map.values() {
        for (k, &a) in list.iter().enumerate() {
            for &b in &list[k + 1..] {
                if a != b {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
    }
    OverlapGraph::from_adjacency(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(nodes: &[GNodeId]) -> Embedding {
        Embedding { nodes: nodes.to_vec(), node_map: nodes.to_vec() }
    }

    #[test]
    fn disjoint_embeddings_have_no_edges() {
        let e = [emb(&[1]), emb(&[2]), emb(&[3])];
        let og = build_overlap_graph(&e, &mut SBuckets::new());
        assert_eq!(og.edge_count(), 0);
    }

    #[test]
    fn chain_of_overlaps() {
        let e = [emb(&[1, 2]), emb(&[2, 3]), emb(&[3, 4])];
        let mut s = SBuckets::new();
        let og = build_overlap_graph(&e, &mut s);
        assert_eq!(og.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(s.bucket(2), &[0, 1]);
    }

    #[test]
    fn shared_node_gives_clique() {
        let e: Vec<Embedding> = (0..5).map(|i| emb(&[7, 10 + i])).collect();
        let og = build_overlap_graph(&e, &mut SBuckets::new());
        assert_eq!(og.edge_count(), 10);
    }
}
