//! Copies of a small net inserted so that their overlaps follow a given
//! graph.
//!
//! The net-graph miner only sees event sharing, so a pair of copies is made
//! to overlap by identifying one leaf event of the small net's graph,
//! together with its conditions, across the two copies. Leaves keep the
//! copies intact and cannot glue half of one copy to half of another; each
//! copy needs a different leaf for every partner, which is an edge
//! colouring of the schema with leaves as colours.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::GeneratorError;
use crate::miner::OverlapGraph;
use crate::netgraph::to_e_netgraph;
use crate::petri::{NodeId, PetriNet};

/// Search steps allowed for the edge colouring.
const COLOURING_STEPS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct SchemaInsertion {
    pub net: PetriNet,
    /// Vertex `i` is copy `i`; edges are the requested pairs.
    pub expected: OverlapGraph,
    /// Event ids of each copy in `net`, sorted.
    pub copies: Vec<Vec<NodeId>>,
    /// Small-net leaf event shared by each pair.
    pub shared: BTreeMap<(usize, usize), NodeId>,
}

/// Inserts `m` copies of `small` into `big` such that copies `h` and `j`
/// (0-based) share nodes exactly when `(h, j)` or `(j, h)` is in `pairs`.
pub fn insert_with_overlap_schema<R: Rng + ?Sized>(
    big: &PetriNet,
    small: &PetriNet,
    m: usize,
    pairs: &[(usize, usize)],
    rng: &mut R,
) -> Result<SchemaInsertion, GeneratorError> {
    if m == 0 {
        return Err(GeneratorError::Params("copy count must be at least 1".into()));
    }
    if small.node_count() < m {
        return Err(GeneratorError::Params(format!("small net has fewer than {m} nodes")));
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if a >= m || b >= m || a == b {
            return Err(GeneratorError::Params(format!("bad pair ({a}, {b}) for {m} copies")));
        }
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    edges.dedup();

    let ng = to_e_netgraph(small)?;
    if !ng.is_connected() {
        return Err(GeneratorError::Params("small net is not connected".into()));
    }
    let mut leaves: Vec<u32> = (0..ng.node_count() as u32).filter(|&g| ng.neighbors(g).len() <= 1).collect();
    leaves.shuffle(rng);
    let mut positions: Vec<u32> = Vec::new();
    for g in leaves {
        if positions.iter().all(|&p| ng.edge_between(p, g).is_none()) {
            positions.push(g);
        }
    }
    let colours = colour_edges(m, &edges, positions.len()).ok_or_else(|| {
        GeneratorError::Unrealizable(format!("{} leaf events cannot separate the requested pairs", positions.len()))
    })?;

    let inc = small.incidence();
    let closure = |g: u32| -> Vec<NodeId> {
        let e = ng.node(g).origin.as_ref().expect("built from a net").center;
        let mut nodes = vec![e];
        nodes.extend(inc.preset(e).iter().chain(inc.postset(e)));
        nodes
    };

    let mut net = big.clone();
    let mut next = big.max_id().map_or(0, |m| m.0 + 1);
    let mut maps: Vec<BTreeMap<NodeId, NodeId>> = Vec::with_capacity(m);
    let mut shared = BTreeMap::new();
    for j in 0..m {
        let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (k, &(h, jj)) in edges.iter().enumerate() {
            if jj != j {
                continue;
            }
            let leaf = positions[colours[k]];
            for v in closure(leaf) {
                map.insert(v, maps[h][&v]);
            }
            shared.insert((h, j), ng.node(leaf).origin.as_ref().unwrap().center);
        }
        for id in small.node_ids() {
            if let std::collections::btree_map::Entry::Vacant(slot) = map.entry(id) {
                let fresh = NodeId(next);
                next += 1;
                net.add_node(fresh, small.role(id).unwrap(), small.label(id).unwrap().clone())?;
                slot.insert(fresh);
            }
        }
        for &(s, d) in small.arcs() {
            net.add_arc(map[&s], map[&d]);
        }
        maps.push(map);
    }
    if let Err(e) = net.require_pure_clear() {
        return Err(GeneratorError::Unrealizable(e.to_string()));
    }

    let copies = maps
        .iter()
        .map(|map| {
            let mut ev: Vec<NodeId> = small.events().keys().map(|e| map[e]).collect();
            ev.sort_unstable();
            ev
        })
        .collect();
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    Ok(SchemaInsertion { net, expected: OverlapGraph::from_adjacency(adj), copies, shared })
}

/// Proper edge colouring with at most `k` colours by backtracking, edges at
/// high-degree vertices first.
fn colour_edges(n: usize, edges: &[(usize, usize)], k: usize) -> Option<Vec<usize>> {
    let mut degree = vec![0usize; n];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&e| std::cmp::Reverse(degree[edges[e].0] + degree[edges[e].1]));
    let mut colour = vec![usize::MAX; edges.len()];
    let mut used = vec![vec![false; k]; n];
    let mut steps = 0;

    fn go(
        i: usize,
        order: &[usize],
        edges: &[(usize, usize)],
        colour: &mut [usize],
        used: &mut [Vec<bool>],
        steps: &mut usize,
    ) -> bool {
        let Some(&e) = order.get(i) else { return true };
        *steps += 1;
        if *steps > COLOURING_STEPS {
            return false;
        }
        let (a, b) = edges[e];
        for c in 0..used[a].len() {
            if used[a][c] || used[b][c] {
                continue;
            }
            used[a][c] = true;
            used[b][c] = true;
            colour[e] = c;
            if go(i + 1, order, edges, colour, used, steps) {
                return true;
            }
            used[a][c] = false;
            used[b][c] = false;
        }
        false
    }
    go(0, &order, edges, &mut colour, &mut used, &mut steps).then_some(colour)
}
