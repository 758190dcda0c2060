//! Minimal depth-first traversal codes.
//!
//! A traversal starts at a node with the smallest tagging. Whenever it
//! steps forward to a new node it immediately records every edge from that
//! node back to already visited nodes, in ascending visit order. The next
//! forward step always leaves the most recently visited node that still has
//! unvisited neighbours, taking the smallest (edge tagging, node tagging)
//! pair. Ties are explored exhaustively and the smallest code wins, which
//! makes the code a canonical form.
//!
//! Code text, one component after another joined by `|`:
//!
//! ```text
//! component = NODE unit*
//! unit      = "(" from "," to ",f," EDGE "," NODE ")"     forward
//!           | "(" from "," to ",b," EDGE ")"              backward
//! ```

mod code;
mod search;

use std::fmt::Write as _;

use crate::netgraph::{EdgeTagging, GNodeId, NetGraph, NodeTagging};

pub use code::{code_compare, parse_code, CodeError, ParsedCode, ParsedComponent, ParsedUnit};
pub(crate) use search::RankTables;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Backward,
    Forward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRecord {
    pub visit_index: usize,
    pub gnode: GNodeId,
    pub tagging: NodeTagging,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    /// Visit indices are local to the record's component.
    pub from_index: usize,
    pub to_index: usize,
    pub direction: Direction,
    /// Oriented from `from_index` to `to_index`.
    pub tagging: EdgeTagging,
    /// Index into [`NetGraph::edges`].
    pub edge: usize,
}

/// Start offsets of one connected component inside `min_e0` / `min_e1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentSpan {
    pub first_node: usize,
    pub first_edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraversalResult {
    pub min_e0: Vec<NodeRecord>,
    pub min_e1: Vec<EdgeRecord>,
    pub noe: usize,
    pub components: Vec<ComponentSpan>,
    /// False when the branch budget ran out and some ties were settled by
    /// node id instead of by exhaustive comparison.
    pub exact: bool,
}

impl TraversalResult {
    pub fn code(&self) -> String {
        let mut out = String::new();
        for (c, span) in self.components.iter().enumerate() {
            let (node_end, edge_end) = match self.components.get(c + 1) {
                Some(next) => (next.first_node, next.first_edge),
                None => (self.min_e0.len(), self.min_e1.len()),
            };
            if c > 0 {
                out.push('|');
            }
            write!(out, "{}", self.min_e0[span.first_node].tagging).unwrap();
            for e in &self.min_e1[span.first_edge..edge_end] {
                let far =
                    (e.direction == Direction::Forward).then(|| &self.min_e0[span.first_node + e.to_index].tagging);
                write_unit(&mut out, e.from_index, e.to_index, &e.tagging, far);
            }
            debug_assert!(node_end > span.first_node);
        }
        out
    }
}

pub(crate) fn write_unit(out: &mut String, from: usize, to: usize, edge: &EdgeTagging, far: Option<&NodeTagging>) {
    match far {
        Some(node) => write!(out, "({from},{to},f,{edge},{node})").unwrap(),
        None => write!(out, "({from},{to},b,{edge})").unwrap(),
    }
}

/// Exhaustive minimal traversal over every component.
pub fn minimal_dfs_traversal(ng: &NetGraph) -> TraversalResult {
    traverse(ng, None)
}

/// Like [`minimal_dfs_traversal`] but explores at most `max_branches`
/// alternative tie branches per component; past that, ties go to the
/// lowest node id and the result is marked inexact.
pub fn minimal_dfs_traversal_bounded(ng: &NetGraph, max_branches: usize) -> TraversalResult {
    traverse(ng, Some(max_branches))
}

fn traverse(ng: &NetGraph, budget: Option<usize>) -> TraversalResult {
    let tables = RankTables::new(ng);
    let mut comps: Vec<(search::Found, Vec<GNodeId>)> = ng
        .components()
        .into_iter()
        .map(|nodes| {
            let ranked = tables.induced(ng, &nodes);
            (ranked.minimal(budget), nodes)
        })
        .collect();
    comps.sort_by(|a, b| a.0.key.cmp(&b.0.key));

    let mut res =
        TraversalResult { min_e0: Vec::new(), min_e1: Vec::new(), noe: 0, components: Vec::new(), exact: true };
    for (found, nodes) in comps {
        res.exact &= found.exact;
        res.components.push(ComponentSpan { first_node: res.min_e0.len(), first_edge: res.min_e1.len() });
        let mut local_index = vec![0usize; nodes.len()];
        for (i, &l) in found.order.iter().enumerate() {
            local_index[l as usize] = i;
            let g = nodes[l as usize];
            res.min_e0.push(NodeRecord { visit_index: i, gnode: g, tagging: ng.tagging(g).clone() });
        }
        for u in &found.units {
            let from_g = nodes[u.from as usize];
            res.min_e1.push(EdgeRecord {
                from_index: local_index[u.from as usize],
                to_index: local_index[u.to as usize],
                direction: if u.forward { Direction::Forward } else { Direction::Backward },
                tagging: ng.edge(u.edge as usize).tagging_from(from_g).clone(),
                edge: u.edge as usize,
            });
        }
    }
    res.noe = res.min_e1.len();
    debug_assert_eq!(res.noe, ng.edge_count());
    res
}

/// Canonical code of a connected graph.
pub fn canonical_code(pattern: &NetGraph) -> Result<String, CodeError> {
    if pattern.is_empty() {
        return Err(CodeError::Empty);
    }
    if !pattern.is_connected() {
        return Err(CodeError::Disconnected);
    }
    Ok(minimal_dfs_traversal(pattern).code())
}

#[cfg(test)]
mod tests;
