//! The traversal search itself, run on integer ranks instead of taggings.
//!
//! Ranks are positions in the sorted list of distinct taggings of one big
//! graph, so comparing ranks agrees with comparing taggings. A code key is
//! `[start rank, (from, to, dir, edge rank, node rank)*]` with `dir` 0 for
//! backward and 1 for forward and node rank 0 on backward units.

use std::cmp::Ordering;

use crate::netgraph::{EdgeTagging, GNodeId, NetGraph, NodeTagging};

const UNSEEN: u32 = u32::MAX;

/// Tagging ranks for one net graph.
pub(crate) struct RankTables {
    pub node_rank: Vec<u32>,
    /// Per edge: rank read from `a`, rank read from `b`.
    pub edge_rank: Vec<[u32; 2]>,
    pub node_tags: Vec<NodeTagging>,
    pub edge_tags: Vec<EdgeTagging>,
}

impl RankTables {
    pub fn new(ng: &NetGraph) -> Self {
        let mut node_tags: Vec<&NodeTagging> = ng.nodes().iter().map(|n| &n.tagging).collect();
        node_tags.sort_unstable();
        node_tags.dedup();
        let mut edge_tags: Vec<&EdgeTagging> = ng.edges().iter().flat_map(|e| [&e.fwd, &e.rev]).collect();
        edge_tags.sort_unstable();
        edge_tags.dedup();
        let node_rank = ng.nodes().iter().map(|n| node_tags.binary_search(&&n.tagging).unwrap() as u32).collect();
        let edge_rank = ng
            .edges()
            .iter()
            .map(|e| {
                [edge_tags.binary_search(&&e.fwd).unwrap() as u32, edge_tags.binary_search(&&e.rev).unwrap() as u32]
            })
            .collect();
        RankTables {
            node_rank,
            edge_rank,
            node_tags: node_tags.into_iter().cloned().collect(),
            edge_tags: edge_tags.into_iter().cloned().collect(),
        }
    }

    pub fn edge_rank_from(&self, ng: &NetGraph, edge: usize, from: GNodeId) -> u32 {
        self.edge_rank[edge][usize::from(ng.edge(edge).a != from)]
    }

    /// Subgraph induced by `nodes`; local index `i` stands for `nodes[i]`.
    pub fn induced(&self, ng: &NetGraph, nodes: &[GNodeId]) -> Ranked {
        let mut lookup: Vec<(GNodeId, u32)> = nodes.iter().enumerate().map(|(i, &g)| (g, i as u32)).collect();
        lookup.sort_unstable();
        let local = |g: GNodeId| lookup.binary_search_by_key(&g, |p| p.0).ok().map(|i| lookup[i].1);
        let mut adj = Vec::new();
        let mut start = Vec::with_capacity(nodes.len() + 1);
        start.push(0);
        for &g in nodes {
            for &(w, e) in ng.neighbors(g) {
                if let Some(j) = local(w) {
                    adj.push(Adj { to: j, rank: self.edge_rank_from(ng, e, g), edge: e as u32 });
                }
            }
            start.push(adj.len() as u32);
        }
        Ranked { node_rank: nodes.iter().map(|&g| self.node_rank[g as usize]).collect(), adj, start }
    }

    /// Code text for a single-component key.
    pub fn render(&self, key: &[u32]) -> String {
        let mut out = self.node_tags[key[0] as usize].to_string();
        for u in key[1..].chunks_exact(5) {
            let far = (u[2] == 1).then(|| &self.node_tags[u[4] as usize]);
            super::write_unit(&mut out, u[0] as usize, u[1] as usize, &self.edge_tags[u[3] as usize], far);
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Adj {
    pub to: u32,
    pub rank: u32,
    pub edge: u32,
}

/// A connected graph in rank form.
pub(crate) struct Ranked {
    pub node_rank: Vec<u32>,
    /// Neighbours of node `i` are `adj[start[i]..start[i + 1]]`.
    adj: Vec<Adj>,
    start: Vec<u32>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Unit {
    pub from: u32,
    pub to: u32,
    pub forward: bool,
    pub edge: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct Found {
    pub key: Vec<u32>,
    /// Local nodes in visit order.
    pub order: Vec<u32>,
    pub units: Vec<Unit>,
    pub exact: bool,
}

impl Ranked {
    pub fn len(&self) -> usize {
        self.node_rank.len()
    }

    pub fn adj(&self, i: u32) -> &[Adj] {
        &self.adj[self.start[i as usize] as usize..self.start[i as usize + 1] as usize]
    }

    /// Minimal traversal of this (connected, non-empty) graph.
    pub fn minimal(&self, budget: Option<usize>) -> Found {
        let min_rank = *self.node_rank.iter().min().expect("non-empty graph");
        let mut s = Search { g: self, budget, used: 0, exact: true, best: None, gen: 0, back: Vec::new() };
        let starts = (0..self.len() as u32).filter(|&i| self.node_rank[i as usize] == min_rank);
        for (k, start) in starts.enumerate() {
            if k > 0 && !s.take_branch() {
                break;
            }
            let edges = self.adj.len() / 2;
            let mut st = State {
                index: vec![UNSEEN; self.len()],
                order: Vec::with_capacity(self.len()),
                stack: Vec::with_capacity(self.len()),
                key: Vec::with_capacity(1 + 5 * edges),
                units: Vec::with_capacity(edges),
                cmp: Ordering::Equal,
                gen: u64::MAX,
            };
            st.order.push(start);
            st.stack.push(start);
            st.key.push(min_rank);
            st.index[start as usize] = 0;
            s.run(st);
        }
        let best = s.best.expect("at least one start");
        Found { key: best.key, order: best.order, units: best.units, exact: s.exact }
    }
}

#[derive(Clone)]
struct State {
    index: Vec<u32>,
    order: Vec<u32>,
    stack: Vec<u32>,
    key: Vec<u32>,
    units: Vec<Unit>,
    /// Order of `key` against the best code of generation `gen`.
    cmp: Ordering,
    gen: u64,
}

struct Best {
    key: Vec<u32>,
    order: Vec<u32>,
    units: Vec<Unit>,
}

struct Search<'a> {
    g: &'a Ranked,
    budget: Option<usize>,
    used: usize,
    exact: bool,
    best: Option<Best>,
    gen: u64,
    /// Scratch list of backward units for `step`.
    back: Vec<(u32, Adj)>,
}

fn prefix_cmp(cur: &[u32], best: &[u32]) -> Ordering {
    let n = cur.len().min(best.len());
    cur[..n].cmp(&best[..n]).then(if cur.len() > best.len() { Ordering::Greater } else { Ordering::Equal })
}

impl Search<'_> {
    fn can_branch(&self) -> bool {
        self.budget.is_none_or(|b| self.used < b)
    }

    fn take_branch(&mut self) -> bool {
        if self.can_branch() {
            self.used += 1;
            true
        } else {
            self.exact = false;
            false
        }
    }

    fn run(&mut self, mut st: State) {
        loop {
            let (cur, first, low, count) = loop {
                let Some(&cur) = st.stack.last() else {
                    self.finish(st);
                    return;
                };
                let mut first = None;
                let mut count = 0;
                let mut low = (u32::MAX, u32::MAX);
                for a in self.g.adj(cur) {
                    if st.index[a.to as usize] != UNSEEN {
                        continue;
                    }
                    let k = (a.rank, self.g.node_rank[a.to as usize]);
                    match k.cmp(&low) {
                        Ordering::Less => {
                            low = k;
                            first = Some(*a);
                            count = 1;
                        }
                        Ordering::Equal => count += 1,
                        Ordering::Greater => {}
                    }
                }
                match first {
                    None => {
                        st.stack.pop();
                    }
                    Some(a) => break (cur, a, low, count),
                }
            };
            if count == 1 || !self.can_branch() {
                if count > 1 {
                    self.exact = false;
                }
                if !self.step(&mut st, cur, first) {
                    return;
                }
                continue;
            }
            let ties: Vec<Adj> = self
                .g
                .adj(cur)
                .iter()
                .filter(|a| st.index[a.to as usize] == UNSEEN && (a.rank, self.g.node_rank[a.to as usize]) == low)
                .copied()
                .collect();
            for (i, &t) in ties.iter().enumerate() {
                if i > 0 && !self.take_branch() {
                    break;
                }
                let mut next = st.clone();
                if self.step(&mut next, cur, t) {
                    self.run(next);
                }
            }
            return;
        }
    }

    /// Moves from `cur` to `t.to`, emitting the forward unit and the new
    /// node's backward units. False once the branch is worse than the best.
    fn step(&mut self, st: &mut State, cur: u32, t: Adj) -> bool {
        let ni = st.order.len() as u32;
        st.index[t.to as usize] = ni;
        st.order.push(t.to);
        st.stack.push(t.to);
        let from = st.index[cur as usize];
        if !self.emit(st, [from, ni, 1, t.rank, self.g.node_rank[t.to as usize]]) {
            return false;
        }
        st.units.push(Unit { from: cur, to: t.to, forward: true, edge: t.edge });
        let mut back = std::mem::take(&mut self.back);
        back.clear();
        back.extend(
            self.g
                .adj(t.to)
                .iter()
                .filter(|a| a.to != cur && st.index[a.to as usize] != UNSEEN)
                .map(|a| (st.index[a.to as usize], *a)),
        );
        back.sort_unstable_by_key(|b| b.0);
        for &(idx, a) in &back {
            if !self.emit(st, [ni, idx, 0, a.rank, 0]) {
                self.back = back;
                return false;
            }
            st.units.push(Unit { from: t.to, to: a.to, forward: false, edge: a.edge });
        }
        self.back = back;
        true
    }

    fn emit(&mut self, st: &mut State, unit: [u32; 5]) -> bool {
        let pos = st.key.len();
        st.key.extend_from_slice(&unit);
        let Some(best) = &self.best else {
            return true;
        };
        if st.gen != self.gen {
            st.cmp = prefix_cmp(&st.key[..pos], &best.key);
            st.gen = self.gen;
        }
        if st.cmp == Ordering::Equal {
            st.cmp = prefix_cmp(&st.key[pos..], best.key.get(pos..).unwrap_or(&[]));
        }
        st.cmp != Ordering::Greater
    }

    fn finish(&mut self, st: State) {
        if self.best.as_ref().is_none_or(|b| st.key < b.key) {
            self.best = Some(Best { key: st.key, order: st.order, units: st.units });
            self.gen += 1;
        }
    }
}
