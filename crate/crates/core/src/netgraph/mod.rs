//! Net graphs: the event-level view of a pure, clear C/E net.
//!
//! Every event becomes a node tagged with its label and signed neighbour
//! conditions; two nodes are joined by one edge when their events share a
//! condition, tagged with one triple per shared condition.

mod tagging;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::petri::{dual, Label, NetError, NodeId, PetriNet, Role};

pub use tagging::{EdgeTagging, NodeTagging, Sign, TaggingParseError, Triple};

/// Dense node index into a [`NetGraph`].
pub type GNodeId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetGraphError {
    #[error("net is not pure: {0}")]
    NotPure(String),
    #[error("net is not clear: {0}")]
    NotClear(String),
    #[error("dual net is not clear: {0}")]
    DualNotClear(String),
    #[error("node {node} has no slot {sign}{label}", sign = .sign.as_char())]
    MissingSlot { node: GNodeId, sign: Sign, label: Label },
    #[error("condition class joins two slots of node {node}")]
    SignConflict { node: GNodeId },
    #[error("node {0} carries no source mapping")]
    MissingOrigin(GNodeId),
    #[error("invalid net graph: {0}")]
    Invalid(String),
}

impl From<NetError> for NetGraphError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::NotPure(s) => NetGraphError::NotPure(s),
            NetError::NotClear(s) => NetGraphError::NotClear(s),
            other => NetGraphError::Invalid(other.to_string()),
        }
    }
}

/// Where a net-graph node came from: the centre node and, slot by slot,
/// the neighbour nodes behind its tagging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub center: NodeId,
    pub slots: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GNode {
    pub tagging: NodeTagging,
    pub origin: Option<Origin>,
}

/// Undirected edge `a`–`b` with `a` the endpoint whose `(tagging, id)` is
/// smaller. `fwd` is the tagging read from `a`, `rev` from `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GEdge {
    pub a: GNodeId,
    pub b: GNodeId,
    pub fwd: EdgeTagging,
    pub rev: EdgeTagging,
}

impl GEdge {
    /// Tagging as seen when travelling from `from`.
    pub fn tagging_from(&self, from: GNodeId) -> &EdgeTagging {
        if from == self.a {
            &self.fwd
        } else {
            &self.rev
        }
    }

    pub fn other(&self, n: GNodeId) -> GNodeId {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetGraph {
    nodes: Vec<GNode>,
    /// Sorted by `(min endpoint, max endpoint)`.
    edges: Vec<GEdge>,
    /// Per node: `(neighbour, edge index)`, sorted by neighbour.
    adj: Vec<Vec<(GNodeId, usize)>>,
}

impl NetGraph {
    /// Builds a graph from nodes and edges given as `(u, v, tagging read
    /// from u)`. Checks ids, self-loops, duplicate pairs, and that every
    /// triple matches a slot on both ends.
    pub fn new(nodes: Vec<GNode>, edges: Vec<(GNodeId, GNodeId, EdgeTagging)>) -> Result<Self, NetGraphError> {
        let n = nodes.len() as GNodeId;
        let mut built = Vec::with_capacity(edges.len());
        for (u, v, t) in edges {
            if u >= n || v >= n {
                return Err(NetGraphError::Invalid(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(NetGraphError::Invalid(format!("self-loop on node {u}")));
            }
            for tr in t.triples() {
                for (node, sign) in [(u, tr.near), (v, tr.far)] {
                    if nodes[node as usize].tagging.slot_index(sign, &tr.label).is_none() {
                        return Err(NetGraphError::MissingSlot { node, sign, label: tr.label.clone() });
                    }
                }
            }
            let key = |x: GNodeId| (&nodes[x as usize].tagging, x);
            built.push(if key(u) <= key(v) {
                GEdge { a: u, b: v, rev: t.reversed(), fwd: t }
            } else {
                GEdge { a: v, b: u, fwd: t.reversed(), rev: t }
            });
        }
        built.sort_by_key(|e| (e.a.min(e.b), e.a.max(e.b)));
        if let Some(w) = built
            .windows(2)
            .find(|w| (w[0].a.min(w[0].b), w[0].a.max(w[0].b)) == (w[1].a.min(w[1].b), w[1].a.max(w[1].b)))
        {
            return Err(NetGraphError::Invalid(format!("duplicate edge ({},{})", w[0].a, w[0].b)));
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (i, e) in built.iter().enumerate() {
            adj[e.a as usize].push((e.b, i));
            adj[e.b as usize].push((e.a, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(NetGraph { nodes, edges: built, adj })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, g: GNodeId) -> &GNode {
        &self.nodes[g as usize]
    }

    pub fn nodes(&self) -> &[GNode] {
        &self.nodes
    }

    pub fn tagging(&self, g: GNodeId) -> &NodeTagging {
        &self.nodes[g as usize].tagging
    }

    pub fn edges(&self) -> &[GEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &GEdge {
        &self.edges[i]
    }

    pub fn neighbors(&self, g: GNodeId) -> &[(GNodeId, usize)] {
        &self.adj[g as usize]
    }

    pub fn edge_between(&self, u: GNodeId, v: GNodeId) -> Option<usize> {
        let list = &self.adj[u as usize];
        list.binary_search_by_key(&v, |&(w, _)| w).ok().map(|i| list[i].1)
    }

    /// Node sets of the connected components, each sorted, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<GNodeId>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for s in 0..self.nodes.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s as GNodeId];
            let mut i = 0;
            while i < comp.len() {
                for &(w, _) in &self.adj[comp[i] as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
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

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// The subgraph induced by `keep`, renumbered `0..keep.len()` in the
    /// given order. Origins are kept.
    pub fn induced(&self, keep: &[GNodeId]) -> NetGraph {
        let local: HashMap<GNodeId, GNodeId> = keep.iter().enumerate().map(|(i, &g)| (g, i as GNodeId)).collect();
        let nodes = keep.iter().map(|&g| self.nodes[g as usize].clone()).collect();
        let mut edges = Vec::new();
        for (&g, &i) in &local {
            for &(w, e) in &self.adj[g as usize] {
                if let Some(&j) = local.get(&w) {
                    if i < j {
                        edges.push((i, j, self.edges[e].tagging_from(g).clone()));
                    }
                }
            }
        }
        NetGraph::new(nodes, edges).expect("induced subgraph of a valid graph")
    }

    /// Same graph with node `g` renamed to `perm[g]`.
    pub fn permuted(&self, perm: &[GNodeId]) -> NetGraph {
        let mut nodes = vec![None; self.nodes.len()];
        for (g, node) in self.nodes.iter().enumerate() {
            nodes[perm[g] as usize] = Some(node.clone());
        }
        let edges = self.edges.iter().map(|e| (perm[e.a as usize], perm[e.b as usize], e.fwd.clone())).collect();
        NetGraph::new(nodes.into_iter().map(|n| n.expect("perm is a bijection")).collect(), edges)
            .expect("permutation of a valid graph")
    }

    /// `.ngraph` text: nodes by id, then edges by `(gid1, gid2)` with
    /// `gid1 < gid2` and the tagging read from `gid1`.
    pub fn to_ngraph(&self) -> String {
        let mut out = String::new();
        for (g, n) in self.nodes.iter().enumerate() {
            writeln!(out, "node {g} {}", n.tagging).unwrap();
        }
        for e in &self.edges {
            let (lo, hi) = (e.a.min(e.b), e.a.max(e.b));
            writeln!(out, "edge {lo} {hi} {}", e.tagging_from(lo)).unwrap();
        }
        out
    }
}

/// The e-type net graph: one node per event, numbered in ascending event id.
pub fn to_e_netgraph(net: &PetriNet) -> Result<NetGraph, NetGraphError> {
    net.require_pure_clear()?;
    Ok(build(net, Role::Event))
}

/// The c-type net graph: one node per condition, built directly over the
/// conditions. Requires the dual net to be clear.
pub fn to_c_netgraph(net: &PetriNet) -> Result<NetGraph, NetGraphError> {
    net.require_pure_clear().or_else(|e| match e {
        // clearness of the primal net is irrelevant here
        NetError::NotClear(_) => Ok(()),
        other => Err(other),
    })?;
    if let Some(v) = crate::petri::validate_clear(&dual(net)).first() {
        return Err(NetGraphError::DualNotClear(v.to_string()));
    }
    Ok(build(net, Role::Condition))
}

/// Net graph centred on nodes of `center`. A slot is `-` when the arc runs
/// from the neighbour into the centre and `+` otherwise.
fn build(net: &PetriNet, center: Role) -> NetGraph {
    let inc = net.incidence();
    let centers: &BTreeMap<NodeId, Label> = match center {
        Role::Event => net.events(),
        Role::Condition => net.conditions(),
    };
    let items: &BTreeMap<NodeId, Label> = match center {
        Role::Event => net.conditions(),
        Role::Condition => net.events(),
    };
    let gid: HashMap<NodeId, GNodeId> = centers.keys().enumerate().map(|(i, &id)| (id, i as GNodeId)).collect();

    let mut nodes = Vec::with_capacity(centers.len());
    // item -> [(centre gid, sign of the item at that centre)]
    let mut touching: BTreeMap<NodeId, Vec<(GNodeId, Sign)>> = BTreeMap::new();
    for (&id, label) in centers {
        let g = gid[&id];
        let mut slots: Vec<(Sign, Label, NodeId)> = Vec::new();
        for (sign, side) in [(Sign::Minus, inc.preset(id)), (Sign::Plus, inc.postset(id))] {
            for &x in side {
                slots.push((sign, items[&x].clone(), x));
                touching.entry(x).or_default().push((g, sign));
            }
        }
        slots.sort();
        let origin = Origin { center: id, slots: slots.iter().map(|s| s.2).collect() };
        let tagging = NodeTagging::new(label.clone(), slots.into_iter().map(|(s, l, _)| (s, l)).collect());
        nodes.push(GNode { tagging, origin: Some(origin) });
    }

    let mut pairs: BTreeMap<(GNodeId, GNodeId), Vec<Triple>> = BTreeMap::new();
    for (x, list) in &touching {
        for (i, &(u, su)) in list.iter().enumerate() {
            for &(v, sv) in &list[i + 1..] {
                let (u, v, su, sv) = if u < v { (u, v, su, sv) } else { (v, u, sv, su) };
                pairs.entry((u, v)).or_default().push(Triple { near: su, label: items[x].clone(), far: sv });
            }
        }
    }
    let edges = pairs
        .into_iter()
        .map(|((u, v), t)| {
            let tagging = EdgeTagging::new(t).expect("non-empty");
            debug_assert!(tagging.triples().windows(2).all(|w| w[0] != w[1]), "clear nets never repeat a triple");
            (u, v, tagging)
        })
        .collect();
    NetGraph::new(nodes, edges).expect("net graph of a pure clear net")
}

/// Reads a net graph from the other side: every slot item becomes a node
/// and every former node becomes a slot of each of its items, with the sign
/// reversed. Works purely on taggings and origins.
pub fn dual_netgraph(ng: &NetGraph) -> Result<NetGraph, NetGraphError> {
    // item id -> (label, [(sign, centre label, centre id)])
    type Item = (Label, Vec<(Sign, Label, NodeId)>);
    let mut items: BTreeMap<NodeId, Item> = BTreeMap::new();
    let mut by_center: Vec<Vec<(NodeId, Sign)>> = Vec::with_capacity(ng.node_count());
    for (g, node) in ng.nodes.iter().enumerate() {
        let origin = node.origin.as_ref().ok_or(NetGraphError::MissingOrigin(g as GNodeId))?;
        let mut list = Vec::new();
        for ((sign, label), &item) in node.tagging.slots().iter().zip(&origin.slots) {
            let entry = items.entry(item).or_insert_with(|| (label.clone(), Vec::new()));
            if entry.0 != *label {
                return Err(NetGraphError::Invalid(format!("node {item} seen with two labels")));
            }
            entry.1.push((sign.flip(), node.tagging.label().clone(), origin.center));
            list.push((item, sign.flip()));
        }
        by_center.push(list);
    }
    let gid: HashMap<NodeId, GNodeId> = items.keys().enumerate().map(|(i, &id)| (id, i as GNodeId)).collect();
    let mut nodes = Vec::with_capacity(items.len());
    for (&id, (label, slots)) in &items {
        let mut slots = slots.clone();
        slots.sort();
        if slots.windows(2).any(|w| (w[0].0, &w[0].1) == (w[1].0, &w[1].1)) {
            return Err(NetGraphError::DualNotClear(format!("node {id} has a repeated slot")));
        }
        let origin = Origin { center: id, slots: slots.iter().map(|s| s.2).collect() };
        nodes.push(GNode {
            tagging: NodeTagging::new(label.clone(), slots.into_iter().map(|(s, l, _)| (s, l)).collect()),
            origin: Some(origin),
        });
    }
    let mut pairs: BTreeMap<(GNodeId, GNodeId), Vec<Triple>> = BTreeMap::new();
    for (g, list) in by_center.iter().enumerate() {
        let label = ng.nodes[g].tagging.label();
        for (i, &(x, sx)) in list.iter().enumerate() {
            for &(y, sy) in &list[i + 1..] {
                let (u, v, su, sv) = (gid[&x], gid[&y], sx, sy);
                let (u, v, su, sv) = if u < v { (u, v, su, sv) } else { (v, u, sv, su) };
                pairs.entry((u, v)).or_default().push(Triple { near: su, label: label.clone(), far: sv });
            }
        }
    }
    let edges = pairs.into_iter().map(|((u, v), t)| (u, v, EdgeTagging::new(t).expect("non-empty"))).collect();
    NetGraph::new(nodes, edges)
}

/// Checks that reading the dual net's net graph from the other side gives
/// back the net graph of `net`.
///
/// Events without arcs leave no trace in the dual net graph, so they are
/// left out of the comparison.
pub fn check_duality(net: &PetriNet) -> Result<bool, NetGraphError> {
    let mut linked = net.clone();
    let inc = net.incidence();
    for &e in net.events().keys() {
        if inc.degree(e) == 0 {
            linked.remove_node(e);
        }
    }
    let direct = to_e_netgraph(&linked)?;
    let via_dual = to_e_netgraph(&dual(net)).map_err(|e| match e {
        NetGraphError::NotClear(s) => NetGraphError::DualNotClear(s),
        other => other,
    })?;
    Ok(dual_netgraph(&via_dual)? == direct)
}

/// Rebuilds a net from a net graph. Events get ids `0..n` in node order and
/// conditions follow; slots joined by an edge triple share one condition.
pub fn from_e_netgraph(ng: &NetGraph) -> Result<PetriNet, NetGraphError> {
    let mut offset = Vec::with_capacity(ng.node_count() + 1);
    offset.push(0usize);
    for n in &ng.nodes {
        offset.push(offset.last().unwrap() + n.tagging.slots().len());
    }
    let total = *offset.last().unwrap();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in &ng.edges {
        for t in e.fwd.triples() {
            let slot = |g: GNodeId, sign: Sign| {
                ng.nodes[g as usize]
                    .tagging
                    .slot_index(sign, &t.label)
                    .map(|i| offset[g as usize] + i)
                    .ok_or_else(|| NetGraphError::MissingSlot { node: g, sign, label: t.label.clone() })
            };
            let (x, y) = (slot(e.a, t.near)?, slot(e.b, t.far)?);
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            parent[rx] = ry;
        }
    }

    let n = ng.node_count() as u32;
    let mut net = PetriNet::new();
    for (g, node) in ng.nodes.iter().enumerate() {
        net.add_event(NodeId(g as u32), node.tagging.label().clone())?;
    }
    let mut cond_of_root: HashMap<usize, NodeId> = HashMap::new();
    let mut owner_of_root: HashMap<usize, Vec<GNodeId>> = HashMap::new();
    for (g, node) in ng.nodes.iter().enumerate() {
        for (i, (sign, label)) in node.tagging.slots().iter().enumerate() {
            let root = find(&mut parent, offset[g] + i);
            let owners = owner_of_root.entry(root).or_default();
            if owners.contains(&(g as GNodeId)) {
                return Err(NetGraphError::SignConflict { node: g as GNodeId });
            }
            owners.push(g as GNodeId);
            let next = NodeId(n + cond_of_root.len() as u32);
            let c = *cond_of_root.entry(root).or_insert(next);
            if c == next {
                net.add_condition(c, label.clone())?;
            }
            let e = NodeId(g as u32);
            match sign {
                Sign::Minus => net.add_arc(c, e),
                Sign::Plus => net.add_arc(e, c),
            };
        }
    }
    Ok(net)
}
