//! Pure condition/event nets: data model, structural validation, complete
//! subnets and the event/condition duality.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod cenet;
pub mod connect;

pub use cenet::{parse_cenet, serialize_cenet, ParseError};
pub use connect::{connect, ConnectOutcome, Connector};

/// Identifier of a node, unique across the conditions and events of one net.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Repeatable node name. Compared as exact strings, ordered bytewise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Result<Self, NetError> {
        let s = s.into();
        if Self::is_valid(&s) {
            Ok(Label(s))
        } else {
            Err(NetError::InvalidLabel(s))
        }
    }

    /// Labels match `[A-Za-z0-9_.]+`.
    pub fn is_valid(s: &str) -> bool {
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Label {
    type Error = NetError;
    fn try_from(s: String) -> Result<Self, NetError> {
        Label::new(s)
    }
}

impl From<Label> for String {
    fn from(l: Label) -> String {
        l.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Condition,
    Event,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Condition => Role::Event,
            Role::Event => Role::Condition,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Condition => "condition",
            Role::Event => "event",
        })
    }
}

/// Which node type two nets are glued on when connected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OverlapKind {
    /// Shared condition nodes.
    #[serde(rename = "c")]
    CType,
    /// Shared event nodes.
    #[serde(rename = "e")]
    EType,
}

impl OverlapKind {
    /// Role of the nodes identified by this kind of overlap.
    pub fn role(self) -> Role {
        match self {
            OverlapKind::CType => Role::Condition,
            OverlapKind::EType => Role::Event,
        }
    }
}

impl fmt::Display for OverlapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OverlapKind::CType => "c",
            OverlapKind::EType => "e",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("node {id} is not a {expected}")]
    RoleMismatch { id: NodeId, expected: Role },
    #[error("invalid label {0:?}")]
    InvalidLabel(String),
    #[error("net is not pure: {0}")]
    NotPure(String),
    #[error("net is not clear: {0}")]
    NotClear(String),
}

/// One structural defect found by [`validate_pure`] or [`validate_clear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Dangling { src: NodeId, dst: NodeId, missing: NodeId },
    NotBipartite { src: NodeId, dst: NodeId, role: Role },
    Impure { condition: NodeId, event: NodeId },
    DuplicateLabel { event: NodeId, input: bool, label: Label },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dangling { src, dst, missing } => {
                write!(f, "dangling: arc ({src},{dst}) references unknown node {missing}")
            }
            Violation::NotBipartite { src, dst, role } => {
                write!(f, "bipartite: {role}\u{2192}{role} arc ({src},{dst})")
            }
            Violation::Impure { condition, event } => {
                write!(f, "purity: ({condition},{event})/({event},{condition})")
            }
            Violation::DuplicateLabel { event, input, label } => {
                let side = if *input { "input" } else { "output" };
                write!(f, "clear: event {event} has duplicate {side} label {label}")
            }
        }
    }
}

/// A condition/event net `(C, E; F)`.
///
/// The builder methods accept anything; use [`validate_pure`] and
/// [`validate_clear`] to find out whether the result is a pure, clear net.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PetriNet {
    conditions: BTreeMap<NodeId, Label>,
    events: BTreeMap<NodeId, Label>,
    arcs: BTreeSet<(NodeId, NodeId)>,
}

impl PetriNet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_event(&mut self, id: NodeId, label: Label) -> Result<(), NetError> {
        if self.contains(id) {
            return Err(NetError::DuplicateId(id));
        }
        self.events.insert(id, label);
        Ok(())
    }

    pub fn add_condition(&mut self, id: NodeId, label: Label) -> Result<(), NetError> {
        if self.contains(id) {
            return Err(NetError::DuplicateId(id));
        }
        self.conditions.insert(id, label);
        Ok(())
    }

    pub fn add_node(&mut self, id: NodeId, role: Role, label: Label) -> Result<(), NetError> {
        match role {
            Role::Event => self.add_event(id, label),
            Role::Condition => self.add_condition(id, label),
        }
    }

    /// Adds `(src, dst)` to the flow relation. Returns false if already present.
    pub fn add_arc(&mut self, src: NodeId, dst: NodeId) -> bool {
        self.arcs.insert((src, dst))
    }

    pub(crate) fn remove_arc(&mut self, src: NodeId, dst: NodeId) -> bool {
        self.arcs.remove(&(src, dst))
    }

    pub(crate) fn remove_node(&mut self, id: NodeId) {
        self.events.remove(&id);
        self.conditions.remove(&id);
    }

    pub fn events(&self) -> &BTreeMap<NodeId, Label> {
        &self.events
    }

    pub fn conditions(&self) -> &BTreeMap<NodeId, Label> {
        &self.conditions
    }

    pub fn arcs(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.arcs
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.events.contains_key(&id) || self.conditions.contains_key(&id)
    }

    pub fn role(&self, id: NodeId) -> Option<Role> {
        if self.events.contains_key(&id) {
            Some(Role::Event)
        } else if self.conditions.contains_key(&id) {
            Some(Role::Condition)
        } else {
            None
        }
    }

    pub fn label(&self, id: NodeId) -> Option<&Label> {
        self.events.get(&id).or_else(|| self.conditions.get(&id))
    }

    pub fn node_count(&self) -> usize {
        self.events.len() + self.conditions.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn max_id(&self) -> Option<NodeId> {
        let e = self.events.keys().next_back();
        let c = self.conditions.keys().next_back();
        e.max(c).copied()
    }

    /// All node ids in ascending order.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut ids: Vec<_> = self.events.keys().chain(self.conditions.keys()).copied().collect();
        ids.sort_unstable();
        ids
    }

    /// Pre- and postsets of every node.
    pub fn incidence(&self) -> Incidence {
        let mut inc = Incidence::default();
        for &(src, dst) in &self.arcs {
            inc.post.entry(src).or_default().push(dst);
            inc.pre.entry(dst).or_default().push(src);
        }
        inc
    }

    pub fn is_pure(&self) -> bool {
        validate_pure(self).is_empty()
    }

    pub fn is_clear(&self) -> bool {
        validate_clear(self).is_empty()
    }

    pub(crate) fn require_pure_clear(&self) -> Result<(), NetError> {
        if let Some(v) = validate_pure(self).first() {
            return Err(NetError::NotPure(v.to_string()));
        }
        if let Some(v) = validate_clear(self).first() {
            return Err(NetError::NotClear(v.to_string()));
        }
        Ok(())
    }

    /// The e-type complete subnet spanned by `events`: the events, every
    /// condition adjacent to one of them, and the arcs in between.
    pub fn event_closure(&self, events: &[NodeId], inc: &Incidence) -> Result<PetriNet, NetError> {
        let mut sub = PetriNet::new();
        for &e in events {
            let label = self.events.get(&e).ok_or_else(|| match self.role(e) {
                Some(_) => NetError::RoleMismatch { id: e, expected: Role::Event },
                None => NetError::UnknownNode(e),
            })?;
            if !sub.contains(e) {
                sub.events.insert(e, label.clone());
            }
        }
        for &e in events {
            for &c in inc.preset(e) {
                sub.conditions.insert(c, self.conditions[&c].clone());
                sub.arcs.insert((c, e));
            }
            for &c in inc.postset(e) {
                sub.conditions.insert(c, self.conditions[&c].clone());
                sub.arcs.insert((e, c));
            }
        }
        Ok(sub)
    }
}

/// Pre- and postsets keyed by node, each sorted ascending.
#[derive(Clone, Debug, Default)]
pub struct Incidence {
    pre: HashMap<NodeId, Vec<NodeId>>,
    post: HashMap<NodeId, Vec<NodeId>>,
}

impl Incidence {
    pub fn preset(&self, id: NodeId) -> &[NodeId] {
        self.pre.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn postset(&self, id: NodeId) -> &[NodeId] {
        self.post.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.preset(id).len() + self.postset(id).len()
    }
}

/// Reports dangling arcs, arcs that do not alternate between conditions
/// and events, and condition/event pairs linked in both directions.
pub fn validate_pure(net: &PetriNet) -> Vec<Violation> {
    let mut out = Vec::new();
    for &(src, dst) in &net.arcs {
        let (rs, rd) = (net.role(src), net.role(dst));
        match (rs, rd) {
            (None, _) => out.push(Violation::Dangling { src, dst, missing: src }),
            (_, None) => out.push(Violation::Dangling { src, dst, missing: dst }),
            (Some(a), Some(b)) if a == b => out.push(Violation::NotBipartite { src, dst, role: a }),
            (Some(Role::Condition), Some(Role::Event)) if net.arcs.contains(&(dst, src)) => {
                out.push(Violation::Impure { condition: src, event: dst })
            }
            _ => {}
        }
    }
    out
}

/// Reports every event with two input (or two output) conditions that
/// carry the same label. Arcs that are not condition/event arcs are ignored.
pub fn validate_clear(net: &PetriNet) -> Vec<Violation> {
    let inc = net.incidence();
    let mut out = Vec::new();
    for &e in net.events.keys() {
        for (input, side) in [(true, inc.preset(e)), (false, inc.postset(e))] {
            let mut labels: Vec<&Label> = side.iter().filter_map(|c| net.conditions.get(c)).collect();
            labels.sort();
            let mut last: Option<&Label> = None;
            for l in labels {
                if last == Some(l) {
                    out.push(Violation::DuplicateLabel { event: e, input, label: l.clone() });
                }
                last = Some(l);
            }
        }
    }
    out.dedup();
    out
}

/// The 1-complete subnet around `center`: the node, its neighbours, and the
/// arcs linking them. `EType` expects an event centre, `CType` a condition.
pub fn one_complete_subnet(net: &PetriNet, center: NodeId, kind: OverlapKind) -> Result<PetriNet, NetError> {
    let role = net.role(center).ok_or(NetError::UnknownNode(center))?;
    if role != kind.role() {
        return Err(NetError::RoleMismatch { id: center, expected: kind.role() });
    }
    let mut sub = PetriNet::new();
    sub.add_node(center, role, net.label(center).unwrap().clone())?;
    for &(src, dst) in &net.arcs {
        let other = if src == center {
            dst
        } else if dst == center {
            src
        } else {
            continue;
        };
        if let Some(r) = net.role(other) {
            if !sub.contains(other) {
                sub.add_node(other, r, net.label(other).unwrap().clone())?;
            }
            sub.add_arc(src, dst);
        }
    }
    Ok(sub)
}

/// Swaps the roles of events and conditions; ids, labels and arcs are kept.
pub fn dual(net: &PetriNet) -> PetriNet {
    PetriNet { conditions: net.events.clone(), events: net.conditions.clone(), arcs: net.arcs.clone() }
}

/// Whether `sub` is an e-type complete subnet of `net`: every event of `sub`
/// appears in `net` with the same label and exactly the same pre/postset.
pub fn is_e_complete_subnet(sub: &PetriNet, net: &PetriNet) -> bool {
    let inc = net.incidence();
    let sub_inc = sub.incidence();
    for (&e, label) in &sub.events {
        if net.events.get(&e) != Some(label) {
            return false;
        }
        if inc.preset(e) != sub_inc.preset(e) || inc.postset(e) != sub_inc.postset(e) {
            return false;
        }
    }
    sub.conditions.iter().all(|(c, l)| net.conditions.get(c) == Some(l))
        && sub.arcs.iter().all(|a| net.arcs.contains(a))
}
