//! Gluing two nets together by identifying equally-labelled nodes.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::Rng;

use super::{Label, NetError, NodeId, OverlapKind, PetriNet, Role};

/// Rejection-sampling attempts before falling back to enumerating every
/// eligible pair.
const SAMPLE_ATTEMPTS: usize = 32;

/// Result of [`connect`].
#[derive(Clone, Debug)]
pub struct ConnectOutcome {
    pub net: PetriNet,
    /// Number of node pairs identified.
    pub merges: usize,
    /// Id of every node of the second net inside `net`.
    pub id_map: BTreeMap<NodeId, NodeId>,
}

impl ConnectOutcome {
    pub fn overlap_achieved(&self) -> bool {
        self.merges > 0
    }
}

/// Placement of one attached net, see [`Connector::attach`].
#[derive(Clone, Debug)]
pub struct Attachment {
    pub merges: usize,
    pub id_map: BTreeMap<NodeId, NodeId>,
}

/// A growing net with the indexes needed to attach further nets quickly.
///
/// [`connect`] is a one-shot wrapper; the generators keep one `Connector`
/// alive across thousands of attachments.
#[derive(Clone, Debug)]
pub struct Connector {
    net: PetriNet,
    pre: HashMap<NodeId, Vec<NodeId>>,
    post: HashMap<NodeId, Vec<NodeId>>,
    by_label: HashMap<(Role, Label), Vec<NodeId>>,
    next_id: u32,
}

impl Connector {
    pub fn new(net: PetriNet) -> Self {
        let mut c = Connector {
            pre: HashMap::new(),
            post: HashMap::new(),
            by_label: HashMap::new(),
            next_id: net.max_id().map_or(0, |m| m.0 + 1),
            net: PetriNet::new(),
        };
        for &(s, d) in net.arcs() {
            c.post.entry(s).or_default().push(d);
            c.pre.entry(d).or_default().push(s);
        }
        for id in net.node_ids() {
            let role = net.role(id).unwrap();
            c.by_label.entry((role, net.label(id).unwrap().clone())).or_default().push(id);
        }
        c.net = net;
        c
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn into_net(self) -> PetriNet {
        self.net
    }

    /// Adds a fresh-id copy of `small` and identifies between one and
    /// `max_overlaps` of its `kind` nodes with equally-labelled nodes already
    /// present. Pairs are drawn uniformly among those whose identification
    /// keeps the net pure and clear; nodes in `protected` are never chosen
    /// as merge targets. Fewer merges happen when eligible pairs run out.
    pub fn attach<R: Rng + ?Sized>(
        &mut self,
        kind: OverlapKind,
        max_overlaps: usize,
        small: &PetriNet,
        rng: &mut R,
        protected: &HashSet<NodeId>,
    ) -> Attachment {
        let role = kind.role();
        let first_fresh = self.next_id;
        let mut id_map = BTreeMap::new();
        for id in small.node_ids() {
            let fresh = NodeId(self.next_id);
            self.next_id += 1;
            id_map.insert(id, fresh);
            let r = small.role(id).unwrap();
            self.net.add_node(fresh, r, small.label(id).unwrap().clone()).unwrap();
        }
        for &(s, d) in small.arcs() {
            let (s, d) = (id_map[&s], id_map[&d]);
            self.net.add_arc(s, d);
            self.post.entry(s).or_default().push(d);
            self.pre.entry(d).or_default().push(s);
        }

        let mut candidates: Vec<NodeId> =
            id_map.values().copied().filter(|&id| self.net.role(id) == Some(role)).collect();
        let mut used: HashSet<NodeId> = HashSet::new();
        let target = if max_overlaps == 0 { 0 } else { rng.gen_range(1..=max_overlaps) };
        let mut merges = 0;
        while merges < target {
            let Some((a, b)) = self.draw_pair(role, &candidates, &used, protected, rng) else {
                break;
            };
            self.merge(b, a);
            used.insert(a);
            candidates.retain(|&c| c != b);
            for v in id_map.values_mut() {
                if *v == b {
                    *v = a;
                }
            }
            merges += 1;
        }

        let mut fresh: Vec<NodeId> = id_map.values().copied().filter(|id| id.0 >= first_fresh).collect();
        fresh.sort_unstable();
        fresh.dedup();
        for id in fresh {
            let r = self.net.role(id).unwrap();
            self.by_label.entry((r, self.net.label(id).unwrap().clone())).or_default().push(id);
        }
        Attachment { merges, id_map }
    }

    fn draw_pair<R: Rng + ?Sized>(
        &self,
        role: Role,
        candidates: &[NodeId],
        used: &HashSet<NodeId>,
        protected: &HashSet<NodeId>,
        rng: &mut R,
    ) -> Option<(NodeId, NodeId)> {
        let buckets: Vec<(NodeId, &[NodeId])> = candidates
            .iter()
            .map(|&b| {
                let key = (role, self.net.label(b).unwrap().clone());
                (b, self.by_label.get(&key).map_or(&[][..], Vec::as_slice))
            })
            .collect();
        let total: usize = buckets.iter().map(|(_, v)| v.len()).sum();
        if total == 0 {
            return None;
        }
        let ok = |a: NodeId, b: NodeId| !used.contains(&a) && !protected.contains(&a) && self.merge_ok(a, b);
        for _ in 0..SAMPLE_ATTEMPTS {
            let mut r = rng.gen_range(0..total);
            for &(b, bucket) in &buckets {
                if r < bucket.len() {
                    let a = bucket[r];
                    if ok(a, b) {
                        return Some((a, b));
                    }
                    break;
                }
                r -= bucket.len();
            }
        }
        let eligible: Vec<(NodeId, NodeId)> = buckets
            .iter()
            .flat_map(|&(b, bucket)| bucket.iter().map(move |&a| (a, b)))
            .filter(|&(a, b)| ok(a, b))
            .collect();
        if eligible.is_empty() {
            None
        } else {
            Some(eligible[rng.gen_range(0..eligible.len())])
        }
    }

    fn preset(&self, id: NodeId) -> &[NodeId] {
        self.pre.get(&id).map_or(&[], Vec::as_slice)
    }

    fn postset(&self, id: NodeId) -> &[NodeId] {
        self.post.get(&id).map_or(&[], Vec::as_slice)
    }

    /// Would identifying `b` with `a` keep the net pure and clear?
    fn merge_ok(&self, a: NodeId, b: NodeId) -> bool {
        let (pa, pb, qa, qb) = (self.preset(a), self.preset(b), self.postset(a), self.postset(b));
        if pa.iter().chain(pb).any(|x| qa.contains(x) || qb.contains(x)) {
            return false;
        }
        let label = |id: &NodeId| self.net.label(*id).unwrap();
        match self.net.role(a) {
            Some(Role::Event) => {
                // merged event must not see one label twice on either side
                let clash =
                    |xs: &[NodeId], ys: &[NodeId]| xs.iter().any(|x| ys.iter().any(|y| x != y && label(x) == label(y)));
                !clash(pa, pb) && !clash(qa, qb)
            }
            _ => {
                // events around `b` must not already hold another `label(b)`
                let lb = label(&b);
                let dup = |side: &[NodeId]| side.iter().any(|c| *c != a && *c != b && label(c) == lb);
                pb.iter().all(|x| !dup(self.postset(*x))) && qb.iter().all(|x| !dup(self.preset(*x)))
            }
        }
    }

    /// Redirects every arc of `b` to `a` and drops `b`.
    fn merge(&mut self, b: NodeId, a: NodeId) {
        for p in self.pre.remove(&b).unwrap_or_default() {
            self.net.remove_arc(p, b);
            let post = self.post.get_mut(&p).unwrap();
            post.retain(|&x| x != b);
            if self.net.add_arc(p, a) {
                post.push(a);
                self.pre.entry(a).or_default().push(p);
            }
        }
        for s in self.post.remove(&b).unwrap_or_default() {
            self.net.remove_arc(b, s);
            let pre = self.pre.get_mut(&s).unwrap();
            pre.retain(|&x| x != b);
            if self.net.add_arc(a, s) {
                pre.push(a);
                self.post.entry(a).or_default().push(s);
            }
        }
        self.net.remove_node(b);
    }
}

/// Union of `n1` and a fresh-id copy of `n2` with between one and `h`
/// identified node pairs of the kind given by `x`.
pub fn connect<R: Rng + ?Sized>(
    x: OverlapKind,
    h: usize,
    n1: &PetriNet,
    n2: &PetriNet,
    rng: &mut R,
) -> Result<ConnectOutcome, NetError> {
    n1.require_pure_clear()?;
    n2.require_pure_clear()?;
    let mut c = Connector::new(n1.clone());
    let att = c.attach(x, h, n2, rng, &HashSet::new());
    Ok(ConnectOutcome { net: c.into_net(), merges: att.merges, id_map: att.id_map })
}
