//! Naive frequent subnet mining straight on the net.
//!
//! Every connected set of at most `max_events` events (connected through
//! shared conditions) is enumerated once, closed over its conditions, and
//! grouped by the canonical code of its net graph. Support is an exact
//! maximum set of pairwise event-disjoint occurrences. Slow by design; it
//! serves as the reference for the net-graph miner.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::canonical::{canonical_code, parse_code};
use crate::miner::{exact_mis, EmbeddingDoc, LevelDoc, LevelStat, PatternDoc, ResultDoc, StopReason};
use crate::netgraph::{to_e_netgraph, NetGraphError};
use crate::petri::{Incidence, NetError, NodeId, PetriNet};

/// Largest accepted event cap.
pub const MAX_EVENTS_LIMIT: usize = 10;

/// Occurrence lists up to this size get their support by exhaustive search.
pub const BRUTE_FORCE_MIS: usize = 20;

/// A connected e-type complete subnet of the source net.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubnetOccurrence {
    pub events: Vec<NodeId>,
    pub conditions: Vec<NodeId>,
    pub arcs: Vec<(NodeId, NodeId)>,
}

impl SubnetOccurrence {
    pub fn to_net(&self, net: &PetriNet) -> PetriNet {
        let mut sub = PetriNet::new();
        for &e in &self.events {
            sub.add_event(e, net.label(e).unwrap().clone()).unwrap();
        }
        for &c in &self.conditions {
            sub.add_condition(c, net.label(c).unwrap().clone()).unwrap();
        }
        for &(s, d) in &self.arcs {
            sub.add_arc(s, d);
        }
        sub
    }

    fn overlaps(&self, other: &SubnetOccurrence) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.events.len() && j < other.events.len() {
            match self.events[i].cmp(&other.events[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaselineLimits {
    pub max_events: usize,
    /// Refuse once this many occurrences have been enumerated.
    pub max_occurrences: usize,
    pub time_limit: Option<Duration>,
}

impl BaselineLimits {
    pub fn new(max_events: usize) -> Self {
        BaselineLimits { max_events, max_occurrences: 2_000_000, time_limit: None }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("event cap {0} outside 1..={MAX_EVENTS_LIMIT}")]
    Cap(usize),
    #[error("min_sup must be at least 1")]
    ZeroMinSup,
    #[error("more than {0} occurrences; instance too large for naive mining")]
    TooManyOccurrences(usize),
    #[error("time limit of {0:?} exceeded")]
    Timeout(Duration),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    NetGraph(#[from] NetGraphError),
}

/// All occurrences grouped by canonical code, plus whether some connected
/// set hit the event cap.
#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub forms: BTreeMap<String, Vec<SubnetOccurrence>>,
    pub capped: bool,
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
}

impl Clock {
    fn check(&self) -> Result<(), BaselineError> {
        match self.limit {
            Some(l) if self.start.elapsed() > l => Err(BaselineError::Timeout(l)),
            _ => Ok(()),
        }
    }
}

/// Events adjacent through a shared condition, by position in `events`.
fn event_adjacency(net: &PetriNet, events: &[NodeId], inc: &Incidence) -> Vec<Vec<usize>> {
    let pos: BTreeMap<NodeId, usize> = events.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut adj = vec![Vec::new(); events.len()];
    for &c in net.conditions().keys() {
        let around: Vec<usize> = inc.preset(c).iter().chain(inc.postset(c)).map(|e| pos[e]).collect();
        for &a in &around {
            adj[a].extend(around.iter().filter(|&&b| b != a));
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Enumerates every connected event set once (ESU scheme: each set is
/// grown from its smallest member, only through exclusive neighbours).
fn connected_sets(
    adj: &[Vec<usize>],
    cap: usize,
    clock: &Clock,
    limit: usize,
    mut emit: impl FnMut(&[usize]) -> Result<(), BaselineError>,
) -> Result<bool, BaselineError> {
    struct Esu<'a, F> {
        adj: &'a [Vec<usize>],
        cap: usize,
        clock: &'a Clock,
        limit: usize,
        seen: usize,
        capped: bool,
        emit: F,
    }
    impl<F: FnMut(&[usize]) -> Result<(), BaselineError>> Esu<'_, F> {
        fn grow(&mut self, sub: &mut Vec<usize>, mut ext: Vec<usize>, root: usize) -> Result<(), BaselineError> {
            self.seen += 1;
            if self.seen > self.limit {
                return Err(BaselineError::TooManyOccurrences(self.limit));
            }
            if self.seen.is_multiple_of(4096) {
                self.clock.check()?;
            }
            (self.emit)(sub)?;
            if sub.len() == self.cap {
                let adj = self.adj;
                self.capped |= sub.iter().any(|&s| adj[s].iter().any(|u| !sub.contains(u)));
                return Ok(());
            }
            while let Some(w) = ext.pop() {
                let mut next = ext.clone();
                for &u in &self.adj[w] {
                    let exclusive =
                        u > root && !sub.contains(&u) && sub.iter().all(|&s| self.adj[s].binary_search(&u).is_err());
                    if exclusive {
                        next.push(u);
                    }
                }
                sub.push(w);
                self.grow(sub, next, root)?;
                sub.pop();
            }
            Ok(())
        }
    }
    let mut esu = Esu { adj, cap, clock, limit, seen: 0, capped: false, emit: &mut emit };
    for (v, list) in adj.iter().enumerate() {
        let ext: Vec<usize> = list.iter().copied().filter(|&u| u > v).collect();
        esu.grow(&mut vec![v], ext, v)?;
    }
    Ok(esu.capped)
}

/// Every connected e-type complete subnet with at most `limits.max_events`
/// events, grouped by canonical code.
pub fn enumerate_complete_subnets(net: &PetriNet, limits: &BaselineLimits) -> Result<Enumeration, BaselineError> {
    if limits.max_events == 0 || limits.max_events > MAX_EVENTS_LIMIT {
        return Err(BaselineError::Cap(limits.max_events));
    }
    net.require_pure_clear()?;
    let clock = Clock { start: Instant::now(), limit: limits.time_limit };
    let inc = net.incidence();
    let events: Vec<NodeId> = net.events().keys().copied().collect();
    let adj = event_adjacency(net, &events, &inc);
    let mut forms: BTreeMap<String, Vec<SubnetOccurrence>> = BTreeMap::new();
    let capped = connected_sets(&adj, limits.max_events, &clock, limits.max_occurrences, |set| {
        let mut ids: Vec<NodeId> = set.iter().map(|&i| events[i]).collect();
        ids.sort_unstable();
        let sub = net.event_closure(&ids, &inc)?;
        let code = canonical_code(&to_e_netgraph(&sub)?).expect("connected event set");
        forms.entry(code).or_default().push(SubnetOccurrence {
            events: ids,
            conditions: sub.conditions().keys().copied().collect(),
            arcs: sub.arcs().iter().copied().collect(),
        });
        Ok(())
    })?;
    for occ in forms.values_mut() {
        occ.sort();
    }
    Ok(Enumeration { forms, capped })
}

/// Largest set of pairwise disjoint occurrences, as sorted indices.
pub fn disjoint_support(occ: &[SubnetOccurrence]) -> Vec<usize> {
    let n = occ.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if occ[i].overlaps(&occ[j]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    if n <= BRUTE_FORCE_MIS {
        brute_force_mis(&adj)
    } else {
        exact_mis(&adj)
    }
}

/// Tries every independent set; ties go to the lexicographically first.
fn brute_force_mis(adj: &[Vec<usize>]) -> Vec<usize> {
    fn go(adj: &[Vec<usize>], i: usize, cur: &mut Vec<usize>, best: &mut Vec<usize>) {
        if i == adj.len() {
            if cur.len() > best.len() {
                *best = cur.clone();
            }
            return;
        }
        if cur.iter().all(|c| !adj[i].contains(c)) {
            cur.push(i);
            go(adj, i + 1, cur, best);
            cur.pop();
        }
        go(adj, i + 1, cur, best);
    }
    let mut best = Vec::new();
    go(adj, 0, &mut Vec::new(), &mut best);
    best
}

/// Naive mining: forms with at least `min_sup` disjoint occurrences.
pub fn mine_naive(net: &PetriNet, min_sup: usize, limits: &BaselineLimits) -> Result<ResultDoc, BaselineError> {
    if min_sup == 0 {
        return Err(BaselineError::ZeroMinSup);
    }
    let clock = Clock { start: Instant::now(), limit: limits.time_limit };
    let en = enumerate_complete_subnets(net, limits)?;
    let mut levels: BTreeMap<usize, Vec<PatternDoc>> = BTreeMap::new();
    let mut stats: BTreeMap<usize, LevelStat> = BTreeMap::new();
    for (code, occ) in &en.forms {
        clock.check()?;
        let parsed = parse_code(code).expect("well-formed code");
        let level = parsed.edge_count();
        let stat = stats.entry(level).or_insert_with(|| LevelStat { level, ..LevelStat::default() });
        stat.candidates += 1;
        let chosen = disjoint_support(occ);
        if chosen.len() < min_sup {
            continue;
        }
        stat.frequent += 1;
        let overlap_edges = (0..occ.len())
            .flat_map(|i| (i + 1..occ.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| occ[i].overlaps(&occ[j]))
            .count();
        levels.entry(level).or_default().push(PatternDoc {
            code: code.clone(),
            support: chosen.len(),
            mis: "exact".to_string(),
            events: parsed.node_count(),
            candidates: occ.len(),
            overlap_edges,
            embeddings: chosen
                .iter()
                .map(|&i| EmbeddingDoc { events: occ[i].events.clone(), conditions: occ[i].conditions.clone() })
                .collect(),
        });
    }
    let mut doc = ResultDoc {
        engine: "digcarl".to_string(),
        min_sup,
        mis: "exact".to_string(),
        extension: None,
        max_events: Some(limits.max_events),
        noe: None,
        traversal_exact: None,
        stop: if en.capped { StopReason::EventCap } else { StopReason::Exhausted },
        levels_explored: stats.into_values().collect(),
        levels: levels.into_iter().map(|(level, patterns)| LevelDoc { level, patterns }).collect(),
    };
    doc.normalize();
    Ok(doc)
}
