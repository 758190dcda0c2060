//! Level-wise frequent pattern mining on a net graph.
//!
//! A pattern is a connected set of net-graph nodes together with every edge
//! between them; its level is that edge count. Support is the size of a
//! maximum independent set of the overlap graph of its embeddings, i.e.
//! the largest number of pairwise node-disjoint occurrences.
//!
//! Growth adds one node adjacent to an embedding. Because all edges to the
//! new node come along, a child can sit several levels above its parent,
//! so candidates wait in per-level queues and levels are processed in
//! ascending order. Every parent of a level-`k` candidate has fewer edges,
//! so a level's candidate set is complete when its turn comes.
//!
//! When every embedding is grown and every support is exact, support is
//! anti-monotone and each frequent pattern has all its embeddings found.
//! The miner then skips a child node set unless each connected subset one
//! node smaller is a known frequent embedding, and grows each child from a
//! single parent only.

mod mis;
mod overlap;
mod result;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{minimal_dfs_traversal_bounded, RankTables, TraversalResult};
use crate::netgraph::{GNode, GNodeId, NetGraph};

pub use mis::{exact_mis, greedy_mis, max_independent_set, MisMode, MisOutcome};
pub use overlap::{build_overlap_graph, OverlapGraph, SBuckets};
pub use result::{support_map, to_subnets, EmbeddingDoc, LevelDoc, MiningResult, PatternDoc, ResultDoc, StopReason};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionMode {
    /// Grow only the embeddings picked by the independent set.
    Paper,
    /// Grow every embedding of a frequent pattern.
    Complete,
}

impl fmt::Display for ExtensionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtensionMode::Paper => "paper",
            ExtensionMode::Complete => "complete",
        })
    }
}

impl FromStr for ExtensionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(ExtensionMode::Paper),
            "complete" => Ok(ExtensionMode::Complete),
            _ => Err(format!("unknown extension mode {s:?} (expected paper or complete)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MiningError {
    #[error("min_sup must be at least 1")]
    ZeroMinSup,
    #[error("auto MIS threshold must be at least 1")]
    ZeroAutoThreshold,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningConfig {
    pub min_sup: usize,
    pub mis: MisMode,
    pub extension: ExtensionMode,
    /// Highest level to process.
    pub max_level: Option<usize>,
    /// Largest pattern, in nodes, to generate.
    pub max_nodes: Option<usize>,
    /// Tie branches the traversal of the big graph may explore.
    pub traversal_budget: usize,
    /// Use the thread pool when the `parallel` feature is built in.
    pub parallel: bool,
    /// Keep every candidate embedding and the overlap graph of each
    /// frequent pattern.
    #[serde(default)]
    pub keep_overlap: bool,
}

impl MiningConfig {
    pub fn new(min_sup: usize) -> Self {
        MiningConfig {
            min_sup,
            mis: MisMode::default(),
            extension: ExtensionMode::Paper,
            max_level: None,
            max_nodes: None,
            traversal_budget: 64,
            parallel: true,
            keep_overlap: false,
        }
    }

    pub fn validate(&self) -> Result<(), MiningError> {
        if self.min_sup == 0 {
            return Err(MiningError::ZeroMinSup);
        }
        if self.mis == MisMode::Auto(0) {
            return Err(MiningError::ZeroAutoThreshold);
        }
        Ok(())
    }
}

/// One occurrence of a pattern in the big graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    /// Sorted.
    pub nodes: Vec<GNodeId>,
    /// `node_map[i]` is the big-graph node playing pattern node `i`.
    pub node_map: Vec<GNodeId>,
}

impl Embedding {
    /// Indices of the big-graph edges covered by this embedding.
    pub fn edges(&self, ng: &NetGraph) -> Vec<usize> {
        let mut out = Vec::new();
        for &u in &self.nodes {
            for &(w, e) in ng.neighbors(u) {
                if w > u && self.nodes.binary_search(&w).is_ok() {
                    out.push(e);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// A frequent pattern with the embeddings that realise its support.
#[derive(Clone, Debug)]
pub struct Pattern {
    pub level: usize,
    pub code: String,
    /// Pattern graph; node `i` is visit index `i` of the code.
    pub graph: NetGraph,
    pub support: usize,
    pub mis_exact: bool,
    /// Number of candidate embeddings before the independent set.
    pub candidates: usize,
    pub overlap_edges: usize,
    /// The chosen pairwise node-disjoint embeddings.
    pub embeddings: Vec<Embedding>,
    /// All candidate embeddings and their overlap graph, when requested.
    pub overlap: Option<(Vec<Embedding>, OverlapGraph)>,
}

/// Candidate patterns of one level sorted by their rank-encoded code, each
/// with its candidate embeddings.
pub type CandidateSet = Vec<(Vec<u32>, Vec<Embedding>)>;

fn fingerprint(nodes: &[GNodeId]) -> u64 {
    let mut h = DefaultHasher::new();
    nodes.hash(&mut h);
    h.finish()
}

/// Adjacency of the subgraph induced by `nodes` (sorted, at most 64) as
/// bit masks over positions in `nodes`.
fn bit_adjacency(ng: &NetGraph, nodes: &[GNodeId]) -> [u64; 64] {
    let mut adj = [0u64; 64];
    for (i, &g) in nodes.iter().enumerate() {
        for &(w, _) in ng.neighbors(g) {
            if let Ok(j) = nodes.binary_search(&w) {
                adj[i] |= 1 << j;
            }
        }
    }
    adj
}

/// Whether the graph with bit adjacency `adj` stays connected once vertex
/// `skip` is removed.
fn connected_without(adj: &[u64], skip: usize) -> bool {
    let all = (u64::MAX >> (64 - adj.len())) & !(1 << skip);
    let mut seen = 1u64 << usize::from(skip == 0);
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & all & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == all
}

fn group_by_key(mut found: Vec<(Vec<u32>, Embedding)>) -> CandidateSet {
    found.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: CandidateSet = Vec::new();
    for (key, emb) in found {
        match out.last_mut() {
            Some((k, embs)) if *k == key => embs.push(emb),
            _ => out.push((key, vec![emb])),
        }
    }
    out
}

/// Per-level bookkeeping of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStat {
    pub level: usize,
    pub candidates: usize,
    pub frequent: usize,
}

/// Evaluation of one candidate.
struct Evaluated {
    key: Vec<u32>,
    embs: Vec<Embedding>,
    mis: MisOutcome,
    og: Option<OverlapGraph>,
}

pub(crate) fn par_map<T, R, F>(parallel: bool, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    // a one-thread pool only adds overhead
    #[cfg(feature = "parallel")]
    if parallel && rayon::current_num_threads() > 1 {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}

/// Mining state over one big graph.
pub struct Miner<'g> {
    ng: &'g NetGraph,
    cfg: MiningConfig,
    tables: RankTables,
    node_freq: Vec<bool>,
    edge_freq: Vec<bool>,
    /// Fingerprints of every embedding of a frequent pattern so far.
    known: HashSet<u64>,
    /// Whether a child may be dropped when one of its connected one-node
    /// smaller subsets is not in `known`. Needs every embedding grown and
    /// every support exact, since only then is support anti-monotone and
    /// `known` complete.
    prune: bool,
    /// Whether each child is generated from one parent only: the one
    /// missing its largest removable node. Exact under the same conditions
    /// as `prune`, which can then not lapse.
    one_parent: bool,
}

impl<'g> Miner<'g> {
    pub fn new(ng: &'g NetGraph, cfg: MiningConfig) -> Result<Self, MiningError> {
        cfg.validate()?;
        Ok(Miner {
            ng,
            tables: RankTables::new(ng),
            node_freq: vec![false; ng.node_count()],
            edge_freq: vec![false; ng.edge_count()],
            known: HashSet::new(),
            prune: cfg.extension == ExtensionMode::Complete,
            one_parent: cfg.extension == ExtensionMode::Complete && cfg.mis == MisMode::Exact,
            cfg,
        })
    }

    /// Groups traversal nodes by tagging; every node is its own embedding.
    pub fn level0_patterns(&mut self, tr: &TraversalResult) -> Vec<Pattern> {
        let mut groups: BTreeMap<u32, Vec<GNodeId>> = BTreeMap::new();
        for r in &tr.min_e0 {
            groups.entry(self.tables.node_rank[r.gnode as usize]).or_default().push(r.gnode);
        }
        let mut out = Vec::new();
        for (rank, mut nodes) in groups {
            if nodes.len() < self.cfg.min_sup {
                continue;
            }
            nodes.sort_unstable();
            for &g in &nodes {
                self.node_freq[g as usize] = true;
            }
            let embs: Vec<Embedding> = nodes.iter().map(|&g| Embedding { nodes: vec![g], node_map: vec![g] }).collect();
            let mis = MisOutcome { set: (0..embs.len()).collect(), exact: true };
            let og = OverlapGraph::from_adjacency(vec![Vec::new(); embs.len()]);
            out.push(self.pattern(0, Evaluated { key: vec![rank], embs, mis, og: Some(og) }));
        }
        out
    }

    /// Level-1 candidates: traversal edges grouped by their two-node code,
    /// skipping edges with an infrequent endpoint.
    pub fn level1_candidates(&self, tr: &TraversalResult) -> CandidateSet {
        let mut found = Vec::new();
        for r in &tr.min_e1 {
            let e = self.ng.edge(r.edge);
            if !self.node_freq[e.a as usize] || !self.node_freq[e.b as usize] {
                continue;
            }
            found.push(self.embed(vec![e.a.min(e.b), e.a.max(e.b)]));
        }
        group_by_key(found)
    }

    /// Canonical key and embedding for a sorted node set.
    fn embed(&self, nodes: Vec<GNodeId>) -> (Vec<u32>, Embedding) {
        let found = self.tables.induced(self.ng, &nodes).minimal(None);
        let node_map = found.order.iter().map(|&l| nodes[l as usize]).collect();
        (found.key, Embedding { nodes, node_map })
    }

    fn pattern(&self, level: usize, ev: Evaluated) -> Pattern {
        let Evaluated { key, embs, mis, og } = ev;
        let og = og.expect("frequent candidates have an overlap graph");
        let graph = self.ng.induced(&embs[0].node_map);
        let graph = NetGraph::new(
            graph.nodes().iter().map(|n| GNode { tagging: n.tagging.clone(), origin: None }).collect(),
            graph.edges().iter().map(|e| (e.a, e.b, e.fwd.clone())).collect(),
        )
        .expect("copy of a valid graph");
        let candidates = embs.len();
        let chosen = mis.set.iter().map(|&i| embs[i].clone()).collect();
        Pattern {
            level,
            code: self.tables.render(&key),
            graph,
            support: mis.set.len(),
            mis_exact: mis.exact,
            candidates,
            overlap_edges: og.edge_count(),
            embeddings: chosen,
            overlap: self.cfg.keep_overlap.then_some((embs, og)),
        }
    }

    fn evaluate(&self, cands: CandidateSet) -> Vec<Evaluated> {
        let min_sup = self.cfg.min_sup;
        let mode = self.cfg.mis;
        par_map(self.cfg.parallel, cands, move |(key, mut embs)| {
            embs.sort_unstable();
            embs.dedup_by(|a, b| a.nodes == b.nodes);
            if embs.len() < min_sup {
                let n = embs.len();
                return Evaluated { key, embs, mis: MisOutcome { set: (0..n).collect(), exact: true }, og: None };
            }
            let og = build_overlap_graph(&embs, &mut SBuckets::new());
            let mis = max_independent_set(&og, mode);
            Evaluated { key, embs, mis, og: Some(og) }
        })
    }

    /// Node sets of the children of one embedding, with their levels, for
    /// every admissible neighbour node.
    fn child_sets(&self, level: usize, emb: &Embedding) -> Vec<(usize, Vec<GNodeId>)> {
        let mut out = Vec::new();
        if self.cfg.max_nodes.is_some_and(|m| emb.nodes.len() >= m) {
            return out;
        }
        let mut tried: Vec<GNodeId> = Vec::new();
        for &u in &emb.nodes {
            for &(v, _) in self.ng.neighbors(u) {
                if !self.node_freq[v as usize] || emb.nodes.binary_search(&v).is_ok() || tried.contains(&v) {
                    continue;
                }
                tried.push(v);
                let mut new_edges = 0;
                let mut ok = true;
                for &(w, e) in self.ng.neighbors(v) {
                    if emb.nodes.binary_search(&w).is_ok() {
                        if !self.edge_freq[e] {
                            ok = false;
                            break;
                        }
                        new_edges += 1;
                    }
                }
                if !ok {
                    continue;
                }
                let at = emb.nodes.binary_search(&v).unwrap_err();
                let mut nodes = Vec::with_capacity(emb.nodes.len() + 1);
                nodes.extend_from_slice(&emb.nodes[..at]);
                nodes.push(v);
                nodes.extend_from_slice(&emb.nodes[at..]);
                if self.one_parent && nodes.len() <= 64 && at + 1 < nodes.len() {
                    // left to the parent that lacks the largest removable node
                    let adj = bit_adjacency(self.ng, &nodes);
                    if (at + 1..nodes.len()).any(|i| connected_without(&adj[..nodes.len()], i)) {
                        continue;
                    }
                }
                out.push((level + new_edges, nodes));
            }
        }
        out
    }

    /// Grows the given embeddings of frequent level-`k` patterns into node
    /// sets queued by level. They are canonicalised when their level is due.
    pub fn extend_patterns(&self, k: usize, bases: Vec<&Embedding>, pending: &mut BTreeMap<usize, Vec<Vec<GNodeId>>>) {
        for (level, nodes) in par_map(self.cfg.parallel, bases, |emb| self.child_sets(k, emb)).into_iter().flatten() {
            pending.entry(level).or_default().push(nodes);
        }
    }

    /// Candidates from queued node sets. A set reached from several parents
    /// is canonicalised once.
    fn group(&self, mut sets: Vec<Vec<GNodeId>>) -> CandidateSet {
        sets.sort_unstable();
        sets.dedup();
        let found =
            par_map(self.cfg.parallel, sets, |nodes| self.has_frequent_parents(&nodes).then(|| self.embed(nodes)));
        group_by_key(found.into_iter().flatten().collect())
    }

    /// False when some connected subset of `nodes` missing one node is not
    /// an embedding of a frequent pattern, so `nodes` cannot be one either.
    /// Sets above 64 nodes are not checked.
    fn has_frequent_parents(&self, nodes: &[GNodeId]) -> bool {
        if !self.prune || nodes.len() < 3 || nodes.len() > 64 {
            return true;
        }
        let adj = bit_adjacency(self.ng, nodes);
        let adj = &adj[..nodes.len()];
        let mut rest = Vec::with_capacity(nodes.len() - 1);
        (0..nodes.len()).all(|skip| {
            if !connected_without(adj, skip) {
                return true;
            }
            rest.clear();
            rest.extend(nodes.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &g)| g));
            self.known.contains(&fingerprint(&rest))
        })
    }

    fn admits(&self, level: usize, noe: usize) -> Option<StopReason> {
        if self.cfg.max_level.is_some_and(|m| level > m) {
            return Some(StopReason::MaxLevel);
        }
        if level.saturating_mul(self.cfg.min_sup) > noe {
            return Some(StopReason::EarlyStop);
        }
        None
    }

    pub fn run(mut self) -> MiningResult {
        let tr = minimal_dfs_traversal_bounded(self.ng, self.cfg.traversal_budget);
        let noe = tr.noe;
        let mut levels: BTreeMap<usize, Vec<Pattern>> = BTreeMap::new();
        let mut stats = Vec::new();

        let l0 = self.level0_patterns(&tr);
        stats.push(LevelStat { level: 0, candidates: tr.min_e0.len(), frequent: l0.len() });
        levels.insert(0, l0);

        let mut pending: BTreeMap<usize, Vec<Vec<GNodeId>>> = BTreeMap::new();
        let mut stop = StopReason::Exhausted;
        let mut first = None;
        if let Some(reason) = self.admits(1, noe) {
            stop = reason;
        } else {
            first = Some(self.level1_candidates(&tr));
        }

        loop {
            let (level, cands) = match first.take() {
                Some(c) => (1, c),
                None => {
                    let Some((level, sets)) = pending.pop_first() else { break };
                    if let Some(reason) = self.admits(level, noe) {
                        stop = reason;
                        break;
                    }
                    (level, self.group(sets))
                }
            };
            let n_cands = cands.len();
            let mut frequent = Vec::new();
            for ev in self.evaluate(cands) {
                self.prune &= ev.mis.exact;
                if ev.mis.set.len() < self.cfg.min_sup {
                    continue;
                }
                if self.prune {
                    self.known.extend(ev.embs.iter().map(|e| fingerprint(&e.nodes)));
                }
                if level == 1 {
                    for emb in &ev.embs {
                        for e in emb.edges(self.ng) {
                            self.edge_freq[e] = true;
                        }
                    }
                }
                frequent.push(ev);
            }
            // level-1 frequencies must be complete before any growth
            let bases: Vec<&Embedding> = match self.cfg.extension {
                ExtensionMode::Complete => frequent.iter().flat_map(|ev| &ev.embs).collect(),
                ExtensionMode::Paper => {
                    frequent.iter().flat_map(|ev| ev.mis.set.iter().map(|&i| &ev.embs[i])).collect()
                }
            };
            self.extend_patterns(level, bases, &mut pending);
            let found: Vec<Pattern> = frequent.into_iter().map(|ev| self.pattern(level, ev)).collect();
            stats.push(LevelStat { level, candidates: n_cands, frequent: found.len() });
            if !found.is_empty() {
                levels.insert(level, found);
            }
            if let Some(reason) = self.admits(level + 1, noe) {
                stop = reason;
                break;
            }
        }

        let traversal_exact = tr.exact;
        MiningResult::new(self.cfg, noe, traversal_exact, stats, stop, levels)
    }
}

/// Mines `ng` with `cfg`.
pub fn mine(ng: &NetGraph, cfg: &MiningConfig) -> Result<MiningResult, MiningError> {
    Ok(Miner::new(ng, cfg.clone())?.run())
}

#[cfg(test)]
mod tests;
