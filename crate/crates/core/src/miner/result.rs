//! Mining results, their JSON document form, and materialised subnets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LevelStat, MiningConfig, Pattern};
use crate::canonical::parse_code;
use crate::netgraph::{from_e_netgraph, NetGraph, NetGraphError};
use crate::petri::{NodeId, PetriNet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// No candidates left.
    Exhausted,
    /// The next level `k` had `k * min_sup > noe`.
    EarlyStop,
    MaxLevel,
    /// Enumeration reached its event cap; larger patterns were not examined.
    EventCap,
}

#[derive(Clone, Debug)]
pub struct MiningResult {
    pub config: MiningConfig,
    /// Edge count of the big graph.
    pub noe: usize,
    pub traversal_exact: bool,
    /// Every level that was evaluated, in order.
    pub levels_explored: Vec<LevelStat>,
    pub stop: StopReason,
    /// Frequent patterns per level, sorted by code.
    pub levels: BTreeMap<usize, Vec<Pattern>>,
}

fn sort_by_code<T>(items: &mut [T], code: impl Fn(&T) -> &str) {
    items.sort_by_cached_key(|t| parse_code(code(t)).expect("well-formed code"));
}

impl MiningResult {
    pub(crate) fn new(
        config: MiningConfig,
        noe: usize,
        traversal_exact: bool,
        levels_explored: Vec<LevelStat>,
        stop: StopReason,
        mut levels: BTreeMap<usize, Vec<Pattern>>,
    ) -> Self {
        levels.retain(|_, v| !v.is_empty());
        for pats in levels.values_mut() {
            sort_by_code(pats, |p| &p.code);
        }
        MiningResult { config, noe, traversal_exact, levels_explored, stop, levels }
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.levels.values().flatten()
    }

    pub fn pattern_count(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }

    pub fn to_doc(&self, ng: &NetGraph) -> ResultDoc {
        let levels = self
            .levels
            .iter()
            .map(|(&level, pats)| LevelDoc {
                level,
                patterns: pats
                    .iter()
                    .map(|p| PatternDoc {
                        code: p.code.clone(),
                        support: p.support,
                        mis: if p.mis_exact { "exact" } else { "greedy" }.to_string(),
                        events: p.graph.node_count(),
                        candidates: p.candidates,
                        overlap_edges: p.overlap_edges,
                        embeddings: p.embeddings.iter().map(|e| EmbeddingDoc::from_nodes(ng, &e.nodes)).collect(),
                    })
                    .collect(),
            })
            .collect();
        ResultDoc {
            engine: "bigcarl".to_string(),
            min_sup: self.config.min_sup,
            mis: self.config.mis.to_string(),
            extension: Some(self.config.extension.to_string()),
            max_events: self.config.max_nodes,
            noe: Some(self.noe),
            traversal_exact: Some(self.traversal_exact),
            stop: self.stop,
            levels_explored: self.levels_explored.clone(),
            levels,
        }
    }
}

/// Serialised mining result shared by both engines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub engine: String,
    pub min_sup: usize,
    pub mis: String,
    pub extension: Option<String>,
    pub max_events: Option<usize>,
    pub noe: Option<usize>,
    pub traversal_exact: Option<bool>,
    pub stop: StopReason,
    pub levels_explored: Vec<LevelStat>,
    pub levels: Vec<LevelDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub level: usize,
    pub patterns: Vec<PatternDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDoc {
    pub code: String,
    pub support: usize,
    /// `exact` or `greedy`.
    pub mis: String,
    /// Event count of the pattern.
    pub events: usize,
    pub candidates: usize,
    pub overlap_edges: usize,
    pub embeddings: Vec<EmbeddingDoc>,
}

/// One occurrence in source-net ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EmbeddingDoc {
    pub events: Vec<NodeId>,
    pub conditions: Vec<NodeId>,
}

impl EmbeddingDoc {
    pub fn from_nodes(ng: &NetGraph, nodes: &[u32]) -> Self {
        let mut events = Vec::new();
        let mut conditions = Vec::new();
        for &g in nodes {
            let origin = ng.node(g).origin.as_ref().expect("net graph built from a net");
            events.push(origin.center);
            conditions.extend_from_slice(&origin.slots);
        }
        events.sort_unstable();
        conditions.sort_unstable();
        conditions.dedup();
        EmbeddingDoc { events, conditions }
    }
}

impl ResultDoc {
    pub fn patterns(&self) -> impl Iterator<Item = &PatternDoc> {
        self.levels.iter().flat_map(|l| &l.patterns)
    }

    /// Puts levels and patterns into canonical order.
    pub fn normalize(&mut self) {
        self.levels.retain(|l| !l.patterns.is_empty());
        self.levels.sort_by_key(|l| l.level);
        for l in &mut self.levels {
            sort_by_code(&mut l.patterns, |p| &p.code);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// `code -> support` over all levels, optionally only patterns with at most
/// `max_events` events.
pub fn support_map(doc: &ResultDoc, max_events: Option<usize>) -> BTreeMap<String, usize> {
    doc.patterns().filter(|p| max_events.is_none_or(|m| p.events <= m)).map(|p| (p.code.clone(), p.support)).collect()
}

/// Each pattern as a net, with its chosen embeddings as subnets of `net`.
pub fn to_subnets(
    result: &MiningResult,
    ng: &NetGraph,
    net: &PetriNet,
) -> Result<Vec<(PetriNet, Vec<PetriNet>)>, NetGraphError> {
    let inc = net.incidence();
    result
        .patterns()
        .map(|p| {
            let pattern = from_e_netgraph(&p.graph)?;
            let subs = p
                .embeddings
                .iter()
                .map(|e| {
                    let doc = EmbeddingDoc::from_nodes(ng, &e.nodes);
                    net.event_closure(&doc.events, &inc).map_err(NetGraphError::from)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((pattern, subs))
        })
        .collect()
}
