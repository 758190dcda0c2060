//! Planted copies of small nets and the answer key that goes with them.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{generate_with, GeneratorError, GeneratorParams};
use crate::canonical::canonical_code;
use crate::miner::{exact_mis, ResultDoc};
use crate::netgraph::to_e_netgraph;
use crate::petri::{Connector, NodeId, OverlapKind, PetriNet};

/// Small nets to plant into a generated net.
#[derive(Clone, Debug)]
pub struct PlantSpec {
    pub nets: Vec<PetriNet>,
    /// Most events a planting net may have.
    pub max_events: usize,
    /// Most nodes identified when a copy is attached.
    pub max_overlaps: usize,
    pub min_sup: usize,
    /// Copy counts of each kind are drawn from `min_sup + 1..=copy_bound`.
    pub copy_bound: usize,
}

/// One copy of a planting net, in ids of the final net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub kind: OverlapKind,
    pub events: Vec<NodeId>,
    pub conditions: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedPattern {
    pub code: String,
    pub events: usize,
    pub c_copies: usize,
    pub e_copies: usize,
    /// Copies whose events were later merged with other events.
    pub broken_copies: usize,
    /// Largest number of pairwise event-disjoint recorded occurrences; a
    /// lower bound on the exact support.
    pub expected_support: usize,
    /// Copies still present as complete subnets of the final net.
    pub occurrences: Vec<Occurrence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub min_sup: usize,
    pub copy_bound: usize,
    pub patterns: Vec<PlantedPattern>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks every occurrence against `net`: its events exist, their
    /// closure has exactly the recorded conditions and the pattern's code,
    /// and enough of them are disjoint.
    pub fn audit(&self, net: &PetriNet) -> Result<(), String> {
        let inc = net.incidence();
        for p in &self.patterns {
            for o in &p.occurrences {
                let sub = net.event_closure(&o.events, &inc).map_err(|e| e.to_string())?;
                if sub.conditions().keys().copied().collect::<Vec<_>>() != o.conditions {
                    return Err(format!("{}: conditions of {:?} differ", p.code, o.events));
                }
                let code = to_e_netgraph(&sub)
                    .map_err(|e| e.to_string())
                    .and_then(|ng| canonical_code(&ng).map_err(|e| e.to_string()))?;
                if code != p.code {
                    return Err(format!("{}: occurrence {:?} has code {code}", p.code, o.events));
                }
            }
            if disjoint_count(&p.occurrences) < p.expected_support || p.expected_support < self.min_sup {
                return Err(format!("{}: fewer than {} disjoint occurrences", p.code, p.expected_support));
            }
        }
        Ok(())
    }
}

fn disjoint_count(occ: &[Occurrence]) -> usize {
    let adj: Vec<Vec<usize>> = (0..occ.len())
        .map(|i| {
            (0..occ.len()).filter(|&j| j != i && occ[i].events.iter().any(|e| occ[j].events.contains(e))).collect()
        })
        .collect();
    exact_mis(&adj).len()
}

/// Generates a net from `base`, then attaches `c(s)` copies of each
/// planting net glued on conditions and `e(s)` copies glued on events, in
/// shuffled order. Events of condition-glued copies are never chosen as
/// merge targets afterwards, so those copies stay intact and pairwise
/// event-disjoint; event-glued copies are recorded only if they survive.
pub fn plant<R: Rng + ?Sized>(
    spec: &PlantSpec,
    base: &GeneratorParams,
    rng: &mut R,
) -> Result<(PetriNet, GroundTruth), GeneratorError> {
    if spec.min_sup == 0 {
        return Err(GeneratorError::Params("min_sup must be at least 1".into()));
    }
    if spec.copy_bound <= spec.min_sup {
        return Err(GeneratorError::Infeasible(format!(
            "copy bound {} leaves no count above min_sup {}",
            spec.copy_bound, spec.min_sup
        )));
    }
    if spec.max_overlaps == 0 {
        return Err(GeneratorError::Params("max_overlaps must be at least 1".into()));
    }
    let mut codes = Vec::with_capacity(spec.nets.len());
    for (i, s) in spec.nets.iter().enumerate() {
        let events = s.events().len();
        if events == 0 || events > spec.max_events {
            return Err(GeneratorError::Params(format!(
                "planting net {i} has {events} events, expected 1..={}",
                spec.max_events
            )));
        }
        let ng = to_e_netgraph(s)?;
        let code =
            canonical_code(&ng).map_err(|_| GeneratorError::Params(format!("planting net {i} is not connected")))?;
        codes.push(code);
    }

    let mut conn = Connector::new(generate_with(rng, base)?);
    let mut copies: Vec<(usize, OverlapKind)> = Vec::new();
    let mut counts = Vec::new();
    for i in 0..spec.nets.len() {
        let c = rng.gen_range(spec.min_sup + 1..=spec.copy_bound);
        let e = rng.gen_range(spec.min_sup + 1..=spec.copy_bound);
        copies.extend(std::iter::repeat_n((i, OverlapKind::CType), c));
        copies.extend(std::iter::repeat_n((i, OverlapKind::EType), e));
        counts.push((c, e));
    }
    copies.shuffle(rng);

    let mut protected: HashSet<NodeId> = HashSet::new();
    let mut placed: Vec<Vec<(OverlapKind, Vec<NodeId>)>> = vec![Vec::new(); spec.nets.len()];
    for (i, kind) in copies {
        let s = &spec.nets[i];
        let att = conn.attach(kind, spec.max_overlaps, s, rng, &protected);
        let mut events: Vec<NodeId> = s.events().keys().map(|e| att.id_map[e]).collect();
        events.sort_unstable();
        if kind == OverlapKind::CType {
            protected.extend(&events);
        }
        placed[i].push((kind, events));
    }
    let net = conn.into_net();

    let inc = net.incidence();
    let mut patterns = Vec::with_capacity(spec.nets.len());
    for (i, copies) in placed.into_iter().enumerate() {
        let total = copies.len();
        let mut occurrences = Vec::new();
        for (kind, events) in copies {
            let sub = net.event_closure(&events, &inc)?;
            if canonical_code(&to_e_netgraph(&sub)?).ok().as_ref() == Some(&codes[i]) {
                occurrences.push(Occurrence { kind, events, conditions: sub.conditions().keys().copied().collect() });
            }
        }
        let expected_support = disjoint_count(&occurrences);
        if expected_support < spec.min_sup {
            return Err(GeneratorError::Infeasible(format!(
                "planting net {i} kept {expected_support} disjoint copies"
            )));
        }
        patterns.push(PlantedPattern {
            code: codes[i].clone(),
            events: spec.nets[i].events().len(),
            c_copies: counts[i].0,
            e_copies: counts[i].1,
            broken_copies: total - occurrences.len(),
            expected_support,
            occurrences,
        });
    }
    Ok((net, GroundTruth { min_sup: spec.min_sup, copy_bound: spec.copy_bound, patterns }))
}

/// Outcome of looking one planted pattern up in a mining result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub code: String,
    pub expected: usize,
    pub found: Option<usize>,
    pub pass: bool,
}

/// A planted pattern passes when the result lists it with at least its
/// expected support, or, if its support came from a greedy independent
/// set, with at least `min_sup`.
pub fn verify(truth: &GroundTruth, doc: &ResultDoc) -> Vec<Verdict> {
    truth
        .patterns
        .iter()
        .map(|p| {
            let hit = doc.patterns().find(|d| d.code == p.code);
            let pass = hit
                .is_some_and(|d| d.support >= p.expected_support || (d.mis == "greedy" && d.support >= truth.min_sup));
            Verdict { code: p.code.clone(), expected: p.expected_support, found: hit.map(|d| d.support), pass }
        })
        .collect()
}
