//! Seeded random nets, planted patterns with ground truth, and copies
//! inserted under a predefined overlap schema.

mod plant;
mod schema;

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::NetGraphError;
use crate::petri::{Connector, Label, NetError, NodeId, OverlapKind, PetriNet};

pub use plant::{plant, verify, GroundTruth, Occurrence, PlantSpec, PlantedPattern, Verdict};
pub use schema::{insert_with_overlap_schema, SchemaInsertion};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("cannot draw {wanted} distinct condition labels from an alphabet of {alphabet}")]
    Alphabet { wanted: usize, alphabet: usize },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("overlap schema unrealizable: {0}")]
    Unrealizable(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    NetGraph(#[from] NetGraphError),
}

/// Parameters of a generated net: `events` basic nets are attached one by
/// one to a first basic net, each glued on at most `max_overlaps` nodes of
/// kind `overlap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub overlap: OverlapKind,
    pub events: usize,
    pub max_overlaps: usize,
    /// Inclusive input-condition count range of a basic net.
    pub cond_in: [usize; 2],
    pub cond_out: [usize; 2],
    pub event_alphabet: usize,
    pub cond_alphabet: usize,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            overlap: OverlapKind::CType,
            events: 100,
            max_overlaps: 3,
            cond_in: [1, 3],
            cond_out: [1, 3],
            event_alphabet: 10,
            cond_alphabet: 10,
            seed: 0,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: &str| Err(GeneratorError::Params(m.to_string()));
        if self.events == 0 {
            return bad("events must be at least 1");
        }
        if self.max_overlaps == 0 {
            return bad("max_overlaps must be at least 1");
        }
        if self.cond_in[0] > self.cond_in[1] || self.cond_out[0] > self.cond_out[1] {
            return bad("empty condition count range");
        }
        if self.event_alphabet == 0 || self.cond_alphabet == 0 {
            return bad("alphabets must be non-empty");
        }
        let wanted = self.cond_in[1].max(self.cond_out[1]);
        if wanted > self.cond_alphabet {
            return Err(GeneratorError::Alphabet { wanted, alphabet: self.cond_alphabet });
        }
        Ok(())
    }
}

fn label(prefix: char, k: usize) -> Label {
    Label::new(format!("{prefix}{k}")).expect("valid label")
}

/// One event `e<k>` with input and output conditions `c<k>`; labels on
/// each side are distinct, so the net is clear.
pub fn basic_net<R: Rng + ?Sized>(rng: &mut R, params: &GeneratorParams) -> Result<PetriNet, GeneratorError> {
    params.validate()?;
    let mut net = PetriNet::new();
    net.add_event(NodeId(0), label('e', rng.gen_range(0..params.event_alphabet)))?;
    let mut next = 1;
    for (range, input) in [(params.cond_in, true), (params.cond_out, false)] {
        let count = rng.gen_range(range[0]..=range[1]);
        for k in sample(rng, params.cond_alphabet, count) {
            let id = NodeId(next);
            next += 1;
            net.add_condition(id, label('c', k))?;
            if input {
                net.add_arc(id, NodeId(0));
            } else {
                net.add_arc(NodeId(0), id);
            }
        }
    }
    Ok(net)
}

/// A first basic net grown by `params.events` attachments, seeded by
/// `params.seed`.
pub fn generate(params: &GeneratorParams) -> Result<PetriNet, GeneratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    generate_with(&mut rng, params)
}

pub(crate) fn generate_with<R: Rng + ?Sized>(
    rng: &mut R,
    params: &GeneratorParams,
) -> Result<PetriNet, GeneratorError> {
    let mut conn = Connector::new(basic_net(rng, params)?);
    let none = HashSet::new();
    for _ in 0..params.events {
        let b = basic_net(rng, params)?;
        conn.attach(params.overlap, params.max_overlaps, &b, rng, &none);
    }
    Ok(conn.into_net())
}

#[cfg(test)]
mod tests;
