//! Frequent subnet mining over a single large condition/event net.

pub mod baseline;
pub mod canonical;
pub mod generator;
pub mod miner;
pub mod netgraph;
pub mod petri;
