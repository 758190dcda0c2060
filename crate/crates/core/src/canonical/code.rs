//! Parsing and ordering of code text.

use std::cmp::Ordering;

use thiserror::Error;

use super::Direction;
use crate::netgraph::{EdgeTagging, NodeTagging};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("malformed code at byte {0}")]
    Malformed(usize),
    #[error("pattern graph is empty")]
    Empty,
    #[error("pattern graph is disconnected")]
    Disconnected,
}

/// One unit. The derived order is the code order: `from`, `to`,
/// backward before forward, edge tagging, then far node tagging.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParsedUnit {
    pub from: usize,
    pub to: usize,
    pub direction: Direction,
    pub edge: EdgeTagging,
    pub node: Option<NodeTagging>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParsedComponent {
    pub start: NodeTagging,
    pub units: Vec<ParsedUnit>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParsedCode {
    pub components: Vec<ParsedComponent>,
}

impl ParsedCode {
    pub fn edge_count(&self) -> usize {
        self.components.iter().map(|c| c.units.len()).sum()
    }

    pub fn node_count(&self) -> usize {
        self.components.iter().map(|c| 1 + c.units.iter().filter(|u| u.direction == Direction::Forward).count()).sum()
    }
}

struct Cursor<'a> {
    text: &'a str,
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn pos(&self) -> usize {
        self.text.len() - self.rest.len()
    }

    fn err(&self) -> CodeError {
        CodeError::Malformed(self.pos())
    }

    fn eat(&mut self, s: &str) -> Result<(), CodeError> {
        self.rest = self.rest.strip_prefix(s).ok_or_else(|| self.err())?;
        Ok(())
    }

    fn number(&mut self) -> Result<usize, CodeError> {
        let end = self.rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(self.rest.len());
        let n = self.rest[..end].parse().map_err(|_| self.err())?;
        self.rest = &self.rest[end..];
        Ok(n)
    }

    fn node(&mut self) -> Result<NodeTagging, CodeError> {
        let (t, rest) = NodeTagging::parse_prefix(self.rest).map_err(|_| self.err())?;
        self.rest = rest;
        Ok(t)
    }

    fn edge(&mut self) -> Result<EdgeTagging, CodeError> {
        let (t, rest) = EdgeTagging::parse_prefix(self.rest).map_err(|_| self.err())?;
        self.rest = rest;
        Ok(t)
    }
}

pub fn parse_code(text: &str) -> Result<ParsedCode, CodeError> {
    let mut c = Cursor { text, rest: text };
    let mut components = Vec::new();
    loop {
        let start = c.node()?;
        let mut units = Vec::new();
        while c.rest.starts_with('(') {
            c.eat("(")?;
            let from = c.number()?;
            c.eat(",")?;
            let to = c.number()?;
            c.eat(",")?;
            let direction = match c.rest.as_bytes().first() {
                Some(b'f') => Direction::Forward,
                Some(b'b') => Direction::Backward,
                _ => return Err(c.err()),
            };
            c.rest = &c.rest[1..];
            c.eat(",")?;
            let edge = c.edge()?;
            let node = match direction {
                Direction::Forward => {
                    c.eat(",")?;
                    Some(c.node()?)
                }
                Direction::Backward => None,
            };
            c.eat(")")?;
            units.push(ParsedUnit { from, to, direction, edge, node });
        }
        components.push(ParsedComponent { start, units });
        if c.rest.is_empty() {
            return Ok(ParsedCode { components });
        }
        c.eat("|")?;
    }
}

/// Structural comparison of two codes; the text order would put `+`
/// before `-` and `10` before `9`.
pub fn code_compare(a: &str, b: &str) -> Result<Ordering, CodeError> {
    Ok(parse_code(a)?.cmp(&parse_code(b)?))
}
