//! Node and edge taggings and their text form.
//!
//! ```text
//! node  = LABEL "<" (("-"|"+") LABEL)* ">"          e.g.  A<-P-R+Q>
//! edge  = "[" triple ("," triple)* "]"                e.g.  [+Q-,-P+]
//! triple = ("-"|"+") LABEL ("-"|"+")
//! ```
//!
//! Ordering is structural with `-` before `+`; it is *not* the byte order of
//! the text form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::petri::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    /// Arc from the neighbour into the tagged node.
    Minus,
    /// Arc from the tagged node out to the neighbour.
    Plus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }

    fn from_byte(b: u8) -> Option<Sign> {
        match b {
            b'-' => Some(Sign::Minus),
            b'+' => Some(Sign::Plus),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggingParseError(pub String);

impl fmt::Display for TaggingParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed tagging {:?}", self.0)
    }
}

impl std::error::Error for TaggingParseError {}

/// Label of a net-graph node followed by its signed neighbour labels, all
/// `-` entries first, each block sorted by label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeTagging {
    label: Label,
    slots: Vec<(Sign, Label)>,
}

impl NodeTagging {
    pub fn new(label: Label, mut slots: Vec<(Sign, Label)>) -> Self {
        slots.sort();
        NodeTagging { label, slots }
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn slots(&self) -> &[(Sign, Label)] {
        &self.slots
    }

    pub fn slot_index(&self, sign: Sign, label: &Label) -> Option<usize> {
        self.slots.binary_search_by(|(s, l)| (*s, l).cmp(&(sign, label))).ok()
    }

    /// Parses a tagging starting at `s`; returns it and the unconsumed rest.
    pub(crate) fn parse_prefix(s: &str) -> Result<(NodeTagging, &str), TaggingParseError> {
        let err = || TaggingParseError(s.to_string());
        let open = s.find('<').ok_or_else(err)?;
        let close = s.find('>').ok_or_else(err)?;
        if close < open {
            return Err(err());
        }
        let label = Label::new(&s[..open]).map_err(|_| err())?;
        let mut body = &s[open + 1..close];
        let mut slots = Vec::new();
        while !body.is_empty() {
            let sign = Sign::from_byte(body.as_bytes()[0]).ok_or_else(err)?;
            let rest = &body[1..];
            let end = rest.find(['-', '+']).unwrap_or(rest.len());
            slots.push((sign, Label::new(&rest[..end]).map_err(|_| err())?));
            body = &rest[end..];
        }
        let t = NodeTagging { label, slots };
        if t.slots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err());
        }
        Ok((t, &s[close + 1..]))
    }
}

impl fmt::Display for NodeTagging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<", self.label)?;
        for (s, l) in &self.slots {
            write!(f, "{}{}", s.as_char(), l)?;
        }
        f.write_str(">")
    }
}

impl FromStr for NodeTagging {
    type Err = TaggingParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match NodeTagging::parse_prefix(s)? {
            (t, "") => Ok(t),
            _ => Err(TaggingParseError(s.to_string())),
        }
    }
}

/// One shared condition between two net-graph nodes: the sign it has at the
/// near end, its label, and its sign at the far end.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub near: Sign,
    pub label: Label,
    pub far: Sign,
}

impl Triple {
    pub fn reversed(&self) -> Triple {
        Triple { near: self.far, label: self.label.clone(), far: self.near }
    }
}

/// Sorted, non-empty sequence of triples, oriented from one endpoint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeTagging(Vec<Triple>);

impl EdgeTagging {
    /// `None` for an empty triple list.
    pub fn new(mut triples: Vec<Triple>) -> Option<Self> {
        if triples.is_empty() {
            return None;
        }
        triples.sort();
        Some(EdgeTagging(triples))
    }

    pub fn triples(&self) -> &[Triple] {
        &self.0
    }

    /// The same edge seen from the other endpoint.
    pub fn reversed(&self) -> EdgeTagging {
        let mut t: Vec<Triple> = self.0.iter().map(Triple::reversed).collect();
        t.sort();
        EdgeTagging(t)
    }

    pub(crate) fn parse_prefix(s: &str) -> Result<(EdgeTagging, &str), TaggingParseError> {
        let err = || TaggingParseError(s.to_string());
        let body = s.strip_prefix('[').ok_or_else(err)?;
        let close = body.find(']').ok_or_else(err)?;
        let mut triples = Vec::new();
        for part in body[..close].split(',') {
            let b = part.as_bytes();
            if b.len() < 3 {
                return Err(err());
            }
            let near = Sign::from_byte(b[0]).ok_or_else(err)?;
            let far = Sign::from_byte(b[b.len() - 1]).ok_or_else(err)?;
            let label = Label::new(&part[1..part.len() - 1]).map_err(|_| err())?;
            triples.push(Triple { near, label, far });
        }
        if triples.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err());
        }
        Ok((EdgeTagging(triples), &body[close + 1..]))
    }
}

impl fmt::Display for EdgeTagging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}{}{}", t.near.as_char(), t.label, t.far.as_char())?;
        }
        f.write_str("]")
    }
}

impl FromStr for EdgeTagging {
    type Err = TaggingParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match EdgeTagging::parse_prefix(s)? {
            (t, "") => Ok(t),
            _ => Err(TaggingParseError(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::tests::l;

    #[test]
    fn minus_block_first() {
        let t = NodeTagging::new(l("A"), vec![(Sign::Plus, l("B")), (Sign::Minus, l("Z")), (Sign::Minus, l("C"))]);
        assert_eq!(t.to_string(), "A<-C-Z+B>");
        assert_eq!("A<-C-Z+B>".parse::<NodeTagging>().unwrap(), t);
        assert_eq!("A<>".parse::<NodeTagging>().unwrap().slots().len(), 0);
    }

    #[test]
    fn structural_order_puts_minus_first() {
        let minus: NodeTagging = "A<-P>".parse().unwrap();
        let plus: NodeTagging = "A<+P>".parse().unwrap();
        assert!(minus < plus);
        // bytewise '+' < '-', so text order would disagree
        assert!("A<+P>" < "A<-P>");
    }

    #[test]
    fn edge_tagging_roundtrip_and_reverse() {
        let e: EdgeTagging = "[-P+,+Q-]".parse().unwrap();
        assert_eq!(e.to_string(), "[-P+,+Q-]");
        assert_eq!(e.reversed().to_string(), "[-Q+,+P-]");
        assert_eq!(e.reversed().reversed(), e);
    }

    #[test]
    fn malformed_taggings_rejected() {
        for bad in ["A", "A<P>", "<-P>", "A<-P-P>", "A<+P-Q>", "A<-P>x"] {
            assert!(bad.parse::<NodeTagging>().is_err(), "{bad}");
        }
        for bad in ["[]", "[P]", "[-P]", "[+Q-,-P+]", "[-P+"] {
            assert!(bad.parse::<EdgeTagging>().is_err(), "{bad}");
        }
    }
}
