//! Line-based `.cenet` text format.
//!
//! ```text
//! # comment
//! event <id> <label>
//! cond <id> <label>
//! arc <src-id> <dst-id>
//! ```
//!
//! Arcs may reference nodes declared further down the file.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Label, NetError, NodeId, PetriNet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("duplicate node id {id} at line {line}")]
    DuplicateId { id: NodeId, line: usize },
    #[error("unknown node id {id} at line {line}")]
    UnknownId { id: NodeId, line: usize },
}

pub fn parse_cenet(text: &str) -> Result<PetriNet, ParseError> {
    let mut net = PetriNet::new();
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let syntax = |msg: &str| ParseError::Syntax { line, msg: msg.to_string() };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let id = |s: &str| s.parse::<u32>().map(NodeId).map_err(|_| syntax(&format!("bad node id {s:?}")));
        match fields.as_slice() {
            [kw @ ("event" | "cond"), nid, label] => {
                let nid = id(nid)?;
                let label = Label::new(*label).map_err(|_| syntax(&format!("bad label {label:?}")))?;
                let res = if *kw == "event" { net.add_event(nid, label) } else { net.add_condition(nid, label) };
                if let Err(NetError::DuplicateId(id)) = res {
                    return Err(ParseError::DuplicateId { id, line });
                }
            }
            ["arc", src, dst] => arcs.push((id(src)?, id(dst)?, line)),
            [kw, ..] if matches!(*kw, "event" | "cond" | "arc") => {
                return Err(syntax(&format!("wrong number of fields for {kw}")));
            }
            [kw, ..] => return Err(syntax(&format!("unknown keyword {kw:?}"))),
            [] => unreachable!(),
        }
    }
    for (src, dst, line) in arcs {
        for id in [src, dst] {
            if !net.contains(id) {
                return Err(ParseError::UnknownId { id, line });
            }
        }
        net.add_arc(src, dst);
    }
    Ok(net)
}

/// Nodes sorted by id, then arcs sorted by `(src, dst)`.
pub fn serialize_cenet(net: &PetriNet) -> String {
    let mut out = String::new();
    for id in net.node_ids() {
        let (kw, label) = match net.events().get(&id) {
            Some(l) => ("event", l),
            None => ("cond", &net.conditions()[&id]),
        };
        writeln!(out, "{kw} {id} {label}").unwrap();
    }
    for (src, dst) in net.arcs() {
        writeln!(out, "arc {src} {dst}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::tests::net;

    #[test]
    fn grammar_example() {
        let n = parse_cenet("event 1 A\ncond 2 P\narc 2 1").unwrap();
        assert_eq!(n, net(&[(1, "A")], &[(2, "P")], &[(2, 1)]));
    }

    #[test]
    fn comments_blank_lines_and_forward_refs() {
        let text = "# header\n\narc 2 1\n  event 1 A\ncond 2 P # not a comment\n";
        // trailing text after the label is a field-count error
        assert!(matches!(parse_cenet(text), Err(ParseError::Syntax { line: 5, .. })));
        let n = parse_cenet("# header\n\narc 2 1\n  event 1 A\ncond 2 P\n").unwrap();
        assert_eq!(n.arc_count(), 1);
    }

    #[test]
    fn unknown_id_error_message() {
        let err = parse_cenet("arc 9 1").unwrap_err();
        assert_eq!(err.to_string(), "unknown node id 9 at line 1");
    }

    #[test]
    fn duplicate_and_syntax_errors() {
        assert_eq!(parse_cenet("event 1 A\ncond 1 P").unwrap_err(), ParseError::DuplicateId { id: NodeId(1), line: 2 });
        assert!(matches!(parse_cenet("place 1 A"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_cenet("event x A"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_cenet("event 1 A<B"), Err(ParseError::Syntax { line: 1, .. })));
    }

    #[test]
    fn serialize_is_sorted() {
        let n = net(&[(3, "A")], &[(1, "P"), (5, "Q")], &[(3, 5), (1, 3)]);
        assert_eq!(serialize_cenet(&n), "cond 1 P\nevent 3 A\ncond 5 Q\narc 1 3\narc 3 5\n");
    }
}
