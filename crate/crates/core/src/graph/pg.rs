//! The line-based `.pg` text format.
//!
//! ```text
//! pursuitgraph 1
//! mode directed
//! vertices 3
//! arc 0 1 unprotected
//! arc 1 1 protected
//! role 0 omega
//! ```
//!
//! Undirected files use `edge U V ...` lines instead of `arc`. Everything
//! after a `#` is a comment; blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{GraphError, Orientation, Protection, PursuitGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}: unknown keyword `{keyword}`")]
    UnknownKeyword { line: usize, keyword: String },
    #[error("line {line}: malformed line: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("line {line}: vertex index {vertex} out of range (vertices {vertex_count})")]
    IndexOutOfRange {
        line: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("line {line}: arc {tail}->{head} repeated with conflicting protection")]
    ConflictingDuplicate { line: usize, tail: usize, head: usize },
    #[error("line {line}: duplicate role for vertex {vertex}")]
    DuplicateRole { line: usize, vertex: usize },
    #[error("missing header (expected `pursuitgraph 1`, `mode`, `vertices` lines)")]
    MissingHeader,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_index(line: usize, token: &str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::Malformed {
        line,
        detail: format!("`{token}` is not a vertex index"),
    })
}

fn parse_protection(line: usize, token: &str) -> Result<Protection, ParseError> {
    match token {
        "protected" => Ok(Protection::Protected),
        "unprotected" => Ok(Protection::Unprotected),
        other => Err(ParseError::Malformed {
            line,
            detail: format!("expected `protected` or `unprotected`, found `{other}`"),
        }),
    }
}

/// Parses a `.pg` v1 document.
pub fn parse_pursuit_graph(text: &str) -> Result<PursuitGraph, ParseError> {
    let mut lines = content_lines(text);

    let (line, tokens) = lines.next().ok_or(ParseError::MissingHeader)?;
    if tokens != ["pursuitgraph", "1"] {
        return Err(ParseError::MalformedHeader {
            line,
            detail: format!("expected `pursuitgraph 1`, found `{}`", tokens.join(" ")),
        });
    }

    let (line, tokens) = lines.next().ok_or(ParseError::MissingHeader)?;
    let orientation = match tokens.as_slice() {
        ["mode", "directed"] => Orientation::Directed,
        ["mode", "undirected"] => Orientation::Undirected,
        _ => {
            return Err(ParseError::MalformedHeader {
                line,
                detail: format!("expected `mode directed|undirected`, found `{}`", tokens.join(" ")),
            })
        }
    };

    let (line, tokens) = lines.next().ok_or(ParseError::MissingHeader)?;
    let vertex_count = match tokens.as_slice() {
        ["vertices", n] => n.parse::<usize>().map_err(|_| ParseError::MalformedHeader {
            line,
            detail: format!("`{n}` is not a vertex count"),
        })?,
        _ => {
            return Err(ParseError::MalformedHeader {
                line,
                detail: format!("expected `vertices N`, found `{}`", tokens.join(" ")),
            })
        }
    };

    let mut graph = PursuitGraph::new(vertex_count, orientation);
    let arc_keyword = match orientation {
        Orientation::Directed => "arc",
        Orientation::Undirected => "edge",
    };

    for (line, tokens) in lines {
        let keyword = tokens[0];
        let check = |v: usize| {
            if v < vertex_count {
                Ok(v)
            } else {
                Err(ParseError::IndexOutOfRange {
                    line,
                    vertex: v,
                    vertex_count,
                })
            }
        };
        if keyword == arc_keyword {
            let [_, u, v, p] = tokens.as_slice() else {
                return Err(ParseError::Malformed {
                    line,
                    detail: format!("expected `{arc_keyword} U V protected|unprotected`"),
                });
            };
            let u = check(parse_index(line, u)?)?;
            let v = check(parse_index(line, v)?)?;
            let p = parse_protection(line, p)?;
            graph.add_arc(u, v, p).map_err(|e| match e {
                GraphError::ConflictingArc { tail, head, .. } => {
                    ParseError::ConflictingDuplicate { line, tail, head }
                }
                other => ParseError::Malformed {
                    line,
                    detail: other.to_string(),
                },
            })?;
        } else if keyword == "role" {
            let [_, v, label] = tokens.as_slice() else {
                return Err(ParseError::Malformed {
                    line,
                    detail: "expected `role V LABEL`".into(),
                });
            };
            let v = check(parse_index(line, v)?)?;
            if graph.role(v).is_some() {
                return Err(ParseError::DuplicateRole { line, vertex: v });
            }
            graph.set_role(v, *label).expect("index checked");
        } else {
            return Err(ParseError::UnknownKeyword {
                line,
                keyword: keyword.to_string(),
            });
        }
    }
    Ok(graph)
}

/// Canonical `.pg` text: header, arcs sorted by `(tail, head)`, then roles
/// sorted by vertex. Undirected edges are written once, smaller end first.
pub fn serialize_pursuit_graph(graph: &PursuitGraph) -> String {
    let mut out = String::new();
    out.push_str("pursuitgraph 1\n");
    let _ = writeln!(out, "mode {}", graph.orientation());
    let _ = writeln!(out, "vertices {}", graph.vertex_count());
    for arc in graph.arcs() {
        match graph.orientation() {
            Orientation::Directed => {
                let _ = writeln!(out, "arc {} {} {}", arc.tail, arc.head, arc.protection);
            }
            Orientation::Undirected if arc.tail <= arc.head => {
                let _ = writeln!(out, "edge {} {} {}", arc.tail, arc.head, arc.protection);
            }
            Orientation::Undirected => {}
        }
    }
    for (v, label) in graph.roles() {
        let _ = writeln!(out, "role {v} {label}");
    }
    out
}
