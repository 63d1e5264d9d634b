//! Graph data model for pursuit games.
//!
//! A [`PursuitGraph`] is a set of vertices `0..n` and directed arcs, each
//! carrying a [`Protection`] flag. Undirected graphs are stored as
//! symmetric arc pairs so the game engine only ever walks arcs.

mod graph6;
mod pg;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use graph6::{parse_graph6, Graph6Error};
pub use pg::{parse_pursuit_graph, serialize_pursuit_graph, ParseError};

/// Vertex identifier; always in `0..vertex_count`.
pub type Vertex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protection {
    Protected,
    Unprotected,
}

impl Protection {
    pub fn is_protected(self) -> bool {
        self == Protection::Protected
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Protection::Protected => "protected",
            Protection::Unprotected => "unprotected",
        }
    }
}

impl fmt::Display for Protection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Directed,
    Undirected,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Directed => "directed",
            Orientation::Undirected => "undirected",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
    pub protection: Protection,
}

impl Arc {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: Vertex, vertex_count: usize },
    #[error("arc {tail}->{head} already present as {existing}, cannot add as {requested}")]
    ConflictingArc {
        tail: Vertex,
        head: Vertex,
        existing: Protection,
        requested: Protection,
    },
    #[error("operation requires a {expected} graph")]
    WrongOrientation { expected: Orientation },
}

/// Vertices plus protected/unprotected arcs, with optional role labels.
///
/// Invariants are enforced by the mutators: arc endpoints are in range, at
/// most one arc exists per ordered pair, and undirected graphs always hold
/// both directions of every edge with equal protection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PursuitGraph {
    vertex_count: usize,
    orientation: Orientation,
    arcs: BTreeMap<(Vertex, Vertex), Protection>,
    roles: BTreeMap<Vertex, String>,
}

impl PursuitGraph {
    pub fn new(vertex_count: usize, orientation: Orientation) -> Self {
        PursuitGraph {
            vertex_count,
            orientation,
            arcs: BTreeMap::new(),
            roles: BTreeMap::new(),
        }
    }

    pub fn directed(vertex_count: usize) -> Self {
        Self::new(vertex_count, Orientation::Directed)
    }

    pub fn undirected(vertex_count: usize) -> Self {
        Self::new(vertex_count, Orientation::Undirected)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_directed(&self) -> bool {
        self.orientation == Orientation::Directed
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in lexicographic `(tail, head)` order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.arcs.iter().map(|(&(tail, head), &protection)| Arc {
            tail,
            head,
            protection,
        })
    }

    pub fn arc(&self, tail: Vertex, head: Vertex) -> Option<Protection> {
        self.arcs.get(&(tail, head)).copied()
    }

    pub fn has_arc(&self, tail: Vertex, head: Vertex) -> bool {
        self.arcs.contains_key(&(tail, head))
    }

    pub fn loop_at(&self, v: Vertex) -> Option<Protection> {
        self.arc(v, v)
    }

    pub fn out_arcs(&self, v: Vertex) -> impl Iterator<Item = Arc> + '_ {
        self.arcs
            .range((v, 0)..=(v, usize::MAX))
            .map(|(&(tail, head), &protection)| Arc {
                tail,
                head,
                protection,
            })
    }

    fn check_vertex(&self, vertex: Vertex) -> Result<(), GraphError> {
        if vertex < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex,
                vertex_count: self.vertex_count,
            })
        }
    }

    fn insert_one(
        &mut self,
        tail: Vertex,
        head: Vertex,
        protection: Protection,
    ) -> Result<(), GraphError> {
        match self.arcs.get(&(tail, head)) {
            Some(&existing) if existing != protection => Err(GraphError::ConflictingArc {
                tail,
                head,
                existing,
                requested: protection,
            }),
            Some(_) => Ok(()),
            None => {
                self.arcs.insert((tail, head), protection);
                Ok(())
            }
        }
    }

    /// Adds a directed arc. Re-adding an identical arc is a no-op; re-adding
    /// with the other protection flag is an error.
    ///
    /// On an undirected graph this adds the whole edge.
    pub fn add_arc(
        &mut self,
        tail: Vertex,
        head: Vertex,
        protection: Protection,
    ) -> Result<(), GraphError> {
        if self.orientation == Orientation::Undirected {
            return self.add_edge(tail, head, protection);
        }
        self.check_vertex(tail)?;
        self.check_vertex(head)?;
        self.insert_one(tail, head, protection)
    }

    /// Adds an undirected edge as a symmetric arc pair (one arc for a loop).
    pub fn add_edge(
        &mut self,
        u: Vertex,
        v: Vertex,
        protection: Protection,
    ) -> Result<(), GraphError> {
        if self.orientation != Orientation::Undirected {
            return Err(GraphError::WrongOrientation {
                expected: Orientation::Undirected,
            });
        }
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        // Check both directions before inserting either.
        for (a, b) in [(u, v), (v, u)] {
            if let Some(&existing) = self.arcs.get(&(a, b)) {
                if existing != protection {
                    return Err(GraphError::ConflictingArc {
                        tail: a,
                        head: b,
                        existing,
                        requested: protection,
                    });
                }
            }
        }
        self.arcs.insert((u, v), protection);
        self.arcs.insert((v, u), protection);
        Ok(())
    }

    /// Removes an arc (both directions on an undirected graph). Returns the
    /// removed protection flag, if any.
    pub fn remove_arc(&mut self, tail: Vertex, head: Vertex) -> Option<Protection> {
        let removed = self.arcs.remove(&(tail, head));
        if self.orientation == Orientation::Undirected {
            self.arcs.remove(&(head, tail));
        }
        removed
    }

    pub fn role(&self, v: Vertex) -> Option<&str> {
        self.roles.get(&v).map(String::as_str)
    }

    pub fn roles(&self) -> impl Iterator<Item = (Vertex, &str)> + '_ {
        self.roles.iter().map(|(&v, s)| (v, s.as_str()))
    }

    pub fn set_role(&mut self, v: Vertex, label: impl Into<String>) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        self.roles.insert(v, label.into());
        Ok(())
    }

    pub fn clear_roles(&mut self) {
        self.roles.clear();
    }

    /// Out-neighbour lists for every vertex, heads ascending.
    pub fn out_neighbors(&self) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new(); self.vertex_count];
        for (&(t, h), _) in &self.arcs {
            out[t].push(h);
        }
        out
    }

    /// In-neighbour lists for every vertex, tails ascending.
    pub fn in_neighbors(&self) -> Vec<Vec<Vertex>> {
        let mut inn = vec![Vec::new(); self.vertex_count];
        for (&(t, h), _) in &self.arcs {
            inn[h].push(t);
        }
        inn
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`. Roles move along.
    pub fn permuted(&self, perm: &[Vertex]) -> PursuitGraph {
        assert_eq!(perm.len(), self.vertex_count, "permutation length");
        let mut g = PursuitGraph::new(self.vertex_count, self.orientation);
        for (&(t, h), &p) in &self.arcs {
            g.arcs.insert((perm[t], perm[h]), p);
        }
        for (&v, label) in &self.roles {
            g.roles.insert(perm[v], label.clone());
        }
        g
    }

    /// True when every vertex reaches every other along arcs.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.vertex_count;
        if n == 0 {
            return true;
        }
        let reach_all = |adj: &[Vec<Vertex>]| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach_all(&self.out_neighbors()) && reach_all(&self.in_neighbors())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NoOutArc { vertex: Vertex },
    NoInArc { vertex: Vertex },
    IndexOutOfRange { tail: Vertex, head: Vertex },
    ProtectionAsymmetry { tail: Vertex, head: Vertex },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoOutArc { vertex } => write!(f, "vertex {vertex} has no out-arc"),
            Violation::NoInArc { vertex } => write!(f, "vertex {vertex} has no in-arc"),
            Violation::IndexOutOfRange { tail, head } => {
                write!(f, "arc {tail}->{head} has an endpoint out of range")
            }
            Violation::ProtectionAsymmetry { tail, head } => {
                write!(f, "edge {tail}-{head} lacks a matching reverse arc")
            }
        }
    }
}

/// Findings of [`validate_for_play`]; empty iff the graph is playable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("no violations");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Lists every vertex lacking an out-arc or in-arc, plus any broken
/// structural invariant. Under must-move rules a vertex without an out-arc
/// strands whoever stands on it.
pub fn validate_for_play(graph: &PursuitGraph) -> Diagnostics {
    let n = graph.vertex_count;
    let mut has_out = vec![false; n];
    let mut has_in = vec![false; n];
    let mut violations = Vec::new();
    for (&(t, h), &p) in &graph.arcs {
        if t >= n || h >= n {
            violations.push(Violation::IndexOutOfRange { tail: t, head: h });
            continue;
        }
        has_out[t] = true;
        has_in[h] = true;
        if graph.orientation == Orientation::Undirected && graph.arcs.get(&(h, t)) != Some(&p) {
            violations.push(Violation::ProtectionAsymmetry { tail: t, head: h });
        }
    }
    for v in 0..n {
        if !has_out[v] {
            violations.push(Violation::NoOutArc { vertex: v });
        }
        if !has_in[v] {
            violations.push(Violation::NoInArc { vertex: v });
        }
    }
    Diagnostics { violations }
}

/// Reinterprets an undirected graph as a directed one with both arcs of
/// every edge. Loops stay loops and protection flags carry over.
pub fn doubly_direct(graph: &PursuitGraph) -> Result<PursuitGraph, GraphError> {
    if graph.orientation != Orientation::Undirected {
        return Err(GraphError::WrongOrientation {
            expected: Orientation::Undirected,
        });
    }
    Ok(PursuitGraph {
        orientation: Orientation::Directed,
        ..graph.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Protection::*;

    fn reflexive_cycle(n: usize) -> PursuitGraph {
        let mut g = PursuitGraph::undirected(n);
        for v in 0..n {
            g.add_edge(v, v, Unprotected).unwrap();
            g.add_edge(v, (v + 1) % n, Unprotected).unwrap();
        }
        g
    }

    #[test]
    fn undirected_edge_is_symmetric() {
        let mut g = PursuitGraph::undirected(2);
        g.add_edge(0, 1, Unprotected).unwrap();
        let arcs: Vec<_> = g.arcs().map(|a| (a.tail, a.head, a.protection)).collect();
        assert_eq!(arcs, vec![(0, 1, Unprotected), (1, 0, Unprotected)]);
    }

    #[test]
    fn conflicting_duplicate_is_rejected() {
        let mut g = PursuitGraph::directed(2);
        g.add_arc(0, 1, Protected).unwrap();
        g.add_arc(0, 1, Protected).unwrap();
        assert!(matches!(
            g.add_arc(0, 1, Unprotected),
            Err(GraphError::ConflictingArc { .. })
        ));
        assert_eq!(g.arc_count(), 1);
    }

    #[test]
    fn conflicting_edge_leaves_graph_untouched() {
        let mut g = PursuitGraph::undirected(2);
        g.add_edge(0, 1, Protected).unwrap();
        let before = g.clone();
        assert!(g.add_edge(1, 0, Unprotected).is_err());
        assert_eq!(g, before);
    }

    #[test]
    fn out_of_range_vertex() {
        let mut g = PursuitGraph::directed(3);
        assert_eq!(
            g.add_arc(0, 5, Unprotected),
            Err(GraphError::VertexOutOfRange {
                vertex: 5,
                vertex_count: 3
            })
        );
    }

    #[test]
    fn lone_irreflexive_vertex_is_unplayable() {
        let g = PursuitGraph::directed(1);
        let d = validate_for_play(&g);
        assert_eq!(
            d.violations,
            vec![
                Violation::NoOutArc { vertex: 0 },
                Violation::NoInArc { vertex: 0 }
            ]
        );
    }

    #[test]
    fn reflexive_graphs_are_playable() {
        let mut g = PursuitGraph::directed(3);
        for v in 0..3 {
            g.add_arc(v, v, Protected).unwrap();
        }
        assert!(validate_for_play(&g).is_empty());
        assert!(validate_for_play(&reflexive_cycle(5)).is_empty());
    }

    #[test]
    fn doubly_direct_counts_and_flags() {
        let g = reflexive_cycle(4);
        let d = doubly_direct(&g).unwrap();
        assert!(d.is_directed());
        assert_eq!(d.arc_count(), 12);
        assert_eq!(d.vertex_count(), 4);

        let mut single = PursuitGraph::undirected(2);
        single.add_edge(0, 1, Protected).unwrap();
        let d = doubly_direct(&single).unwrap();
        assert_eq!(d.arc(0, 1), Some(Protected));
        assert_eq!(d.arc(1, 0), Some(Protected));

        assert!(doubly_direct(&d).is_err());
    }

    #[test]
    fn doubly_direct_preserves_diagnostics() {
        let mut g = PursuitGraph::undirected(4);
        g.add_edge(0, 1, Unprotected).unwrap();
        g.add_edge(2, 2, Protected).unwrap();
        assert_eq!(
            validate_for_play(&g),
            validate_for_play(&doubly_direct(&g).unwrap())
        );
    }

    #[test]
    fn strong_connectivity() {
        assert!(reflexive_cycle(4).is_strongly_connected());
        let mut path = PursuitGraph::directed(3);
        path.add_arc(0, 1, Unprotected).unwrap();
        path.add_arc(1, 2, Unprotected).unwrap();
        assert!(!path.is_strongly_connected());
        path.add_arc(2, 0, Unprotected).unwrap();
        assert!(path.is_strongly_connected());
    }
}
