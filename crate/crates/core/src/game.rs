//! Configurations, legal moves, and dense configuration indexing.
//!
//! Cops are interchangeable, so cop placements are multisets, stored as
//! sorted vectors and ranked through the combinatorial number system.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{doubly_direct, validate_for_play, Diagnostics, PursuitGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("graph is not playable: {0}")]
    Unplayable(Diagnostics),
    #[error("at least one cop is required")]
    NoCops,
    #[error("state space too large: {required} configurations needed")]
    StateSpaceOverflow { required: u128 },
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("configuration index {index} out of range (state count {state_count})")]
    IndexOutOfRange { index: u64, state_count: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Turn {
    CopTurn,
    RobberTurn,
}

/// Cop multiset (sorted), robber position, and side to move.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub cops: Vec<Vertex>,
    pub robber: Vertex,
    pub turn: Turn,
}

impl Configuration {
    pub fn new(mut cops: Vec<Vertex>, robber: Vertex, turn: Turn) -> Self {
        cops.sort_unstable();
        Configuration { cops, robber, turn }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cops {:?}, robber {}, {:?}", self.cops, self.robber, self.turn)
    }
}

/// Binomial coefficient with overflow detection.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Ranks sorted k-multisets over `0..n` in lexicographic order.
///
/// A multiset `a_0 <= .. <= a_{k-1}` maps to the strictly increasing
/// combination `b_i = a_i + i` over `0..n+k-1`, which is then ranked by the
/// combinatorial number system.
#[derive(Clone, Debug)]
pub struct MultisetIndexer {
    n: usize,
    k: usize,
    // binom[a][b] = C(a, b) for a <= n+k-1, b <= k.
    binom: Vec<Vec<u64>>,
    count: u64,
}

impl MultisetIndexer {
    pub fn new(n: usize, k: usize) -> Result<Self, GameError> {
        let top = n + k - 1;
        let required = binomial(top as u64, k as u64).ok_or(GameError::StateSpaceOverflow {
            required: u128::MAX,
        })?;
        let count = u64::try_from(required)
            .map_err(|_| GameError::StateSpaceOverflow { required })?;
        let mut binom = vec![vec![0u64; k + 1]; top + 1];
        for a in 0..=top {
            binom[a][0] = 1;
            for b in 1..=k.min(a) {
                // Entries beyond C(top, k) are never read; saturate.
                binom[a][b] = binom[a - 1][b - 1].saturating_add(binom[a - 1][b]);
            }
        }
        Ok(MultisetIndexer { n, k, binom, count })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn multiset_size(&self) -> usize {
        self.k
    }

    /// Number of k-multisets, `C(n+k-1, k)`.
    pub fn count(&self) -> u64 {
        self.count
    }

    fn c(&self, a: usize, b: usize) -> u64 {
        if b > a {
            0
        } else {
            self.binom[a][b]
        }
    }

    /// Rank of a sorted multiset. The caller guarantees sortedness and range.
    pub fn rank(&self, sorted: &[Vertex]) -> u64 {
        debug_assert_eq!(sorted.len(), self.k);
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        if self.k == 1 {
            return sorted[0] as u64;
        }
        let top = self.n + self.k - 1;
        let mut tail = 0u64;
        for (i, &a) in sorted.iter().enumerate() {
            let b = a + i;
            tail += self.c(top - 1 - b, self.k - i);
        }
        self.count - 1 - tail
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn unrank(&self, rank: u64) -> Option<Vec<Vertex>> {
        if rank >= self.count {
            return None;
        }
        if self.k == 1 {
            return Some(vec![rank as usize]);
        }
        let top = self.n + self.k - 1;
        let mut remaining = self.count - 1 - rank;
        let mut out = Vec::with_capacity(self.k);
        let mut bound = top;
        for i in 0..self.k {
            let size = self.k - i;
            // Largest c < bound with C(c, size) <= remaining.
            let mut c = bound - 1;
            while self.c(c, size) > remaining {
                c -= 1;
            }
            remaining -= self.c(c, size);
            let b = top - 1 - c;
            out.push(b - i);
            bound = c;
        }
        Some(out)
    }
}

/// A graph plus a cop count, with the adjacency tables move generation needs.
#[derive(Clone, Debug)]
pub struct GameSpec {
    graph: PursuitGraph,
    cops: usize,
    out: Vec<Vec<Vertex>>,
    inn: Vec<Vec<Vertex>>,
    // capturers[r]: tails of unprotected arcs into r.
    capturers: Vec<Vec<Vertex>>,
    capture_matrix: Vec<bool>,
    indexer: MultisetIndexer,
}

impl GameSpec {
    /// Validates the graph for must-move play; undirected graphs are
    /// doubly directed first.
    pub fn new(graph: &PursuitGraph, cops: usize) -> Result<Self, GameError> {
        if cops == 0 {
            return Err(GameError::NoCops);
        }
        let diagnostics = validate_for_play(graph);
        if !diagnostics.is_empty() {
            return Err(GameError::Unplayable(diagnostics));
        }
        let graph = if graph.is_directed() {
            graph.clone()
        } else {
            doubly_direct(graph).expect("undirected input")
        };
        let n = graph.vertex_count();
        let indexer = MultisetIndexer::new(n, cops)?;
        let configurations = (indexer.count() as u128) * (n as u128) * 2;
        if configurations > u64::MAX as u128 {
            return Err(GameError::StateSpaceOverflow {
                required: configurations,
            });
        }
        let mut capturers = vec![Vec::new(); n];
        let mut capture_matrix = vec![false; n * n];
        for arc in graph.arcs() {
            if !arc.protection.is_protected() {
                capturers[arc.head].push(arc.tail);
                capture_matrix[arc.tail * n + arc.head] = true;
            }
        }
        Ok(GameSpec {
            out: graph.out_neighbors(),
            inn: graph.in_neighbors(),
            capturers,
            capture_matrix,
            indexer,
            graph,
            cops,
        })
    }

    pub fn graph(&self) -> &PursuitGraph {
        &self.graph
    }

    pub fn cop_count(&self) -> usize {
        self.cops
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn indexer(&self) -> &MultisetIndexer {
        &self.indexer
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.inn[v]
    }

    /// Vertices with an unprotected arc into `v`.
    pub fn capturers_of(&self, v: Vertex) -> &[Vertex] {
        &self.capturers[v]
    }

    /// Whether a cop on `cop` could capture a robber on `robber`.
    pub fn defends(&self, cop: Vertex, robber: Vertex) -> bool {
        self.capture_matrix[cop * self.vertex_count() + robber]
    }

    /// Number of k-multisets of cop positions.
    pub fn placement_count(&self) -> u64 {
        self.indexer.count()
    }

    /// Total configurations, `2 * n * C(n+k-1, k)`.
    pub fn state_count(&self) -> u64 {
        2 * self.vertex_count() as u64 * self.indexer.count()
    }

    pub fn capture_available(&self, cops: &[Vertex], robber: Vertex) -> bool {
        cops.iter().any(|&c| self.defends(c, robber))
    }

    fn check(&self, c: &Configuration) -> Result<(), GameError> {
        let n = self.vertex_count();
        if c.cops.len() != self.cops {
            return Err(GameError::InvalidConfiguration(format!(
                "expected {} cops, found {}",
                self.cops,
                c.cops.len()
            )));
        }
        if c.robber >= n || c.cops.iter().any(|&v| v >= n) {
            return Err(GameError::InvalidConfiguration(format!(
                "position out of range in {c}"
            )));
        }
        if !c.cops.windows(2).all(|w| w[0] <= w[1]) {
            return Err(GameError::InvalidConfiguration("cop multiset not sorted".into()));
        }
        Ok(())
    }

    /// Calls `f` once per way of moving every cop along one arc of `adj`.
    /// The slice handed to `f` is sorted; duplicates are not filtered.
    pub fn for_each_joint_move(
        &self,
        cops: &[Vertex],
        reverse: bool,
        mut f: impl FnMut(&[Vertex]),
    ) {
        let adj = if reverse { &self.inn } else { &self.out };
        let k = cops.len();
        let lists: Vec<&[Vertex]> = cops.iter().map(|&c| adj[c].as_slice()).collect();
        if lists.iter().any(|l| l.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; k];
        let mut buf = vec![0usize; k];
        loop {
            for i in 0..k {
                buf[i] = lists[i][idx[i]];
            }
            buf.sort_unstable();
            f(&buf);
            // Odometer increment.
            let mut pos = k;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < lists[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Distinct successor multisets, ascending by rank.
    pub fn cop_successors(&self, cops: &[Vertex]) -> Vec<Vec<Vertex>> {
        self.joint_moves(cops, false)
    }

    /// Distinct multisets that can move to `cops` in one cop turn.
    pub fn cop_predecessors(&self, cops: &[Vertex]) -> Vec<Vec<Vertex>> {
        self.joint_moves(cops, true)
    }

    fn joint_moves(&self, cops: &[Vertex], reverse: bool) -> Vec<Vec<Vertex>> {
        let mut all = Vec::new();
        self.for_each_joint_move(cops, reverse, |m| all.push(m.to_vec()));
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// Result of [`enumerate_cop_moves`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopMoves {
    pub capture_available: bool,
    pub successors: Vec<Vec<Vertex>>,
}

/// Capture predicate plus every distinct multiset the cops can move to.
pub fn enumerate_cop_moves(spec: &GameSpec, c: &Configuration) -> Result<CopMoves, GameError> {
    spec.check(c)?;
    if c.turn != Turn::CopTurn {
        return Err(GameError::InvalidConfiguration("not a cop turn".into()));
    }
    Ok(CopMoves {
        capture_available: spec.capture_available(&c.cops, c.robber),
        successors: spec.cop_successors(&c.cops),
    })
}

/// Heads of every out-arc of the robber's vertex, any protection.
pub fn enumerate_robber_moves(spec: &GameSpec, c: &Configuration) -> Result<Vec<Vertex>, GameError> {
    spec.check(c)?;
    if c.turn != Turn::RobberTurn {
        return Err(GameError::InvalidConfiguration("not a robber turn".into()));
    }
    Ok(spec.out_neighbors(c.robber).to_vec())
}

/// Dense index in `0..2·n·C(n+k-1,k)`: turn, then cop multiset, then robber.
pub fn rank_configuration(spec: &GameSpec, c: &Configuration) -> Result<u64, GameError> {
    spec.check(c)?;
    let n = spec.vertex_count() as u64;
    let turn = match c.turn {
        Turn::CopTurn => 0,
        Turn::RobberTurn => 1,
    };
    let m = spec.indexer.rank(&c.cops);
    Ok((turn * spec.placement_count() + m) * n + c.robber as u64)
}

pub fn unrank_configuration(spec: &GameSpec, index: u64) -> Result<Configuration, GameError> {
    let state_count = spec.state_count();
    if index >= state_count {
        return Err(GameError::IndexOutOfRange { index, state_count });
    }
    let n = spec.vertex_count() as u64;
    let robber = (index % n) as usize;
    let rest = index / n;
    let placements = spec.placement_count();
    let turn = if rest / placements == 0 {
        Turn::CopTurn
    } else {
        Turn::RobberTurn
    };
    let cops = spec
        .indexer
        .unrank(rest % placements)
        .expect("rank within range");
    Ok(Configuration { cops, robber, turn })
}
