//! Exact solving of the pursuit game by layered backward induction.
//!
//! Cop-turn states are labelled with the number of rounds the cops need to
//! force a capture. Layer 1 holds every state where some cop already has
//! an unprotected arc onto the robber. A robber-turn state is lost for the
//! robber once all of its replies lead into labelled states; the last reply
//! to be labelled fixes its value, and every unlabelled cop-turn state that
//! can move into it joins the next layer. States still unlabelled at the
//! fixpoint are robber wins.

mod oracle;
mod strategy;

use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{binomial, GameError, GameSpec};
use crate::graph::{PursuitGraph, Vertex};

pub use oracle::{oracle_horizon, oracle_solve, OracleOptions};
pub use strategy::{CopChoice, Strategy, TraceEnd, TraceRound, TraceTranscript};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "PURSUIT_WORKERS";

/// Below this many states a solve always runs on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("state space too large: {required} configurations required, limit {limit}")]
    StateSpaceTooLarge { required: u128, limit: u64 },
    #[error("oracle cost guard: n={vertices}, k={cops} exceeds n <= 8, k <= 2 (override to force)")]
    CostGuard { vertices: usize, cops: usize },
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub workers: usize,
    pub max_states: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            workers: 1,
            max_states: 200_000_000,
        }
    }
}

impl SolveOptions {
    /// Worker count from `PURSUIT_WORKERS`, else the machine's parallelism.
    pub fn from_env() -> Self {
        let workers = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0)
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            });
        SolveOptions {
            workers,
            ..Default::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    CopWin { capture_time: u32 },
    RobberWin,
}

impl Outcome {
    pub fn capture_time(&self) -> Option<u32> {
        match *self {
            Outcome::CopWin { capture_time } => Some(capture_time),
            Outcome::RobberWin => None,
        }
    }

    pub fn is_cop_win(&self) -> bool {
        matches!(self, Outcome::CopWin { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub optimal_cop_placement: Vec<Vertex>,
    pub witness_robber_placement: Vertex,
    pub state_count: u64,
    pub layer_count: u32,
}

impl SolveResult {
    pub fn capture_time(&self) -> Option<u32> {
        self.outcome.capture_time()
    }
}

/// `n · C(n+k-1, k)`: the number of cop-turn configurations, which bounds
/// the length of optimal play.
pub fn capture_time_bound(n: usize, k: usize) -> u128 {
    binomial((n + k - 1) as u64, k as u64)
        .and_then(|c| c.checked_mul(n as u128))
        .unwrap_or(u128::MAX)
}

/// Full solver output: per-state labels plus the game value.
#[derive(Debug)]
pub struct Solution<'a> {
    spec: &'a GameSpec,
    workers: usize,
    // Indexed by multiset rank * n + robber. 0 means unlabelled.
    cop_layer: Vec<u32>,
    robber_layer: Vec<u32>,
    result: SolveResult,
}

impl<'a> Solution<'a> {
    pub fn spec(&self) -> &'a GameSpec {
        self.spec
    }

    pub fn result(&self) -> &SolveResult {
        &self.result
    }

    pub fn into_result(self) -> SolveResult {
        self.result
    }

    /// Rounds needed from a cop-turn state, `None` for robber wins.
    pub fn cop_turn_value(&self, cops: &[Vertex], robber: Vertex) -> Option<u32> {
        let idx = self.index(cops, robber);
        (self.cop_layer[idx] != 0).then_some(self.cop_layer[idx])
    }

    /// Value of a robber-turn state: the worst reply for the robber once
    /// every reply is forced, `None` while a safe reply exists.
    pub fn robber_turn_value(&self, cops: &[Vertex], robber: Vertex) -> Option<u32> {
        let idx = self.index(cops, robber);
        (self.robber_layer[idx] != 0).then_some(self.robber_layer[idx])
    }

    fn index(&self, cops: &[Vertex], robber: Vertex) -> usize {
        self.spec.indexer().rank(cops) as usize * self.spec.vertex_count() + robber
    }

    pub(crate) fn cop_layers(&self) -> &[u32] {
        &self.cop_layer
    }

    pub(crate) fn robber_layers(&self) -> &[u32] {
        &self.robber_layer
    }

    pub(crate) fn workers(&self) -> usize {
        self.workers
    }
}

/// Runs `f` over `items`, collecting what it pushes, either inline or on
/// the pool. The output order is unspecified; callers sort.
fn run_collect<F>(pool: Option<&rayon::ThreadPool>, items: &[u32], f: F) -> Vec<u32>
where
    F: Fn(u32, &mut Vec<u32>) + Sync,
{
    match pool {
        Some(pool) if items.len() > 64 => pool.install(|| {
            items
                .par_chunks(64)
                .map(|chunk| {
                    let mut local = Vec::new();
                    for &item in chunk {
                        f(item, &mut local);
                    }
                    local
                })
                .flatten_iter()
                .collect()
        }),
        _ => {
            let mut out = Vec::new();
            for &item in items {
                f(item, &mut out);
            }
            out
        }
    }
}

pub(crate) fn build_pool(workers: usize, states: u64) -> Option<rayon::ThreadPool> {
    if workers <= 1 || states < PARALLEL_THRESHOLD {
        return None;
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .ok()
}

/// Solves the game and keeps every state label.
pub fn solve_full<'a>(spec: &'a GameSpec, options: &SolveOptions) -> Result<Solution<'a>, SolveError> {
    let state_count = spec.state_count();
    if state_count > options.max_states {
        return Err(SolveError::StateSpaceTooLarge {
            required: state_count as u128,
            limit: options.max_states,
        });
    }
    let n = spec.vertex_count();
    let placements = spec.placement_count() as usize;
    let half = placements * n;
    let indexer = spec.indexer();
    let pool = build_pool(options.workers, state_count);

    let cop_layer: Vec<AtomicU32> = (0..half).map(|_| AtomicU32::new(0)).collect();
    let robber_layer: Vec<AtomicU32> = (0..half).map(|_| AtomicU32::new(0)).collect();
    let escapes: Vec<AtomicU32> = (0..half)
        .map(|i| AtomicU32::new(spec.out_neighbors(i % n).len() as u32))
        .collect();

    let ranks: Vec<u32> = (0..placements as u32).collect();
    let mut frontier = run_collect(pool.as_ref(), &ranks, |m, out| {
        let cops = indexer.unrank(m as u64).expect("rank in range");
        for r in 0..n {
            if spec.capture_available(&cops, r) {
                let idx = m as usize * n + r;
                cop_layer[idx].store(1, Ordering::Relaxed);
                out.push(idx as u32);
            }
        }
    });
    frontier.sort_unstable();

    let mut layer = 0u32;
    while !frontier.is_empty() {
        layer += 1;
        let t = layer;
        // Robber-turn states whose last escape was just cut off.
        let mut lost = run_collect(pool.as_ref(), &frontier, |idx, out| {
            let base = idx as usize - idx as usize % n;
            let reply = idx as usize % n;
            for &r in spec.in_neighbors(reply) {
                let ridx = base + r;
                if escapes[ridx].fetch_sub(1, Ordering::AcqRel) == 1 {
                    robber_layer[ridx].store(t, Ordering::Relaxed);
                    out.push(ridx as u32);
                }
            }
        });
        lost.sort_unstable();

        let mut next = run_collect(pool.as_ref(), &lost, |ridx, out| {
            let m = ridx as usize / n;
            let r = ridx as usize % n;
            let cops = indexer.unrank(m as u64).expect("rank in range");
            spec.for_each_joint_move(&cops, true, |pred| {
                let idx = indexer.rank(pred) as usize * n + r;
                if cop_layer[idx]
                    .compare_exchange(0, t + 1, Ordering::AcqRel, Ordering::Relaxed)
                    .is_ok()
                {
                    out.push(idx as u32);
                }
            });
        });
        next.sort_unstable();
        frontier = next;
    }

    let cop_layer: Vec<u32> = cop_layer.into_iter().map(AtomicU32::into_inner).collect();
    let robber_layer: Vec<u32> = robber_layer.into_iter().map(AtomicU32::into_inner).collect();

    // Cops place first, robber replies: min over placements of max over
    // robber vertices, unlabelled counting as infinity.
    let mut best: Option<(u64, u32, usize)> = None; // (value, rank, witness)
    for m in 0..placements {
        let row = &cop_layer[m * n..(m + 1) * n];
        let mut worst = (0u64, 0usize);
        for (r, &v) in row.iter().enumerate() {
            let v = if v == 0 { u64::MAX } else { v as u64 };
            if v > worst.0 {
                worst = (v, r);
            }
        }
        if best.is_none_or(|(bv, _, _)| worst.0 < bv) {
            best = Some((worst.0, m as u32, worst.1));
        }
    }
    let (value, rank, witness) = best.expect("at least one placement");
    let outcome = if value == u64::MAX {
        Outcome::RobberWin
    } else {
        Outcome::CopWin {
            capture_time: value as u32,
        }
    };
    let result = SolveResult {
        outcome,
        optimal_cop_placement: indexer.unrank(rank as u64).expect("rank in range"),
        witness_robber_placement: witness,
        state_count,
        layer_count: layer,
    };
    Ok(Solution {
        spec,
        workers: options.workers,
        cop_layer,
        robber_layer,
        result,
    })
}

/// Game value with `spec.cop_count()` cops.
pub fn solve(spec: &GameSpec, options: &SolveOptions) -> Result<SolveResult, SolveError> {
    solve_full(spec, options).map(Solution::into_result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CopNumber {
    Exactly { k: usize },
    AboveMax { max: usize },
}

impl std::fmt::Display for CopNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CopNumber::Exactly { k } => write!(f, "{k}"),
            CopNumber::AboveMax { max } => write!(f, ">{max}"),
        }
    }
}

/// Smallest `k <= k_max` for which the cops win, trying `k = 1, 2, ...`.
pub fn cop_number(
    graph: &PursuitGraph,
    k_max: usize,
    options: &SolveOptions,
) -> Result<CopNumber, SolveError> {
    cop_number_with_results(graph, k_max, options).map(|(c, _)| c)
}

/// As [`cop_number`], also returning each solve in order of `k`.
pub fn cop_number_with_results(
    graph: &PursuitGraph,
    k_max: usize,
    options: &SolveOptions,
) -> Result<(CopNumber, Vec<SolveResult>), SolveError> {
    let mut results = Vec::new();
    for k in 1..=k_max {
        let spec = GameSpec::new(graph, k)?;
        let result = solve(&spec, options)?;
        let won = result.outcome.is_cop_win();
        results.push(result);
        if won {
            return Ok((CopNumber::Exactly { k }, results));
        }
    }
    Ok((CopNumber::AboveMax { max: k_max }, results))
}

/// Optimal strategies for both sides, tie-broken by smallest rank.
pub fn extract_strategy(spec: &GameSpec, options: &SolveOptions) -> Result<Strategy, SolveError> {
    Ok(Strategy::from_solution(&solve_full(spec, options)?))
}

/// Optimal-versus-optimal playout from the solved placements.
pub fn trace(spec: &GameSpec, options: &SolveOptions) -> Result<TraceTranscript, SolveError> {
    let solution = solve_full(spec, options)?;
    let strategy = Strategy::from_solution(&solution);
    Ok(strategy.playout(spec, solution.result()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Protection::*;

    fn reflexive_cycle(n: usize) -> PursuitGraph {
        let mut g = PursuitGraph::undirected(n);
        for v in 0..n {
            g.add_edge(v, v, Unprotected).unwrap();
            g.add_edge(v, (v + 1) % n, Unprotected).unwrap();
        }
        g
    }

    fn reflexive_path(n: usize) -> PursuitGraph {
        let mut g = PursuitGraph::undirected(n);
        for v in 0..n {
            g.add_edge(v, v, Unprotected).unwrap();
            if v + 1 < n {
                g.add_edge(v, v + 1, Unprotected).unwrap();
            }
        }
        g
    }

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn two_path_single_round() {
        let spec = GameSpec::new(&reflexive_path(2), 1).unwrap();
        let r = solve(&spec, &opts()).unwrap();
        assert_eq!(r.outcome, Outcome::CopWin { capture_time: 1 });
        assert_eq!(r.state_count, 8);
    }

    #[test]
    fn four_cycle() {
        let g = reflexive_cycle(4);
        let one = solve(&GameSpec::new(&g, 1).unwrap(), &opts()).unwrap();
        assert_eq!(one.outcome, Outcome::RobberWin);
        let two = solve(&GameSpec::new(&g, 2).unwrap(), &opts()).unwrap();
        assert_eq!(two.outcome, Outcome::CopWin { capture_time: 1 });
        assert_eq!(two.optimal_cop_placement, vec![0, 1]);
    }

    #[test]
    fn cop_number_of_small_graphs() {
        assert_eq!(
            cop_number(&reflexive_path(4), 3, &opts()).unwrap(),
            CopNumber::Exactly { k: 1 }
        );
        assert_eq!(
            cop_number(&reflexive_cycle(4), 3, &opts()).unwrap(),
            CopNumber::Exactly { k: 2 }
        );
        assert_eq!(
            cop_number(&reflexive_cycle(4), 1, &opts()).unwrap(),
            CopNumber::AboveMax { max: 1 }
        );
    }

    #[test]
    fn path_capture_time() {
        // Cop in the middle of a 5-path needs two rounds against a robber at an end.
        let spec = GameSpec::new(&reflexive_path(5), 1).unwrap();
        let r = solve(&spec, &opts()).unwrap();
        assert_eq!(r.outcome, Outcome::CopWin { capture_time: 2 });
        assert_eq!(r.optimal_cop_placement, vec![2]);
    }

    #[test]
    fn state_limit_is_enforced() {
        let spec = GameSpec::new(&reflexive_cycle(6), 2).unwrap();
        let options = SolveOptions {
            max_states: 10,
            ..opts()
        };
        assert!(matches!(
            solve(&spec, &options),
            Err(SolveError::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(capture_time_bound(5, 1), 25);
        assert_eq!(capture_time_bound(7, 1), 49);
        assert_eq!(capture_time_bound(3, 2), 18);
    }

    #[test]
    fn protected_arcs_never_capture() {
        // Two vertices, all arcs protected: no capture ever.
        let mut g = PursuitGraph::undirected(2);
        g.add_edge(0, 0, Protected).unwrap();
        g.add_edge(1, 1, Protected).unwrap();
        g.add_edge(0, 1, Protected).unwrap();
        let r = solve(&GameSpec::new(&g, 2).unwrap(), &opts()).unwrap();
        assert_eq!(r.outcome, Outcome::RobberWin);
    }

    #[test]
    fn layer_soundness() {
        // Every labelled state t > 1 has a cop move whose robber replies all
        // land in layers below t.
        let spec = GameSpec::new(&reflexive_cycle(5), 2).unwrap();
        let sol = solve_full(&spec, &opts()).unwrap();
        let idx = spec.indexer();
        for m in 0..spec.placement_count() {
            let cops = idx.unrank(m).unwrap();
            for r in 0..5 {
                let Some(t) = sol.cop_turn_value(&cops, r) else {
                    continue;
                };
                if t == 1 {
                    assert!(spec.capture_available(&cops, r));
                    continue;
                }
                assert!(!spec.capture_available(&cops, r));
                let ok = spec.cop_successors(&cops).iter().any(|next| {
                    spec.out_neighbors(r)
                        .iter()
                        .all(|&r2| sol.cop_turn_value(next, r2).is_some_and(|v| v < t))
                });
                assert!(ok, "state {cops:?},{r} at layer {t}");
            }
        }
    }
}
