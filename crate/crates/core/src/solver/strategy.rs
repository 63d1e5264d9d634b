use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_pool, SolveResult, Solution};
use crate::game::GameSpec;
use crate::graph::Vertex;

const CAPTURE: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CopChoice {
    Capture,
    Move(Vec<Vertex>),
}

/// Positional strategies for both sides.
///
/// Cops pick the move minimising the value of the resulting robber-turn
/// state; robbers pick the reply maximising the resulting cop-turn value,
/// with safe-forever replies preferred. Ties go to the smallest rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    n: usize,
    // Indexed like the solver tables: multiset rank * n + robber.
    cop_choice: Vec<u64>,
    robber_choice: Vec<u32>,
}

impl Strategy {
    pub fn from_solution(solution: &Solution<'_>) -> Strategy {
        let spec = solution.spec();
        let n = spec.vertex_count();
        let indexer = spec.indexer();
        let placements = spec.placement_count() as usize;
        let cop_layer = solution.cop_layers();
        let robber_layer = solution.robber_layers();

        let per_placement = |m: usize| -> (Vec<u64>, Vec<u32>) {
            let cops = indexer.unrank(m as u64).expect("rank in range");
            let mut succ = Vec::new();
            spec.for_each_joint_move(&cops, false, |next| succ.push(indexer.rank(next)));
            succ.sort_unstable();
            succ.dedup();

            let mut cop_row = Vec::with_capacity(n);
            let mut robber_row = Vec::with_capacity(n);
            for r in 0..n {
                if spec.capture_available(&cops, r) {
                    cop_row.push(CAPTURE);
                } else {
                    // Smallest value wins; an unforced robber-turn state is infinite.
                    let mut best = (u32::MAX, u64::MAX);
                    for &s in &succ {
                        let v = robber_layer[s as usize * n + r];
                        let v = if v == 0 { u32::MAX } else { v };
                        if (v, s) < best {
                            best = (v, s);
                        }
                    }
                    cop_row.push(best.1);
                }

                let mut best: Option<(u32, Vertex)> = None;
                for &r2 in spec.out_neighbors(r) {
                    let v = cop_layer[m * n + r2];
                    let v = if v == 0 { u32::MAX } else { v };
                    if best.is_none_or(|(bv, _)| v > bv) {
                        best = Some((v, r2));
                    }
                }
                robber_row.push(best.expect("playable graph").1 as u32);
            }
            (cop_row, robber_row)
        };

        let rows: Vec<(Vec<u64>, Vec<u32>)> =
            match build_pool(solution.workers(), spec.state_count()) {
                Some(pool) => pool.install(|| (0..placements).into_par_iter().map(per_placement).collect()),
                None => (0..placements).map(per_placement).collect(),
            };
        let mut cop_choice = Vec::with_capacity(placements * n);
        let mut robber_choice = Vec::with_capacity(placements * n);
        for (c, r) in rows {
            cop_choice.extend(c);
            robber_choice.extend(r);
        }
        Strategy {
            n,
            cop_choice,
            robber_choice,
        }
    }

    pub fn cop_choice(&self, spec: &GameSpec, cops: &[Vertex], robber: Vertex) -> CopChoice {
        let idx = spec.indexer().rank(cops) as usize * self.n + robber;
        match self.cop_choice[idx] {
            CAPTURE => CopChoice::Capture,
            rank => CopChoice::Move(spec.indexer().unrank(rank).expect("rank in range")),
        }
    }

    /// Robber reply after the cops have moved to `cops`.
    pub fn robber_choice(&self, spec: &GameSpec, cops: &[Vertex], robber: Vertex) -> Vertex {
        let idx = spec.indexer().rank(cops) as usize * self.n + robber;
        self.robber_choice[idx] as Vertex
    }

    /// Plays both strategies against each other from the solved placement.
    ///
    /// Cop wins end in a capture on the round equal to the capture time;
    /// robber wins end when a cop-turn configuration repeats.
    pub fn playout(&self, spec: &GameSpec, result: &SolveResult) -> TraceTranscript {
        let mut cops = result.optimal_cop_placement.clone();
        let mut robber = result.witness_robber_placement;
        let placement = TraceRound {
            round: 0,
            cops: cops.clone(),
            robber,
        };
        let mut rounds = Vec::new();
        let mut seen: HashMap<(Vec<Vertex>, Vertex), u32> = HashMap::new();
        let mut round = 1u32;
        let end = loop {
            if let Some(&first) = seen.get(&(cops.clone(), robber)) {
                break TraceEnd::Cycle {
                    repeats_round: first,
                };
            }
            seen.insert((cops.clone(), robber), round);
            rounds.push(TraceRound {
                round,
                cops: cops.clone(),
                robber,
            });
            match self.cop_choice(spec, &cops, robber) {
                CopChoice::Capture => {
                    let by = *cops
                        .iter()
                        .find(|&&c| spec.defends(c, robber))
                        .expect("capture available");
                    break TraceEnd::Capture { round, from: by };
                }
                CopChoice::Move(next) => {
                    robber = self.robber_choice(spec, &next, robber);
                    cops = next;
                }
            }
            round += 1;
        };
        TraceTranscript {
            placement,
            rounds,
            end,
        }
    }
}

/// Positions at the start of a round (before the cop turn).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRound {
    pub round: u32,
    pub cops: Vec<Vertex>,
    pub robber: Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TraceEnd {
    /// A cop on `from` follows an unprotected arc onto the robber.
    Capture { round: u32, from: Vertex },
    /// The configuration of this round recurs: the robber evades forever.
    Cycle { repeats_round: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceTranscript {
    pub placement: TraceRound,
    pub rounds: Vec<TraceRound>,
    pub end: TraceEnd,
}

impl TraceTranscript {
    pub fn is_robber_win(&self) -> bool {
        matches!(self.end, TraceEnd::Cycle { .. })
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::{Protection::*, PursuitGraph};
    use crate::solver::{solve_full, trace, SolveOptions};

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

    fn reflexive_cycle(n: usize) -> PursuitGraph {
        let mut g = PursuitGraph::undirected(n);
        for v in 0..n {
            g.add_edge(v, v, Unprotected).unwrap();
            g.add_edge(v, (v + 1) % n, Unprotected).unwrap();
        }
        g
    }

    #[test]
    fn two_path_captures_immediately() {
        let spec = GameSpec::new(&reflexive_path(2), 1).unwrap();
        let sol = solve_full(&spec, &SolveOptions::default()).unwrap();
        let strategy = Strategy::from_solution(&sol);
        assert_eq!(strategy.cop_choice(&spec, &[0], 1), CopChoice::Capture);
        let t = trace(&spec, &SolveOptions::default()).unwrap();
        assert_eq!(t.rounds.len(), 1);
        assert_eq!(t.rounds[0].round, 1);
        assert!(matches!(t.end, TraceEnd::Capture { round: 1, .. }));
    }

    #[test]
    fn trace_rounds_are_consecutive_and_match_capture_time() {
        let spec = GameSpec::new(&reflexive_path(6), 1).unwrap();
        let sol = solve_full(&spec, &SolveOptions::default()).unwrap();
        let t = Strategy::from_solution(&sol).playout(&spec, sol.result());
        let capt = sol.result().capture_time().unwrap();
        assert_eq!(t.rounds.len() as u32, capt);
        for (i, r) in t.rounds.iter().enumerate() {
            assert_eq!(r.round, i as u32 + 1);
        }
        for w in t.rounds.windows(2) {
            // Legal moves between consecutive rounds.
            assert!(spec.cop_successors(&w[0].cops).contains(&w[1].cops));
            assert!(spec.out_neighbors(w[0].robber).contains(&w[1].robber));
        }
    }

    #[test]
    fn robber_win_trace_is_a_cycle() {
        let mut g = PursuitGraph::undirected(4);
        for v in 0..4 {
            g.add_edge(v, v, Unprotected).unwrap();
            g.add_edge(v, (v + 1) % 4, Unprotected).unwrap();
        }
        let spec = GameSpec::new(&g, 1).unwrap();
        let t = trace(&spec, &SolveOptions::default()).unwrap();
        assert!(t.is_robber_win());
    }

    #[test]
    fn deterministic_across_runs_and_workers() {
        let g = reflexive_cycle(9);
        let spec = GameSpec::new(&g, 2).unwrap();
        let a = Strategy::from_solution(&solve_full(&spec, &SolveOptions::default()).unwrap());
        let b = Strategy::from_solution(
            &solve_full(&spec, &SolveOptions::default().with_workers(4)).unwrap(),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn random_robbers_are_caught_in_time() {
        for (g, k) in [(reflexive_path(9), 1), (reflexive_cycle(11), 2)] {
            random_playouts(&g, k);
        }
    }

    fn random_playouts(g: &PursuitGraph, k: usize) {
        let n = g.vertex_count();
        let spec = GameSpec::new(g, k).unwrap();
        let sol = solve_full(&spec, &SolveOptions::default()).unwrap();
        let strategy = Strategy::from_solution(&sol);
        let capt = sol.result().capture_time().expect("cops win");
        assert!(capt > 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut cops = sol.result().optimal_cop_placement.clone();
            let mut robber = rng.gen_range(0..n);
            let mut rounds = 0;
            loop {
                rounds += 1;
                assert!(rounds <= capt, "robber survived past the capture time");
                match strategy.cop_choice(&spec, &cops, robber) {
                    CopChoice::Capture => break,
                    CopChoice::Move(next) => {
                        assert!(spec.cop_successors(&cops).contains(&next));
                        cops = next;
                        let moves = spec.out_neighbors(robber);
                        robber = moves[rng.gen_range(0..moves.len())];
                    }
                }
            }
        }
    }
}
