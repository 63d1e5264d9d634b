//! Reference solver used to cross-check the attractor.
//!
//! Bounded-horizon minimax: `W_h` is the set of cop-turn configurations
//! from which the cops capture within `h` rounds, built bottom-up from
//! `W_1` (capture available) up to a horizon of `n·C(n+k-1,k) + 1` rounds.
//! Nothing here is shared with the attractor beyond move generation.

use super::{capture_time_bound, Outcome, SolveError, SolveResult};
use crate::game::GameSpec;

#[derive(Clone, Copy, Debug, Default)]
pub struct OracleOptions {
    /// Run even when the instance exceeds the n <= 8, k <= 2 cost guard.
    pub override_cost_guard: bool,
}

/// Round horizon for an `n`-vertex, `k`-cop game.
pub fn oracle_horizon(n: usize, k: usize) -> u64 {
    capture_time_bound(n, k) as u64 + 1
}

pub fn oracle_solve(spec: &GameSpec, options: OracleOptions) -> Result<SolveResult, SolveError> {
    let n = spec.vertex_count();
    let k = spec.cop_count();
    if !options.override_cost_guard && (n > 8 || k > 2) {
        return Err(SolveError::CostGuard { vertices: n, cops: k });
    }
    let indexer = spec.indexer();
    let placements = spec.placement_count() as usize;
    let multisets: Vec<Vec<usize>> = (0..placements)
        .map(|m| indexer.unrank(m as u64).expect("rank in range"))
        .collect();
    let successors: Vec<Vec<usize>> = multisets
        .iter()
        .map(|cops| {
            spec.cop_successors(cops)
                .iter()
                .map(|s| indexer.rank(s) as usize)
                .collect()
        })
        .collect();

    // value[m][r]: first horizon at which the cops win, if any yet.
    let mut value: Vec<Vec<Option<u64>>> = vec![vec![None; n]; placements];
    let mut within: Vec<Vec<bool>> = multisets
        .iter()
        .map(|cops| (0..n).map(|r| spec.capture_available(cops, r)).collect())
        .collect();
    for (m, row) in within.iter().enumerate() {
        for r in 0..n {
            if row[r] {
                value[m][r] = Some(1);
            }
        }
    }

    let horizon = oracle_horizon(n, k);
    for h in 2..=horizon {
        let mut next = within.clone();
        for m in 0..placements {
            for r in 0..n {
                if next[m][r] {
                    continue;
                }
                let forced = successors[m].iter().any(|&s| {
                    spec.out_neighbors(r).iter().all(|&r2| within[s][r2])
                });
                if forced {
                    next[m][r] = true;
                    value[m][r] = Some(h);
                }
            }
        }
        within = next;
    }

    let mut best: Option<(Option<u64>, usize, usize)> = None;
    for (m, row) in value.iter().enumerate() {
        // Robber picks the largest value, None counting as infinite.
        let mut worst: (Option<u64>, usize) = (row[0], 0);
        for (r, &v) in row.iter().enumerate().skip(1) {
            let better = match (v, worst.0) {
                (_, None) => false,
                (None, Some(_)) => true,
                (Some(a), Some(b)) => a > b,
            };
            if better {
                worst = (v, r);
            }
        }
        let improves = match best {
            None => true,
            Some((bv, _, _)) => match (worst.0, bv) {
                (None, _) => false,
                (Some(_), None) => true,
                (Some(a), Some(b)) => a < b,
            },
        };
        if improves {
            best = Some((worst.0, m, worst.1));
        }
    }
    let (val, m, witness) = best.expect("at least one placement");
    let layer_count = value
        .iter()
        .flatten()
        .filter_map(|v| *v)
        .max()
        .unwrap_or(0);
    Ok(SolveResult {
        outcome: match val {
            Some(t) => Outcome::CopWin {
                capture_time: t as u32,
            },
            None => Outcome::RobberWin,
        },
        optimal_cop_placement: multisets[m].clone(),
        witness_robber_placement: witness,
        state_count: spec.state_count(),
        layer_count: layer_count as u32,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Protection::*, PursuitGraph};
    use crate::solver::{solve, SolveOptions};

    fn reflexive_cycle(n: usize) -> PursuitGraph {
        let mut g = PursuitGraph::undirected(n);
        for v in 0..n {
            g.add_edge(v, v, Unprotected).unwrap();
            g.add_edge(v, (v + 1) % n, Unprotected).unwrap();
        }
        g
    }

    #[test]
    fn horizon_values() {
        assert_eq!(oracle_horizon(5, 1), 26);
        assert_eq!(oracle_horizon(3, 2), 19);
    }

    #[test]
    fn agrees_on_small_cycles_and_paths() {
        let mut path = PursuitGraph::undirected(2);
        path.add_edge(0, 0, Unprotected).unwrap();
        path.add_edge(1, 1, Unprotected).unwrap();
        path.add_edge(0, 1, Unprotected).unwrap();
        for (g, k) in [(path, 1), (reflexive_cycle(4), 1), (reflexive_cycle(4), 2)] {
            let spec = GameSpec::new(&g, k).unwrap();
            let a = solve(&spec, &SolveOptions::default()).unwrap();
            let b = oracle_solve(&spec, OracleOptions::default()).unwrap();
            assert_eq!(a.outcome, b.outcome);
        }
    }

    #[test]
    fn cost_guard() {
        let spec = GameSpec::new(&reflexive_cycle(9), 1).unwrap();
        assert!(matches!(
            oracle_solve(&spec, OracleOptions::default()),
            Err(SolveError::CostGuard { .. })
        ));
        let forced = oracle_solve(
            &spec,
            OracleOptions {
                override_cost_guard: true,
            },
        )
        .unwrap();
        assert_eq!(forced.outcome, Outcome::RobberWin);
    }
}
