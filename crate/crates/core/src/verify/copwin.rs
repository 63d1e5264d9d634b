use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::{verdict, BoundTally, Report, Session, VerifyError};
use crate::game::GameSpec;
use crate::graph::{Protection, PursuitGraph};
use crate::solver::{solve, SolveOptions};

/// Largest `n` for which every labelled graph is enumerated.
const MAX_ENUMERATED: usize = 7;
const CHUNK: u64 = 1 << 12;

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

fn is_connected(n: usize, pairs: &[(usize, usize)], mask: u64) -> bool {
    let mut adj = vec![0u32; n];
    for (bit, &(a, b)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen.count_ones() as usize == n
}

fn reflexive_graph(n: usize, pairs: &[(usize, usize)], mask: u64) -> PursuitGraph {
    let mut g = PursuitGraph::undirected(n);
    for v in 0..n {
        g.add_edge(v, v, Protection::Unprotected).expect("fresh graph");
    }
    for (bit, &(a, b)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            g.add_edge(a, b, Protection::Unprotected).expect("fresh graph");
        }
    }
    g
}

/// Every connected labelled reflexive graph on `n` vertices, in order of
/// the edge bitmask over the pairs `(a, b)`, `a < b`, taken lexicographically.
pub fn connected_graphs(n: usize) -> impl Iterator<Item = PursuitGraph> {
    assert!(
        (1..=MAX_ENUMERATED).contains(&n),
        "enumeration supports 1 <= n <= {MAX_ENUMERATED}"
    );
    let pairs = pairs(n);
    let filter_pairs = pairs.clone();
    (0..1u64 << pairs.len())
        .filter(move |&m| is_connected(n, &filter_pairs, m))
        .map(move |m| reflexive_graph(n, &pairs, m))
}

#[derive(Default)]
struct Sweep {
    graphs: u64,
    skipped_disconnected: u64,
    robber_wins: u64,
    histogram: BTreeMap<u32, u64>,
    /// First graph attaining the current maximum: (index, edge list).
    argmax: Option<(u32, u64, Vec<(usize, usize)>)>,
    tally: BoundTally,
}

impl Sweep {
    fn add(&mut self, index: u64, g: &PursuitGraph, options: &SolveOptions) -> Result<(), VerifyError> {
        let spec = GameSpec::new(g, 1)?;
        let result = solve(&spec, options)?;
        self.graphs += 1;
        self.tally.record(g.vertex_count(), 1, &result);
        match result.capture_time() {
            None => self.robber_wins += 1,
            Some(t) => {
                *self.histogram.entry(t).or_insert(0) += 1;
                if self.argmax.as_ref().is_none_or(|(m, _, _)| t > *m) {
                    let edges = g
                        .arcs()
                        .filter(|a| a.tail < a.head)
                        .map(|a| (a.tail, a.head))
                        .collect();
                    self.argmax = Some((t, index, edges));
                }
            }
        }
        Ok(())
    }

    /// `later` covers higher indices than `self`.
    fn merge(mut self, later: Sweep) -> Sweep {
        self.graphs += later.graphs;
        self.skipped_disconnected += later.skipped_disconnected;
        self.robber_wins += later.robber_wins;
        for (t, c) in later.histogram {
            *self.histogram.entry(t).or_insert(0) += c;
        }
        if let Some((t, i, e)) = later.argmax {
            if self.argmax.as_ref().is_none_or(|(m, _, _)| t > *m) {
                self.argmax = Some((t, i, e));
            }
        }
        self.tally.merge(later.tally);
        self
    }
}

fn sweep_chunk(n: usize, pairs: &[(usize, usize)], start: u64, end: u64) -> Result<Sweep, VerifyError> {
    // Small games never reach the parallel threshold; keep each solve serial.
    let options = SolveOptions::default();
    let mut sweep = Sweep::default();
    for mask in start..end {
        if !is_connected(n, pairs, mask) {
            sweep.skipped_disconnected += 1;
            continue;
        }
        sweep.add(mask, &reflexive_graph(n, pairs, mask), &options)?;
    }
    Ok(sweep)
}

/// Solves every graph at `k = 1` and checks `capt ≤ n − 4` with equality
/// attained.
///
/// Without a corpus, every labelled graph on `n ≤ 7` vertices is generated
/// and the disconnected ones skipped. With a corpus, disconnected graphs
/// are skipped as well and a vertex-count mismatch is an error.
pub fn check_cop_win_bound(
    session: &Session,
    corpus: Option<&[PursuitGraph]>,
    n: usize,
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    let workers = session.options().workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| VerifyError::InvalidParameters(e.to_string()))?;

    let sweep = match corpus {
        None => {
            if n == 0 || n > MAX_ENUMERATED {
                return Err(VerifyError::InvalidParameters(format!(
                    "internal enumeration needs 1 <= n <= {MAX_ENUMERATED}, got {n}"
                )));
            }
            let pairs = pairs(n);
            let total = 1u64 << pairs.len();
            let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
            let parts: Vec<Result<Sweep, VerifyError>> = pool.install(|| {
                chunks
                    .par_iter()
                    .map(|&c| sweep_chunk(n, &pairs, c * CHUNK, ((c + 1) * CHUNK).min(total)))
                    .collect()
            });
            let mut all = Sweep::default();
            for part in parts {
                all = all.merge(part?);
            }
            all
        }
        Some(graphs) => {
            if let Some((index, g)) = graphs.iter().enumerate().find(|(_, g)| g.vertex_count() != n) {
                return Err(VerifyError::CorpusMismatch {
                    index,
                    expected: n,
                    found: g.vertex_count(),
                });
            }
            let parts: Vec<Result<Sweep, VerifyError>> = pool.install(|| {
                graphs
                    .par_iter()
                    .enumerate()
                    .map(|(i, g)| {
                        let mut s = Sweep::default();
                        if g.is_strongly_connected() {
                            s.add(i as u64, g, &SolveOptions::default())?;
                        } else {
                            s.skipped_disconnected += 1;
                        }
                        Ok(s)
                    })
                    .collect()
            });
            let mut all = Sweep::default();
            for part in parts {
                all = all.merge(part?);
            }
            all
        }
    };
    session.merge(sweep.tally);

    let bound = n.saturating_sub(4) as u32;
    let max = sweep.histogram.keys().next_back().copied();
    let pass = max == Some(bound);
    Ok(Report {
        check: "cop-win-bound".into(),
        params: json!({
            "vertices": n,
            "source": if corpus.is_some() { "corpus" } else { "all labelled graphs" },
        }),
        observed: json!({
            "graphs_solved": sweep.graphs,
            "skipped_disconnected": sweep.skipped_disconnected,
            "skipped_robber_wins": sweep.robber_wins,
            "capture_time_histogram": sweep.histogram,
            "max_capture_time": max,
            "first_maximiser": sweep.argmax.map(|(_, i, e)| json!({ "index": i, "edges": e })),
        }),
        expected: json!({ "max_capture_time": bound }),
        verdict: verdict(pass),
        seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_counts() {
        // Connected labelled graphs: 1, 1, 4, 38, 728.
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).count()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }

    #[test]
    fn small_sweeps() {
        let session = Session::new(SolveOptions::default());
        // The n - 4 bound only starts at seven vertices: the reflexive
        // 5-path already needs two rounds.
        let report = check_cop_win_bound(&session, None, 5).unwrap();
        assert_eq!(report.observed["max_capture_time"], 2);
        assert_eq!(report.verdict, super::super::Verdict::Fail);
        assert_eq!(report.observed["graphs_solved"], 728);
        assert_eq!(session.tally().instances, 728);
    }

    #[test]
    fn corpus_mismatch() {
        let session = Session::new(SolveOptions::default());
        let graphs: Vec<PursuitGraph> = connected_graphs(3).collect();
        assert!(matches!(
            check_cop_win_bound(&session, Some(&graphs), 4),
            Err(VerifyError::CorpusMismatch { found: 3, .. })
        ));
        let report = check_cop_win_bound(&session, Some(&graphs), 3).unwrap();
        assert_eq!(report.observed["graphs_solved"], 4);
    }
}
