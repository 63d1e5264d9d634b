//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pursuit_core::constructions::build_undirected_simulation;
use pursuit_core::game::GameSpec;
use pursuit_core::graph::{doubly_direct, validate_for_play, Protection, PursuitGraph};
use pursuit_core::solver::{oracle_solve, trace, OracleOptions, SolveOptions, WORKERS_ENV};
use pursuit_core::verify::{
    check_cop_win_bound, check_main_construction, check_recorded_bounds, check_sandwich,
    check_stable_lemma, check_strongly_connected_k1, connected_graphs, Report, Session, Verdict,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_report(r: &Report) -> Outcome {
    Outcome {
        pass: r.verdict == Verdict::Pass,
        detail: r.observed.to_string(),
    }
}

fn from_reports(rs: &[Report]) -> Outcome {
    Outcome {
        pass: rs.iter().all(|r| r.verdict == Verdict::Pass),
        detail: rs
            .iter()
            .map(|r| format!("{} {}: {}", r.check, r.params, r.observed))
            .collect::<Vec<_>>()
            .join(" | "),
    }
}

fn failed(msg: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: msg.into(),
    }
}

fn reflexive_cycle(n: usize) -> PursuitGraph {
    let mut g = PursuitGraph::undirected(n);
    for v in 0..n {
        g.add_edge(v, v, Protection::Unprotected).unwrap();
        g.add_edge(v, (v + 1) % n, Protection::Unprotected).unwrap();
    }
    doubly_direct(&g).unwrap()
}

/// Random directed graph with some protected arcs that passes validation.
fn random_directed(rng: &mut ChaCha8Rng, n: usize) -> PursuitGraph {
    loop {
        let mut g = PursuitGraph::directed(n);
        for a in 0..n {
            for b in 0..n {
                if rng.gen_bool(0.4) {
                    let p = if rng.gen_bool(0.3) {
                        Protection::Protected
                    } else {
                        Protection::Unprotected
                    };
                    g.add_arc(a, b, p).unwrap();
                }
            }
        }
        if validate_for_play(&g).is_empty() {
            return g;
        }
    }
}

fn oracle_equivalence(session: &Session) -> Outcome {
    let mut instances: Vec<(PursuitGraph, usize)> = Vec::new();
    for n in 1..=5 {
        for g in connected_graphs(n) {
            instances.push((g.clone(), 1));
            instances.push((g, 2));
        }
    }
    let undirected = instances.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=2);
        instances.push((random_directed(&mut rng, n), k));
    }
    let mut mismatches = Vec::new();
    for (i, (g, k)) in instances.iter().enumerate() {
        let spec = GameSpec::new(g, *k).unwrap();
        let fast = session.solve(&spec).unwrap();
        let slow = oracle_solve(&spec, OracleOptions::default()).unwrap();
        session.record(spec.vertex_count(), *k, &slow);
        if fast.outcome != slow.outcome {
            mismatches.push(format!("#{i} k={k}: {:?} vs {:?}", fast.outcome, slow.outcome));
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "{} instances ({undirected} undirected reflexive, 200 random directed), {} mismatches {:?}",
            instances.len(),
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn formula_and_invariants(session: &Session) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut problems = Vec::new();

    // Simulation size formula and part sizes.
    for i in 0..20 {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(2..=3);
        let g = random_directed(&mut rng, n);
        let c = build_undirected_simulation(&g, k).unwrap();
        let formula = (3 * k + 3) * n + 8 * k + 3;
        let counts = c.roles.kind_counts();
        let parts_ok = counts["core"] == 4 * k
            && counts["wing"] == 3 * k
            && counts["cop"] == 3 * k * n
            && counts["robber"] == 3 * n
            && counts["cop_starter"] == k
            && counts["robber_starter"] == 3;
        let symmetric = c.graph.arcs().all(|a| c.graph.arc(a.head, a.tail) == Some(a.protection));
        if c.graph.vertex_count() != formula || c.prediction.vertex_count_formula != formula || !parts_ok || !symmetric {
            problems.push(format!("formula #{i}: n={n} k={k} got {}", c.graph.vertex_count()));
        }
    }

    // Relabelling invariance.
    for i in 0..50 {
        let n = rng.gen_range(3..=6);
        let k = rng.gen_range(1..=2);
        let g = random_directed(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let h = g.permuted(&perm);
        let a = session.solve(&GameSpec::new(&g, k).unwrap()).unwrap();
        let b = session.solve(&GameSpec::new(&h, k).unwrap()).unwrap();
        if a.outcome != b.outcome || a.layer_count != b.layer_count {
            problems.push(format!("relabel #{i}: {:?} vs {:?}", a.outcome, b.outcome));
        }
    }

    // One more cop never slows the capture.
    let mut monotone = 0;
    let mut attempts = 0;
    while monotone < 50 && attempts < 10_000 {
        attempts += 1;
        let n = rng.gen_range(3..=6);
        let k = rng.gen_range(1..=2);
        let g = random_directed(&mut rng, n);
        let a = session.solve(&GameSpec::new(&g, k).unwrap()).unwrap();
        let Some(t) = a.capture_time() else { continue };
        monotone += 1;
        let b = session.solve(&GameSpec::new(&g, k + 1).unwrap()).unwrap();
        if b.capture_time().is_none_or(|t2| t2 > t) {
            problems.push(format!("monotone: k={k} {t} then {:?}", b.capture_time()));
        }
    }
    if monotone < 50 {
        problems.push(format!("only {monotone} cop-win instances found"));
    }

    // Same answers and traces with one worker and with four.
    let h = build_undirected_simulation(&reflexive_cycle(4), 2).unwrap();
    let big = reflexive_cycle(30);
    let mut runs = Vec::new();
    for workers in ["1", "4"] {
        std::env::set_var(WORKERS_ENV, workers);
        let options = SolveOptions::from_env();
        let mut out = Vec::new();
        for (g, k) in [(&h.graph, 2), (&big, 2)] {
            let spec = GameSpec::new(g, k).unwrap();
            let r = pursuit_core::solver::solve(&spec, &options).unwrap();
            session.record(spec.vertex_count(), k, &r);
            out.push((r, trace(&spec, &options).unwrap()));
        }
        runs.push((options.workers, out));
    }
    std::env::remove_var(WORKERS_ENV);
    if runs[0].0 != 1 || runs[1].0 != 4 {
        problems.push(format!("worker env not honoured: {} / {}", runs[0].0, runs[1].0));
    }
    if runs[0].1 != runs[1].1 {
        problems.push("results differ between 1 and 4 workers".into());
    }

    Outcome {
        pass: problems.is_empty(),
        detail: format!(
            "20 formula graphs, 50 relabellings, {monotone} monotonicity instances, workers 1 vs 4; problems: {problems:?}"
        ),
    }
}

fn main() -> ExitCode {
    let session = Session::new(SolveOptions::from_env());
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let outcome = f();
        results.push((id, name, outcome, started.elapsed().as_secs_f64()));
        let (id, name, o, secs) = results.last().unwrap();
        println!(
            "{} criterion {id} ({name}, {secs:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };

    run(1, "oracle equivalence", &mut || oracle_equivalence(&session));
    run(2, "cop-win bound on 7 vertices", &mut || {
        match check_cop_win_bound(&session, None, 7) {
            Ok(r) => from_report(&r),
            Err(e) => failed(e.to_string()),
        }
    });
    run(4, "long-game construction", &mut || {
        let reports: Result<Vec<Report>, _> = [(1, 3, vec![5]), (2, 3, vec![5, 7])]
            .into_iter()
            .map(|(k, p, q)| check_main_construction(&session, k, p, &q))
            .collect();
        match reports {
            Ok(rs) => from_reports(&rs),
            Err(e) => failed(e.to_string()),
        }
    });
    run(5, "simulation sandwich", &mut || match check_sandwich(&session, &reflexive_cycle(4), 2) {
        Ok(r) => from_report(&r),
        Err(e) => failed(e.to_string()),
    });
    run(6, "stable positions", &mut || {
        let h = build_undirected_simulation(&reflexive_cycle(4), 2).unwrap();
        match check_stable_lemma(&h.graph, &h.roles, 2) {
            Ok(r) => {
                let mut o = from_report(&r);
                o.pass &= r.observed["core_defending"] == 49 && r.observed["multisets"] == 1540;
                o
            }
            Err(e) => failed(e.to_string()),
        }
    });
    run(7, "strongly connected one-cop graph", &mut || {
        match check_strongly_connected_k1(&session, 3, 5) {
            Ok(r) => from_report(&r),
            Err(e) => failed(e.to_string()),
        }
    });
    run(8, "formula and invariant suite", &mut || formula_and_invariants(&session));
    // Last, so it covers every solve above.
    run(3, "configuration-count bound on every solve", &mut || {
        from_report(&check_recorded_bounds(&session))
    });

    let failures: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        results.len() - failures.len(),
        results.len(),
        if failures.is_empty() {
            String::new()
        } else {
            format!("; failing: {failures:?}")
        }
    );
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
