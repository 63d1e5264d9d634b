use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde_json::{json, Value};

use super::{verdict, Report, Session, Verdict, VerifyError};
use crate::constructions::strongly_connected::pure_cross_arcs;
use crate::constructions::{
    build_main, build_strongly_connected_k1, build_undirected_simulation, classify_configuration,
    defended_by, stable_positions, CaptureTimePrediction, ConfigurationClass, Construction, Role,
    RoleMap,
};
use crate::game::{GameSpec, Turn};
use crate::graph::{Protection, PursuitGraph, Vertex};
use crate::solver::{oracle_solve, solve_full, CopNumber, OracleOptions, SolveError, Strategy};

/// Oracle runs are skipped above this many states.
const ORACLE_STATE_LIMIT: u64 = 20_000;

/// Brute-forces every `k`-multiset of cop positions on the simulation graph
/// and compares the core-defending ones with [`stable_positions`].
///
/// Also checks the wing condition on every stable position and that the
/// defence relation matches the game's capture predicate on core vertices.
pub fn check_stable_lemma(
    graph: &PursuitGraph,
    roles: &RoleMap,
    k: usize,
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    if roles.len() != graph.vertex_count() {
        return Err(VerifyError::InvalidParameters(format!(
            "role map covers {} vertices, graph has {}",
            roles.len(),
            graph.vertex_count()
        )));
    }
    let stable = stable_positions(roles, k)?;
    let core = roles.vertices_where(|r| matches!(r, Role::Core(_)));
    let wings: Vec<Vec<Vertex>> = (0..3)
        .map(|i| roles.vertices_where(|r| matches!(r, Role::Wing { layer, .. } if layer == i)))
        .collect();
    let mut starters = roles.vertices_where(|r| matches!(r, Role::CopStarter(_)));
    starters.sort_unstable();
    let n_inner = roles.vertices_where(|r| matches!(r, Role::RobberVertex { .. })).len() / 3;

    let spec = GameSpec::new(graph, k)?;
    let indexer = spec.indexer();
    let mut defending = BTreeSet::new();
    let mut predicate_mismatches = 0u64;
    for rank in 0..indexer.count() {
        let cops = indexer.unrank(rank).expect("rank in range");
        let defended = defended_by(graph, &cops);
        for &s in &core {
            if defended.contains(&s) != spec.capture_available(&cops, s) {
                predicate_mismatches += 1;
            }
        }
        if core.iter().all(|s| defended.contains(s)) {
            defending.insert(cops);
        }
    }

    let mut wing_violations = Vec::new();
    for m in &stable {
        let defended = defended_by(graph, m);
        for (i, wing) in wings.iter().enumerate() {
            let defends = wing.iter().all(|t| defended.contains(t));
            let in_layer = m.iter().all(
                |&c| matches!(roles.role(c), Role::CopVertex { layer, .. } if layer == i),
            );
            if defends != (in_layer || *m == starters) {
                wing_violations.push(json!({ "position": m, "wing": i, "defends": defends }));
            }
        }
    }

    let missing: Vec<&Vec<Vertex>> = stable.difference(&defending).take(5).collect();
    let extra: Vec<&Vec<Vertex>> = defending.difference(&stable).take(5).collect();
    let equal = defending == stable;
    let expected_count = 3 * n_inner.pow(k as u32) + 1;
    let pass = equal && wing_violations.is_empty() && predicate_mismatches == 0;
    Ok(Report {
        check: "stable-lemma".into(),
        params: json!({ "vertices": graph.vertex_count(), "cops": k }),
        observed: json!({
            "multisets": indexer.count(),
            "core_defending": defending.len(),
            "stable_positions": stable.len(),
            "sets_equal": equal,
            "missing_examples": missing,
            "extra_examples": extra,
            "wing_violations": wing_violations,
            "capture_predicate_mismatches": predicate_mismatches,
        }),
        expected: json!({
            "core_defending": expected_count,
            "sets_equal": true,
            "wing_violations": 0,
            "capture_predicate_mismatches": 0,
        }),
        verdict: verdict(pass),
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Builds the simulation graph of `inner` and compares both games.
///
/// Passes iff the simulation has the predicted vertex count, cop number `k`,
/// and capture time one or two rounds above that of `inner`. If `inner`
/// itself does not have cop number `k`, the report is informational.
pub fn check_sandwich(
    session: &Session,
    inner: &PursuitGraph,
    k: usize,
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    let params = json!({ "inner_vertices": inner.vertex_count(), "cops": k });
    let (inner_cnum, inner_results) = session.cop_number(inner, k)?;
    let inner_capt = inner_results.last().and_then(|r| r.capture_time());
    let construction = build_undirected_simulation(inner, k)?;
    let formula = construction.prediction.vertex_count_formula;
    let n_h = construction.graph.vertex_count();

    let Some(inner_capt) = inner_capt.filter(|_| inner_cnum == CopNumber::Exactly { k }) else {
        return Ok(Report {
            check: "sandwich".into(),
            params,
            observed: json!({
                "inner_cop_number": inner_cnum.to_string(),
                "vertex_count": n_h,
            }),
            expected: json!({ "inner_cop_number": k }),
            verdict: Verdict::Informational,
            seconds: started.elapsed().as_secs_f64(),
        });
    };

    let (h_cnum, h_results) = session.cop_number(&construction.graph, k)?;
    let h_capt = h_results.last().and_then(|r| r.capture_time());
    let (lo, hi) = match construction.prediction.capture_time {
        CaptureTimePrediction::InnerPlus { min_extra, max_extra } => (
            inner_capt as u64 + min_extra,
            inner_capt as u64 + max_extra,
        ),
        CaptureTimePrediction::AtLeast { .. } => unreachable!("simulation predicts an interval"),
    };
    let pass = n_h == formula
        && h_cnum == CopNumber::Exactly { k }
        && h_capt.is_some_and(|t| (lo..=hi).contains(&(t as u64)));
    Ok(Report {
        check: "sandwich".into(),
        params,
        observed: json!({
            "inner_capture_time": inner_capt,
            "vertex_count": n_h,
            "cop_number": h_cnum.to_string(),
            "capture_time": h_capt,
            "state_count": h_results.last().map(|r| r.state_count),
        }),
        expected: json!({
            "vertex_count": formula,
            "cop_number": k,
            "capture_time_range": [lo, hi],
        }),
        verdict: verdict(pass),
        seconds: started.elapsed().as_secs_f64(),
    })
}

fn too_large(check: &str, params: Value, err: &SolveError, started: Instant) -> Option<Report> {
    match err {
        SolveError::StateSpaceTooLarge { required, limit } => Some(Report {
            check: check.into(),
            params,
            observed: json!({ "state_count": required.to_string(), "limit": limit }),
            expected: Value::Null,
            verdict: Verdict::Informational,
            seconds: started.elapsed().as_secs_f64(),
        }),
        _ => None,
    }
}

/// Builds the long-game graph and checks cop number `k` together with the
/// capture-time lower bound `p·∏q_i − 1`.
///
/// For small instances the exact capture time is also recomputed by the
/// reference oracle and must agree.
pub fn check_main_construction(
    session: &Session,
    k: usize,
    p: u64,
    q: &[u64],
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    let params = json!({ "k": k, "p": p, "q": q });
    let c = build_main(k, p, q)?;
    let lower = match c.prediction.capture_time {
        CaptureTimePrediction::AtLeast { rounds } => rounds,
        CaptureTimePrediction::InnerPlus { .. } => unreachable!("main graph predicts a bound"),
    };
    let (cnum, results) = match session.cop_number(&c.graph, k) {
        Ok(x) => x,
        Err(e) => {
            return too_large("main-construction", params, &e, started)
                .ok_or_else(|| VerifyError::from(e))
        }
    };
    let last = results.last().expect("k >= 1");
    let capt = last.capture_time();

    let mut oracle_capt = Value::Null;
    let mut oracle_agrees = true;
    if last.state_count <= ORACLE_STATE_LIMIT {
        let spec = GameSpec::new(&c.graph, k)?;
        let oracle = oracle_solve(&spec, OracleOptions { override_cost_guard: true })?;
        oracle_agrees = oracle.outcome == last.outcome;
        oracle_capt = json!(oracle.capture_time());
    }

    let pass = cnum == CopNumber::Exactly { k }
        && capt.is_some_and(|t| t as u64 >= lower)
        && oracle_agrees;
    Ok(Report {
        check: "main-construction".into(),
        params,
        observed: json!({
            "vertex_count": c.graph.vertex_count(),
            "cop_number": cnum.to_string(),
            "capture_time": capt,
            "optimal_cop_placement": last.optimal_cop_placement,
            "oracle_capture_time": oracle_capt,
            "oracle_agrees": oracle_agrees,
            "state_count": last.state_count,
        }),
        expected: json!({
            "vertex_count": c.prediction.vertex_count_formula,
            "cop_number": k,
            "capture_time_at_least": lower,
        }),
        verdict: verdict(pass && c.graph.vertex_count() == c.prediction.vertex_count_formula),
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Builds the strongly connected one-cop graph for `(p, q)` and checks it.
pub fn check_strongly_connected_k1(
    session: &Session,
    p: u64,
    q: u64,
) -> Result<Report, VerifyError> {
    let c = build_strongly_connected_k1(p, q)?;
    check_strongly_connected_graph(session, "strongly-connected-k1", &c)
}

/// Checks a strongly connected one-cop construction, possibly mutated.
///
/// Passes iff the graph is strongly connected, every vertex has a
/// protected loop, one cop wins, and capture takes at least `pq − 1`
/// rounds.
pub fn check_strongly_connected_graph(
    session: &Session,
    check: &str,
    c: &Construction,
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    let (p, q) = (c.recipe.primes[0], c.recipe.primes[1]);
    let g = &c.graph;
    let lower = p * q - 1;
    let strongly_connected = g.is_strongly_connected();
    let unprotected_loops: Vec<Vertex> = (0..g.vertex_count())
        .filter(|&v| g.loop_at(v) != Some(Protection::Protected))
        .collect();
    let (cnum, results) = session.cop_number(g, 2)?;
    let one_cop = &results[0];
    let capt = one_cop.capture_time();
    let pass = strongly_connected
        && unprotected_loops.is_empty()
        && cnum == CopNumber::Exactly { k: 1 }
        && capt.is_some_and(|t| t as u64 >= lower);
    Ok(Report {
        check: check.into(),
        params: json!({ "p": p, "q": q }),
        observed: json!({
            "vertex_count": g.vertex_count(),
            "strongly_connected": strongly_connected,
            "vertices_without_protected_loop": unprotected_loops,
            "cop_number": cnum.to_string(),
            "capture_time_one_cop": capt,
            "optimal_cop_placement": one_cop.optimal_cop_placement,
        }),
        expected: json!({
            "vertex_count": c.prediction.vertex_count_formula,
            "strongly_connected": true,
            "vertices_without_protected_loop": [],
            "cop_number": 1,
            "capture_time_at_least": lower,
        }),
        verdict: verdict(pass),
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// The strongly connected graph with every cross arc removed except the
/// capture arcs into the last robber level.
pub fn sc1_without_cross_arcs(p: u64, q: u64) -> Result<Construction, VerifyError> {
    let mut c = build_strongly_connected_k1(p, q)?;
    for (a, b) in pure_cross_arcs(&c) {
        c.graph.remove_arc(a, b);
    }
    Ok(c)
}

/// Replays an optimal trace on the simulation graph of `inner` and labels
/// every round as initial, canonical, or other. Always informational.
pub fn check_canonical_play(
    session: &Session,
    inner: &PursuitGraph,
    k: usize,
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    let c = build_undirected_simulation(inner, k)?;
    let spec = GameSpec::new(&c.graph, k)?;
    let solution = solve_full(&spec, session.options())?;
    session.record(spec.vertex_count(), k, solution.result());
    let transcript = Strategy::from_solution(&solution).playout(&spec, solution.result());

    let mut starters = c.roles.vertices_where(|r| matches!(r, Role::CopStarter(_)));
    starters.sort_unstable();
    let robber_start = c.roles.vertex_of(Role::RobberStarter(0)).expect("robber starter");
    let starters_initial = matches!(
        classify_configuration(&c.roles, k, &starters, robber_start, Turn::CopTurn),
        ConfigurationClass::Initial { .. }
    );

    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let rounds: Vec<Value> = std::iter::once(&transcript.placement)
        .chain(&transcript.rounds)
        .map(|round| {
            let class = classify_configuration(&c.roles, k, &round.cops, round.robber, Turn::CopTurn);
            let name = match class {
                ConfigurationClass::Initial { .. } => "initial",
                ConfigurationClass::Canonical { .. } => "canonical",
                ConfigurationClass::Other => "other",
            };
            *tally.entry(name).or_insert(0) += 1;
            json!({
                "round": round.round,
                "cops": round.cops.iter().map(|&v| c.roles.role(v).to_string()).collect::<Vec<_>>(),
                "robber": c.roles.role(round.robber).to_string(),
                "class": class,
            })
        })
        .collect();

    Ok(Report {
        check: "canonical-play".into(),
        params: json!({ "inner_vertices": inner.vertex_count(), "cops": k }),
        observed: json!({
            "outcome": solution.result().outcome,
            "all_starter_placement_is_initial": starters_initial,
            "class_counts": tally,
            "rounds": rounds,
            "end": transcript.end,
        }),
        expected: Value::Null,
        verdict: Verdict::Informational,
        seconds: started.elapsed().as_secs_f64(),
    })
}
