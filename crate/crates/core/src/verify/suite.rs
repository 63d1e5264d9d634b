use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    check_canonical_play, check_cop_win_bound, check_main_construction, check_recorded_bounds,
    check_sandwich, check_stable_lemma, check_strongly_connected_graph,
    check_strongly_connected_k1, check_upper_bound, sc1_without_cross_arcs, verdict, Report,
    Session, Verdict, VerifyError,
};
use crate::constructions::{build_undirected_simulation, Role};
use crate::game::GameSpec;
use crate::graph::{doubly_direct, Protection, PursuitGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteCheck {
    UpperBound,
    Stable,
    Sandwich,
    Main,
    Sc1,
    CopWin7,
    All,
}

/// `Desk` runs the fixed small instances; `Extended` adds larger ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Extended,
}

fn reflexive_undirected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> PursuitGraph {
    let mut g = PursuitGraph::undirected(n);
    for v in 0..n {
        g.add_edge(v, v, Protection::Unprotected).expect("fresh graph");
    }
    for (a, b) in edges {
        g.add_edge(a, b, Protection::Unprotected).expect("fresh graph");
    }
    g
}

fn cycle(n: usize) -> PursuitGraph {
    let g = reflexive_undirected(n, (0..n).map(|v| (v, (v + 1) % n)));
    doubly_direct(&g).expect("undirected input")
}

fn path(n: usize) -> PursuitGraph {
    reflexive_undirected(n, (1..n).map(|v| (v - 1, v)))
}

fn collect(reports: &mut Vec<Report>, check: &str, params: Value, f: impl FnOnce() -> Result<Report, VerifyError>) {
    let started = Instant::now();
    reports.push(f().unwrap_or_else(|e| Report::from_error(check, params, &e, started)));
}

fn upper_bound(session: &Session, scale: Scale, out: &mut Vec<Report>) {
    let mut instances = vec![(path(5), 1), (cycle(6), 1), (cycle(6), 2)];
    if scale == Scale::Extended {
        instances.extend([(path(9), 1), (cycle(9), 2), (path(6), 2)]);
    }
    for (g, k) in instances {
        let params = json!({ "vertices": g.vertex_count(), "cops": k });
        collect(out, "upper-bound", params, || {
            let spec = GameSpec::new(&g, k)?;
            let result = session.solve(&spec)?;
            Ok(check_upper_bound(&result, spec.vertex_count(), k))
        });
    }
}

fn stable(scale: Scale, out: &mut Vec<Report>) {
    let mut instances = vec![(cycle(4), 2)];
    if scale == Scale::Extended {
        instances.extend([(cycle(3), 3), (cycle(5), 2)]);
    }
    for (g, k) in instances {
        let params = json!({ "inner_vertices": g.vertex_count(), "cops": k });
        collect(out, "stable-lemma", params, || {
            let h = build_undirected_simulation(&g, k)?;
            check_stable_lemma(&h.graph, &h.roles, k)
        });
    }
    // Dropping one core-defence edge must break the lemma.
    let params = json!({ "inner_vertices": 4, "cops": 2, "removed": "cop[v=0,i=0,j=0] - core[0]" });
    collect(out, "stable-lemma-mutation", params.clone(), || {
        let started = Instant::now();
        let mut h = build_undirected_simulation(&cycle(4), 2)?;
        let kappa = h.roles.vertex_of(Role::CopVertex { v: 0, layer: 0, j: 0 }).expect("role");
        let s0 = h.roles.vertex_of(Role::Core(0)).expect("role");
        h.graph.remove_arc(kappa, s0);
        let mutated = check_stable_lemma(&h.graph, &h.roles, 2)?;
        Ok(Report {
            check: "stable-lemma-mutation".into(),
            params,
            observed: json!({ "mutated_verdict": mutated.verdict }),
            expected: json!({ "mutated_verdict": Verdict::Fail }),
            verdict: verdict(mutated.verdict == Verdict::Fail),
            seconds: started.elapsed().as_secs_f64(),
        })
    });
}

fn sandwich(session: &Session, scale: Scale, out: &mut Vec<Report>) {
    let mut instances = vec![(cycle(4), 2)];
    if scale == Scale::Extended {
        instances.push((cycle(5), 2));
    }
    for (g, k) in instances {
        let params = json!({ "inner_vertices": g.vertex_count(), "cops": k });
        collect(out, "sandwich", params, || check_sandwich(session, &g, k));
    }
}

fn main_construction(session: &Session, scale: Scale, out: &mut Vec<Report>) {
    let mut instances: Vec<(usize, u64, Vec<u64>)> = vec![(1, 3, vec![5]), (2, 3, vec![5, 7])];
    if scale == Scale::Extended {
        instances.extend([(1, 5, vec![7]), (1, 7, vec![11]), (2, 5, vec![7, 11])]);
    }
    for (k, p, q) in instances {
        let params = json!({ "k": k, "p": p, "q": q });
        collect(out, "main-construction", params, || {
            check_main_construction(session, k, p, &q)
        });
    }
}

fn sc1(session: &Session, scale: Scale, out: &mut Vec<Report>) {
    let mut instances = vec![(3, 5)];
    if scale == Scale::Extended {
        instances.push((5, 7));
    }
    for (p, q) in instances {
        collect(out, "strongly-connected-k1", json!({ "p": p, "q": q }), || {
            check_strongly_connected_k1(session, p, q)
        });
    }
    // Without the cross arcs the robber can rest on a loop forever.
    let params = json!({ "p": 3, "q": 5, "removed": "cross arcs" });
    collect(out, "sc1-cross-arc-mutation", params.clone(), || {
        let started = Instant::now();
        let c = sc1_without_cross_arcs(3, 5)?;
        let mutated = check_strongly_connected_graph(session, "sc1-mutated", &c)?;
        let spec = GameSpec::new(&c.graph, 1)?;
        let one_cop = session.solve(&spec)?;
        let robber_wins = !one_cop.outcome.is_cop_win();
        Ok(Report {
            check: "sc1-cross-arc-mutation".into(),
            params,
            observed: json!({ "mutated_verdict": mutated.verdict, "one_cop_outcome": one_cop.outcome }),
            expected: json!({ "mutated_verdict": Verdict::Fail, "one_cop_outcome": { "kind": "RobberWin" } }),
            verdict: verdict(mutated.verdict == Verdict::Fail && robber_wins),
            seconds: started.elapsed().as_secs_f64(),
        })
    });
}

fn copwin(session: &Session, corpus: Option<&[PursuitGraph]>, out: &mut Vec<Report>) {
    collect(out, "cop-win-bound", json!({ "vertices": 7 }), || {
        check_cop_win_bound(session, corpus, 7)
    });
}

/// Runs one named group of checks, or every group for [`SuiteCheck::All`].
///
/// Errors become failing reports. `All` also runs the informational
/// canonical-play replay and finishes with the bound audit of every
/// instance solved along the way.
pub fn run_suite(
    session: &Session,
    check: SuiteCheck,
    scale: Scale,
    corpus: Option<&[PursuitGraph]>,
) -> Vec<Report> {
    let mut out = Vec::new();
    match check {
        SuiteCheck::UpperBound => upper_bound(session, scale, &mut out),
        SuiteCheck::Stable => stable(scale, &mut out),
        SuiteCheck::Sandwich => sandwich(session, scale, &mut out),
        SuiteCheck::Main => main_construction(session, scale, &mut out),
        SuiteCheck::Sc1 => sc1(session, scale, &mut out),
        SuiteCheck::CopWin7 => copwin(session, corpus, &mut out),
        SuiteCheck::All => {
            upper_bound(session, scale, &mut out);
            stable(scale, &mut out);
            sandwich(session, scale, &mut out);
            main_construction(session, scale, &mut out);
            sc1(session, scale, &mut out);
            copwin(session, corpus, &mut out);
            collect(&mut out, "canonical-play", json!({ "inner_vertices": 4, "cops": 2 }), || {
                check_canonical_play(session, &cycle(4), 2)
            });
            out.push(check_recorded_bounds(session));
        }
    }
    out
}
