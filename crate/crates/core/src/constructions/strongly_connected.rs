use super::main_graph::MainLayout;
use super::{
    check_primes, CaptureTimePrediction, Construction, ConstructionError, ConstructionKind,
    ConstructionRecipe, Prediction, Role, RoleMap,
};
use crate::graph::{Protection::*, PursuitGraph, Vertex};

/// One-cop, strongly connected, reflexive variant of the long-game graph.
///
/// Starting from the `k = 1` graph: every vertex gets a protected loop
/// (replacing the unprotected loop at `ω`), a vertex `ψ` gives the cop a
/// two-step way back to `ω`, the escape vertex gains an arc to `ω`, and
/// both tracks are doubled with twin vertices. Cross arcs `c_i → r_j` and
/// `c'_i → r'_j` make the robber alternate between the two parities
/// instead of resting on a loop.
pub fn build_strongly_connected_k1(p: u64, q: u64) -> Result<Construction, ConstructionError> {
    check_primes(p, &[q])?;
    let (p, q) = (p as usize, q as usize);
    let base = MainLayout::new(1, p, &[q]);
    let s = base.clique(0);
    let x = base.escape(0);
    let omega = base.omega;
    let c = |i: usize| base.track(0, i);
    // Robber level j in 0..p, with r_{p-1} the single track end.
    let r = |j: usize| if j + 1 < p { base.robber(j) } else { base.track_end(0) };
    let twin_start = base.vertex_count();
    let c_twin = |i: usize| twin_start + i % q;
    let r_twin = |j: usize| twin_start + q + j % p;
    let psi = twin_start + q + p;
    let n = psi + 1;

    let mut g = PursuitGraph::directed(n);
    base.add_arcs(&mut g)?;

    g.remove_arc(omega, omega);
    for v in 0..n {
        if g.loop_at(v).is_none() {
            g.add_arc(v, v, Protected)?;
        }
    }

    let cop_level = |i: usize| [c(i % q), c_twin(i)];
    let robber_level = |j: usize| [r(j % p), r_twin(j)];

    for i in 0..q {
        for a in cop_level(i) {
            for b in cop_level(i + 1) {
                g.add_arc(a, b, Unprotected)?;
            }
            g.add_arc(a, x, Unprotected)?;
            g.add_arc(a, psi, Unprotected)?;
        }
    }
    for j in 0..p {
        for a in robber_level(j) {
            for b in robber_level(j + 1) {
                g.add_arc(a, b, Unprotected)?;
            }
            g.add_arc(a, x, Unprotected)?;
        }
    }
    // Twins copy the remaining arcs of their originals.
    g.add_arc(c_twin(0), s, Unprotected)?;
    g.add_arc(s, r_twin(0), Unprotected)?;
    for a in cop_level(q - 1) {
        for b in robber_level(p - 1) {
            g.add_arc(a, b, Unprotected)?;
        }
    }
    // Same-parity cross arcs.
    for i in 0..q {
        for j in 0..p {
            g.add_arc(c(i), r(j), Unprotected)?;
            g.add_arc(c_twin(i), r_twin(j), Unprotected)?;
        }
    }
    g.add_arc(psi, omega, Unprotected)?;
    g.add_arc(x, omega, Unprotected)?;
    for v in 0..n {
        if v != s && v != omega {
            g.add_arc(omega, v, Unprotected)?;
        }
    }

    let mut roles = base.roles();
    roles.extend((0..q).map(Role::CopTrackTwin));
    roles.extend((0..p).map(Role::RobberTrackTwin));
    roles.push(Role::Psi);
    let roles = RoleMap::new(roles);
    roles.annotate(&mut g);

    let lower = (p * q - 1) as u64;
    Ok(Construction {
        recipe: ConstructionRecipe {
            kind: ConstructionKind::StronglyConnectedK1,
            k: 1,
            primes: vec![p as u64, q as u64],
        },
        graph: g,
        roles,
        prediction: Prediction {
            predicted_cop_number: 1,
            vertex_count_formula: 2 * p + 2 * q + 4,
            capture_time: CaptureTimePrediction::AtLeast { rounds: lower },
            notes: "strongly connected and reflexive; one cop".into(),
        },
    })
}

/// Cross arcs `c_i → r_j` / `c'_i → r'_j` that are not also capture arcs
/// into level `p-1` from level `q-1`.
pub(crate) fn pure_cross_arcs(c: &Construction) -> Vec<(Vertex, Vertex)> {
    let roles = &c.roles;
    let (p, q) = (c.recipe.primes[0] as usize, c.recipe.primes[1] as usize);
    let level_of_cop = |role: Role| match role {
        Role::CopTrack { pos, .. } => Some((pos, false)),
        Role::CopTrackTwin(pos) => Some((pos, true)),
        _ => None,
    };
    let level_of_robber = |role: Role| match role {
        Role::RobberTrack(j) => Some((j, false)),
        Role::RobberTrackEnd(_) => Some((p - 1, false)),
        Role::RobberTrackTwin(j) => Some((j, true)),
        _ => None,
    };
    c.graph
        .arcs()
        .filter_map(|arc| {
            let (ci, ct) = level_of_cop(roles.role(arc.tail))?;
            let (rj, rt) = level_of_robber(roles.role(arc.head))?;
            let capture = ci == q - 1 && rj == p - 1;
            (ct == rt && !capture).then_some((arc.tail, arc.head))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_for_play;

    #[test]
    fn vertex_count_and_roles() {
        let c = build_strongly_connected_k1(3, 5).unwrap();
        assert_eq!(c.graph.vertex_count(), 20);
        assert_eq!(c.prediction.vertex_count_formula, 20);
        let counts = c.roles.kind_counts();
        assert_eq!(counts["cop_track"] + counts["cop_track_twin"], 10);
        assert_eq!(
            counts["robber_track"] + counts["robber_track_end"] + counts["robber_track_twin"],
            6
        );
        assert_eq!(counts["psi"], 1);
        assert!(validate_for_play(&c.graph).is_empty());
    }

    #[test]
    fn strongly_connected_and_reflexive() {
        for (p, q) in [(3, 5), (5, 7), (7, 3)] {
            let c = build_strongly_connected_k1(p, q).unwrap();
            assert!(c.graph.is_strongly_connected());
            for v in 0..c.graph.vertex_count() {
                assert_eq!(c.graph.loop_at(v), Some(Protected));
            }
        }
    }

    #[test]
    fn capture_arcs_audit() {
        let (p, q) = (3usize, 5usize);
        let c = build_strongly_connected_k1(p as u64, q as u64).unwrap();
        let v = |r: Role| c.roles.vertex_of(r).unwrap();
        let cops_last = [v(Role::CopTrack { track: 0, pos: q - 1 }), v(Role::CopTrackTwin(q - 1))];
        let robbers_last = [v(Role::RobberTrackEnd(0)), v(Role::RobberTrackTwin(p - 1))];
        for a in cops_last {
            for b in robbers_last {
                assert_eq!(c.graph.arc(a, b), Some(Unprotected));
            }
        }
        // Into level p-1 only the four capture arcs and same-parity cross arcs.
        for b in robbers_last {
            for arc in c.graph.arcs().filter(|a| a.head == b) {
                let tail = c.roles.role(arc.tail);
                let ok = match (tail, c.roles.role(b)) {
                    (Role::CopTrack { pos, .. }, Role::RobberTrackTwin(_))
                    | (Role::CopTrackTwin(pos), Role::RobberTrackEnd(_)) => pos == q - 1,
                    (Role::CopTrack { .. }, Role::RobberTrackEnd(_))
                    | (Role::CopTrackTwin(_), Role::RobberTrackTwin(_)) => true,
                    (Role::RobberTrack(_) | Role::RobberTrackTwin(_), _) => true,
                    (Role::Omega, _) => true,
                    (t, _) if arc.tail == b => t == c.roles.role(b),
                    _ => false,
                };
                assert!(ok, "unexpected arc {tail} -> {}", c.roles.role(b));
            }
        }
        assert_eq!(pure_cross_arcs(&c).len(), 2 * (p * q) - 2);
    }
}
