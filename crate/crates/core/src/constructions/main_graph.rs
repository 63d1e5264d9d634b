use super::{
    check_primes, CaptureTimePrediction, Construction, ConstructionError, ConstructionKind,
    ConstructionRecipe, Prediction, Role, RoleMap,
};
use crate::graph::{Protection::*, PursuitGraph, Vertex};

/// Vertex numbering of the long-game directed graph.
///
/// Order: reset clique, cop tracks, robber track `r_0..r_{p-2}`, the `k`
/// track ends `r^i_{p-1}`, escapes, then `ω`.
#[derive(Clone, Debug)]
pub(super) struct MainLayout {
    pub k: usize,
    pub p: usize,
    pub q: Vec<usize>,
    track_start: Vec<usize>,
    robber_start: usize,
    end_start: usize,
    escape_start: usize,
    pub omega: Vertex,
}

impl MainLayout {
    pub fn new(k: usize, p: usize, q: &[usize]) -> Self {
        let mut next = k;
        let mut track_start = Vec::with_capacity(k);
        for &len in q {
            track_start.push(next);
            next += len;
        }
        let robber_start = next;
        let end_start = robber_start + p - 1;
        let escape_start = end_start + k;
        let omega = escape_start + k;
        MainLayout {
            k,
            p,
            q: q.to_vec(),
            track_start,
            robber_start,
            end_start,
            escape_start,
            omega,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.omega + 1
    }

    pub fn clique(&self, i: usize) -> Vertex {
        i
    }

    pub fn track(&self, i: usize, j: usize) -> Vertex {
        self.track_start[i] + j % self.q[i]
    }

    /// `r_j` for `j <= p-2`.
    pub fn robber(&self, j: usize) -> Vertex {
        debug_assert!(j + 1 < self.p);
        self.robber_start + j
    }

    /// `r^i_{p-1}`.
    pub fn track_end(&self, i: usize) -> Vertex {
        self.end_start + i
    }

    pub fn escape(&self, i: usize) -> Vertex {
        self.escape_start + i
    }

    /// Every vertex of the robber track, track ends included.
    pub fn robber_track(&self) -> impl Iterator<Item = Vertex> {
        self.robber_start..self.escape_start
    }

    pub fn roles(&self) -> Vec<Role> {
        let mut roles = Vec::with_capacity(self.vertex_count());
        roles.extend((0..self.k).map(Role::ResetClique));
        for (i, &len) in self.q.iter().enumerate() {
            roles.extend((0..len).map(|j| Role::CopTrack { track: i, pos: j }));
        }
        roles.extend((0..self.p - 1).map(Role::RobberTrack));
        roles.extend((0..self.k).map(Role::RobberTrackEnd));
        roles.extend((0..self.k).map(Role::Escape));
        roles.push(Role::Omega);
        roles
    }

    /// Adds every arc of the long-game graph, loops included.
    pub fn add_arcs(&self, g: &mut PursuitGraph) -> Result<(), ConstructionError> {
        let k = self.k;
        let p = self.p;
        for s in 0..k {
            g.add_arc(self.clique(s), self.clique(s), Protected)?;
            for t in 0..k {
                if s != t {
                    g.add_arc(self.clique(s), self.clique(t), Protected)?;
                }
            }
        }
        g.add_arc(self.omega, self.omega, Unprotected)?;

        for i in 0..k {
            g.add_arc(self.track(i, 0), self.clique(i), Unprotected)?;
            for j in 0..self.q[i] {
                g.add_arc(self.track(i, j), self.track(i, j + 1), Unprotected)?;
                g.add_arc(self.track(i, j), self.escape(i), Unprotected)?;
            }
            g.add_arc(self.track(i, self.q[i] - 1), self.track_end(i), Unprotected)?;
        }

        for j in 0..p.saturating_sub(2) {
            g.add_arc(self.robber(j), self.robber(j + 1), Unprotected)?;
        }
        for i in 0..k {
            g.add_arc(self.robber(p - 2), self.track_end(i), Unprotected)?;
            g.add_arc(self.track_end(i), self.robber(0), Unprotected)?;
        }
        for r in self.robber_track() {
            for x in 0..k {
                g.add_arc(r, self.escape(x), Unprotected)?;
            }
        }
        for x in 0..k {
            for s in 0..k {
                g.add_arc(self.escape(x), self.clique(s), Unprotected)?;
            }
        }
        for s in 0..k {
            g.add_arc(self.clique(s), self.robber(0), Unprotected)?;
        }
        for v in k..self.vertex_count() {
            g.add_arc(self.omega, v, Unprotected)?;
        }
        Ok(())
    }
}

/// Builds the directed long-game graph with `k` cop tracks of lengths
/// `q[i]` and a robber track of length `p`.
///
/// Surviving cops must walk their tracks in lock step while the robber
/// laps its own, so capture waits for a round `T` with `T ≡ −1` modulo every
/// track length, giving at least `p·∏q_i − 1` rounds.
pub fn build_main(k: usize, p: u64, q: &[u64]) -> Result<Construction, ConstructionError> {
    if k == 0 {
        return Err(ConstructionError::InvalidParameters("k must be positive".into()));
    }
    if q.len() != k {
        return Err(ConstructionError::InvalidParameters(format!(
            "expected {k} track primes, got {}",
            q.len()
        )));
    }
    check_primes(p, q)?;
    let qs: Vec<usize> = q.iter().map(|&x| x as usize).collect();
    let layout = MainLayout::new(k, p as usize, &qs);
    let mut graph = PursuitGraph::directed(layout.vertex_count());
    layout.add_arcs(&mut graph)?;
    let roles = RoleMap::new(layout.roles());
    roles.annotate(&mut graph);

    let vertex_count_formula = k + qs.iter().sum::<usize>() + (p as usize - 1 + k) + k + 1;
    let lower = p * q.iter().product::<u64>() - 1;
    let mut primes = vec![p];
    primes.extend_from_slice(q);
    Ok(Construction {
        recipe: ConstructionRecipe {
            kind: ConstructionKind::MainDirected,
            k,
            primes,
        },
        graph,
        roles,
        prediction: Prediction {
            predicted_cop_number: k,
            vertex_count_formula,
            capture_time: CaptureTimePrediction::AtLeast { rounds: lower },
            notes: format!("capture waits for T ≡ −1 mod p and every q_i; T ≥ {lower}"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_for_play;

    #[test]
    fn sizes_and_bounds() {
        let c = build_main(2, 3, &[5, 7]).unwrap();
        assert_eq!(c.graph.vertex_count(), 21);
        assert_eq!(c.prediction.vertex_count_formula, 21);
        assert_eq!(
            c.prediction.capture_time,
            CaptureTimePrediction::AtLeast { rounds: 104 }
        );

        let c = build_main(1, 3, &[5]).unwrap();
        // 1 clique + 5 track + (2 + 1) robber + 1 escape + ω
        assert_eq!(c.graph.vertex_count(), 11);
        assert_eq!(c.prediction.vertex_count_formula, 11);
        assert_eq!(
            c.prediction.capture_time,
            CaptureTimePrediction::AtLeast { rounds: 14 }
        );
        let counts = c.roles.kind_counts();
        assert_eq!(counts["reset"], 1);
        assert_eq!(counts["cop_track"], 5);
        assert_eq!(counts["robber_track"], 2);
        assert_eq!(counts["robber_track_end"], 1);
        assert_eq!(counts["escape"], 1);
        assert_eq!(counts["omega"], 1);
    }

    #[test]
    fn playable_and_loops_only_on_clique_and_omega() {
        for (k, p, q) in [(1, 3, vec![5]), (2, 3, vec![5, 7]), (3, 5, vec![7, 11, 13])] {
            let c = build_main(k, p, &q).unwrap();
            assert!(validate_for_play(&c.graph).is_empty());
            for (v, role) in c.roles.iter() {
                let lp = c.graph.loop_at(v);
                match role {
                    Role::ResetClique(_) => assert_eq!(lp, Some(Protected)),
                    Role::Omega => assert_eq!(lp, Some(Unprotected)),
                    _ => assert_eq!(lp, None, "{role}"),
                }
            }
            // Only clique-internal arcs are protected.
            for arc in c.graph.arcs() {
                let clique = matches!(c.roles.role(arc.tail), Role::ResetClique(_))
                    && matches!(c.roles.role(arc.head), Role::ResetClique(_));
                assert_eq!(arc.protection == Protected, clique);
            }
        }
    }

    #[test]
    fn track_wraps_and_capture_arcs() {
        let c = build_main(2, 3, &[5, 7]).unwrap();
        let v = |r: Role| c.roles.vertex_of(r).unwrap();
        assert!(c.graph.has_arc(
            v(Role::CopTrack { track: 1, pos: 6 }),
            v(Role::CopTrack { track: 1, pos: 0 })
        ));
        assert!(c.graph.has_arc(v(Role::CopTrack { track: 0, pos: 4 }), v(Role::RobberTrackEnd(0))));
        assert!(!c.graph.has_arc(v(Role::CopTrack { track: 0, pos: 4 }), v(Role::RobberTrackEnd(1))));
        assert!(!c.graph.has_arc(v(Role::Omega), v(Role::ResetClique(0))));
        assert!(c.graph.has_arc(v(Role::Omega), v(Role::Escape(1))));
    }

    #[test]
    fn rejects_bad_primes() {
        assert!(build_main(1, 3, &[3]).is_err());
        assert!(build_main(1, 4, &[5]).is_err());
        assert!(build_main(2, 3, &[5]).is_err());
        assert!(build_main(1, 2, &[5]).is_err());
    }
}
