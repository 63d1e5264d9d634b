use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{
    CaptureTimePrediction, Construction, ConstructionError, ConstructionKind, ConstructionRecipe,
    Prediction, Role, RoleMap,
};
use crate::game::Turn;
use crate::graph::{validate_for_play, Protection::*, PursuitGraph, Vertex};

/// Vertex numbering: `S`, `T_0..T_2`, `C_0..C_2`, `R_0..R_2`, `C*`, `R*`.
struct Layout {
    k: usize,
    n: usize,
}

impl Layout {
    fn core(&self, idx: usize) -> Vertex {
        idx % (4 * self.k)
    }
    fn wing(&self, layer: usize, j: usize) -> Vertex {
        4 * self.k + (layer % 3) * self.k + j % self.k
    }
    fn cop(&self, v: usize, layer: usize, j: usize) -> Vertex {
        7 * self.k + (layer % 3) * self.k * self.n + v * self.k + j
    }
    fn robber(&self, v: usize, layer: usize) -> Vertex {
        7 * self.k + 3 * self.k * self.n + (layer % 3) * self.n + v
    }
    fn cop_starter(&self, j: usize) -> Vertex {
        7 * self.k + 3 * self.k * self.n + 3 * self.n + j
    }
    fn robber_starter(&self, i: usize) -> Vertex {
        8 * self.k + 3 * self.k * self.n + 3 * self.n + i % 3
    }
    fn vertex_count(&self) -> usize {
        (3 * self.k + 3) * self.n + 8 * self.k + 3
    }
    fn reset_clique(&self) -> std::ops::Range<Vertex> {
        0..7 * self.k
    }
    /// Core plus the `layer`-th wing.
    fn core_and_wing(&self, layer: usize) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = (0..4 * self.k).collect();
        out.extend((0..self.k).map(|j| self.wing(layer, j)));
        out
    }
    fn cop_vertices(&self) -> std::ops::Range<Vertex> {
        self.cop(0, 0, 0)..self.robber(0, 0)
    }
    fn robber_vertices(&self) -> std::ops::Range<Vertex> {
        self.robber(0, 0)..self.cop_starter(0)
    }
    fn roles(&self) -> Vec<Role> {
        let (k, n) = (self.k, self.n);
        let mut roles = Vec::with_capacity(self.vertex_count());
        roles.extend((0..4 * k).map(Role::Core));
        for layer in 0..3 {
            roles.extend((0..k).map(|j| Role::Wing { layer, j }));
        }
        for layer in 0..3 {
            for v in 0..n {
                roles.extend((0..k).map(|j| Role::CopVertex { v, layer, j }));
            }
        }
        for layer in 0..3 {
            roles.extend((0..n).map(|v| Role::RobberVertex { v, layer }));
        }
        roles.extend((0..k).map(Role::CopStarter));
        roles.extend((0..3).map(Role::RobberStarter));
        roles
    }
}

/// Builds the undirected protected graph simulating the directed graph
/// `inner` for `k` cops.
///
/// Play is funnelled through layers `C_0 → C_1 → C_2 → C_0` for the cops
/// and `R_0 → R_1 → R_2` for the robber, so each round in the simulation
/// mirrors one move along an arc of `inner`. A protected reset clique lets
/// the robber restart the game whenever the cops leave a stable position.
pub fn build_undirected_simulation(
    inner: &PursuitGraph,
    k: usize,
) -> Result<Construction, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::InvalidParameters(format!(
            "the simulation needs k >= 2, got {k}"
        )));
    }
    if !inner.is_directed() {
        return Err(ConstructionError::InvalidParameters(
            "inner graph must be directed".into(),
        ));
    }
    let diagnostics = validate_for_play(inner);
    if !diagnostics.is_empty() {
        return Err(ConstructionError::UnplayableInner(diagnostics.to_string()));
    }
    let n = inner.vertex_count();
    let l = Layout { k, n };
    let mut h = PursuitGraph::undirected(l.vertex_count());

    for v in 0..l.vertex_count() {
        let p = if l.reset_clique().contains(&v) { Protected } else { Unprotected };
        h.add_edge(v, v, p)?;
    }
    // Reset clique.
    for a in l.reset_clique() {
        for b in a + 1..l.reset_clique().end {
            h.add_edge(a, b, Protected)?;
        }
    }
    for layer in 0..3 {
        for v in 0..n {
            // Copies of a vertex form a clique within a layer.
            for j in 0..k {
                for j2 in j + 1..k {
                    h.add_edge(l.cop(v, layer, j), l.cop(v, layer, j2), Unprotected)?;
                }
            }
            for c in l.core_and_wing(layer) {
                h.add_edge(l.robber(v, layer), c, Protected)?;
            }
            for j in 0..k {
                let cv = l.cop(v, layer, j);
                for d in 0..4 {
                    h.add_edge(cv, l.core(4 * j + layer + d), Unprotected)?;
                }
                h.add_edge(cv, l.wing(layer, j), Unprotected)?;
                for w in 0..n {
                    h.add_edge(cv, l.robber(w, layer), Unprotected)?;
                    h.add_edge(cv, l.robber(w, layer + 2), Unprotected)?;
                }
            }
        }
        // Forward moves mirror arcs of the inner graph.
        for arc in inner.arcs() {
            let (u, v) = (arc.tail, arc.head);
            for j in 0..k {
                h.add_edge(l.cop(u, layer, j), l.cop(v, layer + 1, j), Unprotected)?;
                if arc.protection == Unprotected {
                    h.add_edge(l.cop(u, layer, j), l.robber(v, layer + 1), Unprotected)?;
                }
            }
            h.add_edge(l.robber(u, layer), l.robber(v, layer + 1), Unprotected)?;
        }
    }
    for j in 0..k {
        let cs = l.cop_starter(j);
        for d in 3..7 {
            h.add_edge(cs, l.core(4 * j + d), Unprotected)?;
        }
        for layer in 0..3 {
            h.add_edge(cs, l.wing(layer, j), Unprotected)?;
        }
        for v in l.cop_vertices().chain(l.robber_vertices()) {
            h.add_edge(cs, v, Unprotected)?;
        }
    }
    for i in 0..3 {
        let rs = l.robber_starter(i);
        for v in l.cop_vertices() {
            h.add_edge(rs, v, Unprotected)?;
        }
        for w in 0..n {
            h.add_edge(rs, l.robber(w, i + 1), Unprotected)?;
        }
        for i2 in i + 1..3 {
            h.add_edge(rs, l.robber_starter(i2), Protected)?;
        }
        for c in l.core_and_wing(i) {
            h.add_edge(rs, c, Protected)?;
        }
    }

    let roles = RoleMap::new(l.roles());
    roles.annotate(&mut h);
    Ok(Construction {
        recipe: ConstructionRecipe {
            kind: ConstructionKind::UndirectedSimulation,
            k,
            primes: Vec::new(),
        },
        graph: h,
        roles,
        prediction: Prediction {
            predicted_cop_number: k,
            vertex_count_formula: (3 * k + 3) * n + 8 * k + 3,
            capture_time: CaptureTimePrediction::InnerPlus {
                min_extra: 1,
                max_extra: 2,
            },
            notes: "capture time of the inner directed graph plus one or two rounds".into(),
        },
    })
}

/// Per-layer `j`-vertex lists plus starters, checked against `k`.
struct Parts {
    // by_layer[i][j] = every κ(v; i, j).
    by_layer: Vec<Vec<Vec<Vertex>>>,
    starters: Vec<Vertex>,
}

fn parts(roles: &RoleMap, k: usize) -> Result<Parts, ConstructionError> {
    let mut by_layer = vec![vec![Vec::new(); k]; 3];
    let mut starters = vec![None; k];
    for (v, role) in roles.iter() {
        match role {
            Role::CopVertex { layer, j, .. } => {
                if layer >= 3 || j >= k {
                    return Err(ConstructionError::RoleMap(format!(
                        "{role} does not fit k = {k}"
                    )));
                }
                by_layer[layer][j].push(v);
            }
            Role::CopStarter(j) => {
                if j >= k || starters[j].is_some() {
                    return Err(ConstructionError::RoleMap(format!(
                        "unexpected cop starter {j} for k = {k}"
                    )));
                }
                starters[j] = Some(v);
            }
            _ => {}
        }
    }
    let starters: Option<Vec<Vertex>> = starters.into_iter().collect();
    let starters = starters.ok_or_else(|| {
        ConstructionError::RoleMap(format!("expected {k} cop starters"))
    })?;
    if by_layer.iter().flatten().any(|l| l.is_empty()) {
        return Err(ConstructionError::RoleMap("missing j-vertices".into()));
    }
    Ok(Parts { by_layer, starters })
}

/// Cop placements that defend the whole core: all starters, or one cop on
/// a `j`-vertex for every `j` with every cop in the same layer.
pub fn stable_positions(
    roles: &RoleMap,
    k: usize,
) -> Result<BTreeSet<Vec<Vertex>>, ConstructionError> {
    let parts = parts(roles, k)?;
    let mut out = BTreeSet::new();
    let mut starters = parts.starters.clone();
    starters.sort_unstable();
    out.insert(starters);
    for layer in &parts.by_layer {
        let mut partial: Vec<Vec<Vertex>> = vec![Vec::new()];
        for choices in layer {
            partial = partial
                .into_iter()
                .flat_map(|m| {
                    choices.iter().map(move |&v| {
                        let mut m = m.clone();
                        m.push(v);
                        m
                    })
                })
                .collect();
        }
        for mut m in partial {
            m.sort_unstable();
            out.insert(m);
        }
    }
    Ok(out)
}

/// Vertices with an unprotected edge from some cop.
pub fn defended_by(graph: &PursuitGraph, cops: &[Vertex]) -> BTreeSet<Vertex> {
    cops.iter()
        .flat_map(|&c| graph.out_arcs(c))
        .filter(|a| a.protection == Unprotected)
        .map(|a| a.head)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConfigurationClass {
    /// Cops on every starter, robber on a robber starter, cops to move.
    Initial { robber_starter: usize },
    /// Cops stable in `C_layer`, robber one layer ahead (cop turn) or in
    /// the same layer (robber turn).
    Canonical { layer: usize },
    Other,
}

/// Classifies a configuration of the simulation graph.
pub fn classify_configuration(
    roles: &RoleMap,
    k: usize,
    cops: &[Vertex],
    robber: Vertex,
    turn: Turn,
) -> ConfigurationClass {
    let Ok(parts) = parts(roles, k) else {
        return ConfigurationClass::Other;
    };
    let mut sorted = cops.to_vec();
    sorted.sort_unstable();
    let mut starters = parts.starters.clone();
    starters.sort_unstable();
    if sorted == starters && turn == Turn::CopTurn {
        if let Role::RobberStarter(i) = roles.role(robber) {
            return ConfigurationClass::Initial { robber_starter: i };
        }
        return ConfigurationClass::Other;
    }
    let mut layer_of = None;
    let mut js = Vec::with_capacity(cops.len());
    for &c in cops {
        match roles.role(c) {
            Role::CopVertex { layer, j, .. } => {
                if layer_of.is_some_and(|l| l != layer) {
                    return ConfigurationClass::Other;
                }
                layer_of = Some(layer);
                js.push(j);
            }
            _ => return ConfigurationClass::Other,
        }
    }
    js.sort_unstable();
    if js != (0..k).collect::<Vec<_>>() {
        return ConfigurationClass::Other;
    }
    let layer = layer_of.expect("k >= 1");
    let expected = match turn {
        Turn::CopTurn => (layer + 1) % 3,
        Turn::RobberTurn => layer,
    };
    match roles.role(robber) {
        Role::RobberVertex { layer: rl, .. } if rl == expected => {
            ConfigurationClass::Canonical { layer }
        }
        _ => ConfigurationClass::Other,
    }
}
