use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::graph::{PursuitGraph, Vertex};

/// What a vertex of a generated graph stands for.
///
/// Labels render as compact tokens (`core[3]`, `cop[v=2,i=1,j=0]`) so they
/// fit on a `.pg` role line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    // Undirected simulation graph.
    Core(usize),
    Wing { layer: usize, j: usize },
    CopVertex { v: usize, layer: usize, j: usize },
    RobberVertex { v: usize, layer: usize },
    CopStarter(usize),
    RobberStarter(usize),
    // Directed long-game graphs.
    ResetClique(usize),
    CopTrack { track: usize, pos: usize },
    RobberTrack(usize),
    RobberTrackEnd(usize),
    Escape(usize),
    Omega,
    Psi,
    CopTrackTwin(usize),
    RobberTrackTwin(usize),
}

impl Role {
    /// Label kind, used for per-kind counts.
    pub fn kind(&self) -> &'static str {
        match self {
            Role::Core(_) => "core",
            Role::Wing { .. } => "wing",
            Role::CopVertex { .. } => "cop",
            Role::RobberVertex { .. } => "robber",
            Role::CopStarter(_) => "cop_starter",
            Role::RobberStarter(_) => "robber_starter",
            Role::ResetClique(_) => "reset",
            Role::CopTrack { .. } => "cop_track",
            Role::RobberTrack(_) => "robber_track",
            Role::RobberTrackEnd(_) => "robber_track_end",
            Role::Escape(_) => "escape",
            Role::Omega => "omega",
            Role::Psi => "psi",
            Role::CopTrackTwin(_) => "cop_track_twin",
            Role::RobberTrackTwin(_) => "robber_track_twin",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.kind();
        match *self {
            Role::Core(a)
            | Role::CopStarter(a)
            | Role::RobberStarter(a)
            | Role::ResetClique(a)
            | Role::RobberTrack(a)
            | Role::RobberTrackEnd(a)
            | Role::Escape(a)
            | Role::CopTrackTwin(a)
            | Role::RobberTrackTwin(a) => write!(f, "{kind}[{a}]"),
            Role::Wing { layer, j } => write!(f, "{kind}[i={layer},j={j}]"),
            Role::CopVertex { v, layer, j } => write!(f, "{kind}[v={v},i={layer},j={j}]"),
            Role::RobberVertex { v, layer } => write!(f, "{kind}[v={v},i={layer}]"),
            Role::CopTrack { track, pos } => write!(f, "{kind}[i={track},j={pos}]"),
            Role::Omega | Role::Psi => f.write_str(kind),
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("unrecognised role label `{s}`");
        let (kind, args) = match s.find('[') {
            Some(pos) if s.ends_with(']') => (&s[..pos], &s[pos + 1..s.len() - 1]),
            Some(_) => return Err(bad()),
            None => (s, ""),
        };
        let plain = || args.parse::<usize>().map_err(|_| bad());
        let named = |names: &[&str]| -> Result<Vec<usize>, String> {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != names.len() {
                return Err(bad());
            }
            parts
                .iter()
                .zip(names)
                .map(|(part, name)| {
                    let (key, value) = part.split_once('=').ok_or_else(bad)?;
                    if key != *name {
                        return Err(bad());
                    }
                    value.parse().map_err(|_| bad())
                })
                .collect()
        };
        Ok(match kind {
            "core" => Role::Core(plain()?),
            "cop_starter" => Role::CopStarter(plain()?),
            "robber_starter" => Role::RobberStarter(plain()?),
            "reset" => Role::ResetClique(plain()?),
            "robber_track" => Role::RobberTrack(plain()?),
            "robber_track_end" => Role::RobberTrackEnd(plain()?),
            "escape" => Role::Escape(plain()?),
            "cop_track_twin" => Role::CopTrackTwin(plain()?),
            "robber_track_twin" => Role::RobberTrackTwin(plain()?),
            "wing" => {
                let a = named(&["i", "j"])?;
                Role::Wing { layer: a[0], j: a[1] }
            }
            "cop" => {
                let a = named(&["v", "i", "j"])?;
                Role::CopVertex {
                    v: a[0],
                    layer: a[1],
                    j: a[2],
                }
            }
            "robber" => {
                let a = named(&["v", "i"])?;
                Role::RobberVertex { v: a[0], layer: a[1] }
            }
            "cop_track" => {
                let a = named(&["i", "j"])?;
                Role::CopTrack {
                    track: a[0],
                    pos: a[1],
                }
            }
            "omega" if args.is_empty() => Role::Omega,
            "psi" if args.is_empty() => Role::Psi,
            _ => return Err(bad()),
        })
    }
}

/// Total map from vertices to roles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleMap {
    roles: Vec<Role>,
}

impl RoleMap {
    pub fn new(roles: Vec<Role>) -> Self {
        RoleMap { roles }
    }

    /// Reads the role labels stored on a graph; every vertex must have one.
    pub fn from_graph(graph: &PursuitGraph) -> Result<Self, ConstructionError> {
        let mut roles = Vec::with_capacity(graph.vertex_count());
        for v in 0..graph.vertex_count() {
            let label = graph
                .role(v)
                .ok_or_else(|| ConstructionError::RoleMap(format!("vertex {v} has no role")))?;
            roles.push(label.parse().map_err(ConstructionError::RoleMap)?);
        }
        Ok(RoleMap { roles })
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn role(&self, v: Vertex) -> Role {
        self.roles[v]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Role)> + '_ {
        self.roles.iter().copied().enumerate()
    }

    pub fn vertex_of(&self, role: Role) -> Option<Vertex> {
        self.roles.iter().position(|&r| r == role)
    }

    pub fn vertices_where(&self, pred: impl Fn(Role) -> bool) -> Vec<Vertex> {
        self.iter().filter(|&(_, r)| pred(r)).map(|(v, _)| v).collect()
    }

    /// Number of vertices per role kind.
    pub fn kind_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.roles {
            *counts.entry(r.kind()).or_insert(0) += 1;
        }
        counts
    }

    /// Writes the labels onto `graph` as role metadata.
    pub fn annotate(&self, graph: &mut PursuitGraph) {
        for (v, r) in self.iter() {
            graph.set_role(v, r.to_string()).expect("role map matches graph");
        }
    }
}
