//! Generators for the extremal graph families.
//!
//! * [`build_main`]: directed protected graphs whose capture time is forced
//!   past `p·q_0···q_{k-1} − 1` by cops and robber cycling on tracks of
//!   coprime length.
//! * [`build_undirected_simulation`]: turns a directed protected graph into
//!   an undirected protected graph with the same cop number and capture
//!   time one or two rounds longer.
//! * [`build_strongly_connected_k1`]: a strongly connected, reflexive
//!   one-cop variant of the main graph.

mod main_graph;
mod roles;
mod simulation;
pub(crate) mod strongly_connected;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, PursuitGraph};

pub use main_graph::build_main;
pub use roles::{Role, RoleMap};
pub use simulation::{
    build_undirected_simulation, classify_configuration, defended_by, stable_positions,
    ConfigurationClass,
};
pub use strongly_connected::build_strongly_connected_k1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("invalid primes: {0}")]
    InvalidPrimes(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("inner graph is not playable: {0}")]
    UnplayableInner(String),
    #[error("construction generated a conflicting arc: {0}")]
    Conflict(#[from] GraphError),
    #[error("role map inconsistent: {0}")]
    RoleMap(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructionKind {
    MainDirected,
    UndirectedSimulation,
    StronglyConnectedK1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionRecipe {
    pub kind: ConstructionKind,
    pub k: usize,
    /// `(p, q_0, .., q_{k-1})` for the directed families; empty otherwise.
    pub primes: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CaptureTimePrediction {
    AtLeast { rounds: u64 },
    /// `[capt(inner) + min_extra, capt(inner) + max_extra]`.
    InnerPlus { min_extra: u64, max_extra: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub predicted_cop_number: usize,
    pub vertex_count_formula: usize,
    pub capture_time: CaptureTimePrediction,
    pub notes: String,
}

/// A generated graph with its vertex roles and predicted parameters.
#[derive(Clone, Debug)]
pub struct Construction {
    pub recipe: ConstructionRecipe,
    pub graph: PursuitGraph,
    pub roles: RoleMap,
    pub prediction: Prediction,
}

/// `count` consecutive primes starting with the `r`-th smallest (1-based).
pub fn primes_from(r: usize, count: usize) -> Vec<u64> {
    assert!(r >= 1, "primes are indexed from 1");
    let needed = r + count - 1;
    let mut limit = 32usize;
    loop {
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
        if primes.len() >= needed {
            return primes[r - 1..needed].to_vec();
        }
        limit *= 2;
    }
}

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Checks `p` and the `q_i` are distinct primes of at least 3.
fn check_primes(p: u64, q: &[u64]) -> Result<(), ConstructionError> {
    let mut all = vec![p];
    all.extend_from_slice(q);
    for &x in &all {
        if !is_prime(x) || x < 3 {
            return Err(ConstructionError::InvalidPrimes(format!(
                "{x} is not a prime of at least 3"
            )));
        }
    }
    let mut sorted = all.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != all.len() {
        return Err(ConstructionError::InvalidPrimes(format!(
            "primes must be distinct, got {all:?}"
        )));
    }
    Ok(())
}
