//! Checks that compare solver output against the predicted behaviour of
//! the constructions, each producing a JSON-serialisable [`Report`].
//!
//! Every solve goes through a [`Session`], which also keeps a running tally
//! of the `n · C(n+k-1, k)` capture-time bound over all instances it saw.

mod checks;
mod copwin;
mod suite;

use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::constructions::ConstructionError;
use crate::game::{GameError, GameSpec};
use crate::graph::PursuitGraph;
use crate::solver::{self, capture_time_bound, CopNumber, SolveError, SolveOptions, SolveResult};

pub use checks::{
    check_canonical_play, check_main_construction, check_sandwich, check_stable_lemma,
    check_strongly_connected_graph, check_strongly_connected_k1, sc1_without_cross_arcs,
};
pub use copwin::{check_cop_win_bound, connected_graphs};
pub use suite::{run_suite, Scale, SuiteCheck};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("corpus graph {index} has {found} vertices, expected {expected}")]
    CorpusMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("{0}")]
    InvalidParameters(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub observed: Value,
    pub expected: Value,
    pub verdict: Verdict,
    pub seconds: f64,
}

impl Report {
    /// Informational reports never count as failures.
    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    /// A failing report describing an error raised while running `check`.
    pub fn from_error(check: &str, params: Value, error: &VerifyError, started: Instant) -> Report {
        Report {
            check: check.into(),
            params,
            observed: json!({ "error": error.to_string() }),
            expected: Value::Null,
            verdict: Verdict::Fail,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Upper-bound bookkeeping across many solves.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTally {
    pub instances: u64,
    pub cop_wins: u64,
    /// Largest capture time seen, with its `(n, k)`.
    pub max_capture_time: Option<(u32, usize, usize)>,
    pub violations: Vec<BoundViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub vertices: usize,
    pub cops: usize,
    pub capture_time: Option<u32>,
    pub layer_count: u32,
    pub state_count: u64,
}

impl BoundTally {
    pub fn record(&mut self, n: usize, k: usize, result: &SolveResult) {
        self.instances += 1;
        if let Some(t) = result.capture_time() {
            self.cop_wins += 1;
            if self.max_capture_time.is_none_or(|(m, _, _)| t > m) {
                self.max_capture_time = Some((t, n, k));
            }
        }
        if !within_bound(result, n, k) {
            self.violations.push(BoundViolation {
                vertices: n,
                cops: k,
                capture_time: result.capture_time(),
                layer_count: result.layer_count,
                state_count: result.state_count,
            });
        }
    }

    pub fn merge(&mut self, other: BoundTally) {
        self.instances += other.instances;
        self.cop_wins += other.cop_wins;
        if let Some((t, n, k)) = other.max_capture_time {
            if self.max_capture_time.is_none_or(|(m, _, _)| t > m) {
                self.max_capture_time = Some((t, n, k));
            }
        }
        self.violations.extend(other.violations);
    }
}

fn within_bound(result: &SolveResult, n: usize, k: usize) -> bool {
    let capture_ok = result
        .capture_time()
        .is_none_or(|t| t as u128 <= capture_time_bound(n, k));
    capture_ok && result.layer_count as u64 <= result.state_count
}

/// Solver options plus the bound tally of everything solved so far.
#[derive(Debug)]
pub struct Session {
    options: SolveOptions,
    tally: Mutex<BoundTally>,
}

impl Session {
    pub fn new(options: SolveOptions) -> Self {
        Session {
            options,
            tally: Mutex::new(BoundTally::default()),
        }
    }

    pub fn options(&self) -> &SolveOptions {
        &self.options
    }

    pub fn record(&self, n: usize, k: usize, result: &SolveResult) {
        self.tally.lock().expect("tally lock").record(n, k, result);
    }

    pub fn merge(&self, tally: BoundTally) {
        self.tally.lock().expect("tally lock").merge(tally);
    }

    pub fn tally(&self) -> BoundTally {
        self.tally.lock().expect("tally lock").clone()
    }

    pub fn solve(&self, spec: &GameSpec) -> Result<SolveResult, SolveError> {
        let result = solver::solve(spec, &self.options)?;
        self.record(spec.vertex_count(), spec.cop_count(), &result);
        Ok(result)
    }

    pub fn cop_number(
        &self,
        graph: &PursuitGraph,
        k_max: usize,
    ) -> Result<(CopNumber, Vec<SolveResult>), SolveError> {
        let (c, results) = solver::cop_number_with_results(graph, k_max, &self.options)?;
        for (i, r) in results.iter().enumerate() {
            self.record(graph.vertex_count(), i + 1, r);
        }
        Ok((c, results))
    }
}

/// Checks one result against the configuration-count bound.
///
/// Passes iff a cop win is captured within `n · C(n+k-1, k)` rounds and the
/// number of layers does not exceed the number of states. Robber wins pass
/// vacuously on the first condition.
pub fn check_upper_bound(result: &SolveResult, n: usize, k: usize) -> Report {
    let started = Instant::now();
    let bound = capture_time_bound(n, k);
    Report {
        check: "upper-bound".into(),
        params: json!({ "vertices": n, "cops": k }),
        observed: json!({
            "outcome": result.outcome,
            "layer_count": result.layer_count,
            "state_count": result.state_count,
        }),
        expected: json!({ "capture_time_at_most": bound.to_string() }),
        verdict: verdict(within_bound(result, n, k)),
        seconds: started.elapsed().as_secs_f64(),
    }
}

/// Aggregate bound check over every instance a session has solved.
pub fn check_recorded_bounds(session: &Session) -> Report {
    let started = Instant::now();
    let tally = session.tally();
    let pass = tally.violations.is_empty() && tally.instances > 0;
    Report {
        check: "upper-bound-all".into(),
        params: json!({}),
        observed: serde_json::to_value(&tally).expect("tally serialises"),
        expected: json!({ "violations": 0 }),
        verdict: verdict(pass),
        seconds: started.elapsed().as_secs_f64(),
    }
}
