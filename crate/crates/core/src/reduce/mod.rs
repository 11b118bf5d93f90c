//! The 0-1 layer: which cells to revise.
//!
//! - [`min_changes`]: fewest revised cells bringing the index to a threshold.
//! - [`enumerate_optimal`]: every revision set of that minimal size.
//! - [`min_index`]: lowest index reachable by revising at most `K` cells.
//! - [`bigm_oracle`]: the same answers from a Big-M branch and bound, for cross-checking.
//!
//! Revision sets are searched by size, each set in lexicographic order, and
//! each set is decided by a continuous subproblem from [`crate::convex`].

mod bigm;
mod search;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::convex::SolverOptions;
use crate::error::{Error, Result};
use crate::indices::{self, IndexKind, RandomIndexTable, SAATY_SCALE};
use crate::pcm::{
    differing_positions, upper_len, ComparisonMatrix, Position, ScaleBound, DEFAULT_DISTANCE_TOL,
};

pub use bigm::{bigm_oracle, OracleOptions};
pub use search::{binomial, combinations, enumerate_optimal, min_changes, min_index};

/// Default cap on the number of subproblems a single query may need.
pub const DEFAULT_WORK_BUDGET: u64 = 200_000;

/// Slack on index values when comparing a witness against the threshold.
pub const ACCEPTANCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    /// Fewest changes so that the index is at most `threshold`.
    MinChanges { threshold: f64 },
    /// Lowest index with at most `budget` changed cells.
    MinIndex { budget: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionQuery {
    pub matrix: ComparisonMatrix,
    pub kind: IndexKind,
    #[serde(flatten)]
    pub mode: Mode,
    #[serde(default)]
    pub bound: ScaleBound,
    #[serde(default)]
    pub ri: RandomIndexTable,
}

impl ReductionQuery {
    pub fn min_changes(matrix: ComparisonMatrix, kind: IndexKind, threshold: f64) -> Self {
        Self {
            matrix,
            kind,
            mode: Mode::MinChanges { threshold },
            bound: ScaleBound::default(),
            ri: RandomIndexTable::default(),
        }
    }

    pub fn min_index(matrix: ComparisonMatrix, kind: IndexKind, budget: usize) -> Self {
        Self {
            matrix,
            kind,
            mode: Mode::MinIndex { budget },
            bound: ScaleBound::default(),
            ri: RandomIndexTable::default(),
        }
    }

    pub fn with_bound(mut self, bound: ScaleBound) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_ri(mut self, ri: RandomIndexTable) -> Self {
        self.ri = ri;
        self
    }

    /// Checks the query and returns the threshold in functional units (MinChanges only).
    pub fn validate(&self) -> Result<Option<f64>> {
        let n = self.matrix.n();
        for p in crate::pcm::positions(n) {
            let v = self.matrix.at(p);
            if !self.bound.admits(v) {
                return Err(Error::InadmissibleQuery(format!(
                    "entry {p} = {v} lies outside [1/{m}, {m}]",
                    m = self.bound.value()
                )));
            }
        }
        if self.kind == IndexKind::Cr {
            self.ri.get(n)?;
        }
        match self.mode {
            Mode::MinChanges { threshold } => self.kind.threshold_transform(threshold, n, &self.ri).map(Some),
            Mode::MinIndex { budget } if budget > upper_len(n) => Err(Error::InadmissibleQuery(format!(
                "budget {budget} exceeds the {} upper-triangle cells",
                upper_len(n)
            ))),
            Mode::MinIndex { .. } => Ok(None),
        }
    }

    fn threshold(&self) -> Result<f64> {
        match self.mode {
            Mode::MinChanges { threshold } => Ok(threshold),
            Mode::MinIndex { .. } => Err(Error::InadmissibleQuery(
                "this operation needs a threshold, not a budget".into(),
            )),
        }
    }

    fn budget(&self) -> Result<usize> {
        match self.mode {
            Mode::MinIndex { budget } => Ok(budget),
            Mode::MinChanges { .. } => Err(Error::InadmissibleQuery(
                "this operation needs a budget, not a threshold".into(),
            )),
        }
    }
}

/// Resource limits for a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Cap on the number of subproblems the search may need; `None` disables it.
    pub max_subproblems: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_subproblems: Some(DEFAULT_WORK_BUDGET),
            deadline: None,
        }
    }
}

impl SearchLimits {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub solver: SolverOptions,
    pub limits: SearchLimits,
    /// Evaluate the sets of one size on the rayon pool.
    pub parallel: bool,
    /// Attach witnesses rounded to the 1/9..9 scale.
    pub round_to_scale: bool,
    /// Record elapsed time in the statistics.
    pub record_wall_time: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            limits: SearchLimits::default(),
            parallel: true,
            round_to_scale: false,
            record_wall_time: false,
        }
    }
}

/// A witness snapped to the nearest admissible scale values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedWitness {
    pub witness: ComparisonMatrix,
    pub index_value: f64,
    /// Whether the rounded matrix still meets the threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceptable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub positions: Vec<Position>,
    pub witness: ComparisonMatrix,
    pub index_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounded: Option<RoundedWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Outcome {
    MinChanges {
        threshold: f64,
        /// Smallest number of cells whose revision reaches the threshold.
        l_star: usize,
        /// Lexicographically sorted, one witness per set.
        solutions: Vec<Solution>,
    },
    MinIndex {
        budget: usize,
        alpha_opt: f64,
        /// `positions` lists the cells the witness actually changes.
        best: Solution,
        /// The freed set the witness came from.
        freed: Vec<Position>,
        /// Other freed sets of the same size reaching `alpha_opt`.
        ties: Vec<Vec<Position>>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub subproblems: u64,
    /// Subproblems that stopped on the iteration cap (treated as infeasible).
    pub iteration_limits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub kind: IndexKind,
    /// Index value of the input matrix.
    pub initial_value: f64,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub stats: Stats,
}

impl ReductionResult {
    pub fn l_star(&self) -> Option<usize> {
        match self.outcome {
            Outcome::MinChanges { l_star, .. } => Some(l_star),
            Outcome::MinIndex { .. } => None,
        }
    }

    pub fn alpha_opt(&self) -> Option<f64> {
        match self.outcome {
            Outcome::MinIndex { alpha_opt, .. } => Some(alpha_opt),
            Outcome::MinChanges { .. } => None,
        }
    }

    /// Reported position sets, in order.
    pub fn position_sets(&self) -> Vec<Vec<Position>> {
        match &self.outcome {
            Outcome::MinChanges { solutions, .. } => solutions.iter().map(|s| s.positions.clone()).collect(),
            Outcome::MinIndex { best, .. } => vec![best.positions.clone()],
        }
    }
}

/// Runs the mode of `q`: enumerate all optima or stop at the first for MinChanges.
pub fn run(q: &ReductionQuery, enumerate_all: bool, opts: &SearchOptions) -> Result<ReductionResult> {
    match q.mode {
        Mode::MinChanges { .. } if enumerate_all => enumerate_optimal(q, opts),
        Mode::MinChanges { .. } => min_changes(q, opts),
        Mode::MinIndex { .. } => min_index(q, opts),
    }
}

/// Nearest admissible scale value to `v` in log distance.
fn nearest_scale_value(v: f64, bound: ScaleBound) -> f64 {
    SAATY_SCALE
        .iter()
        .copied()
        .filter(|&s| bound.admits(s))
        .min_by(|a, b| (a.ln() - v.ln()).abs().total_cmp(&(b.ln() - v.ln()).abs()))
        .unwrap_or(1.0)
}

fn round_witness(
    q: &ReductionQuery,
    witness: &ComparisonMatrix,
    positions: &[Position],
    threshold: Option<f64>,
) -> Result<RoundedWitness> {
    let mut rounded = witness.clone();
    for &p in positions {
        rounded = rounded.with_entry(p, nearest_scale_value(witness.at(p), q.bound))?;
    }
    let index_value = indices::index_value(q.kind, &rounded, &q.ri)?;
    Ok(RoundedWitness {
        witness: rounded,
        index_value,
        acceptable: threshold.map(|t| index_value <= t + ACCEPTANCE_TOL),
    })
}

fn make_solution(
    q: &ReductionQuery,
    positions: Vec<Position>,
    witness: ComparisonMatrix,
    threshold: Option<f64>,
    round: bool,
) -> Result<Solution> {
    let index_value = indices::index_value(q.kind, &witness, &q.ri)?;
    let rounded = if round {
        Some(round_witness(q, &witness, &positions, threshold)?)
    } else {
        None
    };
    Ok(Solution {
        positions,
        witness,
        index_value,
        rounded,
    })
}

fn changed_cells(a: &ComparisonMatrix, b: &ComparisonMatrix) -> Result<Vec<Position>> {
    differing_positions(a, b, DEFAULT_DISTANCE_TOL)
}
