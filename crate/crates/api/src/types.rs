//! Wire payloads.

use pcm_core::indices::{IndexReport, TriadOffender};
use pcm_core::pcm::format::MatrixInput;
use pcm_core::reduce::ReductionResult;
use pcm_core::{ComparisonMatrix, IndexKind, Position, RandomIndexTable, ScaleBound};
use serde::{Deserialize, Serialize};

/// Number of triads listed in `worst_triads`.
pub const WORST_TRIADS: usize = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluateRequest {
    pub matrix: MatrixInput,
    #[serde(default)]
    pub ri: Option<RandomIndexTable>,
}

/// All three indices of one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub consistent: bool,
    pub cr: IndexReport,
    pub cm: IndexReport,
    pub ci: IndexReport,
    pub worst_triads: Vec<TriadOffender>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluateResponse {
    pub matrix: ComparisonMatrix,
    #[serde(flatten)]
    pub evaluation: Evaluation,
}

/// Exactly one of `threshold` and `budget` selects the mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReduceRequest {
    pub matrix: MatrixInput,
    pub kind: IndexKind,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub bound: ScaleBound,
    #[serde(default)]
    pub ri: Option<RandomIndexTable>,
    /// Report every optimal set rather than the first.
    #[serde(default)]
    pub enumerate_all: bool,
    #[serde(default)]
    pub round_to_scale: bool,
}

pub type ReduceResponse = ReductionResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edit {
    pub position: Position,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhatIfRequest {
    pub matrix: MatrixInput,
    #[serde(default)]
    pub edits: Vec<Edit>,
    /// Index used for suggestions.
    #[serde(default = "default_kind")]
    pub kind: IndexKind,
    /// Suggestion threshold. Defaults to the ten percent rule for CR; without
    /// it no suggestions are computed for CM and CI.
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub bound: ScaleBound,
    #[serde(default)]
    pub ri: Option<RandomIndexTable>,
    #[serde(default)]
    pub round_to_scale: bool,
}

fn default_kind() -> IndexKind {
    IndexKind::Cr
}

/// Edited minus original index values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Delta {
    pub cr: f64,
    pub cm: f64,
    pub ci: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhatIfResponse {
    pub matrix: ComparisonMatrix,
    #[serde(flatten)]
    pub evaluation: Evaluation,
    pub delta: Delta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suggestions: Option<ReductionResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Health {
    pub status: &'static str,
    pub version: &'static str,
    /// SHA-256 of the default random index table's JSON.
    pub ri_table_hash: String,
    pub work_budget: u64,
    pub timeout_secs: u64,
}
