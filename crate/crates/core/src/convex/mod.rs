//! Continuous subproblems: a fixed partition of the upper triangle into
//! pinned cells (kept at the data) and free cells (anywhere in the box
//! `[-ln M, ln M]`), with each index's functional minimised or tested
//! against a threshold in log space.
//!
//! | index | method                                                   |
//! |-------|----------------------------------------------------------|
//! | CR    | projected Newton on `lambda_max(exp X)`                  |
//! | CM    | linear program `min t` s.t. `-t <= s_ijk <= t`, simplex   |
//! | CI    | projected Newton on `sum_t (e^{s_t} + e^{-s_t})`         |

pub mod box_newton;
mod ci;
mod cm;
mod cr;
pub mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indices::IndexKind;
use crate::pcm::{triads, ComparisonMatrix, LogMatrix, Position, ScaleBound, TriadIndex};

use box_newton::{BoxOutcome, BoxResult, Target};

pub use ci::ci_objective_grad;

/// Slack on the feasible side of every threshold test, in functional units.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Fixed entries, free cells and the scale bound of one branch of the 0-1 problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSpec {
    base: LogMatrix,
    free: Vec<Position>,
    bound: ScaleBound,
}

impl SubproblemSpec {
    /// Free positions are sorted and deduplicated. Every pinned entry must lie in the box.
    pub fn new(base: LogMatrix, free: impl IntoIterator<Item = Position>, bound: ScaleBound) -> Result<Self> {
        let n = base.n();
        let mut free: Vec<Position> = free.into_iter().collect();
        if let Some(&p) = free.iter().find(|p| p.col() >= n) {
            return Err(Error::InvalidPosition(p));
        }
        free.sort();
        free.dedup();
        let m = bound.log_bound();
        for p in crate::pcm::positions(n) {
            let v = base.at(p);
            if free.binary_search(&p).is_err() && v.abs() > m + 1e-12 {
                return Err(Error::InadmissibleSpec {
                    position: p,
                    value: v,
                    bound: m,
                });
            }
        }
        Ok(Self { base, free, bound })
    }

    pub fn from_matrix(
        a: &ComparisonMatrix,
        free: impl IntoIterator<Item = Position>,
        bound: ScaleBound,
    ) -> Result<Self> {
        Self::new(a.to_log(), free, bound)
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn base(&self) -> &LogMatrix {
        &self.base
    }

    pub fn free(&self) -> &[Position] {
        &self.free
    }

    pub fn bound(&self) -> ScaleBound {
        self.bound
    }

    /// Base values of the free cells projected onto the box.
    pub fn start(&self) -> Vec<f64> {
        let m = self.bound.log_bound();
        self.free.iter().map(|&p| self.base.at(p).clamp(-m, m)).collect()
    }

    /// The base matrix with free cells set to `x`.
    pub fn apply(&self, x: &[f64]) -> LogMatrix {
        let mut out = self.base.clone();
        for (&p, &v) in self.free.iter().zip(x) {
            out.set(p, v);
        }
        out
    }

    /// Each triad's log deviation as `constant + sum coef * x[var]`.
    pub fn linear_triads(&self) -> Vec<LinearTriad> {
        triads(self.n())
            .expect("validated order")
            .into_iter()
            .map(|t| {
                let (i, j, k) = t.indices();
                let mut lt = LinearTriad {
                    triad: t,
                    constant: 0.0,
                    terms: Vec::new(),
                };
                for (p, coef) in [
                    (Position::new(i, j), 1.0),
                    (Position::new(j, k), 1.0),
                    (Position::new(i, k), -1.0),
                ] {
                    match self.free.binary_search(&p) {
                        Ok(var) => lt.terms.push((var, coef)),
                        Err(_) => lt.constant += coef * self.base.at(p),
                    }
                }
                lt
            })
            .collect()
    }
}

/// `s = x_ij + x_jk - x_ik` written over the free variables of a subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTriad {
    pub triad: TriadIndex,
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl LinearTriad {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * x[v]).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    IterationLimit,
}

/// Scaling witness for the CR program: `z_i = ln w_i - ln w_1` for the Perron
/// vector `w`, and the row bound `max_i sum_j exp(x_ij + z_j - z_i)` at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrAux {
    pub lambda: f64,
    pub z: Vec<f64>,
    pub row_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub kind: IndexKind,
    pub status: SolveStatus,
    /// Functional value at `x` (`lambda_max`, `max |s|` or the exponential sum).
    pub objective: f64,
    pub positions: Vec<Position>,
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<CrAux>,
    pub iterations: usize,
    pub kkt_residual: f64,
    /// Certified optimality gap: the minimum is at least `objective - gap`.
    pub gap: f64,
}

impl SolveReport {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, SolveStatus::Feasible | SolveStatus::Optimal)
    }

    pub fn witness(&self, spec: &SubproblemSpec) -> ComparisonMatrix {
        spec.apply(&self.x).to_matrix()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point for the free cells; defaults to [`SubproblemSpec::start`].
    pub start: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            start: None,
        }
    }
}

impl SolverOptions {
    fn start_for(&self, spec: &SubproblemSpec) -> Result<Vec<f64>> {
        match &self.start {
            Some(s) if s.len() != spec.free.len() => Err(Error::InadmissibleQuery(format!(
                "start point has {} values for {} free cells",
                s.len(),
                spec.free.len()
            ))),
            Some(s) => Ok(s.clone()),
            None => Ok(spec.start()),
        }
    }

    fn box_options(&self) -> box_newton::BoxOptions {
        box_newton::BoxOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

fn smooth_report(
    kind: IndexKind,
    spec: &SubproblemSpec,
    r: BoxResult,
    threshold: Option<f64>,
) -> SolveReport {
    let status = match (threshold, r.outcome) {
        (_, BoxOutcome::ReachedTarget) => SolveStatus::Feasible,
        (_, BoxOutcome::ExceededTarget) => SolveStatus::Infeasible,
        (None, BoxOutcome::Converged) => SolveStatus::Optimal,
        (Some(t), BoxOutcome::Converged) if r.value <= t + FEASIBILITY_TOL => SolveStatus::Feasible,
        (Some(_), BoxOutcome::Converged) => SolveStatus::Infeasible,
        (_, BoxOutcome::IterationLimit | BoxOutcome::Stalled) => SolveStatus::IterationLimit,
    };
    SolveReport {
        kind,
        status,
        objective: r.value,
        positions: spec.free.clone(),
        x: r.x,
        aux: None,
        iterations: r.iterations,
        kkt_residual: r.kkt_residual,
        gap: r.gap,
    }
}

fn target(threshold: f64) -> Target {
    Target {
        feasible_at: threshold + FEASIBILITY_TOL,
        infeasible_above: threshold + FEASIBILITY_TOL,
    }
}

/// `min lambda_max(exp X)` over the free cells.
pub fn min_lambda_cr(spec: &SubproblemSpec, opts: &SolverOptions) -> Result<SolveReport> {
    cr::solve(spec, opts, None)
}

/// Is `lambda_max(exp X) <= alpha_star` reachable? Stops at the first witness.
pub fn feasible_cr(spec: &SubproblemSpec, alpha_star: f64, opts: &SolverOptions) -> Result<SolveReport> {
    cr::solve(spec, opts, Some(alpha_star))
}

/// `min max_t |s_t|` over the free cells, solved exactly as a linear program.
pub fn min_cm(spec: &SubproblemSpec) -> Result<SolveReport> {
    cm::solve(spec, None)
}

pub fn feasible_cm(spec: &SubproblemSpec, alpha_star: f64) -> Result<SolveReport> {
    cm::solve(spec, Some(alpha_star))
}

/// `min sum_t (e^{s_t} + e^{-s_t})` over the free cells.
pub fn min_ci(spec: &SubproblemSpec, opts: &SolverOptions) -> Result<SolveReport> {
    ci::solve(spec, opts, None)
}

pub fn feasible_ci(spec: &SubproblemSpec, alpha_star: f64, opts: &SolverOptions) -> Result<SolveReport> {
    ci::solve(spec, opts, Some(alpha_star))
}

/// Minimises the functional of `kind`.
pub fn minimize(kind: IndexKind, spec: &SubproblemSpec, opts: &SolverOptions) -> Result<SolveReport> {
    match kind {
        IndexKind::Cr => min_lambda_cr(spec, opts),
        IndexKind::Cm => min_cm(spec),
        IndexKind::Ci => min_ci(spec, opts),
    }
}

/// Tests the functional of `kind` against `alpha_star` (already transformed).
pub fn feasible(
    kind: IndexKind,
    spec: &SubproblemSpec,
    alpha_star: f64,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    match kind {
        IndexKind::Cr => feasible_cr(spec, alpha_star, opts),
        IndexKind::Cm => feasible_cm(spec, alpha_star),
        IndexKind::Ci => feasible_ci(spec, alpha_star, opts),
    }
}

#[cfg(test)]
mod tests;
