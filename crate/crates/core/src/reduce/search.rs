//! Enumeration of revision sets by size.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::{
    changed_cells, make_solution, Outcome, ReductionQuery, ReductionResult, SearchOptions, Solution, Stats,
};
use crate::convex::{self, SolveReport, SolveStatus, SubproblemSpec};
use crate::error::{Error, Result};
use crate::indices;
use crate::pcm::{positions, Position};

/// `C(m, k)`, saturating at `u64::MAX`.
pub fn binomial(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// All `k`-subsets of `0..m` in lexicographic order.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k > m {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] < m - k + i) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Shared state of one search: counters, limits and the query's constants.
pub(super) struct Search<'q> {
    pub q: &'q ReductionQuery,
    pub opts: &'q SearchOptions,
    pub cells: Vec<Position>,
    solved: AtomicU64,
    limited: AtomicU64,
    started: Instant,
}

impl<'q> Search<'q> {
    pub fn new(q: &'q ReductionQuery, opts: &'q SearchOptions) -> Self {
        Self {
            q,
            opts,
            cells: positions(q.matrix.n()),
            solved: AtomicU64::new(0),
            limited: AtomicU64::new(0),
            started: Instant::now(),
        }
    }

    pub fn solved(&self) -> u64 {
        self.solved.load(Ordering::Relaxed)
    }

    pub fn spec(&self, free: impl IntoIterator<Item = Position>) -> Result<SubproblemSpec> {
        SubproblemSpec::from_matrix(&self.q.matrix, free, self.q.bound)
    }

    pub fn subset(&self, idx: &[usize]) -> Vec<Position> {
        idx.iter().map(|&i| self.cells[i]).collect()
    }

    fn tick(&self) -> Result<()> {
        if let Some(d) = self.opts.limits.deadline {
            if Instant::now() >= d {
                return Err(Error::Timeout {
                    subproblems: self.solved(),
                });
            }
        }
        Ok(())
    }

    fn record(&self, r: &SolveReport) {
        self.solved.fetch_add(1, Ordering::Relaxed);
        if r.status == SolveStatus::IterationLimit {
            self.limited.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// Feasibility of freeing `free` against `alpha_star`.
    pub fn feasible(&self, free: &[Position], alpha_star: f64) -> Result<(SubproblemSpec, SolveReport)> {
        self.tick()?;
        let spec = self.spec(free.iter().copied())?;
        let r = convex::feasible(self.q.kind, &spec, alpha_star, &self.opts.solver)?;
        self.record(&r);
        Ok((spec, r))
    }

    pub fn minimize(&self, free: &[Position]) -> Result<(SubproblemSpec, SolveReport)> {
        self.tick()?;
        let spec = self.spec(free.iter().copied())?;
        let r = convex::minimize(self.q.kind, &spec, &self.opts.solver)?;
        self.record(&r);
        Ok((spec, r))
    }

    /// Refuses a level whose size would push the running total over the cap.
    pub fn admit_level(&self, size: u64) -> Result<()> {
        if let Some(cap) = self.opts.limits.max_subproblems {
            let estimate = self.solved().saturating_add(size);
            if estimate > cap {
                return Err(Error::WorkBudgetExceeded {
                    estimate,
                    budget: cap,
                });
            }
        }
        Ok(())
    }

    pub fn map<T, F>(&self, items: &[Vec<usize>], f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&[usize]) -> Result<T> + Sync + Send,
    {
        if self.opts.parallel {
            items.par_iter().map(|c| f(c)).collect()
        } else {
            items.iter().map(|c| f(c)).collect()
        }
    }

    pub fn stats(&self) -> Stats {
        Stats {
            subproblems: self.solved(),
            iteration_limits: self.limited.load(Ordering::Relaxed),
            nodes: None,
            wall_time_ms: self
                .opts
                .record_wall_time
                .then(|| self.started.elapsed().as_secs_f64() * 1e3),
        }
    }
}

/// Sets of one size evaluated in lexicographic chunks, stopping after the
/// first chunk with a feasible set when `first_only`.
fn feasible_level(
    s: &Search<'_>,
    k: usize,
    alpha_star: f64,
    first_only: bool,
) -> Result<Vec<(Vec<Position>, SubproblemSpec, SolveReport)>> {
    let combos = combinations(s.cells.len(), k);
    let chunk = if first_only {
        rayon::current_num_threads().max(1) * 4
    } else {
        combos.len().max(1)
    };
    let mut found = Vec::new();
    for part in combos.chunks(chunk) {
        let results = s.map(part, |c| {
            let free = s.subset(c);
            let (spec, r) = s.feasible(&free, alpha_star)?;
            Ok(r.is_feasible().then_some((free, spec, r)))
        })?;
        found.extend(results.into_iter().flatten());
        if first_only && !found.is_empty() {
            found.truncate(1);
            break;
        }
    }
    Ok(found)
}

fn changes(q: &ReductionQuery, opts: &SearchOptions, all: bool) -> Result<ReductionResult> {
    let threshold = q.threshold()?;
    let alpha_star = q.validate()?.expect("threshold mode");
    let initial_value = indices::index_value(q.kind, &q.matrix, &q.ri)?;
    let s = Search::new(q, opts);
    let m = s.cells.len();
    for k in 0..=m {
        s.admit_level(binomial(m, k))?;
        let found = feasible_level(&s, k, alpha_star, !all)?;
        if found.is_empty() {
            continue;
        }
        let solutions = found
            .into_iter()
            .map(|(free, spec, r)| {
                make_solution(q, free, r.witness(&spec), Some(threshold), opts.round_to_scale)
            })
            .collect::<Result<Vec<Solution>>>()?;
        return Ok(ReductionResult {
            kind: q.kind,
            initial_value,
            outcome: Outcome::MinChanges {
                threshold,
                l_star: k,
                solutions,
            },
            stats: s.stats(),
        });
    }
    // Unreachable for M >= 1: all cells free admits a consistent matrix.
    Err(Error::InadmissibleQuery(format!(
        "no revision set reaches {} <= {threshold}",
        q.kind
    )))
}

/// Fewest cells to revise; returns the lexicographically first optimal set.
pub fn min_changes(q: &ReductionQuery, opts: &SearchOptions) -> Result<ReductionResult> {
    changes(q, opts, false)
}

/// Every revision set of minimal size, each with one witness.
pub fn enumerate_optimal(q: &ReductionQuery, opts: &SearchOptions) -> Result<ReductionResult> {
    changes(q, opts, true)
}

/// Two objectives closer than this count as a tie.
const TIE_TOL: f64 = 1e-9;

/// Lowest index reachable by revising at most `budget` cells.
///
/// Freeing more cells never raises the optimum, so only sets of size exactly
/// `budget` are evaluated.
pub fn min_index(q: &ReductionQuery, opts: &SearchOptions) -> Result<ReductionResult> {
    q.validate()?;
    let budget = q.budget()?;
    let initial_value = indices::index_value(q.kind, &q.matrix, &q.ri)?;
    let s = Search::new(q, opts);
    let combos = combinations(s.cells.len(), budget);
    s.admit_level(combos.len() as u64)?;
    let results = s.map(&combos, |c| {
        let free = s.subset(c);
        let (spec, r) = s.minimize(&free)?;
        Ok((free, spec, r))
    })?;

    let best_value = results
        .iter()
        .map(|r| r.2.objective)
        .fold(f64::INFINITY, f64::min);
    let mut ties = results
        .iter()
        .filter(|r| r.2.objective <= best_value + TIE_TOL)
        .map(|r| r.0.clone());
    let first = ties.next().expect("at least one set");
    let ties: Vec<Vec<Position>> = ties.collect();
    let (freed, spec, report) = results.into_iter().find(|r| r.0 == first).expect("present");

    let witness = report.witness(&spec);
    let changed = changed_cells(&q.matrix, &witness)?;
    let alpha_opt = q
        .kind
        .back_transform(report.objective, q.matrix.n(), &q.ri)?
        .max(0.0);
    let best = make_solution(q, changed, witness, None, opts.round_to_scale)?;
    Ok(ReductionResult {
        kind: q.kind,
        initial_value,
        outcome: Outcome::MinIndex {
            budget,
            alpha_opt,
            best,
            freed,
            ties,
        },
        stats: s.stats(),
    })
}
