//! Big-M branch and bound over the 0-1 revision indicators `y`.
//!
//! A cell with `y = 0` is pinned to its data value; `y = 1` lets it move
//! anywhere in the box, which `-2M y <= x - a <= 2M y` encodes. Nodes are
//! explored best-first on their relaxation bound.
//!
//! For CM every node solves the linear relaxation with `y` continuous in
//! `[0, 1]`. For CR and CI the relaxation frees every undecided cell, which
//! is the projection of the Big-M relaxation onto `x`, and bounds the count
//! of revised cells by the cells already fixed to 1.
//!
//! All optimal sets of MinChanges come from repeated solves with the cuts
//! `sum y = L*` and `sum_{S} y - sum_{not S} y <= |S| - 1` for each set `S`
//! already found, until no solution remains.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use super::{changed_cells, make_solution, Outcome, ReductionQuery, ReductionResult, Solution, Stats};
use crate::convex::simplex::{LinearProgram, LpStatus, Sense};
use crate::convex::{self, SolveStatus, SolverOptions, SubproblemSpec, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::indices::{self, IndexKind};
use crate::pcm::{positions, LogMatrix, Position};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub solver: SolverOptions,
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            max_nodes: 1_000_000,
            deadline: None,
        }
    }
}

const INTEGRAL_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Copy)]
struct Node {
    ones: u64,
    zeros: u64,
}

/// Result of a node relaxation.
enum Relaxed {
    Pruned,
    /// Lower bound and, when the relaxation is integral, the pattern attaining it.
    Bound(f64, Option<u64>),
}

struct Oracle<'q> {
    q: &'q ReductionQuery,
    opts: &'q OracleOptions,
    cells: Vec<Position>,
    base: LogMatrix,
    mbar: f64,
    nodes: u64,
    subproblems: u64,
    feasible_cache: HashMap<u64, bool>,
    min_cache: HashMap<u64, f64>,
}

impl<'q> Oracle<'q> {
    fn all(&self) -> u64 {
        (1u64 << self.cells.len()) - 1
    }

    fn free_set(&self, mask: u64) -> Vec<Position> {
        (0..self.cells.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.cells[i])
            .collect()
    }

    fn spec(&self, mask: u64) -> Result<SubproblemSpec> {
        SubproblemSpec::new(self.base.clone(), self.free_set(mask), self.q.bound)
    }

    fn visit(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.opts.max_nodes {
            return Err(Error::BranchLimit {
                nodes: self.opts.max_nodes,
            });
        }
        if let Some(d) = self.opts.deadline {
            if Instant::now() >= d {
                return Err(Error::Timeout {
                    subproblems: self.subproblems,
                });
            }
        }
        Ok(())
    }

    fn feasible(&mut self, mask: u64, alpha_star: f64) -> Result<bool> {
        if let Some(&v) = self.feasible_cache.get(&mask) {
            return Ok(v);
        }
        let r = convex::feasible(self.q.kind, &self.spec(mask)?, alpha_star, &self.opts.solver)?;
        self.subproblems += 1;
        self.feasible_cache.insert(mask, r.is_feasible());
        Ok(r.is_feasible())
    }

    fn minimum(&mut self, mask: u64) -> Result<f64> {
        if let Some(&v) = self.min_cache.get(&mask) {
            return Ok(v);
        }
        let r = convex::minimize(self.q.kind, &self.spec(mask)?, &self.opts.solver)?;
        self.subproblems += 1;
        self.min_cache.insert(mask, r.objective);
        Ok(r.objective)
    }

    /// LP relaxation of a CM node. With `threshold`, minimises `sum y` subject
    /// to every triad within the threshold; otherwise minimises the worst
    /// triad `t` subject to `sum y <= budget`.
    fn cm_relaxation(
        &mut self,
        node: Node,
        threshold: Option<f64>,
        budget: Option<usize>,
        fix_sum: Option<usize>,
        excluded: &[u64],
    ) -> Result<Relaxed> {
        let m = self.cells.len();
        let undecided = self.all() & !(node.ones | node.zeros);
        let c1 = node.ones.count_ones() as usize;
        let mut lp = LinearProgram::default();
        let mut xvar = vec![None; m];
        let mut yvar = vec![None; m];
        let y_cost = if threshold.is_some() { 1.0 } else { 0.0 };
        for i in 0..m {
            if node.zeros >> i & 1 == 0 {
                xvar[i] = Some(lp.add_var(-self.mbar, self.mbar, 0.0));
            }
            if undecided >> i & 1 == 1 {
                yvar[i] = Some(lp.add_var(0.0, 1.0, y_cost));
            }
        }
        let t = threshold.is_none().then(|| lp.add_var(0.0, f64::INFINITY, 1.0));
        let limit = threshold.map(|a| a + FEASIBILITY_TOL);

        let index_of = |p: Position| self.cells.binary_search(&p).expect("cell");
        for tri in crate::pcm::triads(self.base.n())? {
            let (i, j, k) = tri.indices();
            let mut constant = 0.0;
            let mut terms = Vec::new();
            for (p, coef) in [
                (Position::new(i, j), 1.0),
                (Position::new(j, k), 1.0),
                (Position::new(i, k), -1.0),
            ] {
                match xvar[index_of(p)] {
                    Some(v) => terms.push((v, coef)),
                    None => constant += coef * self.base.at(p),
                }
            }
            match (t, limit) {
                (Some(t), _) => {
                    let mut up = terms.clone();
                    up.push((t, -1.0));
                    lp.add_row(up, Sense::Le, -constant);
                    let mut down: Vec<(usize, f64)> = terms.iter().map(|&(v, c)| (v, -c)).collect();
                    down.push((t, -1.0));
                    lp.add_row(down, Sense::Le, constant);
                }
                (None, Some(a)) if terms.is_empty() => {
                    if constant.abs() > a {
                        return Ok(Relaxed::Pruned);
                    }
                }
                (None, Some(a)) => {
                    lp.add_row(terms.clone(), Sense::Le, a - constant);
                    lp.add_row(terms, Sense::Ge, -a - constant);
                }
                (None, None) => unreachable!(),
            }
        }
        for i in 0..m {
            if let (Some(x), Some(y)) = (xvar[i], yvar[i]) {
                let a = self.base.at(self.cells[i]);
                lp.add_row(vec![(x, 1.0), (y, -2.0 * self.mbar)], Sense::Le, a);
                lp.add_row(vec![(x, -1.0), (y, -2.0 * self.mbar)], Sense::Le, -a);
            }
        }
        let ys: Vec<(usize, f64)> = yvar.iter().flatten().map(|&y| (y, 1.0)).collect();
        if let Some(k) = budget {
            if c1 > k {
                return Ok(Relaxed::Pruned);
            }
            lp.add_row(ys.clone(), Sense::Le, (k - c1) as f64);
        }
        if let Some(l) = fix_sum {
            if c1 > l {
                return Ok(Relaxed::Pruned);
            }
            lp.add_row(ys.clone(), Sense::Eq, (l - c1) as f64);
        }
        for &s in excluded {
            let mut coefs = Vec::new();
            let mut rhs = s.count_ones() as f64 - 1.0;
            for i in 0..m {
                let inside = s >> i & 1 == 1;
                if let Some(y) = yvar[i] {
                    coefs.push((y, if inside { 1.0 } else { -1.0 }));
                } else if node.ones >> i & 1 == 1 {
                    rhs -= if inside { 1.0 } else { -1.0 };
                }
            }
            if coefs.is_empty() {
                if rhs < 0.0 {
                    return Ok(Relaxed::Pruned);
                }
            } else {
                lp.add_row(coefs, Sense::Le, rhs);
            }
        }

        let sol = lp.solve(MAX_PIVOTS);
        self.subproblems += 1;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Ok(Relaxed::Pruned),
            LpStatus::Unbounded | LpStatus::IterationLimit => {
                return Err(Error::InadmissibleQuery("node relaxation failed to solve".into()))
            }
        }
        let bound = match t {
            Some(_) => sol.objective,
            None => c1 as f64 + sol.objective,
        };
        let integral = yvar
            .iter()
            .flatten()
            .all(|&y| sol.x[y] <= INTEGRAL_TOL || sol.x[y] >= 1.0 - INTEGRAL_TOL);
        let pattern = integral.then(|| {
            (0..m).fold(node.ones, |acc, i| match yvar[i] {
                Some(y) if sol.x[y] > 0.5 => acc | 1 << i,
                _ => acc,
            })
        });
        Ok(Relaxed::Bound(bound, pattern))
    }

    /// Node relaxation for CR and CI in MinChanges mode.
    fn smooth_changes_relaxation(
        &mut self,
        node: Node,
        alpha_star: f64,
        fix_sum: Option<usize>,
        excluded: &[u64],
    ) -> Result<Relaxed> {
        let undecided = self.all() & !(node.ones | node.zeros);
        let c1 = node.ones.count_ones() as usize;
        let cu = undecided.count_ones() as usize;
        if let Some(l) = fix_sum {
            if c1 > l || c1 + cu < l {
                return Ok(Relaxed::Pruned);
            }
        }
        if !self.feasible(node.ones | undecided, alpha_star)? {
            return Ok(Relaxed::Pruned);
        }
        // All undecided cells at 0.
        let cuts_ok = fix_sum.is_none_or(|l| c1 == l) && !excluded.contains(&node.ones);
        let pattern = (cuts_ok && self.feasible(node.ones, alpha_star)?).then_some(node.ones);
        Ok(Relaxed::Bound(c1 as f64, pattern))
    }

    fn smooth_index_relaxation(&mut self, node: Node, budget: usize) -> Result<Relaxed> {
        let undecided = self.all() & !(node.ones | node.zeros);
        let free = node.ones | undecided;
        let bound = self.minimum(free)?;
        let pattern = (free.count_ones() as usize <= budget).then_some(free);
        Ok(Relaxed::Bound(bound, pattern))
    }

    /// Best-first branch and bound; `relax` evaluates a node.
    fn branch_and_bound(
        &mut self,
        budget: Option<usize>,
        mut relax: impl FnMut(&mut Self, Node) -> Result<Relaxed>,
    ) -> Result<Option<(f64, u64)>> {
        let mut heap: BinaryHeap<Reverse<(u64, u64)>> = BinaryHeap::new();
        let mut store = vec![Node { ones: 0, zeros: 0 }];
        heap.push(Reverse((0, 0)));
        let mut incumbent: Option<(f64, u64)> = None;
        while let Some(Reverse((key, id))) = heap.pop() {
            if let Some((v, _)) = incumbent {
                if f64::from_bits(key) >= v - INTEGRAL_TOL {
                    break;
                }
            }
            self.visit()?;
            let node = store[id as usize];
            let (bound, pattern) = match relax(self, node)? {
                Relaxed::Pruned => continue,
                Relaxed::Bound(b, p) => (b, p),
            };
            if incumbent.is_some_and(|(v, _)| bound >= v - INTEGRAL_TOL) {
                continue;
            }
            if let Some(p) = pattern {
                incumbent = Some((bound, p));
                continue;
            }
            let undecided = self.all() & !(node.ones | node.zeros);
            if undecided == 0 {
                continue;
            }
            let bit = 1u64 << undecided.trailing_zeros();
            let key = bound.max(0.0).to_bits();
            let c1 = node.ones.count_ones() as usize;
            if budget.is_none_or(|k| c1 < k) {
                // Counting objective: one more revised cell raises the bound.
                let up = match budget {
                    None => bound.max(c1 as f64 + 1.0).to_bits(),
                    Some(_) => key,
                };
                store.push(Node {
                    ones: node.ones | bit,
                    zeros: node.zeros,
                });
                heap.push(Reverse((up, store.len() as u64 - 1)));
            }
            store.push(Node {
                ones: node.ones,
                zeros: node.zeros | bit,
            });
            heap.push(Reverse((key, store.len() as u64 - 1)));
        }
        Ok(incumbent)
    }

    fn solve_changes(
        &mut self,
        alpha_star: f64,
        fix_sum: Option<usize>,
        excluded: &[u64],
    ) -> Result<Option<u64>> {
        let cm = self.q.kind == IndexKind::Cm;
        let found = self.branch_and_bound(None, |o, node| {
            if cm {
                o.cm_relaxation(node, Some(alpha_star), None, fix_sum, excluded)
            } else {
                o.smooth_changes_relaxation(node, alpha_star, fix_sum, excluded)
            }
        })?;
        Ok(found.map(|(_, p)| p))
    }

    fn stats(&self) -> Stats {
        Stats {
            subproblems: self.subproblems,
            iteration_limits: 0,
            nodes: Some(self.nodes),
            wall_time_ms: None,
        }
    }
}

/// Solves the query with the Big-M formulation instead of enumeration.
///
/// Intended for small orders (`n <= 5`) as an independent check on
/// [`super::min_changes`], [`super::enumerate_optimal`] and [`super::min_index`].
/// MinChanges results list every optimal set.
pub fn bigm_oracle(q: &ReductionQuery, opts: &OracleOptions) -> Result<ReductionResult> {
    let alpha_star = q.validate()?;
    let cells = positions(q.matrix.n());
    if cells.len() > 63 {
        return Err(Error::InadmissibleQuery(
            "order too large for the branch-and-bound oracle".into(),
        ));
    }
    let mut o = Oracle {
        q,
        opts,
        cells,
        base: q.matrix.to_log(),
        mbar: q.bound.log_bound(),
        nodes: 0,
        subproblems: 0,
        feasible_cache: HashMap::new(),
        min_cache: HashMap::new(),
    };
    let initial_value = indices::index_value(q.kind, &q.matrix, &q.ri)?;
    let outcome = match alpha_star {
        Some(alpha_star) => {
            let threshold = q.threshold()?;
            let first = o
                .solve_changes(alpha_star, None, &[])?
                .ok_or_else(|| Error::InadmissibleQuery("no revision set reaches the threshold".into()))?;
            let l_star = first.count_ones() as usize;
            let mut found = vec![first];
            while let Some(p) = o.solve_changes(alpha_star, Some(l_star), &found)? {
                found.push(p);
            }
            let mut sets: Vec<Vec<Position>> = found.iter().map(|&p| o.free_set(p)).collect();
            sets.sort();
            let solutions = sets
                .into_iter()
                .map(|set| {
                    let spec = SubproblemSpec::new(o.base.clone(), set.clone(), q.bound)?;
                    let r = convex::feasible(q.kind, &spec, alpha_star, &opts.solver)?;
                    make_solution(q, set, r.witness(&spec), Some(threshold), false)
                })
                .collect::<Result<Vec<Solution>>>()?;
            Outcome::MinChanges {
                threshold,
                l_star,
                solutions,
            }
        }
        None => {
            let budget = q.budget()?;
            let cm = q.kind == IndexKind::Cm;
            let (value, pattern) = o
                .branch_and_bound(Some(budget), |o, node| {
                    if cm {
                        o.cm_relaxation(node, None, Some(budget), None, &[])
                    } else {
                        o.smooth_index_relaxation(node, budget)
                    }
                })?
                .expect("the empty set is always admissible");
            let freed = o.free_set(pattern);
            let spec = SubproblemSpec::new(o.base.clone(), freed.clone(), q.bound)?;
            let r = convex::minimize(q.kind, &spec, &opts.solver)?;
            debug_assert!(r.status != SolveStatus::Infeasible);
            let witness = r.witness(&spec);
            let alpha_opt = q.kind.back_transform(value, q.matrix.n(), &q.ri)?.max(0.0);
            let best = make_solution(q, changed_cells(&q.matrix, &witness)?, witness, None, false)?;
            Outcome::MinIndex {
                budget,
                alpha_opt,
                best,
                freed,
                ties: Vec::new(),
            }
        }
    };
    Ok(ReductionResult {
        kind: q.kind,
        initial_value,
        outcome,
        stats: o.stats(),
    })
}
