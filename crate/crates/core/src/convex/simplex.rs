//! Dense two-phase simplex with Bland's rule for small linear programs.
//!
//! Problems are `min c.x` subject to `lower <= x <= upper` and linear rows.
//! Every lower bound must be finite; upper bounds may be infinite.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const EPS: f64 = 1e-11;

impl LinearProgram {
    /// Adds a variable with the given bounds and objective weight; returns its index.
    pub fn add_var(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(cost);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row { coefs, sense, rhs });
    }

    pub fn solve(&self, max_pivots: usize) -> LpSolution {
        Tableau::build(self).solve(self, max_pivots)
    }
}

struct Tableau {
    /// `m` constraint rows of width `cols + 1`; the last entry is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    /// Columns at or after this index are artificial.
    first_artificial: usize,
    pivots: usize,
}

enum Phase {
    Optimal,
    Unbounded,
    Limit,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let nv = lp.objective.len();
        // Shift x = lower + x', turn finite upper bounds into rows.
        let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
        for r in &lp.rows {
            let mut dense = vec![0.0; nv];
            let mut rhs = r.rhs;
            for &(j, a) in &r.coefs {
                dense[j] += a;
                rhs -= a * lp.lower[j];
            }
            rows.push((dense, r.sense, rhs));
        }
        for j in 0..nv {
            if lp.upper[j].is_finite() {
                let mut dense = vec![0.0; nv];
                dense[j] = 1.0;
                rows.push((dense, Sense::Le, lp.upper[j] - lp.lower[j]));
            }
        }
        for (dense, sense, rhs) in rows.iter_mut() {
            if *rhs < 0.0 {
                dense.iter_mut().for_each(|a| *a = -*a);
                *rhs = -*rhs;
                *sense = match *sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
        }
        let m = rows.len();
        let slacks = rows.iter().filter(|r| r.1 != Sense::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Sense::Le).count();
        let first_artificial = nv + slacks;
        let cols = first_artificial + artificials;
        let mut t = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0; m];
        let (mut s, mut a) = (nv, first_artificial);
        for (i, (dense, sense, rhs)) in rows.into_iter().enumerate() {
            t[i][..nv].copy_from_slice(&dense);
            t[i][cols] = rhs;
            match sense {
                Sense::Le => {
                    t[i][s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Sense::Ge => {
                    t[i][s] = -1.0;
                    s += 1;
                    t[i][a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
                Sense::Eq => {
                    t[i][a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        Self {
            t,
            basis,
            cols,
            first_artificial,
            pivots: 0,
        }
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64]) {
        let p = self.t[r][c];
        self.t[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    row.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
                    row[c] = 0.0;
                }
            }
        }
        let f = obj[c];
        if f != 0.0 {
            obj.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
            obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Reduced-cost row for `cost` (length `cols`), with `-z` in the last slot.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj = cost.to_vec();
        obj.push(0.0);
        for (row, &b) in self.t.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                obj.iter_mut().zip(row).for_each(|(v, a)| *v -= cb * a);
            }
        }
        obj
    }

    fn run(&mut self, cost: &[f64], allowed: usize, max_pivots: usize) -> Phase {
        let mut obj = self.reduced_costs(cost);
        let cols = self.cols;
        loop {
            let Some(c) = (0..allowed).find(|&j| obj[j] < -EPS) else {
                return Phase::Optimal;
            };
            if self.pivots >= max_pivots {
                return Phase::Limit;
            }
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[cols] / row[c];
                    let better = match best {
                        None => true,
                        Some((r, _, b)) => ratio < r - EPS || (ratio <= r + EPS && self.basis[i] < b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, r, _)) => self.pivot(r, c, &mut obj),
                None => return Phase::Unbounded,
            }
        }
    }

    fn solve(mut self, lp: &LinearProgram, max_pivots: usize) -> LpSolution {
        let nv = lp.objective.len();
        let cols = self.cols;
        let fail = |status, pivots| LpSolution {
            status,
            x: lp.lower.clone(),
            objective: f64::NAN,
            pivots,
        };

        if self.first_artificial < cols {
            let mut cost = vec![0.0; cols];
            cost[self.first_artificial..].iter_mut().for_each(|c| *c = 1.0);
            if let Phase::Limit = self.run(&cost, cols, max_pivots) {
                return fail(LpStatus::IterationLimit, self.pivots);
            }
            let infeasibility: f64 = self
                .t
                .iter()
                .zip(&self.basis)
                .filter(|(_, &b)| b >= self.first_artificial)
                .map(|(row, _)| row[cols])
                .sum();
            let scale = 1.0 + self.t.iter().map(|r| r[cols].abs()).fold(0.0, f64::max);
            if infeasibility > 1e-9 * scale {
                return fail(LpStatus::Infeasible, self.pivots);
            }
            // Drive remaining artificials out of the basis where possible.
            let mut dummy = vec![0.0; cols + 1];
            for r in 0..self.t.len() {
                if self.basis[r] >= self.first_artificial {
                    if let Some(c) = (0..self.first_artificial).find(|&j| self.t[r][j].abs() > 1e-9) {
                        self.pivot(r, c, &mut dummy);
                    }
                }
            }
        }

        let mut cost = vec![0.0; cols];
        cost[..nv].copy_from_slice(&lp.objective);
        match self.run(&cost, self.first_artificial, max_pivots) {
            Phase::Limit => return fail(LpStatus::IterationLimit, self.pivots),
            Phase::Unbounded => return fail(LpStatus::Unbounded, self.pivots),
            Phase::Optimal => {}
        }
        let mut x = lp.lower.clone();
        for (row, &b) in self.t.iter().zip(&self.basis) {
            if b < nv {
                x[b] += row[cols];
            }
        }
        for j in 0..nv {
            x[j] = x[j].clamp(lp.lower[j], lp.upper[j]);
        }
        let objective = x.iter().zip(&lp.objective).map(|(a, c)| a * c).sum();
        LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            pivots: self.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::default();
        let x = lp.add_var(0.0, f64::INFINITY, -3.0);
        let y = lp.add_var(0.0, f64::INFINITY, -5.0);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 4.0);
        lp.add_row(vec![(y, 2.0)], Sense::Le, 12.0);
        lp.add_row(vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        let s = lp.solve(1000);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_equalities_and_ge_rows() {
        // min |x - 1.5| style: min t, t >= x - 1.5, t >= 1.5 - x, x in [-1, 1], x + y = 0.5
        let mut lp = LinearProgram::default();
        let x = lp.add_var(-1.0, 1.0, 0.0);
        let y = lp.add_var(-5.0, 5.0, 0.0);
        let t = lp.add_var(0.0, f64::INFINITY, 1.0);
        lp.add_row(vec![(x, 1.0), (t, -1.0)], Sense::Le, 1.5);
        lp.add_row(vec![(x, 1.0), (t, 1.0)], Sense::Ge, 1.5);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 0.5);
        let s = lp.solve(1000);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 0.5).abs() < 1e-12);
        assert!((s.x[x] - 1.0).abs() < 1e-12);
        assert!((s.x[y] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::default();
        let x = lp.add_var(0.0, 1.0, 1.0);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(lp.solve(100).status, LpStatus::Infeasible);

        let mut lp = LinearProgram::default();
        let x = lp.add_var(0.0, f64::INFINITY, -1.0);
        lp.add_row(vec![(x, -1.0)], Sense::Le, 3.0);
        assert_eq!(lp.solve(100).status, LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example, which loops under the largest-coefficient rule.
        let mut lp = LinearProgram::default();
        let v: Vec<usize> = [-0.75, 150.0, -0.02, 6.0]
            .iter()
            .map(|&c| lp.add_var(0.0, f64::INFINITY, c))
            .collect();
        lp.add_row(
            vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)],
            Sense::Le,
            0.0,
        );
        lp.add_row(
            vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)],
            Sense::Le,
            0.0,
        );
        lp.add_row(vec![(v[2], 1.0)], Sense::Le, 1.0);
        let s = lp.solve(1000);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-12);
    }
}
