//! Projected Newton method for smooth convex functions on a box.
//!
//! Variables near a bound whose gradient pushes outward are treated as
//! active and take a projected-gradient step; the rest take a damped Newton
//! step. Steps are projected back onto the box and accepted by an Armijo
//! test along the projection arc.
//!
//! The Frank-Wolfe gap `max_{y in box} g . (x - y)` bounds `f(x) - f*` from
//! above for convex `f`, so it is both the stopping test and a certified
//! lower bound `f(x) - gap <= f*`.

use crate::error::Result;

/// A smooth convex function of `len()` variables.
pub trait SmoothObjective {
    fn len(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    /// Row-major Hessian. Defaults to central differences of the gradient.
    fn hessian(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = self.len();
        let h = 1e-5;
        let mut hess = vec![0.0; m * m];
        let mut probe = x.to_vec();
        for p in 0..m {
            probe[p] = x[p] + h;
            let (_, gp) = self.value_grad(&probe)?;
            probe[p] = x[p] - h;
            let (_, gm) = self.value_grad(&probe)?;
            probe[p] = x[p];
            for q in 0..m {
                hess[q * m + p] = (gp[q] - gm[q]) / (2.0 * h);
            }
        }
        for p in 0..m {
            for q in 0..p {
                let avg = 0.5 * (hess[p * m + q] + hess[q * m + p]);
                hess[p * m + q] = avg;
                hess[q * m + p] = avg;
            }
        }
        Ok(hess)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxOptions {
    pub tol: f64,
    pub max_iter: usize,
}

/// Early exit rule for feasibility questions `min f <= target?`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// Stop as feasible once `f(x) <= feasible_at`.
    pub feasible_at: f64,
    /// Stop as infeasible once the certified bound `f(x) - gap` exceeds this.
    pub infeasible_above: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxOutcome {
    Converged,
    ReachedTarget,
    ExceededTarget,
    IterationLimit,
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub outcome: BoxOutcome,
}

fn frank_wolfe_gap(x: &[f64], g: &[f64], lo: f64, hi: f64) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| gi * xi - (gi * lo).min(gi * hi))
        .sum::<f64>()
        .max(0.0)
}

fn kkt_residual(x: &[f64], g: &[f64], lo: f64, hi: f64) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| (xi - (xi - gi).clamp(lo, hi)).abs())
        .fold(0.0, f64::max)
}

/// In-place Cholesky solve of `a d = b` for a small SPD matrix.
fn cholesky_solve(a: &mut [f64], b: &mut [f64]) -> bool {
    let m = b.len();
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * m + j] = d;
        for i in j + 1..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / d;
        }
    }
    for i in 0..m {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * m + k] * b[k];
        }
        b[i] = s / a[i * m + i];
    }
    for i in (0..m).rev() {
        let mut s = b[i];
        for k in i + 1..m {
            s -= a[k * m + i] * b[k];
        }
        b[i] = s / a[i * m + i];
    }
    true
}

/// Damped Newton step on inactive variables, diagonally scaled gradient step on active ones.
fn newton_direction(hess: &[f64], g: &[f64], active: &[bool]) -> Vec<f64> {
    let m = g.len();
    let free: Vec<usize> = (0..m).filter(|&p| !active[p]).collect();
    let mut d: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(p, &gp)| {
            let hpp = hess[p * m + p];
            if hpp > 1e-12 {
                -gp / hpp
            } else {
                -gp
            }
        })
        .collect();
    if free.is_empty() {
        return d;
    }
    let k = free.len();
    let gnorm = free.iter().map(|&p| g[p].abs()).fold(0.0, f64::max);
    let scale = free.iter().map(|&p| hess[p * m + p].abs()).fold(1.0, f64::max);
    let mut mu = gnorm.clamp(1e-12, 1.0) * 1e-3 * scale;
    loop {
        let mut sub = vec![0.0; k * k];
        for (a, &p) in free.iter().enumerate() {
            for (b, &q) in free.iter().enumerate() {
                sub[a * k + b] = hess[p * m + q];
            }
            sub[a * k + a] += mu;
        }
        let mut rhs: Vec<f64> = free.iter().map(|&p| -g[p]).collect();
        if cholesky_solve(&mut sub, &mut rhs) {
            for (a, &p) in free.iter().enumerate() {
                d[p] = rhs[a];
            }
            return d;
        }
        mu = (mu * 10.0).max(1e-10 * scale);
        if mu > 1e12 * scale {
            for &p in &free {
                d[p] = -g[p];
            }
            return d;
        }
    }
}

/// Minimises `obj` over `[lo, hi]^m` starting from the projection of `start`.
pub fn minimize_on_box<O: SmoothObjective + ?Sized>(
    obj: &O,
    start: &[f64],
    lo: f64,
    hi: f64,
    opts: BoxOptions,
    target: Option<Target>,
) -> Result<BoxResult> {
    let mut x: Vec<f64> = start.iter().map(|v| v.clamp(lo, hi)).collect();
    let (mut f, mut g) = obj.value_grad(&x)?;
    let mut iterations = 0;
    loop {
        let gap = frank_wolfe_gap(&x, &g, lo, hi);
        let kkt = kkt_residual(&x, &g, lo, hi);
        let finish = |outcome, x: Vec<f64>, f, iterations| BoxResult {
            x,
            value: f,
            gap,
            kkt_residual: kkt,
            iterations,
            outcome,
        };
        if let Some(t) = target {
            if f <= t.feasible_at {
                return Ok(finish(BoxOutcome::ReachedTarget, x, f, iterations));
            }
            if f - gap > t.infeasible_above {
                return Ok(finish(BoxOutcome::ExceededTarget, x, f, iterations));
            }
        }
        if gap <= opts.tol || x.is_empty() {
            return Ok(finish(BoxOutcome::Converged, x, f, iterations));
        }
        if iterations >= opts.max_iter {
            return Ok(finish(BoxOutcome::IterationLimit, x, f, iterations));
        }
        iterations += 1;

        let eps = kkt.min(1e-6);
        let active: Vec<bool> = x
            .iter()
            .zip(&g)
            .map(|(&xi, &gi)| (xi <= lo + eps && gi > 0.0) || (xi >= hi - eps && gi < 0.0))
            .collect();
        let hess = obj.hessian(&x)?;
        let newton = newton_direction(&hess, &g, &active);

        let mut accepted = line_search(obj, &x, f, &g, &newton, lo, hi)?;
        if accepted.is_none() {
            let steepest: Vec<f64> = g.iter().map(|v| -v).collect();
            accepted = line_search(obj, &x, f, &g, &steepest, lo, hi)?;
        }
        match accepted {
            Some(next) => {
                x = next;
                (f, g) = obj.value_grad(&x)?;
            }
            // No representable decrease along either direction.
            None => return Ok(finish(BoxOutcome::Stalled, x, f, iterations)),
        }
    }
}

fn line_search<O: SmoothObjective + ?Sized>(
    obj: &O,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    lo: f64,
    hi: f64,
) -> Result<Option<Vec<f64>>> {
    const SIGMA: f64 = 1e-4;
    let mut beta = 1.0;
    for _ in 0..60 {
        let trial: Vec<f64> = x
            .iter()
            .zip(d)
            .map(|(xi, di)| (xi + beta * di).clamp(lo, hi))
            .collect();
        let decrease: f64 = g
            .iter()
            .zip(&trial)
            .zip(x)
            .map(|((gi, t), xi)| gi * (t - xi))
            .sum();
        if decrease < 0.0 {
            let ft = obj.value(&trial)?;
            if ft <= f + SIGMA * decrease {
                return Ok(Some(trial));
            }
        }
        beta *= 0.5;
    }
    Ok(None)
}
