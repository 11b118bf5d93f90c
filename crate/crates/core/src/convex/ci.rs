use super::box_newton::{minimize_on_box, SmoothObjective};
use super::{smooth_report, target, LinearTriad, SolveReport, SolverOptions, SubproblemSpec};
use crate::error::Result;
use crate::indices::IndexKind;

/// Value and gradient of `sum_t (e^{s_t} + e^{-s_t})` over linearised triads.
pub fn ci_objective_grad(triads: &[LinearTriad], x: &[f64]) -> (f64, Vec<f64>) {
    let mut g = vec![0.0; x.len()];
    let mut f = 0.0;
    for t in triads {
        let s = t.eval(x);
        let (ep, em) = (s.exp(), (-s).exp());
        f += ep + em;
        for &(v, c) in &t.terms {
            g[v] += c * (ep - em);
        }
    }
    (f, g)
}

struct ExpSum {
    triads: Vec<LinearTriad>,
    m: usize,
}

impl SmoothObjective for ExpSum {
    fn len(&self) -> usize {
        self.m
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self
            .triads
            .iter()
            .map(|t| {
                let s = t.eval(x);
                s.exp() + (-s).exp()
            })
            .sum())
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(ci_objective_grad(&self.triads, x))
    }

    fn hessian(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = self.m;
        let mut h = vec![0.0; m * m];
        for t in &self.triads {
            let s = t.eval(x);
            let w = s.exp() + (-s).exp();
            for &(p, cp) in &t.terms {
                for &(q, cq) in &t.terms {
                    h[p * m + q] += w * cp * cq;
                }
            }
        }
        Ok(h)
    }
}

pub(super) fn solve(
    spec: &SubproblemSpec,
    opts: &SolverOptions,
    threshold: Option<f64>,
) -> Result<SolveReport> {
    let bound = spec.bound().log_bound();
    let obj = ExpSum {
        triads: spec.linear_triads(),
        m: spec.free().len(),
    };
    let r = minimize_on_box(
        &obj,
        &opts.start_for(spec)?,
        -bound,
        bound,
        opts.box_options(),
        threshold.map(target),
    )?;
    Ok(smooth_report(IndexKind::Ci, spec, r, threshold))
}
