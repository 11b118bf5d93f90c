use super::box_newton::{minimize_on_box, SmoothObjective};
use super::{smooth_report, target, CrAux, SolveReport, SolverOptions, SubproblemSpec};
use crate::error::Result;
use crate::indices::perron::{frobenius_bound, lambda_gradient, lambda_max, DEFAULT_LAMBDA_TOL};
use crate::indices::IndexKind;

/// `lambda_max(exp X)` as a function of the free cells.
struct Lambda<'a> {
    spec: &'a SubproblemSpec,
}

impl SmoothObjective for Lambda<'_> {
    fn len(&self) -> usize {
        self.spec.free().len()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let a = self.spec.apply(x).to_matrix();
        Ok(lambda_max(&a, DEFAULT_LAMBDA_TOL)?.lambda_max)
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let n = self.spec.n();
        let a = self.spec.apply(x).to_matrix();
        let (lambda, _, full) = lambda_gradient(&a, DEFAULT_LAMBDA_TOL)?;
        let g = self.spec.free().iter().map(|p| full[p.linear_index(n)]).collect();
        Ok((lambda, g))
    }
}

pub(super) fn solve(
    spec: &SubproblemSpec,
    opts: &SolverOptions,
    threshold: Option<f64>,
) -> Result<SolveReport> {
    let m = spec.bound().log_bound();
    let r = minimize_on_box(
        &Lambda { spec },
        &opts.start_for(spec)?,
        -m,
        m,
        opts.box_options(),
        threshold.map(target),
    )?;
    let mut report = smooth_report(IndexKind::Cr, spec, r, threshold);
    let a = report.witness(spec);
    let p = lambda_max(&a, DEFAULT_LAMBDA_TOL)?;
    let z: Vec<f64> = p.vector.iter().map(|w| (w / p.vector[0]).ln()).collect();
    report.aux = Some(CrAux {
        lambda: p.lambda_max,
        row_bound: frobenius_bound(&a, &z),
        z,
    });
    Ok(report)
}
