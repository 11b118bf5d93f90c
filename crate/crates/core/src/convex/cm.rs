use super::simplex::{LinearProgram, LpStatus, Sense};
use super::{SolveReport, SolveStatus, SubproblemSpec, FEASIBILITY_TOL};
use crate::error::Result;
use crate::indices::IndexKind;

const MAX_PIVOTS: usize = 100_000;

/// `min t` subject to `-t <= s <= t` for every triad, free cells in the box.
pub(super) fn solve(spec: &SubproblemSpec, threshold: Option<f64>) -> Result<SolveReport> {
    let m = spec.bound().log_bound();
    let triads = spec.linear_triads();
    let fixed = triads
        .iter()
        .filter(|t| t.terms.is_empty())
        .map(|t| t.constant.abs())
        .fold(0.0, f64::max);
    let nfree = spec.free().len();

    let mut lp = LinearProgram::default();
    for _ in 0..nfree {
        lp.add_var(-m, m, 0.0);
    }
    let t = lp.add_var(fixed, f64::INFINITY, 1.0);
    for tr in triads.iter().filter(|t| !t.terms.is_empty()) {
        let mut up = tr.terms.clone();
        up.push((t, -1.0));
        lp.add_row(up, Sense::Le, -tr.constant);
        let mut down: Vec<(usize, f64)> = tr.terms.iter().map(|&(v, c)| (v, -c)).collect();
        down.push((t, -1.0));
        lp.add_row(down, Sense::Le, tr.constant);
    }
    let sol = lp.solve(MAX_PIVOTS);

    let (x, optimal) = match sol.status {
        LpStatus::Optimal => (sol.x[..nfree].to_vec(), true),
        _ => (spec.start(), false),
    };
    // Exact re-evaluation at the vertex.
    let objective = triads.iter().map(|t| t.eval(&x).abs()).fold(0.0, f64::max);
    let status = match (optimal, threshold) {
        (false, _) => SolveStatus::IterationLimit,
        (true, None) => SolveStatus::Optimal,
        (true, Some(a)) if objective <= a + FEASIBILITY_TOL => SolveStatus::Feasible,
        (true, Some(_)) => SolveStatus::Infeasible,
    };
    Ok(SolveReport {
        kind: IndexKind::Cm,
        status,
        objective,
        positions: spec.free().to_vec(),
        x,
        aux: None,
        iterations: sol.pivots,
        kkt_residual: 0.0,
        gap: 0.0,
    })
}
