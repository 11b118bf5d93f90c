use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fixtures;
use crate::indices::{self, lambda_max, RandomIndexTable, DEFAULT_LAMBDA_TOL};
use crate::pcm::{positions, upper_len};

fn pos(i: usize, j: usize) -> Position {
    Position::one_based(i, j).unwrap()
}

fn triad(a: f64, b: f64, c: f64) -> ComparisonMatrix {
    ComparisonMatrix::from_upper(3, &[a, b, c]).unwrap()
}

fn spec(a: &ComparisonMatrix, free: &[Position]) -> SubproblemSpec {
    SubproblemSpec::from_matrix(a, free.iter().copied(), ScaleBound::SAATY).unwrap()
}

fn random_log(rng: &mut ChaCha8Rng, n: usize, m: f64) -> LogMatrix {
    let upper: Vec<f64> = (0..upper_len(n)).map(|_| rng.random_range(-m..=m)).collect();
    LogMatrix::from_upper(n, &upper).unwrap()
}

fn random_free(rng: &mut ChaCha8Rng, n: usize) -> Vec<Position> {
    positions(n)
        .into_iter()
        .filter(|_| rng.random_bool(0.4))
        .collect()
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn spec_rejects_pinned_entries_outside_the_box() {
    let a = triad(20.0, 1.0, 1.0);
    let err = SubproblemSpec::from_matrix(&a, [], ScaleBound::SAATY).unwrap_err();
    assert!(matches!(err, Error::InadmissibleSpec { .. }));
    // Freeing the offending cell makes it admissible.
    assert!(SubproblemSpec::from_matrix(&a, [pos(1, 2)], ScaleBound::SAATY).is_ok());
    let bad = Position::new(1, 5);
    assert_eq!(
        SubproblemSpec::from_matrix(&a, [bad], ScaleBound::SAATY).unwrap_err(),
        Error::InvalidPosition(bad)
    );
}

#[test]
fn spec_sorts_and_dedups_free_cells() {
    let s = spec(&fixtures::cities(), &[pos(2, 3), pos(1, 2), pos(2, 3)]);
    assert_eq!(s.free(), &[pos(1, 2), pos(2, 3)]);
}

#[test]
fn cr_all_free_reaches_n() {
    let s = spec(&fixtures::a2(), &positions(6));
    let r = min_lambda_cr(&s, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective - 6.0).abs() < 1e-7, "{}", r.objective);
}

#[test]
fn cr_nothing_free_is_lambda_max() {
    let a = fixtures::cities();
    let r = min_lambda_cr(&spec(&a, &[]), &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective - 6.4536).abs() < 5e-5, "{}", r.objective);
    let direct = lambda_max(&a, DEFAULT_LAMBDA_TOL).unwrap().lambda_max;
    assert!((r.objective - direct).abs() < 1e-8);
    let aux = r.aux.unwrap();
    assert_eq!(aux.z[0], 0.0);
    assert!((aux.row_bound - aux.lambda).abs() < 1e-9);
}

#[test]
fn cr_single_cell_repairs_a2() {
    let a = fixtures::a2();
    let r = min_lambda_cr(&spec(&a, &[pos(1, 3)]), &opts()).unwrap();
    assert!(r.objective <= 6.62, "{}", r.objective);
    let check = lambda_max(&r.witness(&spec(&a, &[pos(1, 3)])), DEFAULT_LAMBDA_TOL).unwrap();
    assert!((check.lambda_max - r.objective).abs() < 1e-7);

    let ok = feasible_cr(&spec(&a, &[pos(1, 3)]), 6.62, &opts()).unwrap();
    assert_eq!(ok.status, SolveStatus::Feasible);
    let no = feasible_cr(&spec(&a, &[pos(1, 2)]), 6.62, &opts()).unwrap();
    assert_eq!(no.status, SolveStatus::Infeasible);
}

#[test]
fn cr_boundary_threshold_is_feasible_at_base() {
    let a = fixtures::a3();
    let l = lambda_max(&a, DEFAULT_LAMBDA_TOL).unwrap().lambda_max;
    let r = feasible_cr(&spec(&a, &[]), l, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible);
    assert_eq!(r.iterations, 0);
}

#[test]
fn cm_examples() {
    let all = min_cm(&spec(&fixtures::a2(), &positions(6))).unwrap();
    assert!(all.objective.abs() < 1e-12);

    let t = triad(2.0, 8.0, 2.0);
    let none = min_cm(&spec(&t, &[])).unwrap();
    assert!((none.objective - 2f64.ln()).abs() < 1e-12);

    let r = min_cm(&spec(&t, &[pos(1, 3)])).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!(r.objective.abs() < 1e-12);
    assert!((r.x[0] - 4f64.ln()).abs() < 1e-12);
}

#[test]
fn cm_feasibility_examples() {
    let consistent = ComparisonMatrix::from_weights(&[3.0, 1.0, 0.5, 2.0]).unwrap();
    let r = feasible_cm(&spec(&consistent, &[pos(1, 4)]), 0.0).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible);

    let t = triad(2.0, 8.0, 2.0);
    assert_eq!(
        feasible_cm(&spec(&t, &[]), 0.5).unwrap().status,
        SolveStatus::Infeasible
    );

    let s = spec(&t, &[pos(2, 3)]);
    let r = feasible_cm(&s, 0.0).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible);
    // 2 * a_23 = 8
    assert!((r.x[0] - 4f64.ln()).abs() < 1e-12);
    assert!(r.witness(&s).is_consistent(1e-12));
}

#[test]
fn ci_examples() {
    let all = min_ci(&spec(&fixtures::a2(), &positions(6)), &opts()).unwrap();
    assert!((all.objective - 40.0).abs() < 1e-7, "{}", all.objective);

    let t = triad(1.0, 2.0, 1.0);
    let none = min_ci(&spec(&t, &[]), &opts()).unwrap();
    assert!((none.objective - 2.5).abs() < 1e-15);

    let r = min_ci(&spec(&t, &[pos(1, 3)]), &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective - 2.0).abs() < 1e-10);
    assert!((r.x[0] - 0.0).abs() < 1e-5, "{}", r.x[0]);
}

#[test]
fn ci_one_free_cell_oracle() {
    // One free cell x enters a single triad: e^{x - ln 2} + e^{ln 2 - x}, min 2 at x = ln 2.
    let t = triad(1.0, 2.0, 1.0);
    let r = min_ci(&spec(&t, &[pos(1, 2)]), &opts()).unwrap();
    assert!((r.objective - 2.0).abs() < 1e-10);
    assert!((r.x[0] - 2f64.ln()).abs() < 1e-5);
}

#[test]
fn ci_feasibility_examples() {
    let consistent = ComparisonMatrix::from_weights(&[3.0, 1.0, 0.5, 2.0]).unwrap();
    let r = feasible_ci(&spec(&consistent, &[]), 8.0, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible);

    let t = triad(1.0, 2.0, 1.0);
    assert_eq!(
        feasible_ci(&spec(&t, &[]), 2.4, &opts()).unwrap().status,
        SolveStatus::Infeasible
    );
    let s = spec(&t, &[pos(1, 2)]);
    let r = feasible_ci(&s, 2.0, &opts()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible);
    assert!(r.objective <= 2.0 + FEASIBILITY_TOL);
}

/// Exact `min_x max_t |c_t + e_t x|` over `[-m, m]`: the optimum of a
/// piecewise-linear convex function sits at a bound or a crossing point.
fn one_dimensional_cm(lines: &[(f64, f64)], m: f64) -> f64 {
    let eval = |x: f64| lines.iter().map(|(c, e)| (c + e * x).abs()).fold(0.0, f64::max);
    let mut candidates = vec![-m, m];
    for &(c1, e1) in lines {
        for &(c2, e2) in lines {
            for sign in [1.0, -1.0] {
                let de = e1 - sign * e2;
                if de != 0.0 {
                    candidates.push((sign * c2 - c1) / de);
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(|x| eval(x.clamp(-m, m)))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn cm_matches_closed_form_on_one_free_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [3, 4, 5] {
        for _ in 0..60 {
            let base = random_log(&mut rng, n, 2.0);
            let p = positions(n)[rng.random_range(0..upper_len(n))];
            let m = rng.random_range(2.0..3.5);
            let bound = ScaleBound::new(f64::exp(m)).unwrap();
            let s = SubproblemSpec::new(base, [p], bound).unwrap();
            let lines: Vec<(f64, f64)> = s
                .linear_triads()
                .iter()
                .map(|t| (t.constant, t.terms.first().map_or(0.0, |x| x.1)))
                .collect();
            let oracle = one_dimensional_cm(&lines, bound.log_bound());
            let r = min_cm(&s).unwrap();
            assert!(
                (r.objective - oracle).abs() < 1e-12,
                "{} vs {oracle}",
                r.objective
            );
        }
    }
}

#[test]
fn ci_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.random_range(3..=6);
        let s = SubproblemSpec::new(random_log(&mut rng, n, 1.5), positions(n), ScaleBound::SAATY).unwrap();
        let tri = s.linear_triads();
        let x: Vec<f64> = (0..upper_len(n)).map(|_| rng.random_range(-1.5..1.5)).collect();
        let (_, g) = ci_objective_grad(&tri, &x);
        let h = 1e-6;
        for p in 0..x.len() {
            let mut xp = x.clone();
            xp[p] += h;
            let mut xm = x.clone();
            xm[p] -= h;
            let fd = (ci_objective_grad(&tri, &xp).0 - ci_objective_grad(&tri, &xm).0) / (2.0 * h);
            assert!(
                (fd - g[p]).abs() <= 1e-5 * g[p].abs().max(1.0),
                "{fd} vs {}",
                g[p]
            );
        }
    }
}

#[test]
fn enlarging_the_free_set_never_hurts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..15 {
        let n = rng.random_range(3..=5);
        let base = random_log(&mut rng, n, 9f64.ln());
        let small = random_free(&mut rng, n);
        let mut large = small.clone();
        large.extend(random_free(&mut rng, n));
        for kind in IndexKind::ALL {
            let a = minimize(
                kind,
                &SubproblemSpec::new(base.clone(), small.clone(), ScaleBound::SAATY).unwrap(),
                &opts(),
            )
            .unwrap();
            let b = minimize(
                kind,
                &SubproblemSpec::new(base.clone(), large.clone(), ScaleBound::SAATY).unwrap(),
                &opts(),
            )
            .unwrap();
            assert!(
                b.objective <= a.objective + 1e-8,
                "{kind}: {} > {}",
                b.objective,
                a.objective
            );
        }
    }
}

#[test]
fn feasible_witnesses_satisfy_the_index() {
    let ri = RandomIndexTable::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = 0;
    for _ in 0..30 {
        let n = rng.random_range(3..=5);
        let base = random_log(&mut rng, n, 9f64.ln());
        let free = random_free(&mut rng, n);
        let s = SubproblemSpec::new(base, free, ScaleBound::SAATY).unwrap();
        for kind in IndexKind::ALL {
            let alpha = 0.1;
            let star = kind.threshold_transform(alpha, n, &ri).unwrap();
            let r = feasible(kind, &s, star, &opts()).unwrap();
            if r.is_feasible() {
                seen += 1;
                let w = r.witness(&s);
                let value = indices::index_value(kind, &w, &ri).unwrap();
                assert!(value <= alpha + 1e-6, "{kind}: {value}");
                assert!(w.within(s.bound()));
                let ev = kind.functional(&w).unwrap();
                assert!((ev - r.objective).abs() < 1e-9, "{kind}: {ev} vs {}", r.objective);
            }
        }
    }
    assert!(seen > 10);
}

#[test]
fn random_starts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 5;
    let s = SubproblemSpec::new(
        random_log(&mut rng, n, 2.0),
        random_free(&mut rng, n),
        ScaleBound::SAATY,
    )
    .unwrap();
    let m = s.bound().log_bound();
    for kind in [IndexKind::Cr, IndexKind::Ci] {
        let reference = minimize(kind, &s, &opts()).unwrap().objective;
        for _ in 0..10 {
            let start = (0..s.free().len()).map(|_| rng.random_range(-m..m)).collect();
            let o = SolverOptions {
                start: Some(start),
                ..opts()
            };
            let r = minimize(kind, &s, &o).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            assert!(
                (r.objective - reference).abs() <= 10.0 * o.tol,
                "{kind}: {} vs {reference}",
                r.objective
            );
        }
    }
}

#[test]
fn reports_serialise() {
    let r = min_lambda_cr(&spec(&fixtures::a2(), &[pos(1, 3)]), &opts()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["positions"][0], serde_json::json!([1, 3]));
    assert!(v["aux"]["z"].is_array());
}
