//! Property tests over random matrices.

use proptest::prelude::*;

use crate::convex::{self, SolverOptions, SubproblemSpec};
use crate::indices::{self, IndexKind, RandomIndexTable, SAATY_SCALE};
use crate::pcm::format::{self, MatrixFormat};
use crate::pcm::{distance, positions, upper_len, ComparisonMatrix, LogMatrix, Position, ScaleBound};
use crate::reduce::{self, ReductionQuery, SearchOptions};

fn saaty_matrix(orders: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ComparisonMatrix> {
    orders.prop_flat_map(|n| {
        prop::collection::vec(0..SAATY_SCALE.len(), upper_len(n)).prop_map(move |idx| {
            let upper: Vec<f64> = idx.iter().map(|&i| SAATY_SCALE[i]).collect();
            ComparisonMatrix::from_upper(n, &upper).unwrap()
        })
    })
}

fn log_matrix(n: usize) -> impl Strategy<Value = LogMatrix> {
    let m = 9f64.ln();
    prop::collection::vec(-m..m, upper_len(n)).prop_map(move |u| LogMatrix::from_upper(n, &u).unwrap())
}

fn free_mask(n: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), upper_len(n))
}

fn cells(mask: &[bool], n: usize) -> Vec<Position> {
    positions(n)
        .into_iter()
        .zip(mask)
        .filter(|(_, &f)| f)
        .map(|(p, _)| p)
        .collect()
}

/// Simultaneous permutation of rows and columns.
fn permute(a: &ComparisonMatrix, perm: &[usize]) -> ComparisonMatrix {
    let rows: Vec<Vec<f64>> = perm
        .iter()
        .map(|&i| perm.iter().map(|&j| a.get(i, j)).collect())
        .collect();
    ComparisonMatrix::validate(&rows, 1e-9).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reciprocity_and_skew_symmetry(a in saaty_matrix(3..=8)) {
        let x = a.to_log();
        for i in 0..a.n() {
            prop_assert_eq!(a.get(i, i), 1.0);
            for j in 0..a.n() {
                prop_assert!((a.get(i, j) * a.get(j, i) - 1.0).abs() < 1e-15);
                prop_assert_eq!(x.get(i, j), -x.get(j, i));
            }
        }
    }

    #[test]
    fn formats_round_trip(a in saaty_matrix(3..=7)) {
        for f in [MatrixFormat::DenseJson, MatrixFormat::UpperJson, MatrixFormat::Csv] {
            let back = format::parse(&format::serialize(&a, f), f).unwrap();
            prop_assert_eq!(back.upper(), a.upper());
        }
    }

    #[test]
    fn distance_is_a_metric(a in saaty_matrix(5..=5), b in saaty_matrix(5..=5), c in saaty_matrix(5..=5)) {
        let d = |x: &ComparisonMatrix, y: &ComparisonMatrix| distance(x, y, 0.0).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert_eq!(d(&a, &b) == 0, a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn indices_are_nonnegative_and_vanish_only_when_consistent(a in saaty_matrix(3..=7)) {
        let ri = RandomIndexTable::default();
        let consistent = a.is_consistent(1e-9);
        for kind in IndexKind::ALL {
            let v = indices::index_value(kind, &a, &ri).unwrap();
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v <= 1e-9, consistent, "{} = {}", kind, v);
        }
        prop_assert!(indices::cm(&a).value < 1.0);
    }

    #[test]
    fn cm_formulas_agree(a in saaty_matrix(3..=7)) {
        let e = indices::triad::cm_evaluate(&a);
        prop_assert!((e.value - (1.0 - (-e.z_opt).exp())).abs() <= 1e-12);
    }

    #[test]
    fn indices_ignore_relabelling(a in saaty_matrix(4..=6), seed in any::<u64>()) {
        let n = a.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b = permute(&a, &perm);
        let ri = RandomIndexTable::default();
        for kind in IndexKind::ALL {
            let va = indices::index_value(kind, &a, &ri).unwrap();
            let vb = indices::index_value(kind, &b, &ri).unwrap();
            prop_assert!((va - vb).abs() < 1e-9, "{}: {} vs {}", kind, va, vb);
        }
    }

    #[test]
    fn estimator_is_deterministic(seed in any::<u64>()) {
        let a = indices::estimate_ri(4, 50, seed).unwrap();
        prop_assert_eq!(a.to_bits(), indices::estimate_ri(4, 50, seed).unwrap().to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn freeing_more_never_hurts(x in log_matrix(4), small in free_mask(4), extra in free_mask(4)) {
        let large: Vec<bool> = small.iter().zip(&extra).map(|(a, b)| *a || *b).collect();
        let o = SolverOptions::default();
        for kind in IndexKind::ALL {
            let s = SubproblemSpec::new(x.clone(), cells(&small, 4), ScaleBound::SAATY).unwrap();
            let l = SubproblemSpec::new(x.clone(), cells(&large, 4), ScaleBound::SAATY).unwrap();
            let a = convex::minimize(kind, &s, &o).unwrap().objective;
            let b = convex::minimize(kind, &l, &o).unwrap().objective;
            prop_assert!(b <= a + 1e-8, "{}: {} > {}", kind, b, a);
        }
    }

    #[test]
    fn witnesses_meet_the_threshold(a in saaty_matrix(4..=4), alpha in 0.0..0.3f64) {
        let opts = SearchOptions { parallel: false, ..SearchOptions::default() };
        for kind in IndexKind::ALL {
            let q = ReductionQuery::min_changes(a.clone(), kind, alpha);
            let r = reduce::enumerate_optimal(&q, &opts).unwrap();
            let reduce::Outcome::MinChanges { solutions, l_star, .. } = &r.outcome else { unreachable!() };
            prop_assert!(!solutions.is_empty());
            let sets = r.position_sets();
            let mut sorted = sets.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(&sorted, &sets);
            for s in solutions {
                prop_assert_eq!(s.positions.len(), *l_star);
                prop_assert_eq!(distance(&a, &s.witness, 1e-9).unwrap(), *l_star);
                prop_assert!(s.index_value <= alpha + reduce::ACCEPTANCE_TOL, "{}: {}", kind, s.index_value);
                prop_assert!(s.witness.within(ScaleBound::SAATY));
            }
        }
    }

    #[test]
    fn the_two_modes_are_dual(a in saaty_matrix(4..=4), alpha in 0.0..0.3f64) {
        let opts = SearchOptions { parallel: false, ..SearchOptions::default() };
        for kind in IndexKind::ALL {
            let l = reduce::min_changes(&ReductionQuery::min_changes(a.clone(), kind, alpha), &opts)
                .unwrap()
                .l_star()
                .unwrap();
            let r = reduce::min_index(&ReductionQuery::min_index(a.clone(), kind, l), &opts).unwrap();
            prop_assert!(r.alpha_opt().unwrap() <= alpha + reduce::ACCEPTANCE_TOL);
            if l > 0 {
                let below = reduce::min_index(&ReductionQuery::min_index(a.clone(), kind, l - 1), &opts).unwrap();
                prop_assert!(below.alpha_opt().unwrap() > alpha - reduce::ACCEPTANCE_TOL);
            }
        }
    }

    #[test]
    fn oracle_matches_min_index(a in saaty_matrix(4..=4), budget in 1usize..=2) {
        let opts = SearchOptions { parallel: false, ..SearchOptions::default() };
        for kind in IndexKind::ALL {
            let q = ReductionQuery::min_index(a.clone(), kind, budget);
            let e = reduce::min_index(&q, &opts).unwrap().alpha_opt().unwrap();
            let b = reduce::bigm_oracle(&q, &reduce::OracleOptions::default()).unwrap().alpha_opt().unwrap();
            prop_assert!((e - b).abs() < 1e-6, "{} K={}: {} vs {}", kind, budget, e, b);
        }
    }
}
