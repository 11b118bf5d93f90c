//! Triad-based indices: CM (Koczkodaj-Duszak) and CI (Pelaez-Lamata).
//!
//! A triad `(a, b, c) = (a_ij, a_ik, a_jk)` is consistent iff `a c = b`.
//! Its deviation in log space is `s = x_ij + x_jk - x_ik`.

use serde::{Deserialize, Serialize};

use crate::pcm::{triad_count, triads, ComparisonMatrix, LogMatrix, TriadIndex};

/// `(CM, T)` of a single triad.
///
/// CM uses the three-term relative-error minimum; `T = max{ac/b, b/(ac)}`.
pub fn cm_triad(a: f64, b: f64, c: f64) -> (f64, f64) {
    let cm = [
        (a - b / c).abs() / a,
        (b - a * c).abs() / b,
        (c - b / a).abs() / c,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let q = a * c / b;
    (cm, q.max(1.0 / q))
}

/// `T(exp X) = max over triads of exp(|x_ij + x_jk + x_ki|)`.
pub fn t_index(x: &LogMatrix) -> f64 {
    x.max_triad_deviation().exp()
}

/// Triad maximising the min-formula CM, its CM value, and the log-space optimum `z_opt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmEvaluation {
    pub value: f64,
    pub worst_triad: TriadIndex,
    pub z_opt: f64,
}

pub fn cm_evaluate(a: &ComparisonMatrix) -> CmEvaluation {
    let x = a.to_log();
    let mut best = (f64::NEG_INFINITY, TriadIndex::new(0, 1, 2));
    let mut z_opt = 0.0f64;
    for t in triads(a.n()).expect("validated order") {
        let (i, j, k) = t.indices();
        let (cm, _) = cm_triad(a.get(i, j), a.get(i, k), a.get(j, k));
        if cm > best.0 {
            best = (cm, t);
        }
        z_opt = z_opt.max(x.triad_sum(t).abs());
    }
    CmEvaluation {
        value: best.0,
        worst_triad: best.1,
        z_opt,
    }
}

/// `det` of the triad submatrix: `a_ik / (a_ij a_jk) + a_ij a_jk / a_ik - 2`.
pub fn triad_determinant(a: &ComparisonMatrix, t: TriadIndex) -> f64 {
    let (i, j, k) = t.indices();
    let q = a.get(i, j) * a.get(j, k) / a.get(i, k);
    (1.0 / q + q - 2.0).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadDeterminant {
    pub triad: TriadIndex,
    pub det: f64,
}

/// CI value and per-triad determinants.
pub fn ci_evaluate(a: &ComparisonMatrix) -> (f64, Vec<TriadDeterminant>) {
    let dets: Vec<TriadDeterminant> = triads(a.n())
        .expect("validated order")
        .into_iter()
        .map(|triad| TriadDeterminant {
            triad,
            det: triad_determinant(a, triad),
        })
        .collect();
    let value = dets.iter().map(|d| d.det).sum::<f64>() / triad_count(a.n()) as f64;
    (value, dets)
}

/// One triad's contribution to each index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadOffender {
    pub triad: TriadIndex,
    /// `|x_ij + x_jk - x_ik|`.
    pub log_deviation: f64,
    pub cm: f64,
    pub det: f64,
}

/// The `count` most inconsistent triads, largest log deviation first.
pub fn worst_triads(a: &ComparisonMatrix, count: usize) -> Vec<TriadOffender> {
    let x = a.to_log();
    let mut all: Vec<TriadOffender> = triads(a.n())
        .expect("validated order")
        .into_iter()
        .map(|t| {
            let (i, j, k) = t.indices();
            TriadOffender {
                triad: t,
                log_deviation: x.triad_sum(t).abs(),
                cm: cm_triad(a.get(i, j), a.get(i, k), a.get(j, k)).0,
                det: triad_determinant(a, t),
            }
        })
        .collect();
    all.sort_by(|p, q| {
        q.log_deviation
            .total_cmp(&p.log_deviation)
            .then(p.triad.cmp(&q.triad))
    });
    all.truncate(count);
    all
}

/// `sum over triads of (e^{-s} + e^{s})`, the CI constraint functional in log space.
pub fn ci_log_objective(x: &LogMatrix) -> f64 {
    triads(x.n())
        .expect("validated order")
        .into_iter()
        .map(|t| {
            let s = x.triad_sum(t);
            s.exp() + (-s).exp()
        })
        .sum()
}
