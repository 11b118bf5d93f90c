//! Text and JSON output. Text rounds to four decimals; JSON keeps full precision.

use pcm_core::indices::{IndexDetail, IndexReport};
use pcm_core::reduce::{Outcome, ReductionQuery, ReductionResult, Solution};
use pcm_core::{ComparisonMatrix, Position};
use serde_json::{Map, Value};

pub fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable")
}

/// One report as-is; several as an object keyed by index name.
pub fn reports_json(reports: &[IndexReport]) -> String {
    if let [single] = reports {
        return json(single);
    }
    let map: Map<String, Value> = reports
        .iter()
        .map(|r| {
            (
                r.kind.to_string().to_lowercase(),
                serde_json::to_value(r).expect("serialisable"),
            )
        })
        .collect();
    json(&map)
}

pub fn reports(a: &ComparisonMatrix, reports: &[IndexReport]) -> String {
    let mut lines: Vec<String> = reports
        .iter()
        .map(|r| {
            let name = r.kind.to_string().to_uppercase();
            match &r.detail {
                IndexDetail::Cr { lambda_max, .. } => {
                    format!("{name} = {:.4}, lambda_max = {lambda_max:.4}", r.value)
                }
                IndexDetail::Cm { worst_triad, .. } => {
                    format!("{name} = {:.4}, worst triad = {worst_triad}", r.value)
                }
                IndexDetail::Ci { determinants } => {
                    let worst = determinants
                        .iter()
                        .max_by(|p, q| p.det.total_cmp(&q.det).then(q.triad.cmp(&p.triad)));
                    match worst {
                        Some(w) => format!(
                            "{name} = {:.4}, worst triad = {} (det {:.4})",
                            r.value, w.triad, w.det
                        ),
                        None => format!("{name} = {:.4}", r.value),
                    }
                }
            }
        })
        .collect();
    if a.is_consistent(pcm_core::indices::CONSISTENCY_TOL) {
        lines.push("consistent".into());
    }
    lines.join("\n")
}

pub fn set(positions: &[Position]) -> String {
    let cells: Vec<String> = positions.iter().map(Position::to_string).collect();
    format!("{{{}}}", cells.join(", "))
}

fn cells(s: &Solution, witness: &ComparisonMatrix) -> String {
    s.positions
        .iter()
        .map(|&p| format!("a_{}{} = {:.4}", p.row() + 1, p.col() + 1, witness.at(p)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn solution_lines(q: &ReductionQuery, s: &Solution, out: &mut Vec<String>) {
    let name = q.kind.to_string().to_uppercase();
    let mut line = format!("  {}: {name} = {:.4}", set(&s.positions), s.index_value);
    if !s.positions.is_empty() {
        line.push_str(&format!("; {}", cells(s, &s.witness)));
    }
    out.push(line);
    if let Some(r) = &s.rounded {
        let verdict = match r.acceptable {
            Some(true) => " (acceptable)",
            Some(false) => " (not acceptable)",
            None => "",
        };
        out.push(format!(
            "    rounded: {name} = {:.4}; {}{verdict}",
            r.index_value,
            cells(s, &r.witness)
        ));
    }
}

pub fn reduction(q: &ReductionQuery, r: &ReductionResult) -> String {
    let Outcome::MinChanges {
        l_star, solutions, ..
    } = &r.outcome
    else {
        unreachable!("threshold query")
    };
    let sets: Vec<String> = solutions.iter().map(|s| set(&s.positions)).collect();
    let mut out = vec![format!("L*={l_star}; solutions: {}", sets.join(", "))];
    for s in solutions.iter().filter(|s| !s.positions.is_empty()) {
        solution_lines(q, s, &mut out);
    }
    out.join("\n")
}

pub fn minimization(q: &ReductionQuery, r: &ReductionResult) -> String {
    let Outcome::MinIndex {
        alpha_opt,
        best,
        ties,
        ..
    } = &r.outcome
    else {
        unreachable!("budget query")
    };
    let name = q.kind.to_string().to_uppercase();
    let mut out = vec![format!("{name}_opt = {alpha_opt:.4} at {}", set(&best.positions))];
    if !best.positions.is_empty() {
        solution_lines(q, best, &mut out);
    }
    if !ties.is_empty() {
        let sets: Vec<String> = ties.iter().map(|t| set(t)).collect();
        out.push(format!("  equally good freed sets: {}", sets.join(", ")));
    }
    out.join("\n")
}
