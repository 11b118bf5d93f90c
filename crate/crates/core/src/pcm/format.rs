//! Text formats: dense JSON, upper-triangle JSON and CSV.
//!
//! ```text
//! dense JSON      [[1,2,4],[0.5,1,2],[0.25,0.5,1]]
//! upper JSON      {"n":3,"upper":[2,4,2]}
//! CSV             n=3
//!                 1,2,4
//!                 1/2,1,2
//!                 1/4,1/2,1
//! ```
//!
//! JSON output uses the shortest round-trip representation of each `f64`,
//! so serialization is lossless. CSV cells accept fractions `p/q`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ComparisonMatrix, DEFAULT_RECIPROCITY_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixFormat {
    DenseJson,
    UpperJson,
    Csv,
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" | "dense-json" | "json" => Ok(Self::DenseJson),
            "upper" | "upper-json" => Ok(Self::UpperJson),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Parse {
                line: 0,
                column: 0,
                message: format!("unknown matrix format `{other}`"),
            }),
        }
    }
}

/// Upper-triangle JSON payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperTriangle {
    pub n: usize,
    pub upper: Vec<f64>,
}

/// Either JSON shape, as accepted on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Dense(Vec<Vec<f64>>),
    Upper(UpperTriangle),
}

impl MatrixInput {
    pub fn into_matrix(self) -> Result<ComparisonMatrix> {
        match self {
            MatrixInput::Dense(rows) => ComparisonMatrix::validate(&rows, DEFAULT_RECIPROCITY_TOL),
            MatrixInput::Upper(u) => ComparisonMatrix::from_upper(u.n, &u.upper),
        }
    }
}

impl From<&ComparisonMatrix> for MatrixInput {
    fn from(a: &ComparisonMatrix) -> Self {
        MatrixInput::Dense(a.rows())
    }
}

/// Dense rows on output; either JSON shape, validated, on input.
impl Serialize for ComparisonMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComparisonMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MatrixInput::deserialize(d)?
            .into_matrix()
            .map_err(serde::de::Error::custom)
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses `text` in the given format and validates the result.
pub fn parse(text: &str, format: MatrixFormat) -> Result<ComparisonMatrix> {
    match format {
        MatrixFormat::DenseJson => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(json_error)?;
            ComparisonMatrix::validate(&rows, DEFAULT_RECIPROCITY_TOL)
        }
        MatrixFormat::UpperJson => {
            let u: UpperTriangle = serde_json::from_str(text).map_err(json_error)?;
            ComparisonMatrix::from_upper(u.n, &u.upper)
        }
        MatrixFormat::Csv => parse_csv(text),
    }
}

/// Guesses the format from the first non-blank character.
pub fn detect(text: &str) -> MatrixFormat {
    match text.trim_start().chars().next() {
        Some('[') => MatrixFormat::DenseJson,
        Some('{') => MatrixFormat::UpperJson,
        _ => MatrixFormat::Csv,
    }
}

pub fn parse_auto(text: &str) -> Result<ComparisonMatrix> {
    parse(text, detect(text))
}

pub fn serialize(a: &ComparisonMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::DenseJson => serde_json::to_string(&a.rows()).expect("finite floats"),
        MatrixFormat::UpperJson => serde_json::to_string(&UpperTriangle {
            n: a.n(),
            upper: a.upper(),
        })
        .expect("finite floats"),
        MatrixFormat::Csv => {
            let mut out = format!("n={}\n", a.n());
            for row in a.rows() {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            out
        }
    }
}

fn parse_cell(cell: &str, line: usize, column: usize) -> Result<f64> {
    let err = |message: String| Error::Parse {
        line,
        column,
        message,
    };
    let cell = cell.trim();
    if cell.is_empty() {
        return Err(err("empty cell".into()));
    }
    match cell.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| err(format!("bad numerator in `{cell}`")))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| err(format!("bad denominator in `{cell}`")))?;
            Ok(num / den)
        }
        None => cell.parse().map_err(|_| err(format!("`{cell}` is not a number"))),
    }
}

fn parse_csv(text: &str) -> Result<ComparisonMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, l)| (idx + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty input".into(),
    })?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            line: hline,
            column: 1,
            message: format!("expected header `n=<order>`, got `{header}`"),
        })?;
    let mut rows = Vec::with_capacity(n);
    for (line, l) in lines.by_ref().take(n) {
        let row = l
            .split(',')
            .enumerate()
            .map(|(c, cell)| parse_cell(cell, line, c + 1))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != n {
            return Err(Error::Parse {
                line,
                column: row.len().min(n) + 1,
                message: format!("expected {n} cells, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            column: 1,
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse {
            line,
            column: 1,
            message: "unexpected trailing row".into(),
        });
    }
    ComparisonMatrix::validate(&rows, DEFAULT_RECIPROCITY_TOL)
}
