//! Pairwise comparison matrices and their logarithmic image.
//!
//! A [`ComparisonMatrix`] is a positive reciprocal `n x n` matrix. Taking
//! elementwise natural logarithms maps it onto a skew-symmetric
//! [`LogMatrix`], where consistency becomes the linear condition
//! `x_ij + x_jk + x_ki = 0` on every triad.
//!
//! Indices are stored 0-based; everything that leaves the crate (display,
//! serde, error messages) is 1-based.

pub mod format;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default relative tolerance on `|a_ij * a_ji - 1|` accepted by [`ComparisonMatrix::validate`].
pub const DEFAULT_RECIPROCITY_TOL: f64 = 1e-6;

/// Default log-space tolerance used by [`distance`].
pub const DEFAULT_DISTANCE_TOL: f64 = 1e-9;

/// Number of upper-triangle cells of an `n x n` matrix.
pub fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Number of triads `C(n, 3)`.
pub fn triad_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// An upper-triangle cell `(i, j)` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    row: usize,
    col: usize,
}

impl Position {
    /// 0-based constructor. Panics unless `row < col`.
    pub fn new(row: usize, col: usize) -> Self {
        assert!(row < col, "position requires row < col, got ({row}, {col})");
        Self { row, col }
    }

    /// 1-based constructor matching the external notation `a_ij`.
    pub fn one_based(i: usize, j: usize) -> Result<Self> {
        if i == 0 || i >= j {
            return Err(Error::InadmissibleQuery(format!(
                "({i},{j}) is not an upper-triangle position"
            )));
        }
        Ok(Self {
            row: i - 1,
            col: j - 1,
        })
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn col(&self) -> usize {
        self.col
    }

    /// Index of this cell in the row-major upper-triangle ordering.
    pub fn linear_index(&self, n: usize) -> usize {
        self.row * n - self.row * (self.row + 1) / 2 + (self.col - self.row - 1)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row + 1, self.col + 1)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.row + 1, self.col + 1].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [i, j] = <[usize; 2]>::deserialize(deserializer)?;
        Position::one_based(i, j).map_err(serde::de::Error::custom)
    }
}

/// All upper-triangle positions of an `n x n` matrix in lexicographic order.
pub fn positions(n: usize) -> Vec<Position> {
    (0..n)
        .flat_map(|row| (row + 1..n).map(move |col| Position { row, col }))
        .collect()
}

/// A triad `i < j < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriadIndex {
    i: usize,
    j: usize,
    k: usize,
}

impl TriadIndex {
    /// 0-based constructor. Panics unless `i < j < k`.
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        assert!(i < j && j < k, "triad requires i < j < k");
        Self { i, j, k }
    }

    pub fn indices(&self) -> (usize, usize, usize) {
        (self.i, self.j, self.k)
    }

    /// The three cells `(i,j)`, `(j,k)`, `(i,k)` of the triad.
    pub fn cells(&self) -> [Position; 3] {
        [
            Position::new(self.i, self.j),
            Position::new(self.j, self.k),
            Position::new(self.i, self.k),
        ]
    }
}

impl fmt::Display for TriadIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i + 1, self.j + 1, self.k + 1)
    }
}

impl Serialize for TriadIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.i + 1, self.j + 1, self.k + 1].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TriadIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [i, j, k] = <[usize; 3]>::deserialize(deserializer)?;
        if i == 0 || i >= j || j >= k {
            return Err(serde::de::Error::custom("triad requires 1 <= i < j < k"));
        }
        Ok(TriadIndex {
            i: i - 1,
            j: j - 1,
            k: k - 1,
        })
    }
}

/// Lexicographically ordered triads of an `n x n` matrix.
pub fn triads(n: usize) -> Result<Vec<TriadIndex>> {
    if n < 3 {
        return Err(Error::OrderTooSmall { n });
    }
    let mut out = Vec::with_capacity(triad_count(n));
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push(TriadIndex { i, j, k });
            }
        }
    }
    Ok(out)
}

/// Upper bound `M` on entry values; admissible entries lie in `[1/M, M]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ScaleBound(f64);

impl ScaleBound {
    /// The Saaty scale bound used by default.
    pub const SAATY: ScaleBound = ScaleBound(9.0);

    pub fn new(m: f64) -> Result<Self> {
        if m.is_finite() && m >= 1.0 {
            Ok(Self(m))
        } else {
            Err(Error::InvalidBound(m))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `ln M`, the box half-width in log space.
    pub fn log_bound(&self) -> f64 {
        self.0.ln()
    }

    /// Whether `value` lies in `[1/M, M]`, up to a few ulps.
    pub fn admits(&self, value: f64) -> bool {
        let lb = self.log_bound();
        value.ln().abs() <= lb + 1e-12 * lb.max(1.0)
    }
}

impl Default for ScaleBound {
    fn default() -> Self {
        Self::SAATY
    }
}

impl TryFrom<f64> for ScaleBound {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Self::new(m)
    }
}

impl From<ScaleBound> for f64 {
    fn from(b: ScaleBound) -> f64 {
        b.0
    }
}

/// A validated positive reciprocal matrix.
///
/// The upper triangle is authoritative: the lower triangle always holds the
/// exact reciprocals and the diagonal is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ComparisonMatrix {
    /// Validates a raw square grid.
    ///
    /// Every entry must be positive and finite and every pair must satisfy
    /// `|a_ij * a_ji - 1| <= tol`. The result keeps the upper triangle and
    /// overwrites the rest with reciprocals.
    pub fn validate<R: AsRef<[f64]>>(raw: &[R], tol: f64) -> Result<Self> {
        let n = raw.len();
        for (row, r) in raw.iter().enumerate() {
            if r.as_ref().len() != n {
                return Err(Error::NotSquare {
                    row: row + 1,
                    len: r.as_ref().len(),
                    expected: n,
                });
            }
        }
        if n < 3 {
            return Err(Error::OrderTooSmall { n });
        }
        for (i, r) in raw.iter().enumerate() {
            for (j, &v) in r.as_ref().iter().enumerate() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::NonPositiveEntry { i: i + 1, j: j + 1 });
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let p = raw[i].as_ref()[j] * raw[j].as_ref()[i];
                if (p - 1.0).abs() > tol {
                    return Err(Error::ReciprocityViolation { i: i + 1, j: j + 1 });
                }
            }
        }
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            for j in i + 1..n {
                upper.push(raw[i].as_ref()[j]);
            }
        }
        Self::from_upper(n, &upper)
    }

    /// Builds a matrix from its row-major upper triangle (`i < j`).
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if n < 3 {
            return Err(Error::OrderTooSmall { n });
        }
        if upper.len() != upper_len(n) {
            return Err(Error::InadmissibleQuery(format!(
                "upper triangle of order {n} needs {} entries, got {}",
                upper_len(n),
                upper.len()
            )));
        }
        let mut data = vec![1.0; n * n];
        for (p, &v) in positions(n).iter().zip(upper) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveEntry {
                    i: p.row + 1,
                    j: p.col + 1,
                });
            }
            data[p.row * n + p.col] = v;
            data[p.col * n + p.row] = 1.0 / v;
        }
        Ok(Self { n, data })
    }

    /// The consistent matrix `a_ij = w_i / w_j` of a positive weight vector.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        let upper: Vec<f64> = positions(n)
            .iter()
            .map(|p| weights[p.row] / weights[p.col])
            .collect();
        Self::from_upper(n, &upper)
    }

    /// All-ones matrix of order `n`.
    pub fn ones(n: usize) -> Result<Self> {
        Self::from_upper(n, &vec![1.0; upper_len(n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `a_ij`, 0-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn at(&self, p: Position) -> f64 {
        self.get(p.row, p.col)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        positions(self.n).iter().map(|&p| self.at(p)).collect()
    }

    /// Copy with `a_p` set to `value` and its reciprocal updated.
    pub fn with_entry(&self, p: Position, value: f64) -> Result<Self> {
        if p.col >= self.n {
            return Err(Error::InvalidPosition(p));
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveEntry {
                i: p.row + 1,
                j: p.col + 1,
            });
        }
        let mut out = self.clone();
        out.data[p.row * self.n + p.col] = value;
        out.data[p.col * self.n + p.row] = 1.0 / value;
        Ok(out)
    }

    pub fn to_log(&self) -> LogMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for p in positions(n) {
            let x = self.at(p).ln();
            data[p.row * n + p.col] = x;
            data[p.col * n + p.row] = -x;
        }
        LogMatrix { n, data }
    }

    /// Whether every triad satisfies `|x_ij + x_jk + x_ki| <= tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        self.to_log().max_triad_deviation() <= tol
    }

    /// Whether every entry lies within `[1/M, M]`.
    pub fn within(&self, bound: ScaleBound) -> bool {
        self.upper().iter().all(|&v| bound.admits(v))
    }
}

/// A skew-symmetric matrix of log judgments.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMatrix {
    n: usize,
    data: Vec<f64>,
}

impl LogMatrix {
    /// Builds a skew-symmetric matrix from its upper triangle.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if n < 3 {
            return Err(Error::OrderTooSmall { n });
        }
        if upper.len() != upper_len(n) {
            return Err(Error::InadmissibleQuery(format!(
                "upper triangle of order {n} needs {} entries, got {}",
                upper_len(n),
                upper.len()
            )));
        }
        let mut data = vec![0.0; n * n];
        for (p, &v) in positions(n).iter().zip(upper) {
            data[p.row * n + p.col] = v;
            data[p.col * n + p.row] = -v;
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_upper(n, &vec![0.0; upper_len(n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn at(&self, p: Position) -> f64 {
        self.get(p.row, p.col)
    }

    pub fn set(&mut self, p: Position, value: f64) {
        self.data[p.row * self.n + p.col] = value;
        self.data[p.col * self.n + p.row] = -value;
    }

    pub fn upper(&self) -> Vec<f64> {
        positions(self.n).iter().map(|&p| self.at(p)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `x_ij + x_jk + x_ki` for the triad `i < j < k`.
    #[inline]
    pub fn triad_sum(&self, t: TriadIndex) -> f64 {
        self.get(t.i, t.j) + self.get(t.j, t.k) - self.get(t.i, t.k)
    }

    /// `max |x_ij + x_jk + x_ki|` over all triads.
    pub fn max_triad_deviation(&self) -> f64 {
        triads(self.n)
            .map(|ts| {
                ts.into_iter()
                    .map(|t| self.triad_sum(t).abs())
                    .fold(0.0, f64::max)
            })
            .unwrap_or(0.0)
    }

    /// Elementwise `exp`, the inverse of [`ComparisonMatrix::to_log`].
    pub fn to_matrix(&self) -> ComparisonMatrix {
        let n = self.n;
        let mut data = vec![1.0; n * n];
        for p in positions(n) {
            let x = self.at(p);
            data[p.row * n + p.col] = x.exp();
            data[p.col * n + p.row] = (-x).exp();
        }
        ComparisonMatrix { n, data }
    }

    /// Midpoint `(self + other) / 2`.
    pub fn midpoint(&self, other: &LogMatrix) -> Result<LogMatrix> {
        if self.n != other.n {
            return Err(Error::OrderMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let upper: Vec<f64> = self
            .upper()
            .iter()
            .zip(other.upper())
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        LogMatrix::from_upper(self.n, &upper)
    }
}

/// Upper-triangle cells where `a` and `b` differ by more than `tol` in log space.
pub fn differing_positions(a: &ComparisonMatrix, b: &ComparisonMatrix, tol: f64) -> Result<Vec<Position>> {
    if a.n != b.n {
        return Err(Error::OrderMismatch {
            left: a.n,
            right: b.n,
        });
    }
    Ok(positions(a.n)
        .into_iter()
        .filter(|&p| (a.at(p).ln() - b.at(p).ln()).abs() > tol)
        .collect())
}

/// Number of upper-triangle cells where the matrices differ.
pub fn distance(a: &ComparisonMatrix, b: &ComparisonMatrix, tol: f64) -> Result<usize> {
    differing_positions(a, b, tol).map(|d| d.len())
}
