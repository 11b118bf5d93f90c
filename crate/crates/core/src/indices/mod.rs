//! Inconsistency indices CR, CM and CI, and the threshold transforms that turn
//! `index <= alpha` into a constraint on the log-space functional each index
//! is built from.
//!
//! | index | functional of `X = log A`                  | `alpha*`                       |
//! |-------|--------------------------------------------|--------------------------------|
//! | CR    | `lambda_max(exp X)`                        | `n + RI_n (n - 1) alpha`       |
//! | CM    | `max_t |x_ij + x_jk + x_ki|`               | `ln(1 / (1 - alpha))`          |
//! | CI    | `sum_t (e^{s_t} + e^{-s_t})`               | `(alpha + 2) C(n, 3)`          |

pub mod perron;
pub mod random_index;
pub mod triad;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcm::{triad_count, ComparisonMatrix, TriadIndex};

pub use perron::{lambda_max, Perron, DEFAULT_LAMBDA_TOL};
pub use random_index::{estimate_ri, RandomIndexTable, SAATY_SCALE};
pub use triad::{cm_triad, worst_triads, TriadDeterminant, TriadOffender};

/// Index values at or below this count as zero.
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Cr,
    Cm,
    Ci,
}

impl IndexKind {
    pub const ALL: [IndexKind; 3] = [IndexKind::Cr, IndexKind::Cm, IndexKind::Ci];

    /// Maps an acceptance threshold `alpha` to constraint units.
    pub fn threshold_transform(self, alpha: f64, n: usize, ri: &RandomIndexTable) -> Result<f64> {
        let bad = || Error::ThresholdOutOfRange {
            kind: self,
            value: alpha,
        };
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(bad());
        }
        match self {
            IndexKind::Cr => Ok(n as f64 + ri.get(n)? * (n as f64 - 1.0) * alpha),
            IndexKind::Cm if alpha < 1.0 => Ok((1.0 / (1.0 - alpha)).ln()),
            IndexKind::Cm => Err(bad()),
            IndexKind::Ci => Ok((alpha + 2.0) * triad_count(n) as f64),
        }
    }

    /// Maps an optimum in constraint units back to index units.
    pub fn back_transform(self, value: f64, n: usize, ri: &RandomIndexTable) -> Result<f64> {
        Ok(match self {
            IndexKind::Cr => (value - n as f64) / (ri.get(n)? * (n as f64 - 1.0)),
            IndexKind::Cm => 1.0 - (-value).exp(),
            IndexKind::Ci => value / triad_count(n) as f64 - 2.0,
        })
    }

    /// Value of the constraint functional for a concrete matrix.
    pub fn functional(self, a: &ComparisonMatrix) -> Result<f64> {
        Ok(match self {
            IndexKind::Cr => lambda_max(a, DEFAULT_LAMBDA_TOL)?.lambda_max,
            IndexKind::Cm => a.to_log().max_triad_deviation(),
            IndexKind::Ci => triad::ci_log_objective(&a.to_log()),
        })
    }

    /// Smallest value the functional can take (attained by consistent matrices).
    pub fn functional_floor(self, n: usize) -> f64 {
        match self {
            IndexKind::Cr => n as f64,
            IndexKind::Cm => 0.0,
            IndexKind::Ci => 2.0 * triad_count(n) as f64,
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexKind::Cr => "CR",
            IndexKind::Cm => "CM",
            IndexKind::Ci => "CI",
        })
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cr" => Ok(IndexKind::Cr),
            "cm" => Ok(IndexKind::Cm),
            "ci" => Ok(IndexKind::Ci),
            other => Err(Error::InadmissibleQuery(format!("unknown index `{other}`"))),
        }
    }
}

/// Acceptance threshold in index units and in constraint units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub alpha: f64,
    pub alpha_star: f64,
}

impl Thresholds {
    pub fn new(kind: IndexKind, alpha: f64, n: usize, ri: &RandomIndexTable) -> Result<Self> {
        Ok(Self {
            alpha,
            alpha_star: kind.threshold_transform(alpha, n, ri)?,
        })
    }
}

/// The ten percent rule with the order-specific refinements for 3x3 and 4x4.
pub fn saaty_cr_threshold(n: usize) -> f64 {
    match n {
        3 => 0.05,
        4 => 0.08,
        _ => 0.10,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IndexDetail {
    Cr {
        lambda_max: f64,
        random_index: f64,
        perron_vector: Vec<f64>,
    },
    Cm {
        worst_triad: TriadIndex,
        z_opt: f64,
    },
    Ci {
        determinants: Vec<TriadDeterminant>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub kind: IndexKind,
    pub value: f64,
    pub detail: IndexDetail,
}

impl IndexReport {
    pub fn is_acceptable(&self, alpha: f64) -> bool {
        self.value <= alpha
    }
}

pub fn cr(a: &ComparisonMatrix, ri: &RandomIndexTable) -> Result<IndexReport> {
    let n = a.n();
    let random_index = ri.get(n)?;
    let p = lambda_max(a, DEFAULT_LAMBDA_TOL)?;
    let value = ((p.lambda_max - n as f64) / ((n as f64 - 1.0) * random_index)).max(0.0);
    Ok(IndexReport {
        kind: IndexKind::Cr,
        value,
        detail: IndexDetail::Cr {
            lambda_max: p.lambda_max,
            random_index,
            perron_vector: p.vector,
        },
    })
}

pub fn cm(a: &ComparisonMatrix) -> IndexReport {
    let e = triad::cm_evaluate(a);
    IndexReport {
        kind: IndexKind::Cm,
        value: e.value,
        detail: IndexDetail::Cm {
            worst_triad: e.worst_triad,
            z_opt: e.z_opt,
        },
    }
}

pub fn ci(a: &ComparisonMatrix) -> IndexReport {
    let (value, determinants) = triad::ci_evaluate(a);
    IndexReport {
        kind: IndexKind::Ci,
        value,
        detail: IndexDetail::Ci { determinants },
    }
}

pub fn evaluate(kind: IndexKind, a: &ComparisonMatrix, ri: &RandomIndexTable) -> Result<IndexReport> {
    match kind {
        IndexKind::Cr => cr(a, ri),
        IndexKind::Cm => Ok(cm(a)),
        IndexKind::Ci => Ok(ci(a)),
    }
}

/// Just the index value; cheaper than [`evaluate`] for CI.
pub fn index_value(kind: IndexKind, a: &ComparisonMatrix, ri: &RandomIndexTable) -> Result<f64> {
    match kind {
        IndexKind::Cr => cr(a, ri).map(|r| r.value),
        IndexKind::Cm => Ok(triad::cm_evaluate(a).value),
        IndexKind::Ci => Ok(triad::ci_evaluate(a).0),
    }
}
