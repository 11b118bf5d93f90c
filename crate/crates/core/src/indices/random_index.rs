//! Random index table `RI_n` and its Monte Carlo estimator.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::perron::{lambda_max, DEFAULT_LAMBDA_TOL};
use crate::error::{Error, Result};
use crate::pcm::{upper_len, ComparisonMatrix};

/// The 17-point ratio scale `1/9, ..., 1/2, 1, 2, ..., 9`.
pub const SAATY_SCALE: [f64; 17] = [
    1.0 / 9.0,
    1.0 / 8.0,
    1.0 / 7.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    1.0 / 3.0,
    1.0 / 2.0,
    1.0,
    2.0,
    3.0,
    4.0,
    5.0,
    6.0,
    7.0,
    8.0,
    9.0,
];

/// Published random indices for `n = 3..=9`.
const SAATY_RI: [(usize, f64); 7] = [
    (3, 0.58),
    (4, 0.90),
    (5, 1.12),
    (6, 1.24),
    (7, 1.32),
    (8, 1.41),
    (9, 1.45),
];

/// Map `n -> RI_n`. Serialises as a JSON object `{"3": 0.58, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomIndexTable(BTreeMap<usize, f64>);

impl Default for RandomIndexTable {
    fn default() -> Self {
        Self(SAATY_RI.into_iter().collect())
    }
}

impl RandomIndexTable {
    pub fn new(entries: BTreeMap<usize, f64>) -> Result<Self> {
        for (&n, &ri) in &entries {
            if n < 3 || !(ri.is_finite() && ri > 0.0) {
                return Err(Error::InadmissibleQuery(format!(
                    "random index table entry {n}: {ri} must have n >= 3 and a positive value"
                )));
            }
        }
        Ok(Self(entries))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let map: BTreeMap<usize, f64> = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::new(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("finite table")
    }

    pub fn get(&self, n: usize) -> Result<f64> {
        self.0.get(&n).copied().ok_or(Error::MissingRandomIndex { n })
    }

    pub fn insert(&mut self, n: usize, ri: f64) {
        self.0.insert(n, ri);
    }

    pub fn entries(&self) -> &BTreeMap<usize, f64> {
        &self.0
    }
}

/// A random matrix whose upper-triangle cells are drawn independently and
/// uniformly from [`SAATY_SCALE`].
pub fn random_saaty_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComparisonMatrix> {
    let upper: Vec<f64> = (0..upper_len(n))
        .map(|_| SAATY_SCALE[rng.random_range(0..SAATY_SCALE.len())])
        .collect();
    ComparisonMatrix::from_upper(n, &upper)
}

/// Generator for sample `index` under `seed`: ChaCha8 with the seed expanded
/// by `seed_from_u64` and the stream set to the sample index.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Monte Carlo estimate of `RI_n = (mean lambda_max - n) / (n - 1)`.
///
/// Sample `k` uses [`sample_rng`]`(seed, k)`, and samples are summed in index
/// order, so the result is bit-identical regardless of thread count.
pub fn estimate_ri(n: usize, samples: usize, seed: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::OrderTooSmall { n });
    }
    if samples == 0 {
        return Err(Error::InadmissibleQuery("samples must be at least 1".into()));
    }
    let lambdas = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let a = random_saaty_matrix(n, &mut sample_rng(seed, k))?;
            lambda_max(&a, DEFAULT_LAMBDA_TOL).map(|p| p.lambda_max)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = lambdas.iter().sum::<f64>() / samples as f64;
    Ok((mean - n as f64) / (n as f64 - 1.0))
}
