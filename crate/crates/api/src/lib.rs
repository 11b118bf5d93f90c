//! Stateless HTTP JSON service over `pcm-core`.
//!
//! | route | body | result |
//! |---|---|---|
//! | `POST /api/v1/evaluate` | [`EvaluateRequest`] | [`EvaluateResponse`] |
//! | `POST /api/v1/reduce` | [`ReduceRequest`] | a `ReductionResult` |
//! | `POST /api/v1/whatif` | [`WhatIfRequest`] | [`WhatIfResponse`] |
//! | `GET /api/v1/health` | | [`Health`] |
//!
//! Failures are JSON [`ApiError`]s: 400 for invalid input, 413 when a
//! reduction would exceed the work budget, 422 when no random index is known
//! for the matrix order, 504 on timeout.

mod error;
mod types;

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, Method};
use axum::routing::{get, post};
use axum::{Json, Router};
use pcm_core::indices::{self, saaty_cr_threshold, worst_triads, CONSISTENCY_TOL};
use pcm_core::reduce::{self, ReductionQuery, SearchLimits, SearchOptions, DEFAULT_WORK_BUDGET};
use pcm_core::{ComparisonMatrix, RandomIndexTable};
use serde::de::DeserializeOwned;
use sha2::{Digest, Sha256};
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub use error::ApiError;
pub use types::*;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Random index table used when a request does not supply one.
    pub ri: RandomIndexTable,
    /// Largest number of subproblems a reduction may need.
    pub work_budget: u64,
    pub timeout: Duration,
    /// Allowed cross-origin callers; empty allows any origin.
    pub cors_origins: Vec<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            ri: RandomIndexTable::default(),
            work_budget: DEFAULT_WORK_BUDGET,
            timeout: Duration::from_secs(60),
            cors_origins: Vec::new(),
        }
    }
}

struct AppState {
    config: Config,
    health: Health,
}

pub fn ri_table_hash(ri: &RandomIndexTable) -> String {
    Sha256::digest(ri.to_json().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn router(config: Config) -> Router {
    let health = Health {
        status: "ok",
        version: env!("CARGO_PKG_VERSION"),
        ri_table_hash: ri_table_hash(&config.ri),
        work_budget: config.work_budget,
        timeout_secs: config.timeout.as_secs(),
    };
    let cors = if config.cors_origins.is_empty() {
        CorsLayer::permissive()
    } else {
        let origins: Vec<HeaderValue> = config
            .cors_origins
            .iter()
            .filter_map(|o| o.parse().ok())
            .collect();
        CorsLayer::new()
            .allow_origin(AllowOrigin::list(origins))
            .allow_methods([Method::GET, Method::POST])
            .allow_headers(Any)
    };
    let state = Arc::new(AppState { config, health });
    Router::new()
        .route("/api/v1/evaluate", post(evaluate))
        .route("/api/v1/reduce", post(reduce))
        .route("/api/v1/whatif", post(whatif))
        .route("/api/v1/health", get(health_check))
        .layer(cors)
        .with_state(state)
}

/// Serves until the process ends.
pub async fn serve(listener: TcpListener, config: Config) -> std::io::Result<()> {
    axum::serve(listener, router(config)).await
}

type Shared = State<Arc<AppState>>;
type Reply<T> = Result<Json<T>, ApiError>;

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    Ok(serde_json::from_slice(body)?)
}

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(|e| {
        ApiError::new(
            axum::http::StatusCode::INTERNAL_SERVER_ERROR,
            "Internal",
            e.to_string(),
        )
    })?
}

fn evaluation(a: &ComparisonMatrix, ri: &RandomIndexTable) -> Result<Evaluation, ApiError> {
    Ok(Evaluation {
        consistent: a.is_consistent(CONSISTENCY_TOL),
        cr: indices::cr(a, ri)?,
        cm: indices::cm(a),
        ci: indices::ci(a),
        worst_triads: worst_triads(a, WORST_TRIADS),
    })
}

impl AppState {
    fn search_options(&self, round_to_scale: bool) -> SearchOptions {
        SearchOptions {
            limits: SearchLimits {
                max_subproblems: Some(self.config.work_budget),
                deadline: None,
            }
            .with_timeout(self.config.timeout),
            round_to_scale,
            ..SearchOptions::default()
        }
    }
}

async fn evaluate(State(s): Shared, body: Bytes) -> Reply<EvaluateResponse> {
    let req: EvaluateRequest = parse(&body)?;
    let matrix = req.matrix.into_matrix()?;
    let ri = req.ri.unwrap_or_else(|| s.config.ri.clone());
    let evaluation = evaluation(&matrix, &ri)?;
    Ok(Json(EvaluateResponse { matrix, evaluation }))
}

async fn reduce(State(s): Shared, body: Bytes) -> Reply<ReduceResponse> {
    let req: ReduceRequest = parse(&body)?;
    let matrix = req.matrix.into_matrix()?;
    let ri = req.ri.unwrap_or_else(|| s.config.ri.clone());
    let query = match (req.threshold, req.budget) {
        (Some(t), None) => ReductionQuery::min_changes(matrix, req.kind, t),
        (None, Some(k)) => ReductionQuery::min_index(matrix, req.kind, k),
        _ => {
            return Err(ApiError::bad_request(
                "InadmissibleQuery",
                "give exactly one of `threshold` and `budget`",
            ))
        }
    }
    .with_bound(req.bound)
    .with_ri(ri);
    let opts = s.search_options(req.round_to_scale);
    let all = req.enumerate_all;
    let result = blocking(move || {
        Ok(if req.budget.is_some() {
            reduce::min_index(&query, &opts)?
        } else if all {
            reduce::enumerate_optimal(&query, &opts)?
        } else {
            reduce::min_changes(&query, &opts)?
        })
    })
    .await?;
    Ok(Json(result))
}

async fn whatif(State(s): Shared, body: Bytes) -> Reply<WhatIfResponse> {
    let req: WhatIfRequest = parse(&body)?;
    let original = req.matrix.into_matrix()?;
    let ri = req.ri.unwrap_or_else(|| s.config.ri.clone());
    let mut matrix = original.clone();
    for e in &req.edits {
        if e.position.col() >= matrix.n() {
            return Err(pcm_core::Error::InvalidPosition(e.position).into());
        }
        if !(e.value.is_finite() && e.value > 0.0) {
            return Err(pcm_core::Error::NonPositiveEntry {
                i: e.position.row() + 1,
                j: e.position.col() + 1,
            }
            .into());
        }
        if !req.bound.admits(e.value) {
            return Err(ApiError::edit_out_of_bounds(
                e.position,
                e.value,
                req.bound.value(),
            ));
        }
        matrix = matrix.with_entry(e.position, e.value)?;
    }
    let before = evaluation(&original, &ri)?;
    let after = evaluation(&matrix, &ri)?;
    let delta = Delta {
        cr: after.cr.value - before.cr.value,
        cm: after.cm.value - before.cm.value,
        ci: after.ci.value - before.ci.value,
    };
    let threshold = req
        .threshold
        .or_else(|| (req.kind == pcm_core::IndexKind::Cr).then(|| saaty_cr_threshold(matrix.n())));
    let suggestions = match threshold {
        Some(t) => {
            let query = ReductionQuery::min_changes(matrix.clone(), req.kind, t)
                .with_bound(req.bound)
                .with_ri(ri);
            let opts = s.search_options(req.round_to_scale);
            Some(blocking(move || Ok(reduce::enumerate_optimal(&query, &opts)?)).await?)
        }
        None => None,
    };
    Ok(Json(WhatIfResponse {
        matrix,
        evaluation: after,
        delta,
        suggestions,
    }))
}

async fn health_check(State(s): Shared) -> Json<Health> {
    Json(s.health.clone())
}
