use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use pcm_core::{Error, Position};
use serde::Serialize;

/// An error response: a status code and a JSON body naming the failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: &'static str,
    pub message: String,
    /// 1-based `[i, j]` of the offending cell, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Subproblems solved before a timeout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subproblems: Option<u64>,
}

impl ApiError {
    pub fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            error,
            message: message.into(),
            cell: None,
            estimate: None,
            budget: None,
            subproblems: None,
        }
    }

    pub fn bad_request(error: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, error, message)
    }

    pub fn at(mut self, cell: Position) -> Self {
        self.cell = Some([cell.row() + 1, cell.col() + 1]);
        self
    }

    fn at_ij(mut self, i: usize, j: usize) -> Self {
        self.cell = Some([i, j]);
        self
    }

    pub fn edit_out_of_bounds(p: Position, value: f64, bound: f64) -> Self {
        Self::bad_request(
            "EditOutOfBounds",
            format!("edit {p} = {value} lies outside [1/{bound}, {bound}]"),
        )
        .at(p)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let bad = |code| ApiError::bad_request(code, message.clone());
        match e {
            Error::NonPositiveEntry { i, j } => bad("NonPositiveEntry").at_ij(i, j),
            Error::ReciprocityViolation { i, j } => bad("ReciprocityViolation").at_ij(i, j),
            Error::InvalidPosition(p) => bad("InvalidPosition").at(p),
            Error::InadmissibleSpec { position, .. } => bad("InadmissibleSpec").at(position),
            Error::OrderTooSmall { .. } => bad("OrderTooSmall"),
            Error::NotSquare { .. } => bad("NotSquare"),
            Error::OrderMismatch { .. } => bad("OrderMismatch"),
            Error::Parse { .. } => bad("ParseError"),
            Error::ThresholdOutOfRange { .. } => bad("ThresholdOutOfRange"),
            Error::InvalidBound(_) => bad("InvalidBound"),
            Error::InadmissibleQuery(_) => bad("InadmissibleQuery"),
            Error::MissingRandomIndex { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "MissingRandomIndex", message)
            }
            Error::WorkBudgetExceeded { estimate, budget } => ApiError {
                estimate: Some(estimate),
                budget: Some(budget),
                ..ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "TooLarge", message)
            },
            Error::Timeout { subproblems } => ApiError {
                subproblems: Some(subproblems),
                ..ApiError::new(StatusCode::GATEWAY_TIMEOUT, "Timeout", message)
            },
            Error::ConvergenceFailure { .. } | Error::BranchLimit { .. } => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "SolverFailure", message)
            }
        }
    }
}

impl From<serde_json::Error> for ApiError {
    fn from(e: serde_json::Error) -> Self {
        ApiError::bad_request("ParseError", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}
