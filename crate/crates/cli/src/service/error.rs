use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown {what} {id}"))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    pub fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<hcc_core::Error> for ApiError {
    fn from(e: hcc_core::Error) -> Self {
        use hcc_core::Error as E;
        let status = match &e {
            E::Csv { .. } | E::InvalidSeries(_) | E::NonFinite { .. } | E::Json(_) => StatusCode::BAD_REQUEST,
            E::KOutOfRange { .. } => StatusCode::CONFLICT,
            E::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.to_string())
    }
}

impl From<crate::error::CliError> for ApiError {
    fn from(e: crate::error::CliError) -> Self {
        match e {
            crate::error::CliError::Data(e) => e.into(),
            crate::error::CliError::Usage(m) => Self::unprocessable(m),
            e @ crate::error::CliError::Io { .. } => Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
