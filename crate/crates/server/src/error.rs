use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cynote_core::FieldError;
use serde::Serialize;
use serde_json::json;

pub const CHANGE_PASSWORD_ROUTE: &str = "/cynote/account/changepassword";

/// Error body: `{"error": {"code", "message", "fields"?, ...}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub fields: Vec<FieldError>,
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            fields: Vec::new(),
            extra: serde_json::Map::new(),
        }
    }

    pub fn validation(fields: Vec<FieldError>) -> Self {
        let names: Vec<&str> = fields.iter().map(|f| f.field.as_str()).collect();
        let mut e = ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "validation_failed",
            format!("the following fields are required or invalid: {}", names.join(", ")),
        );
        e.fields = fields;
        e
    }

    pub fn field(field: &str, message: impl Into<String>) -> Self {
        ApiError::validation(vec![FieldError {
            field: field.into(),
            message: message.into(),
        }])
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(key.into(), json!(value));
        self
    }

    pub fn password_expired(username: &str, age_days: Option<i64>) -> Self {
        let mut e = ApiError::new(
            StatusCode::FORBIDDEN,
            "password_expired",
            format!("the password of {username} is too old and must be changed"),
        )
        .with("change_password_route", CHANGE_PASSWORD_ROUTE);
        if let Some(d) = age_days {
            e = e.with("age_days", d);
        }
        e
    }

    pub fn too_large(limit: usize) -> Self {
        ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "payload_too_large",
            format!("request exceeds the upload limit of {limit} bytes"),
        )
        .with("limit_bytes", limit)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = serde_json::Map::new();
        body.insert("code".into(), json!(self.code));
        body.insert("message".into(), json!(self.message));
        if !self.fields.is_empty() {
            body.insert("fields".into(), json!(self.fields));
        }
        body.extend(self.extra);
        (self.status, Json(json!({ "error": body }))).into_response()
    }
}

impl From<cynote_core::Error> for ApiError {
    fn from(e: cynote_core::Error) -> Self {
        use cynote_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Validation(fields) => ApiError::validation(fields),
            E::NotFound { kind, id } => {
                ApiError::new(StatusCode::NOT_FOUND, "not_found", msg).with("kind", kind).with("id", id)
            }
            E::Archived(id) => ApiError::new(StatusCode::CONFLICT, "archived", msg).with("notebook_id", id),
            E::Duplicate(_) => ApiError::new(StatusCode::CONFLICT, "duplicate", msg),
            E::InvalidCredentials => ApiError::new(StatusCode::UNAUTHORIZED, "invalid_credentials", msg),
            E::Unauthenticated => ApiError::new(StatusCode::UNAUTHORIZED, "unauthenticated", msg),
            E::Unauthorized(_) => ApiError::new(StatusCode::FORBIDDEN, "forbidden", msg),
            E::Policy(reason) => {
                let mut e = ApiError::field("password", reason);
                e.code = "password_policy";
                e
            }
            E::PasswordChange(reason) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "password_change_rejected", msg).with("reason", reason)
            }
            E::Unsupported(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unsupported", msg),
            E::Backup { uploaded, .. } => {
                ApiError::new(StatusCode::BAD_GATEWAY, "backup_failed", msg).with("uploaded", uploaded)
            }
            E::Parse(_) | E::Storage(_) | E::Config(_) | E::Io(_) => ApiError::internal(msg),
        }
    }
}

impl From<cynote_science::Error> for ApiError {
    fn from(e: cynote_science::Error) -> Self {
        use cynote_science::Error as E;
        let msg = e.to_string();
        match e {
            E::Validation { field, message } => ApiError::field(&field, message),
            E::Domain(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "domain_error", msg),
            E::ServiceUnavailable(_) => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "service_unavailable", msg),
            E::Parse { .. } => ApiError::new(StatusCode::BAD_GATEWAY, "remote_parse_error", msg),
            E::Io(_) => ApiError::internal(msg),
        }
    }
}
