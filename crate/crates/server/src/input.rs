//! Request parameters from JSON bodies, multipart forms and query strings,
//! with per-field error collection.

use std::collections::HashMap;

use axum::body::Bytes;
use axum::extract::{FromRequest, FromRequestParts, Multipart, Query, Request};
use axum::http::request::Parts;
use axum::http::header::CONTENT_TYPE;
use axum::http::StatusCode;
use cynote_core::attachments::NewFile;
use cynote_core::FieldError;
use serde_json::{Map, Value};

use crate::error::ApiError;
use crate::AppState;

#[derive(Debug, Default)]
pub struct Fields {
    values: Map<String, Value>,
    pub file: Option<NewFile>,
    errors: Vec<FieldError>,
}

impl Fields {
    pub fn from_map(values: Map<String, Value>) -> Self {
        Fields {
            values,
            ..Default::default()
        }
    }

    fn fail(&mut self, field: &str, message: &str) {
        if !self.errors.iter().any(|e| e.field == field) {
            self.errors.push(FieldError {
                field: field.into(),
                message: message.into(),
            });
        }
    }

    fn present(&self, name: &str) -> Option<&Value> {
        match self.values.get(name) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) if s.trim().is_empty() => None,
            Some(v) => Some(v),
        }
    }

    pub fn opt_str(&mut self, name: &str) -> Option<String> {
        match self.present(name)?.clone() {
            Value::String(s) => Some(s),
            _ => {
                self.fail(name, "must be text");
                None
            }
        }
    }

    pub fn str(&mut self, name: &str) -> String {
        let v = self.opt_str(name);
        if v.is_none() && !self.errors.iter().any(|e| e.field == name) {
            self.fail(name, "is required");
        }
        v.unwrap_or_default()
    }

    /// Text that may be blank; passwords are taken verbatim.
    pub fn raw_str(&mut self, name: &str) -> String {
        match self.values.get(name) {
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            Some(Value::String(_)) | None | Some(Value::Null) => {
                self.fail(name, "is required");
                String::new()
            }
            Some(_) => {
                self.fail(name, "must be text");
                String::new()
            }
        }
    }

    pub fn opt_int(&mut self, name: &str) -> Option<i64> {
        let parsed = match self.present(name)? {
            Value::Number(n) => n.as_i64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        if parsed.is_none() {
            self.fail(name, "must be an integer");
        }
        parsed
    }

    pub fn int(&mut self, name: &str) -> i64 {
        match self.opt_int(name) {
            Some(v) => v,
            None => {
                self.fail(name, "is required");
                0
            }
        }
    }

    pub fn count(&mut self, name: &str) -> u64 {
        let v = self.int(name);
        if v < 0 {
            self.fail(name, "must not be negative");
        }
        v.max(0) as u64
    }

    pub fn opt_f64(&mut self, name: &str) -> Option<f64> {
        let parsed = match self.present(name)? {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        if parsed.is_none() {
            self.fail(name, "must be a number");
        }
        parsed
    }

    pub fn opt_bool(&mut self, name: &str) -> Option<bool> {
        let parsed = match self.present(name)? {
            Value::Bool(b) => Some(*b),
            Value::String(s) => match s.trim() {
                "true" | "1" | "on" | "yes" => Some(true),
                "false" | "0" | "off" | "no" => Some(false),
                _ => None,
            },
            _ => None,
        };
        if parsed.is_none() {
            self.fail(name, "must be true or false");
        }
        parsed
    }

    /// A JSON array of strings, or one comma-separated string.
    pub fn str_list(&mut self, name: &str) -> Vec<String> {
        match self.present(name).cloned() {
            None => Vec::new(),
            Some(Value::String(s)) => s.split(',').map(|k| k.trim().to_owned()).filter(|k| !k.is_empty()).collect(),
            Some(Value::Array(items)) => {
                let out: Option<Vec<String>> = items.iter().map(|v| v.as_str().map(str::to_owned)).collect();
                out.unwrap_or_else(|| {
                    self.fail(name, "must be a list of text");
                    Vec::new()
                })
            }
            Some(_) => {
                self.fail(name, "must be a list of text");
                Vec::new()
            }
        }
    }

    /// A JSON array of numbers, or whitespace/comma-separated numbers in one string.
    pub fn num_list(&mut self, name: &str) -> Vec<f64> {
        let parsed: Option<Vec<f64>> = match self.present(name).cloned() {
            None => {
                self.fail(name, "is required");
                return Vec::new();
            }
            Some(Value::String(s)) => s
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().ok())
                .collect(),
            Some(Value::Array(items)) => items.iter().map(Value::as_f64).collect(),
            Some(_) => None,
        };
        parsed.unwrap_or_else(|| {
            self.fail(name, "must be a list of numbers");
            Vec::new()
        })
    }

    /// A JSON array of arrays of non-negative integers.
    pub fn grid(&mut self, name: &str) -> Vec<Vec<u64>> {
        let parsed: Option<Vec<Vec<u64>>> = match self.present(name).cloned() {
            None => {
                self.fail(name, "is required");
                return Vec::new();
            }
            Some(Value::Array(rows)) => rows
                .iter()
                .map(|r| r.as_array().and_then(|cells| cells.iter().map(Value::as_u64).collect()))
                .collect(),
            Some(_) => None,
        };
        parsed.unwrap_or_else(|| {
            self.fail(name, "must be rows of non-negative integer counts");
            Vec::new()
        })
    }

    pub fn has(&self, name: &str) -> bool {
        self.present(name).is_some()
    }

    pub fn finish(&mut self) -> Result<(), ApiError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ApiError::validation(std::mem::take(&mut self.errors)))
        }
    }
}

/// Body parameters: JSON object, or multipart form with an optional `file` part.
pub struct Input(pub Fields);

fn map_limit(status: StatusCode, message: String, limit: usize) -> ApiError {
    if status == StatusCode::PAYLOAD_TOO_LARGE {
        ApiError::too_large(limit)
    } else {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl FromRequest<AppState> for Input {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &AppState) -> Result<Self, ApiError> {
        let limit = state.upload_cap;
        let multipart = req
            .headers()
            .get(CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .is_some_and(|v| v.starts_with("multipart/form-data"));
        if multipart {
            let mut form = Multipart::from_request(req, state)
                .await
                .map_err(|e| map_limit(e.status(), e.body_text(), limit))?;
            let mut fields = Fields::default();
            while let Some(part) = form
                .next_field()
                .await
                .map_err(|e| map_limit(e.status(), e.body_text(), limit))?
            {
                let name = part.name().unwrap_or_default().to_owned();
                let filename = part.file_name().map(str::to_owned);
                let bytes = part.bytes().await.map_err(|e| map_limit(e.status(), e.body_text(), limit))?;
                match filename {
                    Some(filename) if name == "file" => {
                        if bytes.len() > limit {
                            return Err(ApiError::too_large(limit));
                        }
                        if !bytes.is_empty() || !filename.is_empty() {
                            fields.file = Some(NewFile {
                                filename,
                                bytes: bytes.to_vec(),
                            });
                        }
                    }
                    _ => {
                        let text = String::from_utf8(bytes.to_vec())
                            .map_err(|_| ApiError::field(&name, "must be UTF-8 text"))?;
                        fields.values.insert(name, Value::String(text));
                    }
                }
            }
            return Ok(Input(fields));
        }
        let bytes = Bytes::from_request(req, state)
            .await
            .map_err(|e| map_limit(e.status(), e.body_text(), limit))?;
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Ok(Input(Fields::default()));
        }
        match serde_json::from_slice::<Value>(&bytes) {
            Ok(Value::Object(map)) => Ok(Input(Fields::from_map(map))),
            Ok(_) => Err(ApiError::field("body", "must be a JSON object")),
            Err(e) => Err(ApiError::field("body", format!("is not valid JSON: {e}"))),
        }
    }
}

/// Query-string parameters.
pub struct Params(pub Fields);

impl FromRequestParts<AppState> for Params {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        let Query(q) = Query::<HashMap<String, String>>::from_request_parts(parts, state)
            .await
            .map_err(|e| ApiError::field("query", e.body_text()))?;
        Ok(Params(Fields::from_map(q.into_iter().map(|(k, v)| (k, Value::String(v))).collect())))
    }
}
