use axum::extract::FromRequestParts;
use axum::http::header::AUTHORIZATION;
use axum::http::request::Parts;
use cynote_core::accounts::Principal;

use crate::error::ApiError;
use crate::{blocking, AppState};

fn bearer(parts: &Parts) -> Result<String, ApiError> {
    let value = parts
        .headers
        .get(AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .ok_or_else(|| ApiError::from(cynote_core::Error::Unauthenticated))?;
    let token = value
        .strip_prefix("Bearer ")
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .ok_or_else(|| ApiError::from(cynote_core::Error::Unauthenticated))?;
    Ok(token.to_owned())
}

async fn principal(parts: &Parts, state: &AppState) -> Result<(String, Principal), ApiError> {
    let token = bearer(parts)?;
    let t = token.clone();
    let p = blocking(state, move |s| Ok(s.authenticate(&t, s.now())?)).await?;
    Ok((token, p))
}

/// A logged-in user whose password is within the age limit.
pub struct User(pub Principal);

impl FromRequestParts<AppState> for User {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        let (_, p) = principal(parts, state).await?;
        if p.password_expired {
            return Err(ApiError::password_expired(&p.username, None));
        }
        Ok(User(p))
    }
}

/// Any live session, stale password or not, with its token.
pub struct AnySession {
    pub token: String,
    pub principal: Principal,
}

impl FromRequestParts<AppState> for AnySession {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        let (token, principal) = principal(parts, state).await?;
        Ok(AnySession { token, principal })
    }
}
