//! Account, notebook and backup endpoints.

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cynote_core::accounts::{LoginOutcome, Principal};
use cynote_core::audit::AuditFilter;
use cynote_core::backup::transport;
use cynote_core::model::{RecordKind, Table};
use cynote_core::time::Timestamp;
use cynote_core::NewEntry;
use serde::Serialize;
use serde_json::json;

use crate::auth::{AnySession, User};
use crate::error::ApiError;
use crate::input::{Input, Params};
use crate::{blocking, AppState};

type Reply = Result<Response, ApiError>;

fn ok<T: Serialize>(body: T) -> Reply {
    Ok(Json(body).into_response())
}

fn created<T: Serialize>(body: T) -> Reply {
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

fn readable(p: &Principal) -> Result<(), ApiError> {
    if p.authorized {
        Ok(())
    } else {
        Err(cynote_core::Error::Unauthorized(p.username.clone()).into())
    }
}

pub async fn new_account(State(state): State<AppState>, Input(mut f): Input) -> Reply {
    let username = f.str("username");
    let password = f.raw_str("password");
    f.finish()?;
    let user = blocking(&state, move |s| Ok(s.create_account(&username, &password)?)).await?;
    created(user)
}

pub async fn login(State(state): State<AppState>, Input(mut f): Input) -> Reply {
    let username = f.str("username");
    let password = f.raw_str("password");
    f.finish()?;
    let outcome = blocking(&state, move |s| Ok(s.login(&username, &password, s.now())?)).await?;
    match outcome {
        LoginOutcome::Session(session) => ok(session),
        LoginOutcome::MustChangePassword { username, age_days } => {
            Err(ApiError::password_expired(&username, Some(age_days)))
        }
    }
}

pub async fn logout(State(state): State<AppState>, session: AnySession) -> Reply {
    let token = session.token;
    blocking(&state, move |s| Ok(s.logout(&token, s.now())?)).await?;
    ok(json!({ "logged_out": session.principal.username }))
}

pub async fn change_password(State(state): State<AppState>, Input(mut f): Input) -> Reply {
    let username = f.str("username");
    let old = f.raw_str("old_password");
    let new = f.raw_str("new_password");
    f.finish()?;
    let name = username.clone();
    blocking(&state, move |s| Ok(s.change_password(&name, &old, &new, s.now())?)).await?;
    ok(json!({ "password_changed": username }))
}

pub async fn authorize(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let target = f.str("username");
    f.finish()?;
    ok(blocking(&state, move |s| Ok(s.authorize_user(&p.username, &target)?)).await?)
}

pub async fn deauthorize(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let target = f.str("username");
    f.finish()?;
    ok(blocking(&state, move |s| Ok(s.deauthorize_user(&p.username, &target)?)).await?)
}

pub async fn new_notebook(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let title = f.str("title");
    f.finish()?;
    created(blocking(&state, move |s| Ok(s.create_notebook(&title, &p.username)?)).await?)
}

pub async fn new_entry(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let notebook_id = f.int("notebook_id");
    let title = f.str("title");
    let description = f.str("description");
    let keywords = f.str_list("keywords");
    f.finish()?;
    let entry = NewEntry {
        notebook_id,
        title,
        description,
        keywords,
        file: f.file.take(),
    };
    created(blocking(&state, move |s| Ok(s.create_entry(entry, &p.username)?)).await?)
}

pub async fn new_comment(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let entry_id = f.int("entry_id");
    let text = f.str("text");
    f.finish()?;
    let file = f.file.take();
    created(blocking(&state, move |s| Ok(s.create_comment(entry_id, &text, file, &p.username)?)).await?)
}

pub async fn notarize(State(state): State<AppState>, User(p): User, Input(mut f): Input) -> Reply {
    let entry_id = f.int("entry_id");
    f.finish()?;
    created(blocking(&state, move |s| Ok(s.notarize_entry(entry_id, &p.username)?)).await?)
}

async fn set_archived(state: AppState, p: Principal, mut f: crate::input::Fields, archived: bool) -> Reply {
    let notebook_id = f.int("notebook_id");
    f.finish()?;
    ok(blocking(&state, move |s| Ok(s.set_archive_state(notebook_id, archived, &p.username)?)).await?)
}

pub async fn archive(State(state): State<AppState>, User(p): User, Input(f): Input) -> Reply {
    set_archived(state, p, f, true).await
}

pub async fn unarchive(State(state): State<AppState>, User(p): User, Input(f): Input) -> Reply {
    set_archived(state, p, f, false).await
}

pub async fn generate_signatures(State(state): State<AppState>, User(p): User) -> Reply {
    created(blocking(&state, move |s| Ok(s.generate_signature_batch(&p.username)?)).await?)
}

pub async fn list_entries(State(state): State<AppState>, User(p): User, Params(mut f): Params) -> Reply {
    readable(&p)?;
    let notebook_id = f.opt_int("notebook_id");
    f.finish()?;
    ok(blocking(&state, move |s| Ok(s.list_entries(notebook_id)?)).await?)
}

pub async fn toc(State(state): State<AppState>, User(p): User, Params(mut f): Params) -> Reply {
    readable(&p)?;
    let notebook_id = f.int("notebook_id");
    f.finish()?;
    ok(blocking(&state, move |s| Ok(s.table_of_contents(notebook_id)?)).await?)
}

pub async fn verify(State(state): State<AppState>, User(p): User, Params(mut f): Params) -> Reply {
    readable(&p)?;
    let kind = f.opt_str("record_kind");
    let id = f.opt_int("record_id");
    f.finish()?;
    match (kind, id) {
        (None, None) => ok(blocking(&state, |s| Ok(s.verify_all()?)).await?),
        (Some(kind), Some(id)) => {
            let kind: RecordKind = kind.parse()?;
            ok(blocking(&state, move |s| Ok(s.verify_record(kind, id)?)).await?)
        }
        (None, Some(_)) => Err(ApiError::field("record_kind", "is required with record_id")),
        (Some(_), None) => Err(ApiError::field("record_id", "is required with record_kind")),
    }
}

pub async fn results(State(state): State<AppState>, User(p): User) -> Reply {
    readable(&p)?;
    ok(blocking(&state, move |s| Ok(s.list_results(&p.username)?)).await?)
}

pub async fn notebooks(State(state): State<AppState>, User(p): User) -> Reply {
    readable(&p)?;
    ok(blocking(&state, |s| Ok(s.list_notebooks()?)).await?)
}

pub async fn show_entry(State(state): State<AppState>, User(p): User, Params(mut f): Params) -> Reply {
    readable(&p)?;
    let id = f.int("entry_id");
    f.finish()?;
    let body = blocking(&state, move |s| {
        Ok(json!({
            "entry": s.entry(id)?,
            "comments": s.list_comments(id)?,
            "notarizations": s.list_notarizations(id)?,
        }))
    })
    .await?;
    ok(body)
}

pub async fn audit(State(state): State<AppState>, User(p): User, Params(mut f): Params) -> Reply {
    readable(&p)?;
    let kind = f.opt_str("kind");
    let actor = f.opt_str("actor");
    let from = f.opt_str("from");
    let to = f.opt_str("to");
    f.finish()?;
    let filter = AuditFilter {
        kind: kind.map(|k| k.parse()).transpose()?,
        actor,
        from: from.map(|t| Timestamp::parse(&t)).transpose()?,
        to: to.map(|t| Timestamp::parse(&t)).transpose()?,
    };
    ok(blocking(&state, move |s| Ok(s.query_audit(&filter)?)).await?)
}

pub async fn gaps(State(state): State<AppState>, User(p): User) -> Reply {
    readable(&p)?;
    ok(blocking(&state, |s| {
        let mut reports = Vec::new();
        for table in Table::ALL {
            reports.push(s.detect_sequence_gaps(table)?);
        }
        Ok(reports)
    })
    .await?)
}

pub async fn backup(State(state): State<AppState>, User(p): User) -> Reply {
    let config = state.backup.clone();
    created(
        blocking(&state, move |s| {
            let mut t = transport::from_config(&config);
            Ok(s.backup(t.as_mut(), &p.username)?)
        })
        .await?,
    )
}
