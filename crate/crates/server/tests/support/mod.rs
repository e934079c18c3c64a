#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use cynote_core::config::{BackupConfig, BackupMode};
use cynote_core::time::{ManualClock, Timestamp};
use cynote_core::{Store, StoreOptions};
use cynote_science::sequence::blast::{BlastClient, ResponseCache};
use cynote_server::{app, AppState};
use http_body_util::BodyExt;
use serde_json::Value;
use tempfile::TempDir;
use tower::ServiceExt;

pub const ADMIN: &str = "admin";
pub const ADMIN_PW: &str = "admin-passphrase-1";
pub const BOB: &str = "bob";
pub const BOB_PW: &str = "bob-passphrase-22";
pub const UPLOAD_CAP: usize = 4096;

/// 2024-01-01T00:00:00Z
pub const START: Timestamp = Timestamp::from_micros(1_704_067_200_000_000);

pub struct TestApp {
    pub dir: TempDir,
    pub state: AppState,
    pub clock: Arc<ManualClock>,
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Value,
}

impl Reply {
    pub fn code(&self) -> &str {
        self.body["error"]["code"].as_str().unwrap_or("")
    }

    pub fn error_fields(&self) -> Vec<String> {
        self.body["error"]["fields"]
            .as_array()
            .map(|f| f.iter().filter_map(|e| e["field"].as_str().map(str::to_owned)).collect())
            .unwrap_or_default()
    }
}

pub fn test_app_with_ttl(ttl_minutes: i64) -> TestApp {
    let dir = tempfile::tempdir().expect("tempdir");
    let clock = Arc::new(ManualClock::new(START));
    let mut options = StoreOptions::default().with_clock(clock.clone());
    options.session_ttl_minutes = ttl_minutes;
    let store = Store::open(&dir.path().join("cynote.db"), &dir.path().join("files"), options).expect("open store");
    let blast = BlastClient::replay(ResponseCache::new(dir.path().join("blast_cache")));
    let backup = BackupConfig {
        mode: BackupMode::Localdir,
        local_path: dir.path().join("backups"),
        ..BackupConfig::default()
    };
    let state = AppState::new(store, blast, backup, UPLOAD_CAP);
    TestApp { dir, state, clock }
}

pub fn test_app() -> TestApp {
    test_app_with_ttl(480)
}

impl TestApp {
    pub fn router(&self) -> Router {
        app(self.state.clone())
    }

    pub fn store(&self) -> &Store {
        &self.state.store
    }

    pub fn audit_len(&self) -> usize {
        self.store().query_audit(&Default::default()).expect("audit").len()
    }

    pub async fn send(&self, req: Request<Body>) -> Reply {
        let resp = self.router().oneshot(req).await.expect("infallible");
        let status = resp.status();
        let bytes = resp.into_body().collect().await.expect("body").to_bytes();
        let body = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
        };
        Reply { status, body }
    }

    pub async fn call(&self, method: Method, uri: &str, token: Option<&str>, body: Option<Value>) -> Reply {
        let mut b = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            b = b.header(header::AUTHORIZATION, format!("Bearer {t}"));
        }
        let req = match body {
            Some(v) => b
                .header(header::CONTENT_TYPE, "application/json")
                .body(Body::from(v.to_string())),
            None => b.body(Body::empty()),
        };
        self.send(req.expect("request")).await
    }

    pub async fn post(&self, uri: &str, token: Option<&str>, body: Value) -> Reply {
        self.call(Method::POST, uri, token, Some(body)).await
    }

    pub async fn get(&self, uri: &str, token: Option<&str>) -> Reply {
        self.call(Method::GET, uri, token, None).await
    }

    /// Multipart form with text fields and an optional `file` part.
    pub async fn multipart(&self, uri: &str, token: &str, fields: &[(&str, &str)], file: Option<(&str, &[u8])>) -> Reply {
        let boundary = "cynote-test-boundary";
        let mut body = Vec::new();
        for (k, v) in fields {
            body.extend(format!("--{boundary}\r\nContent-Disposition: form-data; name=\"{k}\"\r\n\r\n{v}\r\n").as_bytes());
        }
        if let Some((name, bytes)) = file {
            body.extend(
                format!(
                    "--{boundary}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"{name}\"\r\nContent-Type: application/octet-stream\r\n\r\n"
                )
                .as_bytes(),
            );
            body.extend(bytes);
            body.extend(b"\r\n");
        }
        body.extend(format!("--{boundary}--\r\n").as_bytes());
        let req = Request::builder()
            .method(Method::POST)
            .uri(uri)
            .header(header::AUTHORIZATION, format!("Bearer {token}"))
            .header(header::CONTENT_TYPE, format!("multipart/form-data; boundary={boundary}"))
            .body(Body::from(body))
            .expect("request");
        self.send(req).await
    }

    pub async fn create_account(&self, username: &str, password: &str) -> Reply {
        self.post(
            "/cynote/account/newaccount",
            None,
            serde_json::json!({ "username": username, "password": password }),
        )
        .await
    }

    pub async fn login(&self, username: &str, password: &str) -> String {
        let r = self
            .post(
                "/cynote/account/login",
                None,
                serde_json::json!({ "username": username, "password": password }),
            )
            .await;
        assert_eq!(r.status, StatusCode::OK, "login {username}: {}", r.body);
        r.body["token"].as_str().expect("token").to_owned()
    }

    /// Bootstraps `admin` and returns a session token for it.
    pub async fn admin(&self) -> String {
        let r = self.create_account(ADMIN, ADMIN_PW).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
        self.login(ADMIN, ADMIN_PW).await
    }

    pub async fn notebook(&self, token: &str, title: &str) -> i64 {
        let r = self.post("/cynote/cynote/new_notebook", Some(token), serde_json::json!({ "title": title })).await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
        r.body["id"].as_i64().expect("id")
    }

    pub async fn entry(&self, token: &str, notebook_id: i64, title: &str) -> Reply {
        self.post(
            "/cynote/cynote/new_entry",
            Some(token),
            serde_json::json!({
                "notebook_id": notebook_id,
                "title": title,
                "description": "PCR of the insert",
                "keywords": ["pcr"],
            }),
        )
        .await
    }
}
