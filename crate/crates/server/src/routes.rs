//! The route table. Every served path comes from `ROUTES`; there are no
//! other endpoints.

use axum::extract::DefaultBodyLimit;
use axum::routing::{on, MethodFilter, MethodRouter};
use axum::Router;

use crate::error::ApiError;
use crate::{analysis, handlers, AppState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Public,
    Session,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Route {
    pub method: Method,
    pub path: &'static str,
    pub access: Access,
    /// Writes to the store; each 2xx answer adds exactly one audit event.
    pub mutating: bool,
}

const fn route(method: Method, path: &'static str, access: Access, mutating: bool) -> Route {
    Route {
        method,
        path,
        access,
        mutating,
    }
}

use Access::{Public, Session};
use Method::{Get, Post};

pub const ROUTES: &[Route] = &[
    route(Post, "/cynote/account/newaccount", Public, true),
    route(Post, "/cynote/account/login", Public, true),
    route(Post, "/cynote/account/logout", Session, true),
    route(Post, "/cynote/account/changepassword", Public, true),
    route(Post, "/cynote/account/authorize", Session, true),
    route(Post, "/cynote/account/deauthorize", Session, true),
    route(Post, "/cynote/cynote/new_notebook", Session, true),
    route(Post, "/cynote/cynote/new_entry", Session, true),
    route(Post, "/cynote/cynote/new_comment", Session, true),
    route(Get, "/cynote/cynote/list_entries", Session, false),
    route(Get, "/cynote/cynote/toc", Session, false),
    route(Post, "/cynote/cynote/notarize", Session, true),
    route(Post, "/cynote/cynote/archive", Session, true),
    route(Post, "/cynote/cynote/unarchive", Session, true),
    route(Post, "/cynote/cynote/generate_signatures", Session, true),
    route(Get, "/cynote/cynote/verify", Session, false),
    route(Get, "/cynote/cynote/results", Session, false),
    route(Get, "/cynote/cynote/notebooks", Session, false),
    route(Get, "/cynote/cynote/entry", Session, false),
    route(Get, "/cynote/cynote/audit", Session, false),
    route(Get, "/cynote/cynote/gaps", Session, false),
    route(Post, "/cynote/primer/analyze", Session, true),
    route(Post, "/cynote/sequence/transform", Session, true),
    route(Post, "/cynote/sequence/protein", Session, true),
    route(Post, "/cynote/sequence/restriction", Session, true),
    route(Post, "/cynote/sequence/blast", Session, true),
    route(Post, "/cynote/statistics/descriptive", Session, false),
    route(Post, "/cynote/statistics/regression", Session, false),
    route(Post, "/cynote/statistics/table2x2", Session, false),
    route(Post, "/cynote/statistics/tablerxc", Session, false),
    route(Post, "/cynote/savedatabase/backup", Session, true),
];

fn endpoint(r: &Route) -> MethodRouter<AppState> {
    let m = match r.method {
        Method::Get => MethodFilter::GET,
        Method::Post => MethodFilter::POST,
    };
    match r.path {
        "/cynote/account/newaccount" => on(m, handlers::new_account),
        "/cynote/account/login" => on(m, handlers::login),
        "/cynote/account/logout" => on(m, handlers::logout),
        "/cynote/account/changepassword" => on(m, handlers::change_password),
        "/cynote/account/authorize" => on(m, handlers::authorize),
        "/cynote/account/deauthorize" => on(m, handlers::deauthorize),
        "/cynote/cynote/new_notebook" => on(m, handlers::new_notebook),
        "/cynote/cynote/new_entry" => on(m, handlers::new_entry),
        "/cynote/cynote/new_comment" => on(m, handlers::new_comment),
        "/cynote/cynote/list_entries" => on(m, handlers::list_entries),
        "/cynote/cynote/toc" => on(m, handlers::toc),
        "/cynote/cynote/notarize" => on(m, handlers::notarize),
        "/cynote/cynote/archive" => on(m, handlers::archive),
        "/cynote/cynote/unarchive" => on(m, handlers::unarchive),
        "/cynote/cynote/generate_signatures" => on(m, handlers::generate_signatures),
        "/cynote/cynote/verify" => on(m, handlers::verify),
        "/cynote/cynote/results" => on(m, handlers::results),
        "/cynote/cynote/notebooks" => on(m, handlers::notebooks),
        "/cynote/cynote/entry" => on(m, handlers::show_entry),
        "/cynote/cynote/audit" => on(m, handlers::audit),
        "/cynote/cynote/gaps" => on(m, handlers::gaps),
        "/cynote/primer/analyze" => on(m, analysis::primer),
        "/cynote/sequence/transform" => on(m, analysis::transform),
        "/cynote/sequence/protein" => on(m, analysis::protein),
        "/cynote/sequence/restriction" => on(m, analysis::restriction),
        "/cynote/sequence/blast" => on(m, analysis::blast),
        "/cynote/statistics/descriptive" => on(m, analysis::descriptive),
        "/cynote/statistics/regression" => on(m, analysis::regression),
        "/cynote/statistics/table2x2" => on(m, analysis::table2x2),
        "/cynote/statistics/tablerxc" => on(m, analysis::tablerxc),
        "/cynote/savedatabase/backup" => on(m, handlers::backup),
        other => panic!("route {other} has no handler"),
    }
}

async fn not_found() -> ApiError {
    ApiError::new(axum::http::StatusCode::NOT_FOUND, "no_route", "no such route")
}

pub fn router(state: AppState) -> Router {
    let limit = state.upload_cap + 64 * 1024;
    let mut r = Router::new();
    for route in ROUTES {
        r = r.route(route.path, endpoint(route));
    }
    r.fallback(not_found).layer(DefaultBodyLimit::max(limit)).with_state(state)
}

pub fn find(path: &str) -> Option<&'static Route> {
    ROUTES.iter().find(|r| r.path == path)
}
