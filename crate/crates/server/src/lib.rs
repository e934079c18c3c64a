//! HTTP/JSON service for the cynote notebook.

mod analysis;
mod auth;
pub mod error;
mod handlers;
mod input;
pub mod routes;

use std::sync::Arc;
use std::time::Duration;

use axum::Router;
use cynote_core::config::{BackupConfig, BlastMode, Config};
use cynote_core::{Store, StoreOptions};
use cynote_science::sequence::blast::{BlastClient, HttpTransport, Mode, ResponseCache};

pub use error::ApiError;
pub use routes::{Access, Method, Route, ROUTES};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub blast: Arc<BlastClient>,
    pub backup: Arc<BackupConfig>,
    pub upload_cap: usize,
}

impl AppState {
    pub fn new(store: Store, blast: BlastClient, backup: BackupConfig, upload_cap: usize) -> Self {
        AppState {
            store: Arc::new(store),
            blast: Arc::new(blast),
            backup: Arc::new(backup),
            upload_cap,
        }
    }

    pub fn from_config(config: &Config) -> cynote_core::Result<Self> {
        config.validate()?;
        let store = Store::open(&config.store.path, &config.store.files_dir, StoreOptions::from_config(config))?;
        let cache = ResponseCache::new(&config.blast.cache_dir);
        let blast = match config.blast.mode {
            BlastMode::Replay => BlastClient::replay(cache),
            BlastMode::Live => {
                let transport = HttpTransport::new(&config.blast.endpoint)
                    .map_err(|e| cynote_core::Error::Config(e.to_string()))?
                    .with_polling(
                        Duration::from_secs(config.blast.poll_seconds),
                        Duration::from_secs(config.blast.max_wait_seconds),
                    );
                BlastClient::new(Mode::Live, cache, Box::new(transport))
            }
        };
        Ok(AppState::new(store, blast, config.backup.clone(), config.server.max_upload_bytes))
    }
}

/// Runs blocking store or analysis work off the async executor.
pub(crate) async fn blocking<T, F>(state: &AppState, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&Store) -> Result<T, ApiError> + Send + 'static,
{
    let store = state.store.clone();
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

pub fn app(state: AppState) -> Router {
    routes::router(state)
}
