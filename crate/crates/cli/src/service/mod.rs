//! JSON API under `/v1` serving datasets, clustering runs and plot data.
//!
//! Datasets are content addressed: the id is the SHA-256 of the sampling
//! rate and the canonical CSV rendering. Runs are keyed by dataset and
//! normalized parameters and execute at most once.

mod datasets;
mod error;
mod runs;

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::Router;

pub use error::{ApiError, ApiResult};

pub const DEFAULT_BODY_LIMIT: usize = 256 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub body_limit: usize,
    /// Datasets are mirrored here and reloaded on start.
    pub data_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { body_limit: DEFAULT_BODY_LIMIT, data_dir: None }
    }
}

#[derive(Default)]
pub struct AppState {
    datasets: RwLock<BTreeMap<String, Arc<datasets::Dataset>>>,
    runs: Mutex<HashMap<String, Arc<runs::Run>>>,
    data_dir: Option<PathBuf>,
}

pub type SharedState = Arc<AppState>;

impl AppState {
    pub fn new(config: &ServiceConfig) -> crate::error::CliResult<SharedState> {
        let state = AppState { data_dir: config.data_dir.clone(), ..Default::default() };
        if let Some(dir) = &config.data_dir {
            datasets::load_persisted(&state, dir)?;
        }
        Ok(Arc::new(state))
    }
}

pub fn router(state: SharedState, config: &ServiceConfig) -> Router {
    let api = Router::new()
        .route("/datasets", post(datasets::create).get(datasets::list))
        .route("/datasets/{id}", get(datasets::show))
        .route("/datasets/{id}/layout", get(datasets::layout))
        .route("/datasets/{id}/coherence", get(datasets::coherence))
        .route("/datasets/{id}/cluster", post(runs::create))
        .route("/runs/{id}", get(runs::status))
        .route("/runs/{id}/scree", get(runs::scree))
        .route("/runs/{id}/merges", get(runs::merges))
        .route("/runs/{id}/partition", get(runs::partition))
        .route("/runs/{id}/coherence", get(runs::coherence))
        .route("/runs/{id}/spectra", get(runs::spectra));
    Router::new()
        .nest("/v1", api)
        .layer(DefaultBodyLimit::max(config.body_limit))
        .with_state(state)
}

pub async fn serve(addr: std::net::SocketAddr, config: ServiceConfig) -> crate::error::CliResult<()> {
    let state = AppState::new(&config)?;
    let app = router(state, &config);
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(crate::error::CliError::io(format!("binding {addr}")))?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app).await.map_err(crate::error::CliError::io("serving"))
}

/// Keeps the bookkeeping maps usable after a panic in another handler.
fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

