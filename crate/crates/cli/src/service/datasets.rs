use std::fs;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::Json;
use hcc_core::simgen::replicate_seed;
use hcc_core::spectral::integrate_band;
use hcc_core::{Analysis, Smoothing, TimeSeriesSet};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::error::{ApiError, ApiResult};
use super::{AppState, SharedState};
use crate::commands::{attach_standard_layout, load_experiment, parse_band, parse_smoothing};
use crate::error::{CliError, CliResult};

pub struct Dataset {
    pub id: String,
    pub series: TimeSeriesSet,
    pub source: Value,
    /// Default-smoothing analysis, computed on first use.
    default_analysis: OnceLock<Arc<Analysis>>,
}

impl Dataset {
    fn new(series: TimeSeriesSet, source: Value) -> Self {
        let id = content_id(&series);
        Self { id, series, source, default_analysis: OnceLock::new() }
    }

    pub fn summary(&self) -> Value {
        json!({
            "id": self.id,
            "n_channels": self.series.n_channels(),
            "n_samples": self.series.n_samples(),
            "fs": self.series.fs(),
            "duration_seconds": self.series.duration_seconds(),
            "labels": self.series.labels(),
            "has_layout": self.series.layout().is_some(),
            "source": self.source,
        })
    }

    fn default_analysis(&self) -> hcc_core::Result<Arc<Analysis>> {
        if let Some(a) = self.default_analysis.get() {
            return Ok(a.clone());
        }
        let a = Arc::new(Analysis::new(self.series.clone(), Smoothing::default())?);
        Ok(self.default_analysis.get_or_init(|| a).clone())
    }
}

fn content_id(ts: &TimeSeriesSet) -> String {
    let mut h = Sha256::new();
    h.update(format!("fs={}\n", ts.fs()).as_bytes());
    h.update(ts.to_csv_string().as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateRequest {
    experiment: Option<String>,
    spec: Option<hcc_core::simgen::ExperimentSpec>,
    #[serde(default = "one")]
    seed: u64,
    #[serde(default)]
    replicate: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
pub struct CreateQuery {
    fs: Option<f64>,
}

fn is_json(headers: &HeaderMap, body: &[u8]) -> bool {
    let ct = headers.get("content-type").and_then(|v| v.to_str().ok()).unwrap_or("");
    ct.contains("json") || (!ct.contains("csv") && body.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{'))
}

fn parse_body(headers: &HeaderMap, query: &CreateQuery, body: &[u8]) -> ApiResult<(TimeSeriesSet, Value)> {
    if is_json(headers, body) {
        let req: SimulateRequest =
            serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed JSON body: {e}")))?;
        let spec = match (req.experiment, req.spec) {
            (Some(name), None) => load_experiment(&name).map_err(|e| match e {
                CliError::Usage(m) => ApiError::bad_request(m),
                e => e.into(),
            })?,
            (None, Some(spec)) => {
                spec.validate().map_err(|e| ApiError::bad_request(e.to_string()))?;
                spec
            }
            _ => return Err(ApiError::bad_request("body must contain exactly one of `experiment` or `spec`")),
        };
        let seed = replicate_seed(req.seed, req.replicate);
        let sim = spec.simulate(seed).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let source = json!({
            "kind": "simulation",
            "experiment": spec.name,
            "base_seed": req.seed,
            "replicate": req.replicate,
            "seed": seed,
            "reference": sim.reference,
            "band": sim.band,
        });
        return Ok((sim.data, source));
    }
    let ts = TimeSeriesSet::from_csv(body, query.fs).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let ts = attach_standard_layout(ts)?;
    Ok((ts, json!({ "kind": "csv" })))
}

pub async fn create(
    State(state): State<SharedState>,
    Query(query): Query<CreateQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let (series, source) = tokio::task::spawn_blocking(move || parse_body(&headers, &query, &body))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let dataset = Dataset::new(series, source);
    let (status, ds) = insert(&state, dataset)?;
    Ok((status, Json(ds.summary())))
}

fn insert(state: &AppState, dataset: Dataset) -> ApiResult<(StatusCode, Arc<Dataset>)> {
    let mut map = state.datasets.write().unwrap_or_else(|e| e.into_inner());
    if let Some(existing) = map.get(&dataset.id) {
        return Ok((StatusCode::OK, existing.clone()));
    }
    if let Some(dir) = &state.data_dir {
        persist(dir, &dataset)?;
    }
    let ds = Arc::new(dataset);
    map.insert(ds.id.clone(), ds.clone());
    Ok((StatusCode::CREATED, ds))
}

fn persist(dir: &Path, ds: &Dataset) -> CliResult<()> {
    let dir = dir.join("datasets");
    fs::create_dir_all(&dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    let meta = json!({ "fs": ds.series.fs(), "source": ds.source, "layout": ds.series.layout() });
    crate::output::write_text(&dir.join(format!("{}.csv", ds.id)), &ds.series.to_csv_string())?;
    crate::output::write_json(&dir.join(format!("{}.json", ds.id)), &meta)
}

pub(super) fn load_persisted(state: &AppState, dir: &Path) -> CliResult<()> {
    let dir = dir.join("datasets");
    let Ok(entries) = fs::read_dir(&dir) else { return Ok(()) };
    let mut paths: Vec<_> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    let mut map = state.datasets.write().unwrap_or_else(|e| e.into_inner());
    for csv in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "csv")) {
        let meta_path = csv.with_extension("json");
        let meta: Value = serde_json::from_str(
            &fs::read_to_string(&meta_path).map_err(CliError::io(format!("reading {}", meta_path.display())))?,
        )
        .map_err(hcc_core::Error::from)?;
        let fs_hz = meta["fs"].as_f64().ok_or_else(|| CliError::Usage(format!("{} lacks fs", meta_path.display())))?;
        let file = fs::File::open(csv).map_err(CliError::io(format!("opening {}", csv.display())))?;
        let mut ts = TimeSeriesSet::from_csv(file, Some(fs_hz))?;
        if let Ok(layout) = serde_json::from_value::<hcc_core::ChannelLayout>(meta["layout"].clone()) {
            ts = ts.with_layout(layout)?;
        }
        let ds = Dataset::new(ts, meta["source"].clone());
        map.insert(ds.id.clone(), Arc::new(ds));
    }
    Ok(())
}

pub(super) fn lookup(state: &AppState, id: &str) -> ApiResult<Arc<Dataset>> {
    let map = state.datasets.read().unwrap_or_else(|e| e.into_inner());
    map.get(id).cloned().ok_or_else(|| ApiError::not_found("dataset", id))
}

pub async fn list(State(state): State<SharedState>) -> Json<Value> {
    let map = state.datasets.read().unwrap_or_else(|e| e.into_inner());
    Json(json!({ "datasets": map.values().map(|d| d.summary()).collect::<Vec<_>>() }))
}

pub async fn show(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Value>> {
    Ok(Json(lookup(&state, &id)?.summary()))
}

pub async fn layout(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Value>> {
    let ds = lookup(&state, &id)?;
    let positions = ds.series.layout().map(|l| &l.positions);
    Ok(Json(json!({ "id": ds.id, "labels": ds.series.labels(), "positions": positions })))
}

#[derive(Debug, Deserialize)]
pub struct CoherenceQuery {
    band: Option<String>,
    span: Option<String>,
    kernel: Option<String>,
}

/// Band-integrated coherence matrix of the whole recording.
pub async fn coherence(
    State(state): State<SharedState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<CoherenceQuery>,
) -> ApiResult<Json<Value>> {
    let ds = lookup(&state, &id)?;
    let band = parse_band(q.band.as_deref().ok_or_else(|| ApiError::unprocessable("missing band"))?)?;
    band.validate_for(ds.series.fs())?;
    let custom = q.span.is_some() || q.kernel.is_some();
    let smoothing = parse_smoothing(q.span.as_deref().unwrap_or("gcv"), q.kernel.as_deref().unwrap_or("fejer"))?;
    let body = tokio::task::spawn_blocking(move || -> ApiResult<Value> {
        let analysis =
            if custom { Arc::new(Analysis::new(ds.series.clone(), smoothing)?) } else { ds.default_analysis()? };
        let m = integrate_band(analysis.coherence(), &band)?;
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        Ok(json!({
            "id": ds.id,
            "band": band,
            "kernel": analysis.spectrum().kernel(),
            "labels": ds.series.labels(),
            "matrix": rows,
        }))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(body))
}
