use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::Json;
use hcc_core::clustering::{suggest_k, DEFAULT_ELBOW_THRESHOLD};
use hcc_core::spectral::{fourier_freqs, integrate_band};
use hcc_core::{Analysis, FrequencyBand, MergeHistory, Method, Partition, Smoothing, TimeSeriesSet};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::datasets::lookup;
use super::error::{ApiError, ApiResult};
use super::{lock, SharedState};
use crate::commands::{parse_band, parse_method, parse_smoothing, partition_json, KChoice};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BandParam {
    Text(String),
    Range([f64; 2]),
    Full(FrequencyBand),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpanParam {
    Fixed(usize),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterRequest {
    #[serde(default = "default_method")]
    method: String,
    band: BandParam,
    #[serde(default = "default_p")]
    p: u32,
    /// Segment index, counted in `segment_seconds` windows.
    segment: Option<usize>,
    segment_seconds: Option<f64>,
    span: Option<SpanParam>,
    kernel: Option<String>,
}

fn default_method() -> String {
    "hcc".into()
}

fn default_p() -> u32 {
    1
}

/// Normalized parameters; their JSON form keys the run cache.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunParams {
    method: Method,
    band: FrequencyBand,
    smoothing: Smoothing,
    segment_seconds: Option<f64>,
    segment: Option<usize>,
}

impl ClusterRequest {
    fn normalize(self) -> ApiResult<RunParams> {
        let method = parse_method(&self.method, self.p)?;
        let band = match self.band {
            BandParam::Text(s) => parse_band(&s)?,
            BandParam::Range([lo, hi]) => FrequencyBand::new(lo, hi)?,
            BandParam::Full(b) => FrequencyBand::new(b.lo, b.hi).map(|_| b)?,
        };
        let span = match self.span {
            None => "gcv".to_string(),
            Some(SpanParam::Fixed(m)) => m.to_string(),
            Some(SpanParam::Text(s)) => s,
        };
        let smoothing = parse_smoothing(&span, self.kernel.as_deref().unwrap_or("fejer"))?;
        let segment = match (self.segment_seconds, self.segment) {
            (None, Some(_)) => return Err(ApiError::unprocessable("segment requires segment_seconds")),
            (Some(_), s) => Some(s.unwrap_or(0)),
            (None, None) => None,
        };
        Ok(RunParams { method, band, smoothing, segment_seconds: self.segment_seconds, segment })
    }
}

pub struct RunOutput {
    analysis: Analysis,
    history: MergeHistory,
}

enum RunState {
    Pending,
    Done(Arc<RunOutput>),
    Failed(StatusCode, String),
}

pub struct Run {
    id: String,
    dataset: String,
    params: RunParams,
    labels: Vec<String>,
    state: Mutex<RunState>,
}

impl Run {
    fn describe(&self) -> Value {
        let (status, error) = match &*lock(&self.state) {
            RunState::Pending => ("pending", None),
            RunState::Done(_) => ("done", None),
            RunState::Failed(_, m) => ("failed", Some(m.clone())),
        };
        json!({
            "id": self.id,
            "dataset": self.dataset,
            "params": self.params,
            "status": status,
            "error": error,
        })
    }

    fn output(&self) -> ApiResult<Arc<RunOutput>> {
        match &*lock(&self.state) {
            RunState::Pending => Err(ApiError::new(StatusCode::ACCEPTED, format!("run {} is pending", self.id))),
            RunState::Done(out) => Ok(out.clone()),
            RunState::Failed(status, m) => Err(ApiError::new(*status, m.clone())),
        }
    }

    fn channel(&self, name: &str) -> ApiResult<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .or_else(|| self.labels.iter().position(|l| l.eq_ignore_ascii_case(name)))
            .ok_or_else(|| ApiError::unprocessable(format!("unknown channel {name}")))
    }
}

fn select_segment(series: &TimeSeriesSet, params: &RunParams) -> ApiResult<TimeSeriesSet> {
    let seg = match (params.segment_seconds, params.segment) {
        (Some(seconds), Some(i)) => {
            let mut segs = series.segments(seconds)?;
            if i >= segs.len() {
                return Err(ApiError::unprocessable(format!("segment {i} out of range 0..{}", segs.len())));
            }
            segs.swap_remove(i)
        }
        _ => series.clone(),
    };
    params.band.validate_for(seg.fs())?;
    params.band.select(&fourier_freqs(&seg))?;
    Ok(seg)
}

fn execute(seg: TimeSeriesSet, params: &RunParams) -> ApiResult<RunOutput> {
    let analysis = Analysis::new(seg, params.smoothing.clone())?;
    let history = analysis.cluster(params.method, &params.band)?;
    Ok(RunOutput { analysis, history })
}

/// Band names are labels only; `delta` and `[0, 4]` share a run.
fn run_id(dataset: &str, params: &RunParams) -> String {
    let mut key = params.clone();
    key.band.name = None;
    let mut h = Sha256::new();
    h.update(dataset.as_bytes());
    h.update(b"\n");
    h.update(serde_json::to_string(&key).expect("params serialize").as_bytes());
    hex::encode(h.finalize())
}

pub async fn create(
    State(state): State<SharedState>,
    UrlPath(id): UrlPath<String>,
    body: axum::body::Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let ds = lookup(&state, &id)?;
    let req: ClusterRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("malformed JSON body: {e}")))?;
    let params = req.normalize()?;
    let seg = select_segment(&ds.series, &params)?;
    let rid = run_id(&ds.id, &params);
    let (run, fresh) = {
        let mut runs = lock(&state.runs);
        match runs.get(&rid) {
            Some(run) => (run.clone(), false),
            None => {
                let run = Arc::new(Run {
                    id: rid.clone(),
                    dataset: ds.id.clone(),
                    params,
                    labels: ds.series.labels().to_vec(),
                    state: Mutex::new(RunState::Pending),
                });
                runs.insert(rid, run.clone());
                (run, true)
            }
        }
    };
    if fresh {
        let worker = run.clone();
        tokio::task::spawn_blocking(move || {
            let next = match execute(seg, &worker.params) {
                Ok(out) => RunState::Done(Arc::new(out)),
                Err(e) => RunState::Failed(e.status, e.message),
            };
            *lock(&worker.state) = next;
        });
    }
    let status = if matches!(*lock(&run.state), RunState::Pending) { StatusCode::ACCEPTED } else { StatusCode::OK };
    Ok((status, Json(run.describe())))
}

fn find(state: &SharedState, id: &str) -> ApiResult<Arc<Run>> {
    lock(&state.runs).get(id).cloned().ok_or_else(|| ApiError::not_found("run", id))
}

pub async fn status(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Value>> {
    Ok(Json(find(&state, &id)?.describe()))
}

pub async fn scree(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Value>> {
    let out = find(&state, &id)?.output()?;
    let s = out.history.scree();
    let suggested = suggest_k(&s, DEFAULT_ELBOW_THRESHOLD);
    Ok(Json(json!({ "k": s.k, "d": s.d, "suggested_k": suggested, "threshold": DEFAULT_ELBOW_THRESHOLD })))
}

pub async fn merges(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<MergeHistory>> {
    let out = find(&state, &id)?.output()?;
    Ok(Json(out.history.clone()))
}

#[derive(Debug, Deserialize)]
pub struct KQuery {
    k: Option<usize>,
    channel: Option<String>,
}

fn cut(out: &RunOutput, k: Option<usize>) -> ApiResult<(Partition, KChoice)> {
    let (k, choice) = match k {
        Some(0) => return Err(ApiError::unprocessable("k must be at least 1")),
        Some(k) => (k, KChoice::Fixed(k)),
        None => (suggest_k(&out.history.scree(), DEFAULT_ELBOW_THRESHOLD), KChoice::Auto),
    };
    Ok((out.history.cut(k)?, choice))
}

pub async fn partition(
    State(state): State<SharedState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<KQuery>,
) -> ApiResult<Json<Value>> {
    let run = find(&state, &id)?;
    let out = run.output()?;
    let (p, choice) = cut(&out, q.k)?;
    Ok(Json(partition_json(&p, &run.labels, choice)))
}

fn focal_cluster(run: &Run, out: &RunOutput, q: &KQuery) -> ApiResult<(usize, Vec<usize>, Partition)> {
    let name = q.channel.as_deref().ok_or_else(|| ApiError::unprocessable("missing channel"))?;
    let ch = run.channel(name)?;
    let (p, _) = cut(out, q.k)?;
    Ok((ch, p.members_with(ch), p))
}

/// Band-integrated coherence among the members of the focal channel's cluster.
pub async fn coherence(
    State(state): State<SharedState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<KQuery>,
) -> ApiResult<Json<Value>> {
    let run = find(&state, &id)?;
    let out = run.output()?;
    let (ch, members, p) = focal_cluster(&run, &out, &q)?;
    let full = integrate_band(out.analysis.coherence(), &run.params.band)?;
    let matrix: Vec<Vec<f64>> = members.iter().map(|&a| members.iter().map(|&b| full[(a, b)]).collect()).collect();
    Ok(Json(json!({
        "channel": run.labels[ch],
        "k": p.k(),
        "band": run.params.band,
        "members": members.iter().map(|&i| &run.labels[i]).collect::<Vec<_>>(),
        "matrix": matrix,
    })))
}

/// Smoothed auto-spectra of the focal cluster's members.
pub async fn spectra(
    State(state): State<SharedState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<KQuery>,
) -> ApiResult<Json<Value>> {
    let run = find(&state, &id)?;
    let out = run.output()?;
    let (ch, members, p) = focal_cluster(&run, &out, &q)?;
    let spec = out.analysis.spectrum();
    let curves: Vec<Value> = members
        .iter()
        .map(|&i| json!({ "channel": run.labels[i], "values": spec.auto_spectrum(i) }))
        .collect();
    Ok(Json(json!({
        "channel": run.labels[ch],
        "k": p.k(),
        "band": run.params.band,
        "kernel": spec.kernel(),
        "freqs": spec.freqs(),
        "curves": curves,
    })))
}
