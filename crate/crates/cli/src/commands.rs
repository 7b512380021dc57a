//! The batch subcommands: `simulate`, `cluster` and `compare`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use hcc_core::clustering::{suggest_k, DEFAULT_ELBOW_THRESHOLD};
use hcc_core::simgen::{replicate_seed, ExperimentSpec, Simulation, EXPERIMENTS};
use hcc_core::spectral::{KernelFamily, DEFAULT_GCV_SPANS};
use hcc_core::{
    affinity, agreement, standard_1020_layout, Analysis, FrequencyBand, Method, MergeHistory, Partition, Smoothing,
    TimeSeriesSet,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::output::{affinity_svg, merge_plot_csv, merge_plot_svg, scree_svg, write_json, write_text};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// ------------------------------------------------------------ parsing

pub fn parse_method(name: &str, p: u32) -> CliResult<Method> {
    let method = Method::parse(name).map_err(|e| CliError::Usage(e.to_string()))?;
    match (method, p) {
        (Method::HccP1, 2) if name == "hcc" => Ok(Method::HccP2),
        (_, 1 | 2) => Ok(method),
        _ => Err(CliError::Usage(format!("--p must be 1 or 2, got {p}"))),
    }
}

pub fn parse_band(s: &str) -> CliResult<FrequencyBand> {
    FrequencyBand::parse(s).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_kernel(s: &str) -> CliResult<KernelFamily> {
    match s {
        "fejer" => Ok(KernelFamily::Fejer),
        "daniell" => Ok(KernelFamily::Daniell),
        _ => Err(CliError::Usage(format!("unknown kernel {s}; expected fejer or daniell"))),
    }
}

/// `gcv` or a fixed half-width.
pub fn parse_smoothing(span: &str, kernel: &str) -> CliResult<Smoothing> {
    let family = parse_kernel(kernel)?;
    if span == "gcv" {
        return Ok(Smoothing::Gcv { family, candidates: DEFAULT_GCV_SPANS.to_vec() });
    }
    match span.parse::<usize>() {
        Ok(m) if m >= 1 => Ok(Smoothing::Fixed { family, span: m }),
        _ => Err(CliError::Usage(format!("--span must be a positive integer or gcv, got {span}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum KChoice {
    Auto,
    Fixed(usize),
}

pub fn parse_k(s: &str) -> CliResult<KChoice> {
    if s == "auto" {
        return Ok(KChoice::Auto);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(KChoice::Fixed(k)),
        _ => Err(CliError::Usage(format!("--k must be a positive integer or auto, got {s}"))),
    }
}

/// Reads a CSV recording. Channels named after the standard 10-20 montage
/// get its scalp layout.
pub fn load_series(path: &Path, fs: Option<f64>) -> CliResult<TimeSeriesSet> {
    let file = fs::File::open(path).map_err(CliError::io(format!("opening {}", path.display())))?;
    attach_standard_layout(TimeSeriesSet::from_csv(file, fs)?)
}

pub fn attach_standard_layout(ts: TimeSeriesSet) -> CliResult<TimeSeriesSet> {
    let layout = standard_1020_layout();
    if ts.layout().is_none() && ts.labels().iter().all(|l| layout.index_of(l).is_some()) {
        return Ok(ts.with_layout(layout)?);
    }
    Ok(ts)
}

/// A preset name, or a path to a TOML/JSON [`ExperimentSpec`].
pub fn load_experiment(name_or_path: &str) -> CliResult<ExperimentSpec> {
    if EXPERIMENTS.contains(&name_or_path) {
        return Ok(ExperimentSpec::preset(name_or_path)?);
    }
    let path = Path::new(name_or_path);
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if !(path.exists() && matches!(ext, "toml" | "json")) {
        return Err(CliError::Usage(format!(
            "unknown experiment {name_or_path}; expected one of {} or a .toml/.json spec",
            EXPERIMENTS.join(", ")
        )));
    }
    let text = fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    let spec: ExperimentSpec = if ext == "toml" {
        toml::from_str(&text).map_err(|e| hcc_core::Error::InvalidParameter(format!("{}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text).map_err(hcc_core::Error::from)?
    };
    spec.validate()?;
    Ok(spec)
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(CliError::io(format!("creating {}", path.display())))
}

fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

// ------------------------------------------------------------ simulate

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Preset name (exp1, exp2-case1, exp2-case2, exp3, exp4, artifact, illustration1) or a .toml/.json spec.
    pub experiment: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn simulate(args: &SimulateArgs, argv: &[String]) -> CliResult<()> {
    if args.replicates == 0 {
        return Err(CliError::Usage("--replicates must be at least 1".into()));
    }
    let spec = load_experiment(&args.experiment)?;
    create_dir(&args.out)?;
    let sims: Vec<Simulation> = (0..args.replicates)
        .into_par_iter()
        .map(|i| spec.simulate(replicate_seed(args.seed, i as u64)))
        .collect::<hcc_core::Result<_>>()?;
    let mut replicates = Vec::new();
    for (i, sim) in sims.iter().enumerate() {
        let data = format!("replicate_{i:04}.csv");
        write_text(&args.out.join(&data), &sim.data.to_csv_string())?;
        let clean = match &sim.clean {
            Some(c) => {
                let name = format!("clean_{i:04}.csv");
                write_text(&args.out.join(&name), &c.to_csv_string())?;
                Some(name)
            }
            None => None,
        };
        replicates.push(json!({ "index": i, "seed": sim.seed, "data": data, "clean": clean }));
    }
    let manifest = json!({
        "tool": "hcc",
        "version": VERSION,
        "command": "simulate",
        "argv": argv,
        "experiment": spec,
        "base_seed": args.seed,
        "seed_derivation": "splitmix64(base_seed + replicate index)",
        "reference": spec.reference,
        "band": spec.band,
        "replicates": replicates,
    });
    write_json(&args.out.join("manifest.json"), &manifest)
}

// ------------------------------------------------------------ cluster

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// CSV with one column per channel and a header row; an optional leading `t` column gives time in seconds.
    pub input: PathBuf,
    /// Sampling rate in Hz (inferred from the `t` column when omitted).
    #[arg(long)]
    pub fs: Option<f64>,
    /// hcc, hcc-p2, hac, hmc or spectral-baseline.
    #[arg(long, default_value = "hcc")]
    pub method: String,
    /// Band name (delta, theta, alpha, beta, gamma) or `lo,hi` in Hz.
    #[arg(long)]
    pub band: String,
    /// Lp exponent of cluster coherence (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// Number of clusters, or `auto` for the scree elbow rule.
    #[arg(long, default_value = "auto")]
    pub k: String,
    /// Smoothing half-width, or `gcv` to select it.
    #[arg(long, default_value = "gcv")]
    pub span: String,
    #[arg(long, default_value = "fejer")]
    pub kernel: String,
    /// Split the recording into disjoint segments of this many seconds.
    #[arg(long)]
    pub segment_seconds: Option<f64>,
    /// Jump threshold used by `--k auto`.
    #[arg(long, default_value_t = DEFAULT_ELBOW_THRESHOLD)]
    pub elbow_threshold: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct SegmentOutcome {
    index: usize,
    start_seconds: f64,
    dir: String,
    kernel: Option<hcc_core::spectral::KernelInfo>,
    suggested_k: usize,
    k: usize,
    clamped: usize,
}

fn cluster_one(ts: TimeSeriesSet, method: Method, band: &FrequencyBand, smoothing: &Smoothing) -> hcc_core::Result<(MergeHistory, Option<hcc_core::spectral::KernelInfo>)> {
    let analysis = Analysis::new(ts, smoothing.clone())?;
    let h = analysis.cluster(method, band)?;
    Ok((h, analysis.spectrum().kernel()))
}

pub fn cluster(args: &ClusterArgs, argv: &[String]) -> CliResult<()> {
    let method = parse_method(&args.method, args.p)?;
    let band = parse_band(&args.band)?;
    let smoothing = parse_smoothing(&args.span, &args.kernel)?;
    let k_choice = parse_k(&args.k)?;
    let ts = load_series(&args.input, args.fs)?;
    if let KChoice::Fixed(k) = k_choice {
        if k > ts.n_channels() {
            return Err(hcc_core::Error::KOutOfRange { k, n: ts.n_channels() }.into());
        }
    }
    let segments = match args.segment_seconds {
        Some(s) => ts.segments(s)?,
        None => vec![ts.clone()],
    };
    let seg_len = segments[0].duration_seconds();
    let results: Vec<(MergeHistory, Option<hcc_core::spectral::KernelInfo>)> = segments
        .into_par_iter()
        .map(|seg| cluster_one(seg, method, &band, &smoothing))
        .collect::<hcc_core::Result<_>>()?;
    create_dir(&args.out)?;
    let labels = ts.labels();
    let mut outcomes = Vec::new();
    for (i, (h, kernel)) in results.iter().enumerate() {
        let (dir, rel) = if args.segment_seconds.is_some() {
            let rel = format!("segment_{i:04}");
            (args.out.join(&rel), rel)
        } else {
            (args.out.clone(), ".".to_string())
        };
        create_dir(&dir)?;
        let scree = h.scree();
        let suggested = suggest_k(&scree, args.elbow_threshold);
        let k = match k_choice {
            KChoice::Auto => suggested,
            KChoice::Fixed(k) => k,
        };
        let partition = h.cut(k)?;
        write_json(&dir.join("merge_history.json"), h)?;
        write_text(&dir.join("scree.csv"), &scree.to_csv())?;
        write_text(&dir.join("scree.svg"), &scree_svg(&scree, &format!("{} {}", method.as_str(), band.label())))?;
        write_text(&dir.join("merge_plot.csv"), &merge_plot_csv(h, labels))?;
        write_text(&dir.join("merge_plot.svg"), &merge_plot_svg(h, labels))?;
        write_json(&dir.join("partition.json"), &partition_json(&partition, labels, k_choice))?;
        outcomes.push(SegmentOutcome {
            index: i,
            start_seconds: i as f64 * seg_len,
            dir: rel,
            kernel: *kernel,
            suggested_k: suggested,
            k,
            clamped: h.clamped,
        });
    }
    let manifest = json!({
        "tool": "hcc",
        "version": VERSION,
        "command": "cluster",
        "argv": argv,
        "input": { "path": args.input, "sha256": sha256_file(&args.input)?, "fs": ts.fs(), "channels": labels },
        "method": method,
        "band": band,
        "smoothing": smoothing,
        "k": k_choice,
        "elbow_threshold": args.elbow_threshold,
        "segment_seconds": args.segment_seconds,
        "segments": outcomes,
    });
    write_json(&args.out.join("manifest.json"), &manifest)
}

pub fn partition_json(p: &Partition, labels: &[String], choice: KChoice) -> serde_json::Value {
    let clusters: Vec<Vec<&str>> = p.clusters().iter().map(|c| c.iter().map(|&i| labels[i].as_str()).collect()).collect();
    json!({
        "k": p.k(),
        "chosen_by": match choice { KChoice::Auto => "auto", KChoice::Fixed(_) => "fixed" },
        "assignment": p.assignment(),
        "clusters": clusters,
    })
}

// ------------------------------------------------------------ compare

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Experiment preset or spec file (replicates are simulated), or a CSV recording (segments act as replicates).
    pub input: String,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "hcc,hac,hmc")]
    pub methods: Vec<String>,
    /// Defaults to the experiment's analysis band; required for CSV input.
    #[arg(long)]
    pub band: Option<String>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[arg(long, default_value = "gcv")]
    pub span: String,
    #[arg(long, default_value = "fejer")]
    pub kernel: String,
    #[arg(long)]
    pub fs: Option<f64>,
    #[arg(long)]
    pub segment_seconds: Option<f64>,
    #[arg(long, short)]
    pub out: PathBuf,
}

pub fn compare(args: &CompareArgs, argv: &[String]) -> CliResult<()> {
    let methods: Vec<Method> = args.methods.iter().map(|m| parse_method(m, args.p)).collect::<CliResult<_>>()?;
    if methods.is_empty() {
        return Err(CliError::Usage("--methods must name at least one method".into()));
    }
    let smoothing = parse_smoothing(&args.span, &args.kernel)?;
    let is_csv = Path::new(&args.input).extension().is_some_and(|e| e == "csv");
    let (datasets, band, reference, labels, source) = if is_csv {
        let band = parse_band(args.band.as_deref().ok_or_else(|| CliError::Usage("--band is required for CSV input".into()))?)?;
        let ts = load_series(Path::new(&args.input), args.fs)?;
        let labels = ts.labels().to_vec();
        let sets = match args.segment_seconds {
            Some(s) => ts.segments(s)?,
            None => vec![ts],
        };
        (sets, band, None, labels, json!({ "csv": args.input, "sha256": sha256_file(Path::new(&args.input))? }))
    } else {
        if args.replicates == 0 {
            return Err(CliError::Usage("--replicates must be at least 1".into()));
        }
        let spec = load_experiment(&args.input)?;
        let band = match &args.band {
            Some(b) => parse_band(b)?,
            None => spec.band.clone(),
        };
        let sims: Vec<Simulation> = (0..args.replicates)
            .into_par_iter()
            .map(|i| spec.simulate(replicate_seed(args.seed, i as u64)))
            .collect::<hcc_core::Result<_>>()?;
        let labels = sims[0].data.labels().to_vec();
        let source = json!({ "experiment": spec, "base_seed": args.seed, "replicates": args.replicates });
        (sims.into_iter().map(|s| s.data).collect(), band, Some(spec.reference), labels, source)
    };
    let n = labels.len();
    if args.k == 0 || args.k > n {
        return Err(hcc_core::Error::KOutOfRange { k: args.k, n }.into());
    }
    // partitions[r][m]: replicate r, method m
    let partitions: Vec<Vec<Partition>> = datasets
        .into_par_iter()
        .map(|ts| {
            let analysis = Analysis::new(ts, smoothing.clone())?;
            methods.iter().map(|&m| analysis.cluster(m, &band)?.cut(args.k)).collect::<hcc_core::Result<Vec<_>>>()
        })
        .collect::<hcc_core::Result<_>>()?;
    create_dir(&args.out)?;
    let mut files = Vec::new();
    let mut vs_reference = Vec::new();
    for (mi, m) in methods.iter().enumerate() {
        let column: Vec<Partition> = partitions.iter().map(|r| r[mi].clone()).collect();
        let a = affinity(&column)?;
        let name = format!("affinity_{}.csv", m.as_str());
        write_text(&args.out.join(&name), &a.to_csv(Some(&labels)))?;
        write_text(&args.out.join(format!("affinity_{}.svg", m.as_str())), &affinity_svg(&a, &format!("{} k={}", m.as_str(), args.k)))?;
        files.push(name);
        if let Some(r) = &reference {
            let ari = mean(column.iter().map(|p| agreement(p, r)).collect::<hcc_core::Result<Vec<_>>>()?);
            vs_reference.push(json!({ "method": m, "mean_ari": ari, "within_block_affinity": a.mean_within(r) }));
        }
    }
    let mut table = String::from("method_a,method_b,mean_ari\n");
    for a in 0..methods.len() {
        for b in a + 1..methods.len() {
            let aris = partitions.iter().map(|r| agreement(&r[a], &r[b])).collect::<hcc_core::Result<Vec<_>>>()?;
            table.push_str(&format!("{},{},{}\n", methods[a].as_str(), methods[b].as_str(), mean(aris)));
        }
    }
    write_text(&args.out.join("agreement.csv"), &table)?;
    let manifest = json!({
        "tool": "hcc",
        "version": VERSION,
        "command": "compare",
        "argv": argv,
        "source": source,
        "methods": methods,
        "band": band,
        "k": args.k,
        "smoothing": smoothing,
        "affinity_files": files,
        "agreement_with_reference": vs_reference,
    });
    write_json(&args.out.join("manifest.json"), &manifest)
}

fn mean(v: Vec<f64>) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
