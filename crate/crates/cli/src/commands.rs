use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use pbc::cluster::{cluster_graph, ClusteringResult, Merge, PbcParams};
use pbc::datagen::{make_benchmark, Benchmark};
use pbc::dataset::{self, load_label_column, load_labeled, load_points, pca_project};
use pbc::eval::{accuracy, confusion, ConfusionMatrix};
use pbc::graph::{build_knn_graph, AngleCache};
use pbc::pathfinder::Reachability;
use pbc::{pbc_pipeline, PointSet, Symmetrization};
use serde::Serialize;
use serde_json::Value;

use crate::config::{parse_alpha, RunConfig, Source, OUT_DIR_ENV};
use crate::error::{io_error, CliError, CliResult};

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn parse_benchmark(name: &str) -> CliResult<Benchmark> {
    name.parse()
        .map_err(|e: pbc::Error| CliError::Usage(e.to_string()))
}

/// Writes a labeled benchmark sample and returns the path written.
pub fn generate(
    name: &str,
    n: usize,
    noise: Option<f64>,
    seed: u64,
    out: Option<PathBuf>,
) -> CliResult<PathBuf> {
    let bench = parse_benchmark(name)?;
    let noise = noise.unwrap_or_else(|| bench.default_noise());
    let data = make_benchmark(bench, n, noise, seed)?;
    let path = match out {
        Some(p) => p,
        None => default_out_dir().join(format!("{}.csv", bench.name())),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    dataset::save_labeled(&path, &data)?;
    println!(
        "wrote {}: N={} K={} D={}",
        path.display(),
        data.points.len(),
        data.k,
        data.points.dim()
    );
    Ok(path)
}

/// Points plus ground truth when the source carries it.
pub struct Loaded {
    pub points: PointSet,
    pub truth: Option<Vec<usize>>,
}

pub fn load_source(source: &Source, seed: u64) -> CliResult<Loaded> {
    match source {
        Source::File {
            path,
            labeled: true,
        } => {
            let data = load_labeled(path)?;
            Ok(Loaded {
                points: data.points,
                truth: Some(data.labels),
            })
        }
        Source::File {
            path,
            labeled: false,
        } => Ok(Loaded {
            points: load_points(path)?,
            truth: None,
        }),
        Source::Benchmark { name, n, noise } => {
            let data = make_benchmark(parse_benchmark(name)?, *n, *noise, seed)?;
            Ok(Loaded {
                points: data.points,
                truth: Some(data.labels),
            })
        }
    }
}

/// Distinct label count of a labeled file, for defaulting K.
pub fn labeled_class_count(source: &Source) -> CliResult<Option<usize>> {
    match source {
        Source::File {
            path,
            labeled: true,
        } => Ok(Some(load_labeled(path)?.k)),
        _ => Ok(None),
    }
}

fn project(points: PointSet, pca_dims: Option<usize>) -> CliResult<PointSet> {
    match pca_dims {
        Some(d) => Ok(pca_project(&points, d)?),
        None => Ok(points),
    }
}

#[derive(Serialize)]
struct Diagnostics<'a> {
    config: &'a RunConfig,
    n: usize,
    dim: usize,
    k: usize,
    f: usize,
    zero_signature_count: usize,
    landmarks: &'a [usize],
    max_expansions: usize,
    merge_trace: &'a [Merge],
    accuracy: Option<f64>,
    runtime_ms: u64,
}

#[derive(Serialize)]
struct PlotPoint<'a> {
    coords: &'a [f64],
    label: usize,
}

/// Files written by `cluster`.
pub struct ClusterOutput {
    pub labels: PathBuf,
    pub diagnostics: PathBuf,
    pub plot: PathBuf,
    pub result: ClusteringResult,
    pub accuracy: Option<f64>,
}

pub fn cluster(config: &RunConfig) -> CliResult<ClusterOutput> {
    let loaded = load_source(&config.source, config.seed)?;
    let start = Instant::now();
    let points = project(loaded.points, config.pca_dims)?;
    let points = Arc::new(points);
    let result = pbc_pipeline(Arc::clone(&points), &config.params())?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let acc = match &loaded.truth {
        Some(t) => Some(accuracy(&result.labels, t)?),
        None => None,
    };

    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let labels_path = dir.join("labels.csv");
    dataset::save_labels(&labels_path, &result.labels)?;

    let diagnostics_path = dir.join("diagnostics.json");
    write_json(
        &diagnostics_path,
        &Diagnostics {
            config,
            n: points.len(),
            dim: points.dim(),
            k: result.k,
            f: result.f,
            zero_signature_count: result.zero_signature_count,
            landmarks: &result.landmarks,
            max_expansions: result.max_expansions,
            merge_trace: &result.merge_trace,
            accuracy: acc,
            runtime_ms,
        },
    )?;

    let plot_path = dir.join("plot.json");
    let plot: Vec<PlotPoint> = points
        .iter()
        .zip(&result.labels)
        .map(|(p, &label)| PlotPoint {
            coords: &p[..p.len().min(3)],
            label,
        })
        .collect();
    write_json(&plot_path, &plot)?;

    Ok(ClusterOutput {
        labels: labels_path,
        diagnostics: diagnostics_path,
        plot: plot_path,
        result,
        accuracy: acc,
    })
}

#[derive(Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub params: Value,
    pub n: usize,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub runtime_ms: u64,
}

/// Compares the last column of two label files.
pub fn eval(labels: &Path, truth: &Path, diagnostics: Option<&Path>) -> CliResult<EvalReport> {
    let start = Instant::now();
    let pred_raw = load_label_column(labels)?;
    let truth_raw = load_label_column(truth)?;
    if pred_raw.len() != truth_raw.len() {
        return Err(CliError::Usage(format!(
            "{} has {} labels but {} has {}",
            labels.display(),
            pred_raw.len(),
            truth.display(),
            truth_raw.len()
        )));
    }
    let (pred, _) = dataset::dense_labels(&pred_raw);
    let (truth_dense, _) = dataset::dense_labels(&truth_raw);
    let acc = accuracy(&pred, &truth_dense)?;
    let cm = confusion(&pred, &truth_dense)?;
    let params = match diagnostics {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_error(p, e))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            v.get("config").cloned().unwrap_or(Value::Null)
        }
        None => Value::Null,
    };
    Ok(EvalReport {
        dataset: truth.display().to_string(),
        params,
        n: pred.len(),
        accuracy: acc,
        confusion: cm,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// Parameter grid of a sweep.
#[derive(Debug, Clone)]
pub struct Grid {
    pub q: Vec<usize>,
    pub alpha: Vec<f64>,
    pub landmarks: Vec<usize>,
    pub seeds: Vec<u64>,
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Usage(format!("cannot parse {what} value {t:?}")))
        })
        .collect()
}

impl Grid {
    pub fn parse(q: &str, alpha: &str, landmarks: &str, seeds: &str) -> CliResult<Self> {
        let grid = Grid {
            q: parse_list("q", q)?,
            alpha: alpha
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(parse_alpha)
                .collect::<CliResult<_>>()?,
            landmarks: parse_list("M", landmarks)?,
            seeds: parse_list("seed", seeds)?,
        };
        if grid.q.is_empty()
            || grid.alpha.is_empty()
            || grid.landmarks.is_empty()
            || grid.seeds.is_empty()
        {
            return Err(CliError::Usage("the sweep grid is empty".into()));
        }
        Ok(grid)
    }

    pub fn cells(&self) -> usize {
        self.q.len() * self.alpha.len() * self.landmarks.len() * self.seeds.len()
    }
}

/// One line of the sweep output.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub q: usize,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub landmarks: usize,
    pub seed: u64,
    pub accuracy: Option<f64>,
    pub runtime_ms: u64,
    #[serde(rename = "F")]
    pub f: Option<usize>,
    pub zero_signature_count: Option<usize>,
    pub error: String,
}

pub struct SweepSpec {
    pub source: Source,
    pub k: Option<usize>,
    pub mode: Symmetrization,
    pub pca_dims: Option<usize>,
    pub use_cache: bool,
}

/// Runs every grid cell. The graph (and angle cache) is built once per
/// `(seed, q)` for benchmarks and once per `q` for files; failures are
/// recorded in the row instead of stopping the sweep.
pub fn sweep(spec: &SweepSpec, grid: &Grid) -> CliResult<Vec<SweepRow>> {
    if let Source::File { labeled: false, .. } = spec.source {
        return Err(CliError::Usage(
            "sweep needs ground truth: pass a labeled file or a benchmark".into(),
        ));
    }
    let bench = spec.source.benchmark();
    let k = spec.k.or(bench.map(|b| b.k()));
    let mut fixed = None;
    let mut rows = Vec::with_capacity(grid.cells());
    for &seed in &grid.seeds {
        let loaded = match (&spec.source, &fixed) {
            (Source::File { .. }, Some(l)) => Arc::clone(l),
            _ => {
                let l = load_source(&spec.source, seed)?;
                let points = project(l.points, spec.pca_dims)?;
                let truth = l.truth.expect("sweep sources carry labels");
                let l = Arc::new((Arc::new(points), truth));
                if matches!(spec.source, Source::File { .. }) {
                    fixed = Some(Arc::clone(&l));
                }
                l
            }
        };
        let (points, truth) = (&loaded.0, &loaded.1);
        let k = k.unwrap_or_else(|| dataset::dense_labels(truth).1);
        for &q in &grid.q {
            let graph = build_knn_graph(Arc::clone(points), q, spec.mode);
            let cache = match (&graph, spec.use_cache) {
                (Ok(g), true) => Some(AngleCache::new(g)),
                _ => None,
            };
            for &alpha in &grid.alpha {
                for &m in &grid.landmarks {
                    let params = PbcParams::new(q, k)
                        .with_alpha(alpha)
                        .with_landmarks(m)
                        .with_seed(seed)
                        .with_mode(spec.mode);
                    let start = Instant::now();
                    let outcome = graph.as_ref().map_err(|e| e.to_string()).and_then(|g| {
                        let reach = match &cache {
                            Some(c) => Reachability::with_cache(g, c),
                            None => Reachability::new(g),
                        };
                        let r = cluster_graph(reach, &params).map_err(|e| e.to_string())?;
                        let a = accuracy(&r.labels, truth).map_err(|e| e.to_string())?;
                        Ok((r, a))
                    });
                    let runtime_ms = start.elapsed().as_millis() as u64;
                    rows.push(match outcome {
                        Ok((r, a)) => SweepRow {
                            q,
                            alpha,
                            landmarks: m,
                            seed,
                            accuracy: Some(a),
                            runtime_ms,
                            f: Some(r.f),
                            zero_signature_count: Some(r.zero_signature_count),
                            error: String::new(),
                        },
                        Err(e) => SweepRow {
                            q,
                            alpha,
                            landmarks: m,
                            seed,
                            accuracy: None,
                            runtime_ms,
                            f: None,
                            zero_signature_count: None,
                            error: e,
                        },
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn default_sweep_path() -> PathBuf {
    default_out_dir().join("sweep.csv")
}
