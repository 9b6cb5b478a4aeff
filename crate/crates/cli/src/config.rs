//! Run configuration: JSON file values overridden by command-line flags.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use pbc::cluster::{default_landmarks, PbcParams, DEFAULT_ALPHA};
use pbc::datagen::Benchmark;
use pbc::Symmetrization;
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliError, CliResult};

pub const OUT_DIR_ENV: &str = "PBC_OUT_DIR";
pub const DEFAULT_Q: usize = 10;
pub const DEFAULT_N: usize = 1500;

/// Parses an angle: `140deg` is degrees, a bare number is radians.
pub fn parse_alpha(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let (num, degrees) = match s.strip_suffix("deg") {
        Some(rest) => (rest.trim(), true),
        None => (s, false),
    };
    let v: f64 = num
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse angle {s:?}")))?;
    // v / 180 * pi keeps 180deg exactly equal to pi
    let rad = if degrees { v / 180.0 * PI } else { v };
    check_alpha(rad)?;
    Ok(rad)
}

pub fn check_alpha(alpha: f64) -> CliResult<()> {
    if (0.0..=PI).contains(&alpha) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "alpha = {alpha} rad ({:.3} deg) is outside [0, pi]",
            alpha.to_degrees()
        )))
    }
}

/// An angle in a config file: a number of radians or a string with an
/// optional `deg` suffix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Text(String),
}

impl AngleValue {
    fn radians(&self) -> CliResult<f64> {
        match self {
            AngleValue::Radians(r) => {
                check_alpha(*r)?;
                Ok(*r)
            }
            AngleValue::Text(s) => parse_alpha(s),
        }
    }
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub labeled: Option<bool>,
    pub benchmark: Option<String>,
    pub n: Option<usize>,
    pub noise: Option<f64>,
    pub q: Option<usize>,
    pub k: Option<usize>,
    pub landmarks: Option<usize>,
    pub alpha: Option<AngleValue>,
    pub seed: Option<u64>,
    pub mode: Option<Symmetrization>,
    pub pca_dims: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Flag values of `cluster`, before merging with a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub labeled: bool,
    pub benchmark: Option<String>,
    pub n: Option<usize>,
    pub noise: Option<f64>,
    pub q: Option<usize>,
    pub k: Option<usize>,
    pub landmarks: Option<usize>,
    pub alpha: Option<String>,
    pub seed: Option<u64>,
    pub mode: Option<Symmetrization>,
    pub pca_dims: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

/// Where the points come from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    /// A CSV file; with `labeled`, its last column holds ground truth.
    File {
        path: PathBuf,
        labeled: bool,
    },
    Benchmark {
        name: String,
        n: usize,
        noise: f64,
    },
}

impl Source {
    pub fn benchmark(&self) -> Option<Benchmark> {
        match self {
            Source::Benchmark { name, .. } => name.parse().ok(),
            Source::File { .. } => None,
        }
    }
}

/// Fully resolved settings of one clustering run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub source: Source,
    pub q: usize,
    pub k: usize,
    pub landmarks: usize,
    pub alpha: f64,
    pub alpha_deg: f64,
    pub seed: u64,
    pub mode: Symmetrization,
    pub pca_dims: Option<usize>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Merges flags over the config file. `known_k` is the class count of
    /// labeled input, used when K is given nowhere else.
    pub fn resolve(
        file: ConfigFile,
        flags: Overrides,
        known_k: impl FnOnce(&Source) -> CliResult<Option<usize>>,
    ) -> CliResult<Self> {
        let input = flags.input.or(file.input);
        let benchmark = flags.benchmark.or(file.benchmark);
        let source = match (input, benchmark) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give either an input file or a benchmark, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Usage(
                    "an input file or a benchmark is required".into(),
                ))
            }
            (Some(path), None) => Source::File {
                path,
                labeled: flags.labeled || file.labeled.unwrap_or(false),
            },
            (None, Some(name)) => {
                let bench: Benchmark = name
                    .parse()
                    .map_err(|e: pbc::Error| CliError::Usage(e.to_string()))?;
                let noise = flags
                    .noise
                    .or(file.noise)
                    .unwrap_or_else(|| bench.default_noise());
                if !(noise.is_finite() && noise >= 0.0) {
                    return Err(CliError::Usage(format!(
                        "noise must be nonnegative, got {noise}"
                    )));
                }
                Source::Benchmark {
                    name: bench.name().to_string(),
                    n: flags.n.or(file.n).unwrap_or(DEFAULT_N),
                    noise,
                }
            }
        };

        // benchmarks start from their tuned parameters
        let base = source.benchmark().map(|b| b.tuned_params());
        let k = match flags.k.or(file.k).or(base.map(|p| p.k)) {
            Some(k) => k,
            None => known_k(&source)?
                .ok_or_else(|| CliError::Usage("K is required for unlabeled input".into()))?,
        };
        let alpha = match (flags.alpha, file.alpha) {
            (Some(s), _) => parse_alpha(&s)?,
            (None, Some(a)) => a.radians()?,
            (None, None) => base.map_or(DEFAULT_ALPHA, |p| p.alpha),
        };
        let q = flags
            .q
            .or(file.q)
            .or(base.map(|p| p.q))
            .unwrap_or(DEFAULT_Q);
        let landmarks = flags
            .landmarks
            .or(file.landmarks)
            .or(base.map(|p| p.landmarks))
            .unwrap_or_else(|| default_landmarks(k));
        let mode = flags
            .mode
            .or(file.mode)
            .or(base.map(|p| p.mode))
            .unwrap_or_default();
        let out_dir = flags
            .out_dir
            .or(file.out_dir)
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));

        let config = RunConfig {
            source,
            q,
            k,
            landmarks,
            alpha,
            alpha_deg: alpha.to_degrees(),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            mode,
            pca_dims: flags.pca_dims.or(file.pca_dims),
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> CliResult<()> {
        check_alpha(self.alpha)?;
        if self.q == 0 {
            return Err(CliError::Usage("q must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(CliError::Usage("K must be at least 1".into()));
        }
        if self.landmarks < self.k {
            return Err(CliError::Usage(format!(
                "M = {} must be at least K = {}",
                self.landmarks, self.k
            )));
        }
        if self.pca_dims == Some(0) {
            return Err(CliError::Usage("pca dimension must be at least 1".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> PbcParams {
        PbcParams::new(self.q, self.k)
            .with_landmarks(self.landmarks)
            .with_alpha(self.alpha)
            .with_seed(self.seed)
            .with_mode(self.mode)
    }
}
