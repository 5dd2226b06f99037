//! Mode dispatch: reads inputs, runs one analysis, writes artifacts.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{read_json, ConfigError, ModelConfig};
use super::ingest::{load_dataset, Dataset, DatasetPaths, IngestError};
use super::report::{correlation_table, render_fit_report, write_fit_csv};
use crate::descriptives::{describe, DescribeError, DescribeOptions};
use crate::estimator::{estimate, lagged_design, EstimationError, EstimationSettings, FitResult};
use crate::gof::{catalog_descriptors, default_aux, run_gof_with, ChainStart, GofError, Thresholds};
use crate::netcore::{MultilevelNetwork, NetworkError};
use crate::sampler::{simulate_with, ChainConfig, SamplerError, Theta};
use crate::statcat::{evaluate, statistic_vector, ModelSpec, StatError};

/// Exit status for a fit that did not converge.
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_ERROR: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Stats,
    Describe,
    Simulate,
    Estimate,
    Gof,
    Correlate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Stats => "stats",
            Mode::Describe => "describe",
            Mode::Simulate => "simulate",
            Mode::Estimate => "estimate",
            Mode::Gof => "gof",
            Mode::Correlate => "correlate",
        }
    }

    /// Chain stream under the top-level seed.
    fn stream(self) -> u64 {
        match self {
            Mode::Estimate => 0,
            Mode::Simulate => 1,
            Mode::Gof => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Gof(#[from] GofError),
    #[error(transparent)]
    Describe(#[from] DescribeError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("mode `{mode}` needs {what}")]
    MissingInput { mode: &'static str, what: &'static str },
    #[error("fit statistics {fit:?} do not match the model {model:?}")]
    FitMismatch { fit: Vec<String>, model: Vec<String> },
    #[error("lagged design needs two waves, found {0}")]
    NotTwoWaves(usize),
}

impl WorkbenchError {
    pub fn kind(&self) -> &'static str {
        match self {
            WorkbenchError::Ingest(_) => "ingest",
            WorkbenchError::Config(_) => "config",
            WorkbenchError::Stat(_) => "statistic",
            WorkbenchError::Network(_) => "network",
            WorkbenchError::Sampler(_) => "sampler",
            WorkbenchError::Estimation(_) => "estimation",
            WorkbenchError::Gof(_) => "gof",
            WorkbenchError::Describe(_) => "describe",
            WorkbenchError::Io { .. } | WorkbenchError::Csv { .. } => "io",
            WorkbenchError::MissingInput { .. } => "missing_input",
            WorkbenchError::FitMismatch { .. } => "fit_mismatch",
            WorkbenchError::NotTwoWaves(_) => "waves",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub nodes: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub nodes_wave2: Option<PathBuf>,
    pub model: Option<PathBuf>,
    /// Chain settings JSON; defaults apply when absent.
    pub chain: Option<PathBuf>,
    /// Estimation settings JSON; defaults apply when absent.
    pub settings: Option<PathBuf>,
    /// Fit to read in `gof`, `correlate` and `simulate`. `gof` and
    /// `correlate` fall back to `<out>/fit.json`.
    pub fit: Option<PathBuf>,
    pub out: PathBuf,
    /// Overrides the seed of the chain settings.
    pub seed: Option<u64>,
    /// Minimum number of users an object needs to be kept.
    pub min_usage: Option<u32>,
    /// Wave-1 actor ties held fixed, wave-2 object and usage ties modeled.
    pub lagged: bool,
    pub gof_start: ChainStart,
    pub raw_diversity: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Success => 0,
            RunStatus::NotConverged => EXIT_NOT_CONVERGED,
        }
    }
}

struct Artifacts<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Artifacts<'_> {
    fn text(&mut self, name: &str, content: &str) -> Result<(), WorkbenchError> {
        let path = self.dir.join(name);
        fs::write(&path, content).map_err(|source| WorkbenchError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    fn with_file<E>(&mut self, name: &str, f: impl FnOnce(BufWriter<File>) -> Result<(), E>) -> Result<(), WorkbenchError>
    where
        E: Into<WriteFailure>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|source| WorkbenchError::Io {
            path: path.clone(),
            source,
        })?;
        f(BufWriter::new(file)).map_err(|e| match e.into() {
            WriteFailure::Csv(source) => WorkbenchError::Csv {
                path: path.clone(),
                source,
            },
            WriteFailure::Io(source) => WorkbenchError::Io {
                path: path.clone(),
                source,
            },
            WriteFailure::Other(e) => e,
        })?;
        self.written.push(path);
        Ok(())
    }
}

enum WriteFailure {
    Csv(csv::Error),
    Io(io::Error),
    Other(WorkbenchError),
}

impl From<csv::Error> for WriteFailure {
    fn from(e: csv::Error) -> Self {
        WriteFailure::Csv(e)
    }
}

impl From<io::Error> for WriteFailure {
    fn from(e: io::Error) -> Self {
        WriteFailure::Io(e)
    }
}

impl From<GofError> for WriteFailure {
    fn from(e: GofError) -> Self {
        WriteFailure::Other(e.into())
    }
}

impl From<DescribeError> for WriteFailure {
    fn from(e: DescribeError) -> Self {
        WriteFailure::Other(e.into())
    }
}

fn need<'a, T>(v: &'a Option<T>, mode: Mode, what: &'static str) -> Result<&'a T, WorkbenchError> {
    v.as_ref().ok_or(WorkbenchError::MissingInput { mode: mode.name(), what })
}

fn dataset(mode: Mode, cfg: &RunConfig) -> Result<Dataset, WorkbenchError> {
    let paths = DatasetPaths {
        nodes: need(&cfg.nodes, mode, "a node table (--nodes)")?.clone(),
        edges: need(&cfg.edges, mode, "an edge table (--edges)")?.clone(),
        nodes_wave2: cfg.nodes_wave2.clone(),
    };
    Ok(load_dataset(&paths, cfg.min_usage)?)
}

fn model(mode: Mode, cfg: &RunConfig) -> Result<(ModelConfig, ModelSpec<f64>), WorkbenchError> {
    let mc = ModelConfig::load(need(&cfg.model, mode, "a model file (--model)")?)?;
    let spec = mc.to_spec()?;
    Ok((mc, spec))
}

fn chain_config(mode: Mode, cfg: &RunConfig) -> Result<ChainConfig, WorkbenchError> {
    let mut chain: ChainConfig = match &cfg.chain {
        Some(p) => read_json(p)?,
        None => ChainConfig::default(),
    };
    if let Some(seed) = cfg.seed {
        chain.seed = seed;
    }
    chain.stream = mode.stream();
    chain.validate()?;
    Ok(chain)
}

/// Observed network and model after applying the lagged design if asked.
fn observed(
    data: &Dataset,
    spec: ModelSpec<f64>,
    lagged: bool,
) -> Result<(MultilevelNetwork, ModelSpec<f64>), WorkbenchError> {
    if lagged {
        if data.waves.len() != 2 {
            return Err(WorkbenchError::NotTwoWaves(data.waves.len()));
        }
        return Ok(lagged_design(&data.waves[0], &data.waves[1], &spec)?);
    }
    Ok((data.last().clone(), spec))
}

fn read_fit(mode: Mode, cfg: &RunConfig, spec: &ModelSpec<f64>) -> Result<FitResult<f64>, WorkbenchError> {
    let path = cfg.fit.clone().unwrap_or_else(|| cfg.out.join("fit.json"));
    let fit: FitResult<f64> = read_json(&path).map_err(|e| match e {
        ConfigError::Read { .. } if !path.exists() => WorkbenchError::MissingInput {
            mode: mode.name(),
            what: "a fit (--fit or fit.json in the output directory)",
        },
        e => e.into(),
    })?;
    if fit.statistics != spec.keys() {
        return Err(WorkbenchError::FitMismatch {
            fit: fit.statistics.clone(),
            model: spec.keys(),
        });
    }
    Ok(fit)
}

pub fn run(mode: Mode, cfg: &RunConfig) -> Result<RunOutcome, WorkbenchError> {
    fs::create_dir_all(&cfg.out).map_err(|source| WorkbenchError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let mut out = Artifacts {
        dir: &cfg.out,
        written: Vec::new(),
    };
    let mut status = RunStatus::Success;
    match mode {
        Mode::Stats => {
            let data = dataset(mode, cfg)?;
            out.text("ingest.txt", &data.summary.to_text())?;
            let (net, descriptors) = if cfg.model.is_some() {
                let (_, spec) = model(mode, cfg)?;
                let (net, spec) = observed(&data, spec, cfg.lagged)?;
                (net, spec.stats().to_vec())
            } else {
                let net = data.last().clone();
                let all = catalog_descriptors(&net);
                (net, all)
            };
            let groups = net.split_by_group();
            let values = evaluate(&net, &descriptors)?;
            let per_group = groups
                .iter()
                .map(|(_, g)| evaluate(g, &descriptors))
                .collect::<Result<Vec<_>, _>>()?;
            out.with_file("stats.csv", |f| -> Result<(), csv::Error> {
                let mut w = csv::Writer::from_writer(f);
                let mut header = vec!["statistic".to_string(), "value".into()];
                header.extend(groups.iter().map(|(g, _)| g.clone()));
                w.write_record(&header)?;
                for (k, d) in descriptors.iter().enumerate() {
                    let mut row = vec![d.key(), values[k].to_string()];
                    row.extend(per_group.iter().map(|v| v[k].to_string()));
                    w.write_record(&row)?;
                }
                w.flush()?;
                Ok(())
            })?;
        }
        Mode::Describe => {
            let data = dataset(mode, cfg)?;
            out.text("ingest.txt", &data.summary.to_text())?;
            let options = DescribeOptions {
                raw_diversity: cfg.raw_diversity,
                ..Default::default()
            };
            let report = describe(&data.last().split_by_group(), &options)?;
            out.text("descriptives.txt", &report.to_text())?;
            out.with_file("descriptives.csv", |f| report.write_csv(f))?;
        }
        Mode::Simulate => {
            let data = dataset(mode, cfg)?;
            let (mc, spec) = model(mode, cfg)?;
            let (net, spec) = observed(&data, spec, cfg.lagged)?;
            let theta = match (&cfg.fit, &mc.theta) {
                (Some(_), _) => read_fit(mode, cfg, &spec)?.theta_hat,
                (None, Some(t)) => Theta(t.clone()),
                (None, None) => {
                    return Err(WorkbenchError::MissingInput {
                        mode: mode.name(),
                        what: "parameters (--fit or `theta` in the model file)",
                    })
                }
            };
            let chain = chain_config(mode, cfg)?;
            let observed_stats = statistic_vector(&net, &spec)?;
            let mut draws: Vec<Vec<f64>> = Vec::new();
            let keep = chain.keep_draws;
            let summary = simulate_with(&net, &theta, &spec, &chain, |_, z| {
                if keep {
                    draws.push(z.to_vec());
                }
            })?;
            let keys = spec.keys();
            out.with_file("simulation.csv", |f| -> Result<(), csv::Error> {
                let mut w = csv::Writer::from_writer(f);
                w.write_record(["statistic", "observed", "mean", "sd"])?;
                for (k, key) in keys.iter().enumerate() {
                    w.write_record([
                        key.clone(),
                        observed_stats[k].to_string(),
                        summary.mean[k].to_string(),
                        summary.sd[k].to_string(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })?;
            if keep {
                out.with_file("draws.csv", |f| -> Result<(), csv::Error> {
                    let mut w = csv::Writer::from_writer(f);
                    w.write_record(&keys)?;
                    for d in &draws {
                        w.write_record(d.iter().map(|v| v.to_string()))?;
                    }
                    w.flush()?;
                    Ok(())
                })?;
            }
            let mut note = format!(
                "{} draws, acceptance rate {:.4}\n",
                chain.sample_size, summary.acceptance_rate
            );
            if summary.degeneracy_warning {
                note.push_str("warning: a statistic moved monotonically over the second half of the sample\n");
            }
            out.text("simulation.txt", &note)?;
        }
        Mode::Estimate => {
            let data = dataset(mode, cfg)?;
            out.text("ingest.txt", &data.summary.to_text())?;
            let (_, spec) = model(mode, cfg)?;
            let (net, spec) = observed(&data, spec, cfg.lagged)?;
            let settings: EstimationSettings = match &cfg.settings {
                Some(p) => read_json(p)?,
                None => EstimationSettings::default(),
            };
            let chain = chain_config(mode, cfg)?;
            let fit = estimate(&net, &spec, &settings, &chain)?;
            if !fit.converged {
                status = RunStatus::NotConverged;
            }
            let json = serde_json::to_string_pretty(&fit).expect("fit serializes");
            out.text("fit.json", &json)?;
            out.with_file("fit.csv", |f| write_fit_csv(&fit, f))?;
            let report = render_fit_report(&fit, spec.stats());
            out.text("fit_report.txt", &report.to_text())?;
            out.with_file("fit_report.csv", |f| report.write_csv(f))?;
        }
        Mode::Gof => {
            let data = dataset(mode, cfg)?;
            let (_, spec) = model(mode, cfg)?;
            let (net, spec) = observed(&data, spec, cfg.lagged)?;
            let fit = read_fit(mode, cfg, &spec)?;
            let chain = chain_config(mode, cfg)?;
            let aux = default_aux(&net, &spec);
            let table = run_gof_with(&net, &fit, &spec, &aux, &chain, cfg.gof_start, Thresholds::default())?;
            out.with_file("gof.csv", |f| table.write_csv(f))?;
            out.text("gof.txt", &table.to_text())?;
        }
        Mode::Correlate => {
            let (_, spec) = model(mode, cfg)?;
            let fit = read_fit(mode, cfg, &spec)?;
            let table = correlation_table(&fit)?;
            out.text("correlations.txt", &table.to_text())?;
            out.with_file("correlations.csv", |f| table.write_csv(f))?;
        }
    }
    Ok(RunOutcome {
        status,
        artifacts: out.written,
    })
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    mode: &'a str,
    error: &'a str,
    message: String,
}

/// Runs `mode` and maps the result to an exit status. Failures are printed
/// to stderr and written to `<out>/error.json`.
pub fn run_to_exit(mode: Mode, cfg: &RunConfig) -> i32 {
    match run(mode, cfg) {
        Ok(outcome) => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for a in &outcome.artifacts {
                let _ = writeln!(lock, "wrote {}", a.display());
            }
            if outcome.status == RunStatus::NotConverged {
                eprintln!("estimation did not converge; results written anyway");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            let report = ErrorReport {
                mode: mode.name(),
                error: e.kind(),
                message: e.to_string(),
            };
            if fs::create_dir_all(&cfg.out).is_ok() {
                let _ = fs::write(
                    cfg.out.join("error.json"),
                    serde_json::to_string_pretty(&report).expect("report serializes"),
                );
            }
            EXIT_ERROR
        }
    }
}
