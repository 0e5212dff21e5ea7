//! Configuration, orchestration and artifact writing behind the `hampart` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hampart::hamiltonian::{load_fcidump, load_json, MolecularTensors};
use hampart::metrics::{reports_to_csv, TrotterReport};
use hampart::pipeline::{self, Method, PipelineConfig, SectorChoice};
use hampart::qubit::Mapping;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Printed under every summary table.
pub const TGATE_FOOTNOTE: &str =
    "T-gate counts depend on heuristic partition outcomes and mapping conventions; \
published values are matched to within a factor of 3, not digit for digit.";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hampart::Error),
}

impl CliError {
    /// 2 for configuration mistakes, 1 for failures inside the computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(hampart::Error::InvalidArgument(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Defaults to the input file stem.
    pub molecule: Option<String>,
    pub method: Method,
    pub mapping: Mapping,
    pub threshold: f64,
    pub seed: u64,
    pub sector: String,
    pub epsilon: f64,
    pub fro_fragments: usize,
    pub max_qubits: usize,
    pub max_fragments: usize,
    pub time_budget_secs: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            input: PathBuf::new(),
            molecule: None,
            method: p.method,
            mapping: p.mapping,
            threshold: p.threshold,
            seed: p.fit.seed,
            sector: "auto-neutral-ground".into(),
            epsilon: p.epsilon,
            fro_fragments: p.fro_fragments,
            max_qubits: p.max_qubits,
            max_fragments: p.max_fragments,
            time_budget_secs: None,
        }
    }
}

impl RunConfig {
    /// Reads a TOML config file.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        if cfg.input.is_relative() && !cfg.input.as_os_str().is_empty() {
            if let Some(dir) = path.parent() {
                cfg.input = dir.join(&cfg.input);
            }
        }
        Ok(cfg)
    }

    pub fn molecule_name(&self) -> String {
        self.molecule.clone().unwrap_or_else(|| {
            self.input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "molecule".into())
        })
    }

    pub fn pipeline(&self) -> CliResult<PipelineConfig> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(usage(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.threshold >= 0.0) {
            return Err(usage(format!(
                "threshold must be non-negative, got {}",
                self.threshold
            )));
        }
        if self.max_fragments == 0 {
            return Err(usage("max_fragments must be at least 1"));
        }
        let sector: SectorChoice = self.sector.parse().map_err(usage)?;
        let mut p = PipelineConfig {
            method: self.method,
            mapping: self.mapping,
            threshold: self.threshold,
            fro_fragments: self.fro_fragments,
            epsilon: self.epsilon,
            sector,
            max_qubits: self.max_qubits,
            max_fragments: self.max_fragments,
            time_budget_secs: self.time_budget_secs,
            ..PipelineConfig::default()
        };
        p.fit.seed = self.seed;
        Ok(p)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

pub fn load_input(path: &Path) -> CliResult<MolecularTensors> {
    if !path.is_file() {
        return Err(usage(format!("input file {} not found", path.display())));
    }
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    Ok(if is_json {
        load_json(path)?
    } else {
        load_fcidump(path)?
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub input_sha256: String,
    pub hampart_version: String,
    pub cli_version: String,
    pub wall_time_secs: f64,
    pub config: RunConfig,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: TrotterReport,
    pub partition_json: String,
    pub provenance: Provenance,
}

fn file_sha256(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(hampart::Error::from)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn provenance(cfg: &RunConfig, start: Instant) -> CliResult<Provenance> {
    Ok(Provenance {
        config_sha256: cfg.hash(),
        input_sha256: file_sha256(&cfg.input)?,
        hampart_version: hampart::VERSION.into(),
        cli_version: env!("CARGO_PKG_VERSION").into(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    })
}

/// Partitions the input without evaluating metrics.
pub fn partition_only(cfg: &RunConfig) -> CliResult<(String, Vec<String>)> {
    let p = cfg.pipeline()?;
    let t = load_input(&cfg.input)?;
    let outcome = pipeline::partition(&t, &p)?;
    Ok((outcome.partition.to_json()?, outcome.warnings))
}

/// Runs the full pipeline for one configuration.
pub fn run(cfg: &RunConfig) -> CliResult<RunOutput> {
    let start = Instant::now();
    let p = cfg.pipeline()?;
    let t = load_input(&cfg.input)?;
    let (outcome, report) = pipeline::run(&t, &cfg.molecule_name(), &p)?;
    Ok(RunOutput {
        report,
        partition_json: outcome.partition.to_json()?,
        provenance: provenance(cfg, start)?,
    })
}

/// Paths of the files written by [`write_artifacts`].
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub partition: PathBuf,
    pub report_json: PathBuf,
    pub report_csv: PathBuf,
    pub provenance: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path, report: &TrotterReport) -> Self {
        let stem = format!("{}-{}-{}", report.molecule, report.method, report.mapping);
        Self {
            partition: dir.join(format!("{stem}.partition.json")),
            report_json: dir.join(format!("{stem}.report.json")),
            report_csv: dir.join(format!("{stem}.report.csv")),
            provenance: dir.join(format!("{stem}.provenance.json")),
        }
    }
}

pub fn write_artifacts(dir: &Path, out: &RunOutput) -> CliResult<Artifacts> {
    fs::create_dir_all(dir).map_err(hampart::Error::from)?;
    let paths = Artifacts::new(dir, &out.report);
    let write = |path: &Path, text: &str| fs::write(path, text).map_err(hampart::Error::from);
    write(&paths.partition, &out.partition_json)?;
    write(
        &paths.report_json,
        &out.report.to_json().map_err(hampart::Error::from)?,
    )?;
    write(
        &paths.report_csv,
        &reports_to_csv(std::slice::from_ref(&out.report))?,
    )?;
    let prov = serde_json::to_string_pretty(&out.provenance).map_err(hampart::Error::from)?;
    write(&paths.provenance, &prov)?;
    Ok(paths)
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub reports: Vec<TrotterReport>,
    pub csv: String,
    pub mixed_epsilon: bool,
}

/// Merges reports into one table sorted by molecule, then figure of merit.
pub fn compare_reports(mut reports: Vec<TrotterReport>) -> CliResult<Comparison> {
    if reports.len() < 2 {
        return Err(usage(format!(
            "compare needs at least two runs, got {}",
            reports.len()
        )));
    }
    reports.sort_by(|a, b| {
        a.molecule
            .cmp(&b.molecule)
            .then(a.figure_of_merit.total_cmp(&b.figure_of_merit))
            .then(a.method.cmp(&b.method))
            .then(a.mapping.cmp(&b.mapping))
    });
    let eps = reports[0].epsilon;
    let mixed_epsilon = reports.iter().any(|r| r.epsilon != eps);
    let csv = reports_to_csv(&reports)?;
    Ok(Comparison {
        reports,
        csv,
        mixed_epsilon,
    })
}

/// Runs every configuration and merges the reports.
pub fn compare(configs: &[RunConfig]) -> CliResult<Comparison> {
    if configs.len() < 2 {
        return Err(usage(format!(
            "compare needs at least two configurations, got {}",
            configs.len()
        )));
    }
    let reports = configs
        .iter()
        .map(|c| run(c).map(|o| o.report))
        .collect::<CliResult<Vec<_>>>()?;
    compare_reports(reports)
}

/// Plain-text summary of reports, ending with the T-gate footnote.
pub fn summary_table(reports: &[TrotterReport]) -> String {
    let mut s = format!(
        "{:<10} {:<12} {:<4} {:>4} {:>12} {:>12} {:>12} {:>12} {:>8} {:>12}\n",
        "molecule", "method", "map", "frag", "alpha", "alpha_q", "beta", "beta_q", "N_R", "N_T"
    );
    for r in reports {
        let n_t = r
            .n_t
            .map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
        s += &format!(
            "{:<10} {:<12} {:<4} {:>4} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>8} {:>12}{}\n",
            r.molecule,
            r.method,
            r.mapping,
            r.n_fragments,
            r.alpha,
            r.alpha_q,
            r.beta,
            r.beta_q,
            r.n_rotations,
            n_t,
            if r.complete { "" } else { "  (incomplete)" }
        );
    }
    s + "note: " + TGATE_FOOTNOTE + "\n"
}
