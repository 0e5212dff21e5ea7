use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hampart::metrics::{reports_to_csv, tgate_count, TrotterReport};
use hampart::pipeline::Method;
use hampart::qubit::Mapping;
use hampart_cli::{
    compare, compare_reports, partition_only, run, summary_table, write_artifacts, CliError,
    CliResult, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "hampart",
    version,
    about = "Hamiltonian partitioning and Trotter error metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a Hamiltonian and print or save the fragments as JSON.
    Partition {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition and evaluate every Trotter metric.
    Metrics {
        #[command(flatten)]
        run: RunArgs,
        /// Directory for partition, report and provenance files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// T-gate estimate from a commutator norm and rotation count, or from a saved report.
    Tgate {
        #[arg(long, conflicts_with = "report", requires = "n_rotations")]
        alpha: Option<f64>,
        #[arg(long)]
        n_rotations: Option<usize>,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Merge several runs into one CSV table.
    Compare {
        /// TOML run configurations.
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        /// Previously written report JSON files.
        #[arg(long = "report")]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

/// Command-line overrides on top of an optional config file.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// FCIDUMP file, or integrals JSON if the extension is `.json`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    molecule: Option<String>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    mapping: Option<Mapping>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `auto-neutral-ground`, `full`, or `eta,2m[,2s]`.
    #[arg(long)]
    sector: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    fro_fragments: Option<usize>,
    #[arg(long)]
    max_qubits: Option<usize>,
    #[arg(long)]
    max_fragments: Option<usize>,
    #[arg(long)]
    time_budget: Option<f64>,
}

impl RunArgs {
    fn resolve(self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { c.$target = v; })*
            };
        }
        apply!(input => input, method => method, mapping => mapping, threshold => threshold, seed => seed,
            sector => sector, epsilon => epsilon, fro_fragments => fro_fragments, max_qubits => max_qubits,
            max_fragments => max_fragments);
        if self.molecule.is_some() {
            c.molecule = self.molecule;
        }
        if self.time_budget.is_some() {
            c.time_budget_secs = self.time_budget;
        }
        if c.input.as_os_str().is_empty() {
            return Err(CliError::Usage(
                "an input file is required (--input or `input` in the config)".into(),
            ));
        }
        Ok(c)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Core(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_report(path: &PathBuf) -> CliResult<TrotterReport> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    TrotterReport::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn execute(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Partition { run: args, out } => {
            let cfg = args.resolve()?;
            let (json, warnings) = partition_only(&cfg)?;
            warnings.iter().for_each(|w| log::warn!("{w}"));
            emit(out.as_ref(), &(json + "\n"))
        }
        Command::Metrics {
            run: args,
            out_dir,
            format,
        } => {
            let cfg = args.resolve()?;
            let output = run(&cfg)?;
            output
                .report
                .warnings
                .iter()
                .for_each(|w| log::warn!("{w}"));
            if let Some(dir) = &out_dir {
                let paths = write_artifacts(dir, &output)?;
                log::info!("report written to {}", paths.report_json.display());
            }
            let r = std::slice::from_ref(&output.report);
            let text = match format {
                Format::Table => summary_table(r),
                Format::Json => output.report.to_json().map_err(hampart::Error::from)? + "\n",
                Format::Csv => reports_to_csv(r)?,
            };
            emit(None, &text)
        }
        Command::Tgate {
            alpha,
            n_rotations,
            epsilon,
            report,
        } => {
            let (alpha, n_rot) = match (alpha, n_rotations, &report) {
                (_, _, Some(path)) => {
                    let r = read_report(path)?;
                    (r.alpha_q, n_rotations.unwrap_or(r.n_rotations))
                }
                (Some(a), Some(n), None) => (a, n),
                _ => {
                    return Err(CliError::Usage(
                        "give --alpha with --n-rotations, or --report".into(),
                    ))
                }
            };
            let est = tgate_count(alpha, n_rot, epsilon)?;
            let json = serde_json::json!({
                "alpha": alpha,
                "n_rotations": n_rot,
                "epsilon": epsilon,
                "n_t": est.n_t,
                "error_split": est.split,
            });
            emit(
                None,
                &(serde_json::to_string_pretty(&json).map_err(hampart::Error::from)? + "\n"),
            )
        }
        Command::Compare {
            configs,
            reports,
            out,
        } => {
            let comparison = if !configs.is_empty() && reports.is_empty() {
                let cfgs = configs
                    .iter()
                    .map(|p| RunConfig::from_file(p))
                    .collect::<CliResult<Vec<_>>>()?;
                compare(&cfgs)?
            } else if configs.is_empty() {
                compare_reports(
                    reports
                        .iter()
                        .map(read_report)
                        .collect::<CliResult<Vec<_>>>()?,
                )?
            } else {
                return Err(CliError::Usage(
                    "use either --config or --report, not both".into(),
                ));
            };
            if comparison.mixed_epsilon {
                log::warn!("the compared runs use different epsilon values");
            }
            emit(out.as_ref(), &comparison.csv)?;
            eprint!("{}", summary_table(&comparison.reports));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
