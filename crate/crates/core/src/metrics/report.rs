use serde::{Deserialize, Serialize};

use super::commutators::{
    alpha_ordered, alpha_ordered_with, alpha_projected, alpha_pruned, project_all, MetricOptions,
};
use super::descriptors::{second_order_estimate, spectral_descriptors, FragmentSpectrum};
use super::tgate::{tgate_count, ErrorSplit};
use crate::error::{Error, Result};
use crate::spectra::{dense_spectrum, LinearOperator, SectorLabels, SymmetrySector};

/// Everything the report needs from a partition, already in operator form.
pub struct ReportInput<'a, A> {
    pub method: String,
    pub molecule: String,
    pub mapping: String,
    pub operators: &'a [A],
    /// Full-space spectral ranges, one per operator.
    pub spectra: Vec<FragmentSpectrum>,
    /// Exact structural test: `true` only if the two fragments certainly commute.
    pub commute: &'a (dyn Fn(usize, usize) -> bool + Sync),
    /// Builds `Σ_{m<n} H_m` as one operator; defaults to a lazy sum of the fragments.
    pub prefix: Option<&'a (dyn Fn(usize) -> Result<A> + Sync)>,
    pub n_rotations: usize,
    pub residual_l1: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterReport {
    pub molecule: String,
    pub method: String,
    pub mapping: String,
    pub sector: String,
    pub n_fragments: usize,
    pub alpha: f64,
    pub alpha_ordered: f64,
    pub alpha_q: f64,
    pub beta: f64,
    pub beta_q: f64,
    pub c: f64,
    pub c_q: f64,
    pub s_l: f64,
    pub s_l_q: f64,
    pub second_order: f64,
    pub n_rotations: usize,
    pub figure_of_merit: f64,
    pub epsilon: f64,
    pub n_t: Option<f64>,
    pub error_split: Option<ErrorSplit>,
    pub residual_l1: f64,
    pub complete: bool,
    pub warnings: Vec<String>,
    pub fragments: Vec<FragmentSpectrum>,
    pub fragments_projected: Vec<FragmentSpectrum>,
}

/// Flat CSV view of a report.
#[derive(Serialize)]
struct Row<'a> {
    molecule: &'a str,
    method: &'a str,
    mapping: &'a str,
    sector: &'a str,
    n_fragments: usize,
    alpha: f64,
    alpha_ordered: f64,
    alpha_q: f64,
    beta: f64,
    beta_q: f64,
    c: f64,
    c_q: f64,
    s_l: f64,
    s_l_q: f64,
    second_order: f64,
    n_rotations: usize,
    figure_of_merit: f64,
    epsilon: f64,
    n_t: Option<f64>,
    eps_t: Option<f64>,
    eps_pe: Option<f64>,
    eps_ht: Option<f64>,
    residual_l1: f64,
    complete: bool,
}

/// Column order of [`reports_to_csv`].
pub const CSV_COLUMNS: [&str; 24] = [
    "molecule",
    "method",
    "mapping",
    "sector",
    "n_fragments",
    "alpha",
    "alpha_ordered",
    "alpha_q",
    "beta",
    "beta_q",
    "c",
    "c_q",
    "s_l",
    "s_l_q",
    "second_order",
    "n_rotations",
    "figure_of_merit",
    "epsilon",
    "n_t",
    "eps_t",
    "eps_pe",
    "eps_ht",
    "residual_l1",
    "complete",
];

impl TrotterReport {
    fn row(&self) -> Row<'_> {
        Row {
            molecule: &self.molecule,
            method: &self.method,
            mapping: &self.mapping,
            sector: &self.sector,
            n_fragments: self.n_fragments,
            alpha: self.alpha,
            alpha_ordered: self.alpha_ordered,
            alpha_q: self.alpha_q,
            beta: self.beta,
            beta_q: self.beta_q,
            c: self.c,
            c_q: self.c_q,
            s_l: self.s_l,
            s_l_q: self.s_l_q,
            second_order: self.second_order,
            n_rotations: self.n_rotations,
            figure_of_merit: self.figure_of_merit,
            epsilon: self.epsilon,
            n_t: self.n_t,
            eps_t: self.error_split.map(|s| s.eps_t),
            eps_pe: self.error_split.map(|s| s.eps_pe),
            eps_ht: self.error_split.map(|s| s.eps_ht),
            residual_l1: self.residual_l1,
            complete: self.complete,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// One CSV row per report, header included.
pub fn reports_to_csv(reports: &[TrotterReport]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in reports {
        w.serialize(r.row()).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

pub fn sector_name(labels: &SectorLabels) -> String {
    match labels {
        SectorLabels::Full => "full".into(),
        SectorLabels::Fermionic {
            eta,
            twice_m,
            twice_s,
        } => match twice_s {
            Some(s) => format!("eta={eta};2m={twice_m};2s={s}"),
            None => format!("eta={eta};2m={twice_m}"),
        },
        SectorLabels::Qubit { symmetries, zeta } => symmetries
            .iter()
            .zip(zeta)
            .map(|(s, z)| format!("{s}={z:+}"))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

/// Evaluates every metric of a partition.
pub fn build_report<A>(
    input: ReportInput<'_, A>,
    sector: &SymmetrySector,
    epsilon: f64,
    opts: &MetricOptions,
) -> Result<TrotterReport>
where
    A: LinearOperator + Sync,
{
    let ops = input.operators;
    if input.spectra.len() != ops.len() {
        return Err(Error::DimensionMismatch {
            expected: ops.len(),
            got: input.spectra.len(),
        });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let mut warnings = input.warnings;
    let commute = input.commute;
    let alpha = alpha_pruned(ops, opts, commute)?;
    let ordered = match input.prefix {
        Some(build) => alpha_ordered_with(ops, opts, commute, build)?,
        None => alpha_ordered(ops, opts, commute)?,
    };
    let projected = project_all(ops, sector)?;
    let leak = projected.iter().map(|p| p.leakage).fold(0.0, f64::max);
    if leak > 1e-8 {
        warnings.push(format!(
            "fragments leak out of the sector by up to {leak:.3e}"
        ));
    }
    let alpha_q = alpha_projected(&projected, opts, commute)?;
    let spectra_q: Vec<FragmentSpectrum> = projected
        .iter()
        .zip(&input.spectra)
        .map(|(p, full)| {
            let ev = dense_spectrum(&p.matrix.0);
            FragmentSpectrum::new(ev[0], ev[ev.len() - 1], full.l1_norm)
        })
        .collect();
    let ranges: Vec<f64> = input.spectra.iter().map(|s| s.delta_e).collect();
    let ranges_q: Vec<f64> = spectra_q.iter().map(|s| s.delta_e).collect();
    let full = spectral_descriptors(&ranges)?;
    let proj = spectral_descriptors(&ranges_q)?;
    let complete = alpha.complete() && ordered.complete() && alpha_q.complete();
    if !complete {
        warnings.push(format!(
            "time budget exhausted: {} commutator jobs skipped",
            alpha.skipped + ordered.skipped + alpha_q.skipped
        ));
    }
    let estimate = if alpha_q.value > 0.0 && input.n_rotations > 0 {
        match tgate_count(alpha_q.value, input.n_rotations, epsilon) {
            Ok(e) => Some(e),
            Err(e) => {
                warnings.push(format!("T-gate estimate unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };
    Ok(TrotterReport {
        molecule: input.molecule,
        method: input.method,
        mapping: input.mapping,
        sector: sector_name(&sector.labels),
        n_fragments: ops.len(),
        alpha: alpha.value,
        alpha_ordered: ordered.value,
        alpha_q: alpha_q.value,
        beta: full.beta,
        beta_q: proj.beta,
        c: full.c,
        c_q: proj.c,
        s_l: full.s_l,
        s_l_q: proj.s_l,
        second_order: second_order_estimate(full.c, full.s_l),
        n_rotations: input.n_rotations,
        figure_of_merit: alpha_q.value * input.n_rotations as f64,
        epsilon,
        n_t: estimate.map(|e| e.n_t),
        error_split: estimate.map(|e| e.split),
        residual_l1: input.residual_l1,
        complete,
        warnings,
        fragments: input.spectra,
        fragments_projected: spectra_q,
    })
}
