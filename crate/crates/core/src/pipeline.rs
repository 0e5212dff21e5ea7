//! End-to-end evaluation: tensors, partition, operators, sector, report.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermionic::{
    fermionic_rotation_count, fold_one_body, fro_decompose, gfro_decompose, lcu_postprocess,
    lr_decompose, one_body_fragments, FermionFragment, FermionPartition, FitOptions, FragmentOp,
};
use crate::hamiltonian::{MolecularTensors, Tensor4};
use crate::metrics::{
    build_report, l1_bound, FragmentSpectrum, MetricOptions, ReportInput, TrotterReport,
};
use crate::qubit::{
    commuting_subset, find_pauli_symmetries, group_lf, group_si, map_tensors, qubit_rotation_count,
    symmetry::measure_label, Encoder, Mapping, PauliString, PauliSum, QubitPartition,
};
use crate::spectra::{
    fermionic_sector, ground_state, project, qubit_sector, EigenConfig, PauliOp, SymmetrySector,
    DEFAULT_MAX_QUBITS,
};

/// Every partitioning method the pipeline can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "lr")]
    Lr,
    #[serde(rename = "fro")]
    Fro,
    #[serde(rename = "gfro")]
    Gfro,
    #[serde(rename = "sd-gfro")]
    SdGfro,
    #[serde(rename = "lr-lcu")]
    LrLcu,
    #[serde(rename = "gfro-lcu")]
    GfroLcu,
    #[serde(rename = "sd-gfro-lcu")]
    SdGfroLcu,
    #[serde(rename = "fc-lf")]
    FcLf,
    #[serde(rename = "fc-si")]
    FcSi,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Lr,
        Method::Fro,
        Method::Gfro,
        Method::SdGfro,
        Method::LrLcu,
        Method::GfroLcu,
        Method::SdGfroLcu,
        Method::FcLf,
        Method::FcSi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lr => "lr",
            Method::Fro => "fro",
            Method::Gfro => "gfro",
            Method::SdGfro => "sd-gfro",
            Method::LrLcu => "lr-lcu",
            Method::GfroLcu => "gfro-lcu",
            Method::SdGfroLcu => "sd-gfro-lcu",
            Method::FcLf => "fc-lf",
            Method::FcSi => "fc-si",
        }
    }

    pub fn is_qubit(self) -> bool {
        matches!(self, Method::FcLf | Method::FcSi)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

/// Which sector the projected metrics use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorChoice {
    /// Neutral singlet for fermionic fragments, ground-state symmetry labels for qubit groups.
    #[default]
    AutoNeutralGround,
    Full,
    Fermionic {
        eta: usize,
        twice_m: i64,
        twice_s: Option<i64>,
    },
}

impl FromStr for SectorChoice {
    type Err = Error;
    /// `auto-neutral-ground`, `full`, or `eta,2m[,2s]`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto-neutral-ground" | "auto" => return Ok(SectorChoice::AutoNeutralGround),
            "full" => return Ok(SectorChoice::Full),
            _ => {}
        }
        let bad = || Error::InvalidArgument(format!("cannot parse sector `{s}`"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(bad());
        }
        let eta = parts[0].parse().map_err(|_| bad())?;
        let twice_m = parts[1].parse().map_err(|_| bad())?;
        let twice_s = match parts.get(2) {
            Some(p) => Some(p.parse().map_err(|_| bad())?),
            None => None,
        };
        Ok(SectorChoice::Fermionic {
            eta,
            twice_m,
            twice_s,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub method: Method,
    pub mapping: Mapping,
    /// LR: minimum fragment contribution. Greedy fits: target residual L1.
    pub threshold: f64,
    /// Fragment count for the joint fit.
    pub fro_fragments: usize,
    pub fit: FitOptions,
    pub epsilon: f64,
    pub sector: SectorChoice,
    pub max_qubits: usize,
    pub max_fragments: usize,
    pub time_budget_secs: Option<f64>,
    pub eigen: EigenConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Gfro,
            mapping: Mapping::Jw,
            threshold: 1e-6,
            fro_fragments: 4,
            fit: FitOptions::default(),
            epsilon: 1e-3,
            sector: SectorChoice::AutoNeutralGround,
            max_qubits: DEFAULT_MAX_QUBITS,
            max_fragments: 50,
            time_budget_secs: None,
            eigen: EigenConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Partition {
    Fermion(FermionPartition),
    Qubit(QubitPartition),
}

impl Partition {
    pub fn method(&self) -> &str {
        match self {
            Partition::Fermion(p) => &p.method,
            Partition::Qubit(p) => &p.method,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Partition::Fermion(p) => p.fragments.len(),
            Partition::Qubit(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(match self {
            Partition::Fermion(p) => p.to_json()?,
            Partition::Qubit(p) => p.to_json()?,
        })
    }
}

/// A partition together with anything worth reporting about how it was obtained.
#[derive(Clone, Debug)]
pub struct PartitionOutcome {
    pub partition: Partition,
    pub warnings: Vec<String>,
    pub complete: bool,
}

fn check_caps(t: &MolecularTensors, cfg: &PipelineConfig) -> Result<()> {
    let n = t.n_spin();
    if n > cfg.max_qubits {
        return Err(Error::ResourceLimit {
            what: "spin-orbitals",
            got: n,
            cap: cfg.max_qubits,
        });
    }
    if !(cfg.epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {}",
            cfg.epsilon
        )));
    }
    Ok(())
}

fn greedy(t: &MolecularTensors, cfg: &PipelineConfig, method: &str) -> Result<FermionPartition> {
    let budget = cfg
        .max_fragments
        .saturating_sub(one_body_fragments(&t.h)?.len())
        .max(1);
    let mut p = gfro_decompose(t, cfg.threshold, budget, &cfg.fit)?;
    p.method = method.into();
    Ok(p)
}

fn fermion_partition(t: &MolecularTensors, cfg: &PipelineConfig) -> Result<FermionPartition> {
    let folded = || fold_one_body(t).tensors;
    match cfg.method {
        Method::Lr => lr_decompose(t, cfg.threshold),
        Method::LrLcu => lcu_postprocess(&lr_decompose(t, cfg.threshold)?),
        Method::Fro => fro_decompose(t, cfg.fro_fragments, cfg.threshold, &cfg.fit),
        Method::Gfro => greedy(t, cfg, "gfro"),
        Method::GfroLcu => lcu_postprocess(&greedy(t, cfg, "gfro")?),
        Method::SdGfro => greedy(&folded(), cfg, "sd-gfro"),
        Method::SdGfroLcu => lcu_postprocess(&greedy(&folded(), cfg, "sd-gfro")?),
        Method::FcLf | Method::FcSi => unreachable!("qubit methods are handled separately"),
    }
}

/// Runs the configured partitioning method.
pub fn partition(t: &MolecularTensors, cfg: &PipelineConfig) -> Result<PartitionOutcome> {
    check_caps(t, cfg)?;
    let mut warnings = Vec::new();
    let mut complete = true;
    let partition = if cfg.method.is_qubit() {
        let h = map_tensors(t, cfg.mapping)?;
        let mut q = match cfg.method {
            Method::FcLf => group_lf(&h)?,
            _ => group_si(&h)?,
        };
        if q.len() > cfg.max_fragments {
            warnings.push(format!(
                "kept {} of {} groups (fragment cap)",
                cfg.max_fragments,
                q.len()
            ));
            q.groups.truncate(cfg.max_fragments);
            complete = false;
        }
        Partition::Qubit(q)
    } else {
        let mut p = fermion_partition(t, cfg)?;
        if p.fragments.len() > cfg.max_fragments {
            warnings.push(format!(
                "kept {} of {} fragments (fragment cap)",
                cfg.max_fragments,
                p.fragments.len()
            ));
            p.fragments.truncate(cfg.max_fragments);
            if let Some(src) = &p.source {
                p.residual_l1 = crate::fermionic::residual_l1(src, &p);
            }
            complete = false;
        }
        if !p.converged {
            warnings.push(format!(
                "{} stopped at residual L1 {:.3e} above the threshold {:.1e}",
                p.method, p.residual_l1, p.threshold
            ));
        }
        warnings.extend(p.diagnostics.iter().cloned());
        Partition::Fermion(p)
    };
    Ok(PartitionOutcome {
        partition,
        warnings,
        complete,
    })
}

/// Fragment tensors as a standalone Hamiltonian.
fn fragment_tensors(f: &FermionFragment) -> MolecularTensors {
    let (constant, h, g) = f.tensors();
    MolecularTensors {
        n_spatial: f.n_modes / 2,
        n_electrons: None,
        constant,
        h,
        g,
    }
}

fn same_frame(a: &FermionFragment, b: &FermionFragment) -> bool {
    a.angles == b.angles
}

/// `(N̂ − η)²` as tensors.
fn number_penalty(n_spatial: usize, eta: usize) -> MolecularTensors {
    let n = 2 * n_spatial;
    let mut g = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..n {
            g.set(p, p, q, q, 1.0);
        }
    }
    MolecularTensors {
        n_spatial,
        n_electrons: Some(eta),
        constant: (eta * eta) as f64,
        h: DMatrix::identity(n, n) * (-2.0 * eta as f64),
        g,
    }
}

fn electron_count(t: &MolecularTensors) -> Result<usize> {
    t.n_electrons.ok_or_else(|| {
        Error::InvalidArgument("the input does not declare an electron count".into())
    })
}

/// Neutral singlet, or `(η, m = 0)` when some fragment does not conserve `Ŝ²`.
fn fermionic_auto_sector(
    t: &MolecularTensors,
    ops: &[FragmentOp],
    warnings: &mut Vec<String>,
) -> Result<SymmetrySector> {
    let eta = electron_count(t)?;
    let n = t.n_spin();
    let twice_m = (eta % 2) as i64;
    let singlet = fermionic_sector(n, eta, twice_m, Some(twice_m))?;
    let mut leak: f64 = 0.0;
    for op in ops {
        leak = leak.max(project(op, &singlet)?.leakage);
        if leak > 1e-6 {
            break;
        }
    }
    if leak > 1e-6 {
        warnings.push(format!(
            "fragments do not conserve total spin (leakage {leak:.2e}); projecting onto (eta={eta}, 2m={twice_m}) instead"
        ));
        fermionic_sector(n, eta, twice_m, None)
    } else {
        Ok(singlet)
    }
}

/// Commuting single-Pauli symmetries of `sums` with the labels of the neutral ground state.
pub fn ground_state_labels(
    t: &MolecularTensors,
    sums: &[PauliSum],
    mapping: Mapping,
    cfg: &PipelineConfig,
    warnings: &mut Vec<String>,
) -> Result<(Vec<PauliString>, Vec<i8>)> {
    let n = t.n_spin();
    let eta = electron_count(t)?;
    let symmetries = commuting_subset(&find_pauli_symmetries(sums)?, n);
    let mut h = map_tensors(t, mapping)?;
    let weight = 2.0 * h.l1_norm() + 1.0;
    let mut penalty = map_tensors(&number_penalty(t.n_spatial, eta), mapping)?;
    penalty.scale(weight.into());
    h.add(&penalty);
    let op = PauliOp::new(&h, cfg.max_qubits)?;
    let (_, psi) = ground_state(&op, &cfg.eigen)?;
    let mut kept = Vec::new();
    let mut zeta = Vec::new();
    for q in symmetries {
        match measure_label(&q, &psi, 1e-6) {
            Some(z) => {
                kept.push(q);
                zeta.push(z);
            }
            None => warnings.push(format!(
                "ground state is not an eigenstate of {}; symmetry dropped",
                q.label(n)
            )),
        }
    }
    Ok((kept, zeta))
}

fn deadline(cfg: &PipelineConfig, start: Instant) -> Option<Instant> {
    cfg.time_budget_secs
        .map(|s| start + Duration::from_secs_f64(s.max(0.0)))
}

fn explicit_sector(t: &MolecularTensors, cfg: &PipelineConfig) -> Result<Option<SymmetrySector>> {
    Ok(match &cfg.sector {
        SectorChoice::AutoNeutralGround => None,
        SectorChoice::Full => Some(SymmetrySector::full(t.n_spin())),
        SectorChoice::Fermionic {
            eta,
            twice_m,
            twice_s,
        } => Some(fermionic_sector(t.n_spin(), *eta, *twice_m, *twice_s)?),
    })
}

/// Computes the report of a partition of `t`.
pub fn evaluate(
    t: &MolecularTensors,
    molecule: &str,
    outcome: &PartitionOutcome,
    cfg: &PipelineConfig,
    start: Instant,
) -> Result<TrotterReport> {
    check_caps(t, cfg)?;
    let opts = MetricOptions {
        eigen: cfg.eigen.clone(),
        deadline: deadline(cfg, start),
    };
    let mut warnings = outcome.warnings.clone();
    let mut report = match &outcome.partition {
        Partition::Fermion(p) => {
            if p.fragments.is_empty() {
                return Err(Error::InvalidArgument(
                    "the partition has no fragments".into(),
                ));
            }
            let ops: Vec<FragmentOp> = p.fragments.iter().map(FragmentOp::new).collect();
            let encoder = Encoder::new(cfg.mapping, p.n_modes())?;
            let spectra = p
                .fragments
                .iter()
                .map(|f| {
                    let (lo, hi) = f.spectral_bounds();
                    let l1 = l1_bound(&encoder.encode_tensors(&fragment_tensors(f))?);
                    Ok(FragmentSpectrum::new(lo, hi, Some(l1)))
                })
                .collect::<Result<Vec<_>>>()?;
            let sector = match explicit_sector(t, cfg)? {
                Some(s) => s,
                None => fermionic_auto_sector(t, &ops, &mut warnings)?,
            };
            let frags = &p.fragments;
            let commute = |i: usize, j: usize| same_frame(&frags[i], &frags[j]);
            let input = ReportInput {
                method: p.method.clone(),
                molecule: molecule.into(),
                mapping: cfg.mapping.to_string(),
                operators: &ops,
                spectra,
                commute: &commute,
                prefix: None,
                n_rotations: fermionic_rotation_count(p).bound,
                residual_l1: p.residual_l1,
                warnings,
            };
            build_report(input, &sector, cfg.epsilon, &opts)?
        }
        Partition::Qubit(q) => {
            if q.is_empty() {
                return Err(Error::InvalidArgument("the partition has no groups".into()));
            }
            let sums = q.group_sums();
            let ops = sums
                .iter()
                .map(|s| PauliOp::new(s, cfg.max_qubits))
                .collect::<Result<Vec<_>>>()?;
            let spectra = ops
                .iter()
                .zip(&sums)
                .map(|(o, s)| FragmentSpectrum::of(o, &cfg.eigen, Some(l1_bound(s))))
                .collect::<Result<Vec<_>>>()?;
            let sector = match explicit_sector(t, cfg)? {
                Some(s) if matches!(cfg.sector, SectorChoice::Full) => s,
                Some(_) => {
                    return Err(Error::InvalidArgument(
                        "qubit partitions take `auto-neutral-ground` or `full` sectors".into(),
                    ))
                }
                None => {
                    let (syms, zeta) =
                        ground_state_labels(t, &sums, cfg.mapping, cfg, &mut warnings)?;
                    qubit_sector(&syms, &zeta, q.n_qubits)?
                }
            };
            let commute = |i: usize, j: usize| sums[i].commutes_termwise(&sums[j]);
            let prefix = |n: usize| {
                let mut acc = PauliSum::new(q.n_qubits);
                for s in &sums[..n] {
                    acc.add(s);
                }
                PauliOp::new(&acc, cfg.max_qubits)
            };
            let input = ReportInput {
                method: q.method.clone(),
                molecule: molecule.into(),
                mapping: cfg.mapping.to_string(),
                operators: &ops,
                spectra,
                commute: &commute,
                prefix: Some(&prefix),
                n_rotations: qubit_rotation_count(q).total,
                residual_l1: 0.0,
                warnings,
            };
            build_report(input, &sector, cfg.epsilon, &opts)?
        }
    };
    report.complete &= outcome.complete;
    Ok(report)
}

/// Partition and evaluate in one go.
pub fn run(
    t: &MolecularTensors,
    molecule: &str,
    cfg: &PipelineConfig,
) -> Result<(PartitionOutcome, TrotterReport)> {
    let start = Instant::now();
    let outcome = partition(t, cfg)?;
    let report = evaluate(t, molecule, &outcome, cfg, start)?;
    Ok((outcome, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("qr".parse::<Method>().is_err());
    }

    #[test]
    fn sector_parsing() {
        assert_eq!(
            "auto-neutral-ground".parse::<SectorChoice>().unwrap(),
            SectorChoice::AutoNeutralGround
        );
        assert_eq!(
            "2,0,0".parse::<SectorChoice>().unwrap(),
            SectorChoice::Fermionic {
                eta: 2,
                twice_m: 0,
                twice_s: Some(0)
            }
        );
        assert!("2".parse::<SectorChoice>().is_err());
    }

    #[test]
    fn number_penalty_vanishes_on_target_count() {
        let t = number_penalty(2, 2);
        let op = crate::spectra::tensors_to_sparse(&t, 8).unwrap();
        for b in 0..16usize {
            let want = ((b.count_ones() as f64) - 2.0).powi(2);
            assert!((op.get(b, b).re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn random_fermionic_run_satisfies_the_bound_chain() {
        let mut t = crate::hamiltonian::random_spatial_tensors(2, 5);
        t.n_electrons = Some(2);
        for method in [Method::Lr, Method::LrLcu, Method::FcSi, Method::FcLf] {
            let cfg = PipelineConfig {
                method,
                threshold: 0.0,
                ..Default::default()
            };
            let (_, r) = run(&t, "random", &cfg).unwrap();
            assert!(2.0 * r.alpha_ordered <= r.alpha + 1e-8, "{method}");
            assert!(r.alpha <= r.beta + 1e-8, "{method}");
            assert!(r.alpha_q <= r.alpha + 1e-8, "{method}");
            assert!(r.beta_q <= r.beta + 1e-8, "{method}");
            assert!(r.complete, "{method}");
        }
    }
}
