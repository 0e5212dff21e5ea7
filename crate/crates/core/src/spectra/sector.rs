//! Symmetry sectors and projection onto them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{product_action, spin_operator_terms, twice_sz};
use super::operator::{DenseOp, LinearOperator};
use crate::error::{Error, Result};
use crate::qubit::pauli::{i_pow, PauliString};

type C64 = Complex64;

/// Quantum numbers of a sector. Half-integer spins are stored doubled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SectorLabels {
    /// Electron count `η`, `2m`, and optionally `2s`.
    Fermionic {
        eta: usize,
        twice_m: i64,
        twice_s: Option<i64>,
    },
    /// `ζ_i = ±1` for each commuting Pauli symmetry.
    Qubit {
        symmetries: Vec<String>,
        zeta: Vec<i8>,
    },
    /// The whole Fock space.
    Full,
}

/// Orthonormal basis of a symmetry sector, stored column-wise as sparse vectors.
#[derive(Clone, Debug)]
pub struct SymmetrySector {
    pub labels: SectorLabels,
    pub n_qubits: usize,
    pub columns: Vec<Vec<(usize, C64)>>,
}

impl SymmetrySector {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn full(n_qubits: usize) -> Self {
        let columns = (0..1usize << n_qubits)
            .map(|j| vec![(j, C64::new(1.0, 0.0))])
            .collect();
        Self {
            labels: SectorLabels::Full,
            n_qubits,
            columns,
        }
    }

    /// `Bᴴ B`, which should be the identity.
    pub fn gram(&self) -> DMatrix<C64> {
        let d = self.dim();
        let full = 1usize << self.n_qubits;
        let mut dense = vec![C64::new(0.0, 0.0); full];
        let mut g = DMatrix::zeros(d, d);
        for (j, cj) in self.columns.iter().enumerate() {
            for &(k, v) in cj {
                dense[k] = v;
            }
            for (i, ci) in self.columns.iter().enumerate() {
                g[(i, j)] = ci.iter().map(|&(k, v)| v.conj() * dense[k]).sum();
            }
            for &(k, _) in cj {
                dense[k] = C64::new(0.0, 0.0);
            }
        }
        g
    }

    /// Expands column `j` into a full-space vector.
    pub fn column_vector(&self, j: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); 1 << self.n_qubits];
        for &(k, c) in &self.columns[j] {
            v[k] = c;
        }
        v
    }
}

fn check_fermionic_labels(
    n_modes: usize,
    eta: usize,
    twice_m: i64,
    twice_s: Option<i64>,
) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidLabels(m));
    if !n_modes.is_multiple_of(2) {
        return bad(format!("{n_modes} modes cannot carry spin labels"));
    }
    if eta > n_modes {
        return bad(format!("η = {eta} exceeds {n_modes} modes"));
    }
    if (twice_m - eta as i64).rem_euclid(2) != 0 {
        return bad(format!("2m = {twice_m} has the wrong parity for η = {eta}"));
    }
    if twice_m.unsigned_abs() as usize > eta {
        return bad(format!("|m| = {}/2 exceeds η/2", twice_m.abs()));
    }
    if let Some(s2) = twice_s {
        if s2 < twice_m.abs() || s2 > eta as i64 || (s2 - eta as i64).rem_euclid(2) != 0 {
            return bad(format!(
                "need |m| ≤ s ≤ η/2 with matching parity, got 2s = {s2}"
            ));
        }
    }
    Ok(())
}

/// Basis of the `(η, m[, s])` sector on interleaved spin-orbitals.
///
/// States with the right particle number and `S_z` are enumerated directly;
/// when `s` is requested, `Ŝ²` is diagonalized on that block and the
/// eigenvectors with eigenvalue `s(s+1)` are kept.
pub fn fermionic_sector(
    n_modes: usize,
    eta: usize,
    twice_m: i64,
    twice_s: Option<i64>,
) -> Result<SymmetrySector> {
    check_fermionic_labels(n_modes, eta, twice_m, twice_s)?;
    let states: Vec<u64> = (0..1u64 << n_modes)
        .filter(|&b| b.count_ones() as usize == eta && twice_sz(b) == twice_m)
        .collect();
    let labels = SectorLabels::Fermionic {
        eta,
        twice_m,
        twice_s,
    };
    let columns: Vec<Vec<(usize, C64)>> = match twice_s {
        None => states
            .iter()
            .map(|&b| vec![(b as usize, C64::new(1.0, 0.0))])
            .collect(),
        Some(s2) => {
            let (_, _, s_sq) = spin_operator_terms(n_modes)?;
            let index: std::collections::HashMap<u64, usize> =
                states.iter().enumerate().map(|(i, &b)| (b, i)).collect();
            let d = states.len();
            let mut block = DMatrix::<f64>::zeros(d, d);
            for (j, &b) in states.iter().enumerate() {
                for t in &s_sq.terms {
                    if let Some((sign, out)) = product_action(b, &t.ops) {
                        let i = index[&out];
                        block[(i, j)] += sign * t.coeff;
                    }
                }
            }
            let target = s2 as f64 / 2.0 * (s2 as f64 / 2.0 + 1.0);
            let (vals, vecs) = crate::linalg::eigh_sorted(&block);
            (0..d)
                .filter(|&k| (vals[k] - target).abs() < 1e-6)
                .map(|k| {
                    states
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| vecs[(i, k)].abs() > 1e-14)
                        .map(|(i, &b)| (b as usize, C64::new(vecs[(i, k)], 0.0)))
                        .collect()
                })
                .collect()
        }
    };
    if columns.is_empty() {
        return Err(Error::EmptySector(format!("{labels:?} on {n_modes} modes")));
    }
    Ok(SymmetrySector {
        labels,
        n_qubits: n_modes,
        columns,
    })
}

/// Simultaneous eigenspace of commuting Pauli symmetries with eigenvalues `zeta`.
///
/// `Π_i (I + ζ_i Q_i)/2` maps each basis state onto a vector supported on its
/// orbit under the X-parts of the symmetries; one normalized image per orbit
/// spans the sector.
pub fn qubit_sector(
    symmetries: &[PauliString],
    zeta: &[i8],
    n_qubits: usize,
) -> Result<SymmetrySector> {
    if symmetries.len() != zeta.len() {
        return Err(Error::InvalidLabels(format!(
            "{} symmetries but {} labels",
            symmetries.len(),
            zeta.len()
        )));
    }
    if zeta.iter().any(|&z| z != 1 && z != -1) {
        return Err(Error::InvalidLabels("labels must be ±1".into()));
    }
    for (i, a) in symmetries.iter().enumerate() {
        if a.is_identity() {
            return Err(Error::InvalidLabels(
                "identity is not a symmetry label".into(),
            ));
        }
        for b in &symmetries[i + 1..] {
            if !a.commutes(b) {
                return Err(Error::InvalidLabels(format!(
                    "{} and {} do not commute",
                    a.label(n_qubits),
                    b.label(n_qubits)
                )));
            }
        }
    }
    let dim = 1usize << n_qubits;
    // span of the X-parts, i.e. the orbit offsets
    let mut offsets: Vec<u64> = vec![0];
    let mut basis_x: Vec<u64> = Vec::new();
    for q in symmetries {
        let mut v = q.x;
        for &b in &basis_x {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis_x.push(v);
            let extra: Vec<u64> = offsets.iter().map(|o| o ^ v).collect();
            offsets.extend(extra);
        }
    }
    let mut covered = vec![false; dim];
    let mut columns = Vec::new();
    let phases: Vec<(PauliString, C64)> = symmetries
        .iter()
        .zip(zeta)
        .map(|(q, &z)| (*q, i_pow((q.x & q.z).count_ones() as i64) * z as f64))
        .collect();
    for j in 0..dim {
        if covered[j] {
            continue;
        }
        for &o in &offsets {
            covered[j ^ o as usize] = true;
        }
        let mut v: Vec<(usize, C64)> = vec![(j, C64::new(1.0, 0.0))];
        for (q, ph) in &phases {
            let mut next: std::collections::BTreeMap<usize, C64> =
                std::collections::BTreeMap::new();
            for &(b, c) in &v {
                *next.entry(b).or_default() += c * 0.5;
                let sign = if (q.z & b as u64).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                *next.entry(b ^ q.x as usize).or_default() += c * ph * (0.5 * sign);
            }
            v = next.into_iter().filter(|(_, c)| c.norm() > 1e-14).collect();
            if v.is_empty() {
                break;
            }
        }
        let nrm = v.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-10 {
            columns.push(v.into_iter().map(|(b, c)| (b, c / nrm)).collect());
        }
    }
    let labels = SectorLabels::Qubit {
        symmetries: symmetries.iter().map(|q| q.label(n_qubits)).collect(),
        zeta: zeta.to_vec(),
    };
    if columns.is_empty() {
        return Err(Error::EmptySector(format!("{labels:?}")));
    }
    Ok(SymmetrySector {
        labels,
        n_qubits,
        columns,
    })
}

/// `Bᴴ A B` together with how far `A` maps the sector outside itself.
#[derive(Clone, Debug)]
pub struct Projection {
    pub matrix: DenseOp,
    /// `max_j ‖(I − B Bᴴ) A b_j‖`.
    pub leakage: f64,
}

/// Projects `a` onto `sec`; warns if `a` does not preserve the sector.
pub fn project<A: LinearOperator + ?Sized>(a: &A, sec: &SymmetrySector) -> Result<Projection> {
    let full = 1usize << sec.n_qubits;
    if a.dim() != full {
        return Err(Error::DimensionMismatch {
            expected: full,
            got: a.dim(),
        });
    }
    let d = sec.dim();
    let mut m = DMatrix::<C64>::zeros(d, d);
    let mut y = vec![C64::new(0.0, 0.0); full];
    let mut leakage: f64 = 0.0;
    for j in 0..d {
        let x = sec.column_vector(j);
        a.apply(&x, &mut y);
        for (i, ci) in sec.columns.iter().enumerate() {
            let v: C64 = ci.iter().map(|&(k, c)| c.conj() * y[k]).sum();
            m[(i, j)] = v;
        }
        for (i, ci) in sec.columns.iter().enumerate() {
            let v = m[(i, j)];
            for &(k, c) in ci {
                y[k] -= c * v;
            }
        }
        let outside: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        leakage = leakage.max(outside.sqrt());
    }
    if leakage > 1e-8 {
        log::warn!(
            "operator leaks out of the sector by {leakage:.3e}; projected norms are not exact"
        );
    }
    Ok(Projection {
        matrix: DenseOp(m),
        leakage,
    })
}
