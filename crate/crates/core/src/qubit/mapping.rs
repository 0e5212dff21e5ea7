//! Jordan-Wigner and Bravyi-Kitaev encodings of fermionic operators.
//!
//! Both encodings are written through the Majorana pair
//! `c_j = a†_j + a_j`, `d_j = i (a†_j − a_j)`, so that
//! `a†_j = (c_j − i d_j)/2` and `a_j = (c_j + i d_j)/2`.
//!
//! * Jordan-Wigner: `c_j = Z_{<j} X_j`, `d_j = Z_{<j} Y_j`.
//! * Bravyi-Kitaev (Fenwick tree, 0-based modes, `n` qubits):
//!   `c_j = X_{U(j)} Z_{P(j)}` and `d_j = Y_j X_{U(j)∖j} Z_{(P(j) ⊕ F(j))∖j}` where
//!   - `U(j)`: start from `k = j + 1`; while `k ≤ n` add `k − 1` and set `k += k & −k`
//!   - `F(j)`: add `j`; with `k = j + 1`, `stop = k & (k − 1)`, `k −= 1`;
//!     while `k ≠ stop` add `k − 1` and set `k &= k − 1`
//!   - `P(j)`: start from `k = j`; while `k > 0` add `k − 1` and set `k &= k − 1`

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{PauliString, PauliSum, MAX_QUBITS, PRUNE_TOL};
use crate::error::{Error, Result};
use crate::hamiltonian::{FermionOperator, Ladder, MolecularTensors};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapping {
    Jw,
    Bk,
}

impl std::str::FromStr for Mapping {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jw" | "jordan-wigner" => Ok(Mapping::Jw),
            "bk" | "bravyi-kitaev" => Ok(Mapping::Bk),
            other => Err(Error::InvalidArgument(format!("unknown mapping `{other}`"))),
        }
    }
}

impl std::fmt::Display for Mapping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mapping::Jw => "jw",
            Mapping::Bk => "bk",
        })
    }
}

fn mask(set: &BTreeSet<usize>) -> u64 {
    set.iter().fold(0, |m, &i| m | (1u64 << i))
}

fn update_set(j: usize, n: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut k = j + 1;
    while k <= n {
        out.insert(k - 1);
        k += k & k.wrapping_neg();
    }
    out
}

fn occupation_set(j: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut k = j + 1;
    out.insert(k - 1);
    let stop = k & (k - 1);
    k -= 1;
    while k != stop {
        out.insert(k - 1);
        k &= k - 1;
    }
    out
}

fn parity_set_below(j: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut k = j;
    while k > 0 {
        out.insert(k - 1);
        k &= k - 1;
    }
    out
}

/// Majorana strings `(c_j, d_j)` of mode `j`.
pub fn majoranas(mapping: Mapping, j: usize, n_qubits: usize) -> (PauliString, PauliString) {
    let bit = 1u64 << j;
    match mapping {
        Mapping::Jw => {
            let below = bit - 1;
            (
                PauliString::new(bit, below),
                PauliString::new(bit, below | bit),
            )
        }
        Mapping::Bk => {
            let u = mask(&update_set(j, n_qubits));
            let p = mask(&parity_set_below(j));
            let f = mask(&occupation_set(j));
            let rem = (p ^ f) & !bit;
            (PauliString::new(u, p), PauliString::new(u, rem | bit))
        }
    }
}

/// Precomputed ladder images for one register.
#[derive(Clone, Debug)]
pub struct Encoder {
    pub mapping: Mapping,
    pub n_qubits: usize,
    create: Vec<PauliSum>,
    annihilate: Vec<PauliSum>,
}

impl Encoder {
    pub fn new(mapping: Mapping, n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "qubits",
                got: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        let half = Complex64::new(0.5, 0.0);
        let half_i = Complex64::new(0.0, 0.5);
        let mut create = Vec::with_capacity(n_qubits);
        let mut annihilate = Vec::with_capacity(n_qubits);
        for j in 0..n_qubits {
            let (c, d) = majoranas(mapping, j, n_qubits);
            create.push(PauliSum::from_terms(n_qubits, [(c, half), (d, -half_i)]));
            annihilate.push(PauliSum::from_terms(n_qubits, [(c, half), (d, half_i)]));
        }
        Ok(Self {
            mapping,
            n_qubits,
            create,
            annihilate,
        })
    }

    pub fn ladder(&self, l: Ladder) -> &PauliSum {
        if l.dagger {
            &self.create[l.mode]
        } else {
            &self.annihilate[l.mode]
        }
    }

    fn check(&self, op: &FermionOperator) -> Result<()> {
        if op.n_modes > self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: op.n_modes,
            });
        }
        Ok(())
    }

    pub fn encode(&self, op: &FermionOperator) -> Result<PauliSum> {
        self.check(op)?;
        let mut out = PauliSum::new(self.n_qubits);
        for t in &op.terms {
            let mut acc = PauliSum::identity(self.n_qubits, t.coeff);
            for &l in &t.ops {
                acc = acc.mul(self.ladder(l));
            }
            out.add(&acc);
        }
        out.prune(PRUNE_TOL);
        Ok(out)
    }

    /// Encodes `c + Σ h_pq a†_p a_q + Σ g_pqrs a†_p a_q a†_r a_s` reusing the
    /// images of the `n²` hopping operators.
    pub fn encode_tensors(&self, t: &MolecularTensors) -> Result<PauliSum> {
        let n = t.n_spin();
        if n > self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: n,
            });
        }
        let hop: Vec<PauliSum> = (0..n * n)
            .map(|k| self.create[k / n].mul(&self.annihilate[k % n]))
            .collect();
        let mut out = PauliSum::identity(self.n_qubits, t.constant);
        for p in 0..n {
            for q in 0..n {
                let v = t.h[(p, q)];
                if v != 0.0 {
                    out.add_scaled(&hop[p * n + q], Complex64::new(v, 0.0));
                }
            }
        }
        for pq in 0..n * n {
            let mut right = PauliSum::new(self.n_qubits);
            let row = &t.g.as_slice()[pq * n * n..(pq + 1) * n * n];
            for (rs, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    right.add_scaled(&hop[rs], Complex64::new(v, 0.0));
                }
            }
            if !right.is_empty() {
                out.add(&hop[pq].mul(&right));
            }
        }
        out.prune(PRUNE_TOL);
        Ok(out)
    }
}

pub fn jordan_wigner(op: &FermionOperator) -> Result<PauliSum> {
    Encoder::new(Mapping::Jw, op.n_modes)?.encode(op)
}

pub fn bravyi_kitaev(op: &FermionOperator) -> Result<PauliSum> {
    Encoder::new(Mapping::Bk, op.n_modes)?.encode(op)
}

pub fn map_tensors(t: &MolecularTensors, mapping: Mapping) -> Result<PauliSum> {
    Encoder::new(mapping, t.n_spin())?.encode_tensors(t)
}
