use serde::{Deserialize, Serialize};

use super::MolecularTensors;
use crate::error::{Error, Result};

/// A single creation (`dagger = true`) or annihilation operator on one mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }
}

/// A product of ladder operators, leftmost acting last, times a real coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionTerm {
    pub ops: Vec<Ladder>,
    pub coeff: f64,
}

/// A real linear combination of ladder-operator products on `n_modes` modes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FermionOperator {
    pub n_modes: usize,
    pub terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn new(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: Vec::new(),
        }
    }

    /// Appends a term after checking mode range and finiteness.
    pub fn push(&mut self, ops: Vec<Ladder>, coeff: f64) -> Result<()> {
        if !coeff.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {coeff}"
            )));
        }
        if let Some(l) = ops.iter().find(|l| l.mode >= self.n_modes) {
            return Err(Error::InvalidArgument(format!(
                "mode {} out of range for {} modes",
                l.mode, self.n_modes
            )));
        }
        self.terms.push(FermionTerm { ops, coeff });
        Ok(())
    }

    /// `n̂_p = a†_p a_p`.
    pub fn number(n_modes: usize, p: usize) -> Result<Self> {
        let mut op = Self::new(n_modes);
        op.push(vec![Ladder::create(p), Ladder::annihilate(p)], 1.0)?;
        Ok(op)
    }

    /// The full Hamiltonian `c + Σ h_pq a†_p a_q + Σ g_pqrs a†_p a_q a†_r a_s`,
    /// dropping exact zeros.
    pub fn from_tensors(t: &MolecularTensors) -> Self {
        let n = t.n_spin();
        let mut op = Self::new(n);
        if t.constant != 0.0 {
            op.terms.push(FermionTerm {
                ops: vec![],
                coeff: t.constant,
            });
        }
        for p in 0..n {
            for q in 0..n {
                let v = t.h[(p, q)];
                if v != 0.0 {
                    op.terms.push(FermionTerm {
                        ops: vec![Ladder::create(p), Ladder::annihilate(q)],
                        coeff: v,
                    });
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = t.g.get(p, q, r, s);
                        if v != 0.0 {
                            op.terms.push(FermionTerm {
                                ops: vec![
                                    Ladder::create(p),
                                    Ladder::annihilate(q),
                                    Ladder::create(r),
                                    Ladder::annihilate(s),
                                ],
                                coeff: v,
                            });
                        }
                    }
                }
            }
        }
        op
    }

    pub fn add(&mut self, other: &FermionOperator) -> Result<()> {
        if other.n_modes > self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: other.n_modes,
            });
        }
        self.terms.extend(other.terms.iter().cloned());
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.terms {
            t.coeff *= s;
        }
    }

    /// Hermitian conjugate: reversed order, daggers flipped.
    pub fn adjoint(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| FermionTerm {
                    ops: t
                        .ops
                        .iter()
                        .rev()
                        .map(|l| Ladder {
                            mode: l.mode,
                            dagger: !l.dagger,
                        })
                        .collect(),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_range_mode_rejected() {
        let mut op = FermionOperator::new(2);
        assert!(op.push(vec![Ladder::create(2)], 1.0).is_err());
        assert!(op.push(vec![Ladder::create(1)], f64::INFINITY).is_err());
        assert!(op.push(vec![Ladder::create(1)], 1.0).is_ok());
    }

    #[test]
    fn from_tensors_counts_nonzeros() {
        let mut t = MolecularTensors::zeros(1);
        t.constant = 1.0;
        t.h[(0, 0)] = 2.0;
        t.g.set(0, 0, 1, 1, 0.5);
        t.g.set(1, 1, 0, 0, 0.5);
        let op = FermionOperator::from_tensors(&t);
        assert_eq!(op.terms.len(), 4);
        assert_eq!(op.terms[0].ops.len(), 0);
    }

    #[test]
    fn adjoint_reverses() {
        let mut op = FermionOperator::new(3);
        op.push(vec![Ladder::create(0), Ladder::annihilate(2)], 0.3)
            .unwrap();
        let a = op.adjoint();
        assert_eq!(
            a.terms[0].ops,
            vec![Ladder::create(2), Ladder::annihilate(0)]
        );
    }
}
