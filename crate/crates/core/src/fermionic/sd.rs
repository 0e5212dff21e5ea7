//! Folding the one-body part into the two-body tensor.
//!
//! With `h = O diag(ε) Oᵀ` and `n_k² = n_k`, the one-body operator equals
//! `Σ_k ε_k n_k n_k` in the rotated frame, so it can be absorbed into `g`.

use nalgebra::{DMatrix, DVector};

use super::fragment::two_body_tensor;
use crate::hamiltonian::MolecularTensors;
use crate::linalg::eigh_spin_adapted;

#[derive(Clone, Debug)]
pub struct FoldedTensors {
    /// Same operator as the input, with `h = 0`.
    pub tensors: MolecularTensors,
    pub rotation: DMatrix<f64>,
    pub orbital_energies: DVector<f64>,
}

pub fn fold_one_body(t: &MolecularTensors) -> FoldedTensors {
    let (eps, o) = eigh_spin_adapted(&t.h);
    let mut g = t.g.clone();
    g.axpy(1.0, &two_body_tensor(&o, &DMatrix::from_diagonal(&eps)));
    let n = t.n_spin();
    FoldedTensors {
        tensors: MolecularTensors {
            n_spatial: t.n_spatial,
            n_electrons: t.n_electrons,
            constant: t.constant,
            h: DMatrix::zeros(n, n),
            g,
        },
        rotation: o,
        orbital_energies: eps,
    }
}
