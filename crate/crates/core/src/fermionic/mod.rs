//! Fermionic partitions into orbital-rotation-solvable fragments.

pub mod count;
pub mod fit;
pub mod fragment;
pub mod lcu;
pub mod lr;
pub mod rotation;
pub mod sd;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use count::{fermionic_rotation_count, RotationCount};
pub use fit::{fro_decompose, gfro_decompose, FitOptions};
pub use fragment::{FermionFragment, FragmentKind, FragmentOp, Quadratic};
pub use lcu::lcu_postprocess;
pub use lr::{lr_decompose, one_body_fragments, one_electron_fragment};
pub use rotation::apply_orbital_rotation;
pub use sd::{fold_one_body, FoldedTensors};

use crate::hamiltonian::{MolecularTensors, Tensor4};

/// An ordered list of fragments plus whatever the fit left behind.
///
/// `constant` is the scalar part of the Hamiltonian that no fragment carries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionPartition {
    pub method: String,
    pub seed: u64,
    pub threshold: f64,
    pub constant: f64,
    pub fragments: Vec<FermionFragment>,
    pub residual_l1: f64,
    /// Residual L1 after each accepted greedy step (empty for one-shot methods).
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub source: Option<MolecularTensors>,
}

impl FermionPartition {
    pub fn n_modes(&self) -> usize {
        self.fragments.first().map_or_else(
            || self.source.as_ref().map_or(0, |s| s.n_spin()),
            |f| f.n_modes,
        )
    }

    /// Number of fragments with a two-body part.
    pub fn two_body_count(&self) -> usize {
        self.fragments.iter().filter(|f| f.has_two_body()).count()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Sums the fragments back into `(constant, h, g)`.
pub fn reconstruct(p: &FermionPartition) -> MolecularTensors {
    let n = p.n_modes();
    let mut out = MolecularTensors {
        n_spatial: n / 2,
        n_electrons: p.source.as_ref().and_then(|s| s.n_electrons),
        constant: p.constant,
        h: DMatrix::zeros(n, n),
        g: Tensor4::zeros(n),
    };
    for f in &p.fragments {
        let (c, h, g) = f.tensors();
        out.constant += c;
        out.h += h;
        out.g.axpy(1.0, &g);
    }
    out
}

/// Entrywise L1 of `source − reconstruct(p)` over `h` and `g`.
pub fn residual_l1(source: &MolecularTensors, p: &FermionPartition) -> f64 {
    source.l1_distance(&reconstruct(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_partition_reconstructs_to_zero() {
        let p = FermionPartition {
            method: "lr".into(),
            seed: 0,
            threshold: 0.0,
            constant: 0.0,
            fragments: vec![],
            residual_l1: 0.0,
            residual_history: vec![],
            converged: true,
            diagnostics: vec![],
            source: Some(MolecularTensors::zeros(2)),
        };
        let t = reconstruct(&p);
        assert!(t.g.is_zero());
        assert!(t.h.iter().all(|&v| v == 0.0));
    }
}
