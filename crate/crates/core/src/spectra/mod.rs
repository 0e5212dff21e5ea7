//! Operator representations, eigenvalue extremes, spin operators and symmetry sectors.

pub mod eigen;
pub mod fock;
pub mod operator;
pub mod sector;

pub use eigen::{
    commutator_norm, dense_spectrum, extreme_eigenvalues, ground_state, hermitian_norm,
    spectral_norm_dense, EigenConfig, Extremes,
};
pub use fock::{build_spin_operators, fermion_to_sparse, tensors_to_sparse};
pub use operator::{
    to_sparse, Commutator, DenseOp, DiagonalOp, LinearOperator, PauliOp, Shifted, SparseOp, SumOp,
    DEFAULT_MAX_QUBITS,
};
pub use sector::{
    fermionic_sector, project, qubit_sector, Projection, SectorLabels, SymmetrySector,
};
