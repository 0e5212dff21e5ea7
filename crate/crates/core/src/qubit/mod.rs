//! Qubit-side algebra: Pauli products, fermion encodings, commuting groups and symmetries.

pub mod grouping;
pub mod mapping;
pub mod pauli;
pub mod symmetry;

pub use grouping::{
    build_commutation_graph, group_lf, group_si, qubit_rotation_count, CommutationGraph,
    PauliGroup, QubitPartition, QubitRotationCount,
};
pub use mapping::{bravyi_kitaev, jordan_wigner, map_tensors, Encoder, Mapping};
pub use pauli::{pauli_commutes, pauli_multiply, PauliString, PauliSum, PauliTerm, C64};
pub use symmetry::{commuting_subset, find_pauli_symmetries, in_span};
