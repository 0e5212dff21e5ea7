use hampart::hamiltonian::{random_spatial_tensors, random_tensors, MolecularTensors};
use hampart::qubit::{map_tensors, Mapping};
use hampart::spectra::{
    dense_spectrum, tensors_to_sparse, to_sparse, LinearOperator, DEFAULT_MAX_QUBITS,
};
use proptest::prelude::*;

fn fock_spectrum(t: &MolecularTensors) -> Vec<f64> {
    dense_spectrum(&tensors_to_sparse(t, DEFAULT_MAX_QUBITS).unwrap().to_dense())
}

fn qubit_spectrum(t: &MolecularTensors, mapping: Mapping) -> Vec<f64> {
    let h = map_tensors(t, mapping).unwrap();
    assert!(h.max_imag() < 1e-12);
    dense_spectrum(&to_sparse(&h, DEFAULT_MAX_QUBITS).unwrap().to_dense())
}

fn assert_same(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < tol, "{x} vs {y}");
    }
}

#[test]
fn h2_encodings_share_the_fock_spectrum() {
    let t = hampart::hamiltonian::load_fcidump(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/h2.fcidump"),
    )
    .unwrap();
    let reference = fock_spectrum(&t);
    for mapping in [Mapping::Jw, Mapping::Bk] {
        assert_same(&reference, &qubit_spectrum(&t, mapping), 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn encodings_preserve_spectra(seed in any::<u64>(), spatial in 1usize..=3, spin_free in any::<bool>()) {
        let t = if spin_free { random_tensors(spatial, seed) } else { random_spatial_tensors(spatial, seed) };
        let reference = fock_spectrum(&t);
        assert_same(&reference, &qubit_spectrum(&t, Mapping::Jw), 1e-9);
        assert_same(&reference, &qubit_spectrum(&t, Mapping::Bk), 1e-9);
    }
}
