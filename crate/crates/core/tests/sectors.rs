mod common;

use common::molecule;
use hampart::pipeline::{ground_state_labels, PipelineConfig};
use hampart::qubit::{group_si, map_tensors, Mapping, PauliString};
use hampart::spectra::{
    build_spin_operators, dense_spectrum, fermionic_sector, project, qubit_sector,
    tensors_to_sparse, to_sparse, LinearOperator, DEFAULT_MAX_QUBITS,
};

#[test]
fn sector_dimensions_count_occupations() {
    assert_eq!(fermionic_sector(4, 2, 0, Some(0)).unwrap().dim(), 3);
    assert_eq!(fermionic_sector(4, 2, 0, None).unwrap().dim(), 4);
    assert_eq!(fermionic_sector(4, 2, 0, Some(2)).unwrap().dim(), 1);
    assert_eq!(fermionic_sector(12, 4, 0, None).unwrap().dim(), 225);
    assert!(
        fermionic_sector(4, 2, 1, None).is_err()
            || fermionic_sector(4, 2, 1, None).unwrap().dim() == 0
    );
}

#[test]
fn sector_bases_are_orthonormal() {
    for sec in [
        fermionic_sector(6, 3, 1, Some(1)).unwrap(),
        fermionic_sector(8, 4, 0, Some(0)).unwrap(),
    ] {
        let g = sec.gram();
        let d = sec.dim();
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)].re - target).abs() < 1e-12 && g[(i, j)].im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn total_spin_is_fixed_inside_a_singlet_sector() {
    let (_, _, s2) = build_spin_operators(4, DEFAULT_MAX_QUBITS).unwrap();
    let p = project(&s2, &fermionic_sector(4, 2, 0, Some(0)).unwrap()).unwrap();
    assert!(p.leakage < 1e-12);
    assert!(dense_spectrum(&p.matrix.0).iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn h2_qubit_sector_reproduces_the_neutral_ground_energy() {
    let t = molecule("h2");
    let cfg = PipelineConfig::default();
    for mapping in [Mapping::Jw, Mapping::Bk] {
        let h = map_tensors(&t, mapping).unwrap();
        let sums = group_si(&h).unwrap().group_sums();
        let mut warnings = Vec::new();
        let (syms, zeta) = ground_state_labels(&t, &sums, mapping, &cfg, &mut warnings).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        let sec = qubit_sector(&syms, &zeta, 4).unwrap();
        let op = to_sparse(&h, DEFAULT_MAX_QUBITS).unwrap();
        let proj = project(&op, &sec).unwrap();
        assert!(proj.leakage < 1e-12);
        let neutral = project(
            &tensors_to_sparse(&t, DEFAULT_MAX_QUBITS).unwrap(),
            &fermionic_sector(4, 2, 0, None).unwrap(),
        )
        .unwrap();
        let expected = dense_spectrum(&neutral.matrix.0)[0];
        assert!((dense_spectrum(&proj.matrix.0)[0] - expected).abs() < 1e-10);
        assert!(sec.dim() < op.dim());
    }
}

#[test]
fn projection_never_increases_the_norm() {
    let t = molecule("h2");
    let h = map_tensors(&t, Mapping::Jw).unwrap();
    let op = to_sparse(&h, DEFAULT_MAX_QUBITS).unwrap();
    let full = dense_spectrum(&op.to_dense());
    let full_norm = full[0].abs().max(full[full.len() - 1].abs());
    let sec = qubit_sector(&[PauliString::z_string(0b1111)], &[1], 4).unwrap();
    let part = dense_spectrum(&project(&op, &sec).unwrap().matrix.0);
    assert!(part[0].abs().max(part[part.len() - 1].abs()) <= full_norm + 1e-12);
    assert_eq!(sec.dim(), 8);
}
