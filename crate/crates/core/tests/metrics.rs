use hampart::metrics::{
    alpha, alpha_ordered, alpha_projected, project_all, spectral_descriptors, tgate_cost,
    tgate_count, MetricOptions,
};
use hampart::qubit::{PauliString, PauliSum, C64};
use hampart::spectra::{
    dense_spectrum, LinearOperator, PauliOp, SymmetrySector, DEFAULT_MAX_QUBITS,
};
use proptest::prelude::*;

fn fragments(n_qubits: usize, specs: &[Vec<(u64, u64, f64)>]) -> Vec<PauliSum> {
    let mask = (1u64 << n_qubits) - 1;
    specs
        .iter()
        .map(|terms| {
            let mut s = PauliSum::new(n_qubits);
            for &(x, z, c) in terms {
                s.add_term(PauliString::new(x & mask, z & mask), C64::new(c, 0.0));
            }
            s
        })
        .collect()
}

fn ops(sums: &[PauliSum]) -> Vec<PauliOp> {
    sums.iter()
        .map(|s| PauliOp::new(s, DEFAULT_MAX_QUBITS).unwrap())
        .collect()
}

fn range(op: &PauliOp) -> f64 {
    let ev = dense_spectrum(&op.to_dense());
    ev[ev.len() - 1] - ev[0]
}

fn fragment_sets() -> impl Strategy<Value = Vec<Vec<(u64, u64, f64)>>> {
    proptest::collection::vec(
        proptest::collection::vec((0u64..8, 0u64..8, -1.0f64..1.0), 1..4),
        2..5,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bound_chain_on_random_fragments(specs in fragment_sets()) {
        let sums = fragments(3, &specs);
        let ops = ops(&sums);
        let o = MetricOptions::default();
        let a = alpha(&ops, &o).unwrap().value;
        let ab = alpha_ordered(&ops, &o, |_, _| false).unwrap().value;
        let ranges: Vec<f64> = ops.iter().map(range).collect();
        let d = spectral_descriptors(&ranges).unwrap();
        prop_assert!(2.0 * ab <= a + 1e-9, "{ab} {a}");
        prop_assert!(a <= d.beta + 1e-9, "{a} {}", d.beta);
        prop_assert!((d.beta - 0.5 * d.c * d.c * d.s_l).abs() <= 1e-10 * (1.0 + d.beta));
        let full = project_all(&ops, &SymmetrySector::full(3)).unwrap();
        let q = alpha_projected(&full, &o, |_, _| false).unwrap().value;
        prop_assert!((q - a).abs() < 1e-8);
    }

    #[test]
    fn alpha_ignores_identity_shifts(specs in fragment_sets(), shifts in proptest::collection::vec(-3.0f64..3.0, 5)) {
        let sums = fragments(3, &specs);
        let shifted: Vec<PauliSum> = sums
            .iter()
            .zip(&shifts)
            .map(|(s, &c)| {
                let mut t = s.clone();
                t.add_term(PauliString::default(), C64::new(c, 0.0));
                t
            })
            .collect();
        let o = MetricOptions::default();
        let a = alpha(&ops(&sums), &o).unwrap().value;
        let b = alpha(&ops(&shifted), &o).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a));
    }

    #[test]
    fn descriptors_of_ranges(ranges in proptest::collection::vec(0.0f64..10.0, 1..8)) {
        let d = spectral_descriptors(&ranges).unwrap();
        let c: f64 = ranges.iter().sum();
        prop_assert!((d.c - c).abs() < 1e-12 * (1.0 + c));
        let mut beta = 0.0;
        for i in 0..ranges.len() {
            for j in 0..i {
                beta += ranges[i] * ranges[j];
            }
        }
        prop_assert!((d.beta - beta).abs() < 1e-10 * (1.0 + beta));
        if c > 0.0 {
            prop_assert!((d.beta - 0.5 * c * c * d.s_l).abs() < 1e-10 * (1.0 + beta));
            prop_assert!((d.omega.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tgate_cost_grows_with_alpha_and_rotations(alpha in 1e-3f64..10.0, n_rot in 1usize..5000, factor in 1.01f64..4.0) {
        let base = tgate_count(alpha, n_rot, 1e-3).unwrap();
        prop_assert!(tgate_count(alpha * factor, n_rot, 1e-3).unwrap().n_t > base.n_t);
        let more = ((n_rot as f64) * factor).ceil() as usize;
        prop_assert!(tgate_count(alpha, more, 1e-3).unwrap().n_t > base.n_t);
        let s = base.split;
        prop_assert!((s.eps_t + s.eps_pe + s.eps_ht - 1e-3).abs() < 1e-15);
        prop_assert_eq!(tgate_cost(alpha, n_rot as f64, 1e-3, s.eps_t, s.eps_pe), Some(base.n_t));
    }

    #[test]
    fn looser_precision_is_cheaper(alpha in 1e-2f64..10.0, n_rot in 1usize..5000) {
        let tight = tgate_count(alpha, n_rot, 1e-3).unwrap().n_t;
        let loose = tgate_count(alpha, n_rot, 2e-3).unwrap().n_t;
        prop_assert!(loose < tight);
    }
}

#[test]
fn commuting_fragments_have_zero_alpha() {
    let sums = fragments(
        2,
        &[vec![(0, 3, 0.5)], vec![(3, 0, 1.0)], vec![(3, 3, 0.7)]],
    );
    let a = alpha(&ops(&sums), &MetricOptions::default()).unwrap();
    assert!(a.value < 1e-12);
    assert_eq!(a.evaluated, 3);
}
