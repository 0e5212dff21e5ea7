mod common;

use common::{groups_commute_internally, is_exact_union, min_commuting_cover};
use hampart::qubit::{group_lf, group_si, PauliString, PauliSum, C64};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = PauliSum> {
    (
        2usize..=4,
        proptest::collection::btree_set((0u64..16, 0u64..16), 1..=11),
    )
        .prop_map(|(n, pairs)| {
            let mask = (1u64 << n) - 1;
            let strings: std::collections::BTreeSet<PauliString> = pairs
                .into_iter()
                .map(|(x, z)| PauliString::new(x & mask, z & mask))
                .filter(|p| !p.is_identity())
                .collect();
            PauliSum::from_terms(
                n,
                strings
                    .into_iter()
                    .enumerate()
                    .map(|(k, p)| (p, C64::new(0.1 + k as f64, 0.0))),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heuristics_are_sound_and_never_beat_the_optimum(h in instance()) {
        prop_assume!(h.non_identity_len() > 0);
        let strings: Vec<PauliString> = h.non_identity().map(|(p, _)| *p).collect();
        let best = min_commuting_cover(&strings);
        for q in [group_lf(&h).unwrap(), group_si(&h).unwrap()] {
            let sums = q.group_sums();
            prop_assert!(groups_commute_internally(&sums));
            prop_assert!(is_exact_union(&sums, &h));
            prop_assert!(q.len() >= best);
        }
    }

    #[test]
    fn grouping_is_deterministic(h in instance()) {
        prop_assert_eq!(group_si(&h).unwrap().to_json().unwrap(), group_si(&h).unwrap().to_json().unwrap());
        prop_assert_eq!(group_lf(&h).unwrap().to_json().unwrap(), group_lf(&h).unwrap().to_json().unwrap());
    }
}

#[test]
fn identity_goes_to_the_constant() {
    let mut h = PauliSum::identity(2, 3.0);
    h.add_term(PauliString::parse("XX").unwrap(), C64::new(1.0, 0.0));
    h.add_term(PauliString::parse("ZZ").unwrap(), C64::new(1.0, 0.0));
    h.add_term(PauliString::parse("XI").unwrap(), C64::new(1.0, 0.0));
    let q = group_si(&h).unwrap();
    assert_eq!(q.constant, C64::new(3.0, 0.0));
    assert!(q
        .group_sums()
        .iter()
        .all(|g| g.identity_coeff() == C64::new(0.0, 0.0)));
    assert_eq!(q.len(), 2);
}
