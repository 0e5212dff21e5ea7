#![allow(dead_code)]

use std::path::{Path, PathBuf};

use hampart::hamiltonian::{load_fcidump, MolecularTensors};
use hampart::qubit::{PauliString, PauliSum};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn molecule(name: &str) -> MolecularTensors {
    load_fcidump(fixture(&format!("{name}.fcidump"))).expect("fixture loads")
}

pub fn meta(name: &str) -> serde_json::Value {
    let text =
        std::fs::read_to_string(fixture(&format!("{name}.meta.json"))).expect("metadata exists");
    serde_json::from_str(&text).expect("metadata parses")
}

/// Smallest number of mutually commuting groups covering `strings`, by exhaustive search.
pub fn min_commuting_cover(strings: &[PauliString]) -> usize {
    let n = strings.len();
    assert!(n <= 16, "exhaustive cover is limited to 16 terms");
    let full = (1usize << n) - 1;
    let clique: Vec<bool> = (0..=full)
        .map(|mask| {
            (0..n).all(|i| {
                mask >> i & 1 == 0
                    || (i + 1..n).all(|j| mask >> j & 1 == 0 || strings[i].commutes(&strings[j]))
            })
        })
        .collect();
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let group = sub | low;
            if clique[group] && best[mask ^ group] != usize::MAX {
                best[mask] = best[mask].min(best[mask ^ group] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best[full]
}

/// True if every source term sits in exactly one group with the same coefficient.
pub fn is_exact_union(groups: &[PauliSum], source: &PauliSum) -> bool {
    let mut seen = std::collections::BTreeMap::new();
    for g in groups {
        for (p, c) in g.non_identity() {
            if seen.insert(*p, *c).is_some() {
                return false;
            }
        }
    }
    let expected: std::collections::BTreeMap<_, _> =
        source.non_identity().map(|(p, c)| (*p, *c)).collect();
    seen == expected
}

pub fn groups_commute_internally(groups: &[PauliSum]) -> bool {
    groups.iter().all(|g| {
        let terms: Vec<_> = g.non_identity().map(|(p, _)| *p).collect();
        terms
            .iter()
            .enumerate()
            .all(|(i, a)| terms[i + 1..].iter().all(|b| a.commutes(b)))
    })
}
