use serde::{Deserialize, Serialize};

use super::FermionPartition;

/// Single-qubit rotation count of one fermionic Trotter step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationCount {
    pub n_modes: usize,
    /// Fragments in the product, the one-electron fragment included.
    pub n_fragments: usize,
    /// `2 N² Γ − N`, clamped at zero.
    pub bound: usize,
    /// `(Γ+1) N(N−1)` for merged orbital rotations, `(Γ−1) N(N+1)` for two-body
    /// phases and `N` for the one-body phase.
    pub breakdown: usize,
    pub orbital_rotations: usize,
    pub two_body_phases: usize,
    pub one_body_phases: usize,
    /// Set when `Γ = 0` and the bound formula would be negative.
    pub degenerate: bool,
}

pub fn rotation_count(n_modes: usize, n_fragments: usize) -> RotationCount {
    let n = n_modes;
    let raw = 2 * n * n * n_fragments;
    let degenerate = raw < n || n_fragments == 0;
    let (orbital_rotations, two_body_phases, one_body_phases) = if n_fragments == 0 {
        (0, 0, 0)
    } else {
        (
            (n_fragments + 1) * n * n.saturating_sub(1),
            (n_fragments - 1) * n * (n + 1),
            n,
        )
    };
    RotationCount {
        n_modes: n,
        n_fragments,
        bound: raw.saturating_sub(n),
        breakdown: orbital_rotations + two_body_phases + one_body_phases,
        orbital_rotations,
        two_body_phases,
        one_body_phases,
        degenerate,
    }
}

pub fn fermionic_rotation_count(p: &FermionPartition) -> RotationCount {
    rotation_count(p.n_modes(), p.fragments.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula() {
        let c = rotation_count(4, 3);
        assert_eq!(c.bound, 92);
        assert!(!c.degenerate);
        assert_eq!(c.breakdown, 4 * 12 + 2 * 20 + 4);
        assert!(c.breakdown <= c.bound);
    }

    #[test]
    fn empty_is_degenerate() {
        let c = rotation_count(4, 0);
        assert_eq!(c.bound, 0);
        assert!(c.degenerate);
    }
}
