//! Explicit Fock-space matrices of fermionic operators.
//!
//! The occupation basis state `|b⟩` has index `b = Σ n_k 2^k`. Ladder
//! operators carry the sign of the occupied modes below them:
//! `a†_k |b⟩ = (−1)^{|b ∧ (2^k − 1)|} |b + 2^k⟩` when mode `k` is empty. This is
//! the same matrix as the Jordan-Wigner image, but built without Pauli algebra.

use num_complex::Complex64;

use super::operator::SparseOp;
use crate::error::{Error, Result};
use crate::hamiltonian::{FermionOperator, Ladder, MolecularTensors};

/// `(sign, new state)` or `None` when the ladder operator annihilates `b`.
#[inline]
pub fn ladder_action(b: u64, l: Ladder) -> Option<(f64, u64)> {
    let bit = 1u64 << l.mode;
    let occupied = b & bit != 0;
    if occupied == l.dagger {
        return None;
    }
    let sign = if (b & (bit - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((sign, b ^ bit))
}

/// Applies a product of ladder operators (rightmost first) to a basis state.
#[inline]
pub fn product_action(b: u64, ops: &[Ladder]) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    let mut state = b;
    for &l in ops.iter().rev() {
        let (s, next) = ladder_action(state, l)?;
        sign *= s;
        state = next;
    }
    Some((sign, state))
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::ResourceLimit {
            what: "mode count for an explicit Fock matrix",
            got: n,
            cap,
        });
    }
    Ok(())
}

pub fn fermion_to_sparse(op: &FermionOperator, max_modes: usize) -> Result<SparseOp> {
    check_cap(op.n_modes, max_modes)?;
    let dim = 1usize << op.n_modes;
    let mut trip = Vec::new();
    for b in 0..dim as u64 {
        for t in &op.terms {
            if let Some((s, out)) = product_action(b, &t.ops) {
                trip.push((out as usize, b as usize, Complex64::new(s * t.coeff, 0.0)));
            }
        }
    }
    Ok(SparseOp::from_triplets(dim, trip))
}

/// Matrix of `c + Σ h a†a + Σ g a†a a†a` built directly from the tensors.
pub fn tensors_to_sparse(t: &MolecularTensors, max_modes: usize) -> Result<SparseOp> {
    let n = t.n_spin();
    check_cap(n, max_modes)?;
    let dim = 1usize << n;
    let mut trip = Vec::new();
    let g = t.g.as_slice();
    for b in 0..dim as u64 {
        if t.constant != 0.0 {
            trip.push((b as usize, b as usize, Complex64::new(t.constant, 0.0)));
        }
        for p in 0..n {
            for q in 0..n {
                let hv = t.h[(p, q)];
                let Some((s1, b1)) = product_action(b, &[Ladder::create(p), Ladder::annihilate(q)])
                else {
                    continue;
                };
                if hv != 0.0 {
                    trip.push((b1 as usize, b as usize, Complex64::new(s1 * hv, 0.0)));
                }
            }
        }
        // a†_p a_q a†_r a_s |b⟩: act with (rs) first, then (pq)
        for r in 0..n {
            for s in 0..n {
                let Some((s_rs, b_rs)) =
                    product_action(b, &[Ladder::create(r), Ladder::annihilate(s)])
                else {
                    continue;
                };
                for p in 0..n {
                    for q in 0..n {
                        let v = g[((p * n + q) * n + r) * n + s];
                        if v == 0.0 {
                            continue;
                        }
                        if let Some((s_pq, out)) =
                            product_action(b_rs, &[Ladder::create(p), Ladder::annihilate(q)])
                        {
                            trip.push((
                                out as usize,
                                b as usize,
                                Complex64::new(s_pq * s_rs * v, 0.0),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(SparseOp::from_triplets(dim, trip))
}

/// Particle number, `S_z` and `S²` as fermionic operators on interleaved spin-orbitals.
pub fn spin_operator_terms(
    n_spin: usize,
) -> Result<(FermionOperator, FermionOperator, FermionOperator)> {
    if !n_spin.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "spin operators need an even mode count, got {n_spin}"
        )));
    }
    let k = n_spin / 2;
    let mut number = FermionOperator::new(n_spin);
    let mut sz = FermionOperator::new(n_spin);
    for p in 0..n_spin {
        number.push(vec![Ladder::create(p), Ladder::annihilate(p)], 1.0)?;
        let s = if p % 2 == 0 { 0.5 } else { -0.5 };
        sz.push(vec![Ladder::create(p), Ladder::annihilate(p)], s)?;
    }
    // S² = S₋S₊ + S_z² + S_z
    let mut s2 = FermionOperator::new(n_spin);
    for i in 0..k {
        for j in 0..k {
            // S₋ = Σ a†_{iβ} a_{iα},  S₊ = Σ a†_{jα} a_{jβ}
            s2.push(
                vec![
                    Ladder::create(2 * i + 1),
                    Ladder::annihilate(2 * i),
                    Ladder::create(2 * j),
                    Ladder::annihilate(2 * j + 1),
                ],
                1.0,
            )?;
        }
    }
    for a in &sz.terms {
        for b in &sz.terms {
            let mut ops = a.ops.clone();
            ops.extend(b.ops.iter().copied());
            s2.push(ops, a.coeff * b.coeff)?;
        }
    }
    s2.add(&sz)?;
    Ok((number, sz, s2))
}

/// Sparse `(N̂, Ŝ_z, Ŝ²)`.
pub fn build_spin_operators(
    n_spin: usize,
    max_modes: usize,
) -> Result<(SparseOp, SparseOp, SparseOp)> {
    let (n, sz, s2) = spin_operator_terms(n_spin)?;
    Ok((
        fermion_to_sparse(&n, max_modes)?,
        fermion_to_sparse(&sz, max_modes)?,
        fermion_to_sparse(&s2, max_modes)?,
    ))
}

/// Twice the `S_z` eigenvalue of an occupation state: `n_α − n_β`.
#[inline]
pub fn twice_sz(b: u64) -> i64 {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    (b & EVEN).count_ones() as i64 - (b & !EVEN).count_ones() as i64
}
