//! Single Pauli products commuting with every term of a set of sums.
//!
//! `Q = (q_x, q_z)` commutes with a term `(x, z)` iff `|x ∧ q_z| + |z ∧ q_x|` is
//! even, which is one linear equation over GF(2) per term. The symmetries are
//! the kernel of the stacked system.

use super::pauli::{i_pow, PauliString, PauliSum, C64};
use crate::error::{Error, Result};

/// Packs `(q_z, q_x)` into one 128-bit vector: `q_z` in the low word.
fn pack(qz: u64, qx: u64) -> u128 {
    qz as u128 | (qx as u128) << 64
}

fn unpack(v: u128) -> PauliString {
    PauliString::new((v >> 64) as u64, v as u64)
}

fn column_bit(col: usize, n: usize) -> u128 {
    if col < n {
        1u128 << col
    } else {
        1u128 << (64 + col - n)
    }
}

/// Reduced row echelon form over GF(2); returns the rows and their pivot columns.
fn rref(rows: &mut Vec<u128>, n_cols: usize, n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n_cols {
        let bit = column_bit(col, n);
        let Some(k) = (r..rows.len()).find(|&k| rows[k] & bit != 0) else {
            continue;
        };
        rows.swap(r, k);
        let pivot = rows[r];
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && *row & bit != 0 {
                *row ^= pivot;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// A canonical basis (reduced echelon form) of the Pauli products that commute
/// with every term of every sum, identity excluded.
pub fn find_pauli_symmetries(sums: &[PauliSum]) -> Result<Vec<PauliString>> {
    let Some(first) = sums.first() else {
        return Ok(Vec::new());
    };
    let n = first.n_qubits;
    if let Some(bad) = sums.iter().find(|s| s.n_qubits != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.n_qubits,
        });
    }
    let mut rows: Vec<u128> = sums
        .iter()
        .flat_map(|s| s.non_identity().map(|(p, _)| pack(p.x, p.z)))
        .collect();
    rows.sort_unstable();
    rows.dedup();
    let n_cols = 2 * n;
    let pivots = rref(&mut rows, n_cols, n);
    let mut kernel = Vec::new();
    for free in (0..n_cols).filter(|c| !pivots.contains(c)) {
        let mut v = column_bit(free, n);
        for (row, &pc) in rows.iter().zip(&pivots) {
            if row & column_bit(free, n) != 0 {
                v |= column_bit(pc, n);
            }
        }
        kernel.push(v);
    }
    // Canonical form of the kernel itself, Z-type columns first.
    let mut basis = kernel;
    rref(&mut basis, n_cols, n);
    let out: Vec<PauliString> = basis.into_iter().map(unpack).collect();
    for q in &out {
        for s in sums {
            if let Some((p, _)) = s.non_identity().find(|(p, _)| !p.commutes(q)) {
                return Err(Error::Internal(format!(
                    "symmetry {} fails against {}",
                    q.label(n),
                    p.label(n)
                )));
            }
        }
    }
    Ok(out)
}

/// Whether `q` is a product of elements of `basis` (phases ignored).
pub fn in_span(basis: &[PauliString], q: &PauliString) -> bool {
    let mut rows: Vec<u128> = basis.iter().map(|b| pack(b.z, b.x)).collect();
    let before = rref(&mut rows, 128, 64).len();
    rows.push(pack(q.z, q.x));
    rref(&mut rows, 128, 64).len() == before
}

/// Greedy mutually commuting subset, preferring Z-only and low-weight products.
pub fn commuting_subset(symmetries: &[PauliString], n_qubits: usize) -> Vec<PauliString> {
    let mut order: Vec<PauliString> = symmetries.to_vec();
    order.sort_by(|a, b| {
        (a.x != 0)
            .cmp(&(b.x != 0))
            .then(a.weight().cmp(&b.weight()))
            .then_with(|| a.cmp_label(b, n_qubits))
    });
    let mut chosen: Vec<PauliString> = Vec::new();
    for q in order {
        if chosen.iter().all(|c| c.commutes(&q)) {
            chosen.push(q);
        }
    }
    chosen
}

/// `⟨ψ|Q|ψ⟩` for a state on `log₂ len` qubits.
pub fn expectation(q: &PauliString, state: &[C64]) -> C64 {
    let phase = i_pow((q.x & q.z).count_ones() as i64);
    let x = q.x as usize;
    let z = q.z as usize;
    let mut acc = C64::new(0.0, 0.0);
    for (b, amp) in state.iter().enumerate() {
        let sign = if (z & b).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        acc += state[b ^ x].conj() * amp * sign;
    }
    acc * phase
}

/// Rounds `⟨ψ|Q|ψ⟩` to `±1`, or `None` when the state is not close to an eigenstate.
pub fn measure_label(q: &PauliString, state: &[C64], tol: f64) -> Option<i8> {
    let e = expectation(q, state);
    if (e.re - 1.0).abs() <= tol && e.im.abs() <= tol {
        Some(1)
    } else if (e.re + 1.0).abs() <= tol && e.im.abs() <= tol {
        Some(-1)
    } else {
        None
    }
}
