//! Low-rank factorization of the two-body tensor.
//!
//! The tensor is read as a quadratic form on real symmetric matrices, expanded
//! in the orthonormal basis `E_pp`, `(E_pq + E_qp)/√2`. Each eigenpair `(w, L)`
//! gives a fragment `w (Σ L_pq a†_p a_q)²`, which becomes diagonal after the
//! orbital rotation that diagonalizes `L`.

use nalgebra::{DMatrix, DVector};

use super::fragment::{FermionFragment, FragmentKind, Quadratic};
use super::rotation::orbital_angles;
use super::{residual_l1, FermionPartition};
use crate::error::{Error, Result};
use crate::hamiltonian::{MolecularTensors, Tensor4};
use crate::linalg::{eigh_sorted, eigh_spin_adapted, fix_sign};

/// Eigenvalues below this fraction of the largest are treated as exact zeros.
const RELATIVE_ZERO: f64 = 1e-14;

/// A symmetric generator `L` with weight `w` such that `g ≈ Σ w L ⊗ L`.
#[derive(Clone, Debug)]
pub(crate) struct LowRankTerm {
    pub weight: f64,
    pub generator: DMatrix<f64>,
    pub contribution: f64,
}

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for p in 0..n {
        for q in p..n {
            out.push((p, q));
        }
    }
    out
}

fn check_symmetric(g: &Tensor4) -> Result<()> {
    let n = g.dim();
    let scale = g
        .as_slice()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let tol = 1e-10 * scale;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = g.get(p, q, r, s);
                    if (v - g.get(r, s, p, q)).abs() > tol {
                        return Err(Error::Internal(format!(
                            "two-body supermatrix is not symmetric at ({p},{q},{r},{s})"
                        )));
                    }
                    if (v - g.get(q, p, r, s)).abs() > tol {
                        return Err(Error::Internal(format!(
                            "two-body tensor has a component odd under p↔q at ({p},{q},{r},{s}); \
                             real-orbital factorization needs g_pqrs = g_qprs"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// All nonzero eigenpairs of the pair-basis supermatrix, ordered by descending
/// `|w|·‖L‖₁²` and then by descending `w`.
pub(crate) fn low_rank_terms(g: &Tensor4) -> Result<Vec<LowRankTerm>> {
    check_symmetric(g)?;
    let n = g.dim();
    let pairs = pair_index(n);
    let weight = |p: usize, q: usize| {
        if p == q {
            1.0
        } else {
            std::f64::consts::SQRT_2
        }
    };
    let m = pairs.len();
    let sup = DMatrix::from_fn(m, m, |k, l| {
        let (p, q) = pairs[k];
        let (r, s) = pairs[l];
        weight(p, q) * weight(r, s) * g.get(p, q, r, s)
    });
    let (vals, vecs) = eigh_sorted(&sup);
    let largest = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut terms = Vec::new();
    for (k, &w) in vals.iter().enumerate() {
        if largest == 0.0 || w.abs() <= RELATIVE_ZERO * largest {
            continue;
        }
        let mut v: Vec<f64> = vecs.column(k).iter().copied().collect();
        fix_sign(&mut v);
        let mut l = DMatrix::zeros(n, n);
        for (&(p, q), &c) in pairs.iter().zip(&v) {
            let c = c / weight(p, q);
            l[(p, q)] = c;
            l[(q, p)] = c;
        }
        let l1: f64 = l.iter().map(|x| x.abs()).sum();
        terms.push(LowRankTerm {
            weight: w,
            generator: l,
            contribution: w.abs() * l1 * l1,
        });
    }
    terms.sort_by(|a, b| {
        b.contribution
            .total_cmp(&a.contribution)
            .then(b.weight.total_cmp(&a.weight))
    });
    Ok(terms)
}

/// Turns `w L ⊗ L` into a rank-one fragment in the eigenbasis of `L`.
pub(crate) fn rank_one_fragment(term: &LowRankTerm) -> Result<FermionFragment> {
    let n = term.generator.nrows();
    let (eps, vecs) = eigh_spin_adapted(&term.generator);
    let angles = orbital_angles(&vecs)?;
    Ok(FermionFragment {
        kind: FragmentKind::LowRank,
        n_modes: n,
        angles,
        quadratic: Some(Quadratic::Rank1 {
            epsilon: eps * term.weight.abs().sqrt(),
            weight: term.weight.signum(),
        }),
        onebody: None,
    })
}

/// The fragment `Σ h_pq a†_p a_q`, diagonalized by its own orbital rotation.
pub fn one_electron_fragment(h: &DMatrix<f64>) -> Result<FermionFragment> {
    let n = h.nrows();
    let (vals, vecs) = eigh_spin_adapted(h);
    Ok(FermionFragment {
        kind: FragmentKind::OneElectron,
        n_modes: n,
        angles: orbital_angles(&vecs)?,
        quadratic: None,
        onebody: Some(DVector::from_iterator(n, vals.iter().copied())),
    })
}

/// The one-electron fragment of `h`, or nothing when `h` vanishes.
pub fn one_body_fragments(h: &DMatrix<f64>) -> Result<Vec<FermionFragment>> {
    if h.iter().all(|&v| v == 0.0) {
        return Ok(Vec::new());
    }
    Ok(vec![one_electron_fragment(h)?])
}

/// Low-rank partition: one one-electron fragment followed by every eigenpair
/// whose `|w|·‖L‖₁²` exceeds `threshold`.
pub fn lr_decompose(t: &MolecularTensors, threshold: f64) -> Result<FermionPartition> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be ≥ 0, got {threshold}"
        )));
    }
    let mut fragments = one_body_fragments(&t.h)?;
    for term in low_rank_terms(&t.g)? {
        if term.contribution > threshold {
            fragments.push(rank_one_fragment(&term)?);
        }
    }
    let mut p = FermionPartition {
        method: "lr".into(),
        seed: 0,
        threshold,
        constant: t.constant,
        fragments,
        residual_l1: 0.0,
        residual_history: Vec::new(),
        converged: true,
        diagnostics: Vec::new(),
        source: Some(t.clone()),
    };
    p.residual_l1 = residual_l1(t, &p);
    Ok(p)
}
