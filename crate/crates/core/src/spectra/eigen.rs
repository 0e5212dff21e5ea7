//! Extreme eigenvalues of Hermitian operators.
//!
//! Small problems are diagonalized densely. Larger ones use a Lanczos
//! process with full reorthogonalization and thick restarts: once the basis
//! reaches `krylov_dim` vectors, the `keep` lowest and `keep` highest Ritz
//! vectors are retained together with the pending expansion vector, which
//! keeps the projected problem exact. Convergence requires the residual norm
//! of both extreme Ritz pairs to drop below `max(tol · max(|θ_min|, |θ_max|), floor)`,
//! which bounds the eigenvalue error by the same amount. The start vector is
//! drawn from a fixed-seed generator, so results are reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operator::{Commutator, LinearOperator};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermitian_eigh};

type C64 = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenConfig {
    /// Dimensions up to this size are solved densely.
    pub dense_max_dim: usize,
    /// If Lanczos fails, dimensions up to this size fall back to a dense solve.
    pub dense_fallback_dim: usize,
    pub krylov_dim: usize,
    pub keep: usize,
    pub tol: f64,
    /// Residual norm that is always accepted, however small the eigenvalues.
    pub abs_floor: f64,
    pub max_restarts: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            dense_max_dim: 1024,
            dense_fallback_dim: 1024,
            krylov_dim: 60,
            keep: 4,
            tol: 1e-8,
            abs_floor: 1e-12,
            max_restarts: 400,
        }
    }
}

impl EigenConfig {
    /// Same tolerances, but Lanczos already above `dim` states.
    pub fn with_dense_max_dim(mut self, dim: usize) -> Self {
        self.dense_max_dim = dim;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Extremes {
    pub min: f64,
    pub max: f64,
    /// Largest final residual norm of the two extreme Ritz pairs (0 for dense solves).
    pub residual: f64,
    pub matvecs: usize,
    /// Normalized eigenvector of `min`, when requested.
    pub min_vector: Option<Vec<C64>>,
}

impl Extremes {
    pub fn range(&self) -> f64 {
        self.max - self.min
    }

    pub fn norm(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

/// Extreme eigenpairs of a dense Hermitian matrix.
pub fn dense_extremes(m: &DMatrix<C64>, want_vector: bool) -> Extremes {
    let n = m.nrows();
    if n == 0 {
        return Extremes {
            min: 0.0,
            max: 0.0,
            residual: 0.0,
            matvecs: 0,
            min_vector: None,
        };
    }
    if !want_vector {
        let ev = hermitian_eigenvalues(m);
        return Extremes {
            min: ev[0],
            max: ev[n - 1],
            residual: 0.0,
            matvecs: 0,
            min_vector: None,
        };
    }
    let (vals, vecs) = hermitian_eigh(m);
    Extremes {
        min: vals[0],
        max: vals[n - 1],
        residual: 0.0,
        matvecs: 0,
        min_vector: Some(vecs.column(0).iter().copied().collect()),
    }
}

/// All eigenvalues of a dense Hermitian matrix, ascending.
pub fn dense_spectrum(m: &DMatrix<C64>) -> Vec<f64> {
    hermitian_eigenvalues(m)
}

#[inline]
fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn start_vector(n: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_20e5);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn combine(basis: &[Vec<C64>], coeffs: impl Iterator<Item = C64>, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (v, c) in basis.iter().zip(coeffs) {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// Removes the components `coeffs = Vᴴ w` from `w`, repeating the pass
/// against `basis` once more when cancellation was severe; returns the
/// remaining norm.
fn orthogonalize(w: &mut [C64], basis: &[Vec<C64>], coeffs: &[C64]) -> f64 {
    let before = norm(w);
    for (v, &c) in basis.iter().zip(coeffs) {
        for (x, y) in w.iter_mut().zip(v) {
            *x -= c * y;
        }
    }
    let mut after = norm(w);
    if after < 0.7 * before {
        for v in basis {
            let c = dot(v, w);
            for (x, y) in w.iter_mut().zip(v) {
                *x -= c * y;
            }
        }
        after = norm(w);
    }
    after
}

struct RitzPair {
    value: f64,
    coeffs: DVector<C64>,
}

fn lanczos<A: LinearOperator + ?Sized>(
    a: &A,
    cfg: &EigenConfig,
    want_vector: bool,
) -> Result<Extremes> {
    let n = a.dim();
    let m = cfg.krylov_dim.max(2 * cfg.keep + 2).min(n);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let mut images: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let mut h = DMatrix::<C64>::zeros(0, 0);
    let mut next = Some(start_vector(n));
    let mut matvecs = 0;
    let mut restarts = 0;

    loop {
        // expand until the basis is full or the space is invariant
        while basis.len() < m {
            let Some(q) = next.take() else { break };
            let mut aq = vec![C64::new(0.0, 0.0); n];
            a.apply(&q, &mut aq);
            matvecs += 1;
            let k = basis.len();
            basis.push(q);
            let coeffs: Vec<C64> = basis.iter().map(|v| dot(v, &aq)).collect();
            let mut grown = DMatrix::<C64>::zeros(k + 1, k + 1);
            grown.view_mut((0, 0), (k, k)).copy_from(&h);
            for (i, &hij) in coeffs.iter().enumerate().take(k) {
                grown[(i, k)] = hij;
                grown[(k, i)] = hij.conj();
            }
            grown[(k, k)] = C64::new(coeffs[k].re, 0.0);
            h = grown;
            let mut w = aq.clone();
            images.push(aq);
            let scale = h.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
            let beta = orthogonalize(&mut w, &basis, &coeffs);
            if beta > 1e-12 * scale && basis.len() < n {
                w.iter_mut().for_each(|x| *x /= beta);
                next = Some(w);
            }
        }

        let (ritz_values, ritz_vectors) = hermitian_eigh(&h);
        let k = basis.len();
        let order: Vec<usize> = (0..k).collect();
        let pair = |i: usize| RitzPair {
            value: ritz_values[i],
            coeffs: ritz_vectors.column(i).into_owned(),
        };
        let lo = pair(order[0]);
        let hi = pair(order[k - 1]);
        let residual_of = |p: &RitzPair| {
            let av = combine(&images, p.coeffs.iter().copied(), n);
            let v = combine(&basis, p.coeffs.iter().copied(), n);
            let r: Vec<C64> = av.iter().zip(&v).map(|(x, y)| x - y * p.value).collect();
            norm(&r)
        };
        let res = residual_of(&lo).max(residual_of(&hi));
        let scale = lo.value.abs().max(hi.value.abs());
        if next.is_none() || res <= (cfg.tol * scale).max(cfg.abs_floor) {
            let min_vector = want_vector.then(|| {
                let mut v = combine(&basis, lo.coeffs.iter().copied(), n);
                let s = norm(&v);
                v.iter_mut().for_each(|x| *x /= s);
                v
            });
            return Ok(Extremes {
                min: lo.value,
                max: hi.value,
                residual: res,
                matvecs,
                min_vector,
            });
        }
        if restarts >= cfg.max_restarts {
            return Err(Error::NonConvergence { residual: res });
        }
        restarts += 1;

        // thick restart on the outermost Ritz vectors
        let keep = cfg.keep.min(k / 2).max(1);
        let mut kept: Vec<usize> = order[..keep].to_vec();
        kept.extend_from_slice(&order[k - keep..]);
        let mut new_basis = Vec::with_capacity(m + 1);
        let mut new_images = Vec::with_capacity(m + 1);
        let mut new_h = DMatrix::<C64>::zeros(kept.len(), kept.len());
        for (slot, &i) in kept.iter().enumerate() {
            let c = ritz_vectors.column(i);
            new_basis.push(combine(&basis, c.iter().copied(), n));
            new_images.push(combine(&images, c.iter().copied(), n));
            new_h[(slot, slot)] = C64::new(ritz_values[i], 0.0);
        }
        basis = new_basis;
        images = new_images;
        h = new_h;
    }
}

/// `(E_min, E_max)` of a Hermitian operator.
pub fn extreme_eigenvalues<A: LinearOperator + ?Sized>(
    a: &A,
    cfg: &EigenConfig,
) -> Result<Extremes> {
    solve(a, cfg, false)
}

/// Lowest eigenvalue with its eigenvector.
pub fn ground_state<A: LinearOperator + ?Sized>(
    a: &A,
    cfg: &EigenConfig,
) -> Result<(f64, Vec<C64>)> {
    let e = solve(a, cfg, true)?;
    Ok((e.min, e.min_vector.expect("vector requested")))
}

fn solve<A: LinearOperator + ?Sized>(
    a: &A,
    cfg: &EigenConfig,
    want_vector: bool,
) -> Result<Extremes> {
    let n = a.dim();
    if n <= cfg.dense_max_dim {
        return Ok(dense_extremes(&a.to_dense(), want_vector));
    }
    match lanczos(a, cfg, want_vector) {
        Ok(e) => Ok(e),
        Err(Error::NonConvergence { residual }) if n <= cfg.dense_fallback_dim => {
            log::warn!(
                "Lanczos stalled at residual {residual:.3e}; using a dense solve for dim {n}"
            );
            Ok(dense_extremes(&a.to_dense(), want_vector))
        }
        Err(e) => Err(e),
    }
}

/// Spectral norm of a Hermitian operator: `max(|E_min|, |E_max|)`.
pub fn hermitian_norm<A: LinearOperator + ?Sized>(a: &A, cfg: &EigenConfig) -> Result<f64> {
    Ok(extreme_eigenvalues(a, cfg)?.norm())
}

/// Spectral norm of an arbitrary dense matrix (largest singular value).
pub fn spectral_norm_dense(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `‖[A, B]‖` for Hermitian `A`, `B`, evaluated as the norm of `i[A, B]`.
pub fn commutator_norm<A: LinearOperator, B: LinearOperator>(
    a: A,
    b: B,
    cfg: &EigenConfig,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    hermitian_norm(&Commutator { a, b }, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::pauli::PauliSum;
    use crate::spectra::operator::{to_sparse, DenseOp, PauliOp};
    use rand::Rng;

    fn random_hermitian(n: usize, seed: u64, density: f64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                if i == j || rng.random::<f64>() < density {
                    let v = if i == j {
                        C64::new(rng.random::<f64>() - 0.5, 0.0)
                    } else {
                        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                    };
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
        }
        m
    }

    #[test]
    fn single_pauli_extremes() {
        let s = PauliSum::from_text("-0.7 XZY").unwrap();
        let e = extreme_eigenvalues(&to_sparse(&s, 16).unwrap(), &EigenConfig::default()).unwrap();
        assert!((e.min + 0.7).abs() < 1e-12 && (e.max - 0.7).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense_on_random_sparse() {
        let m = random_hermitian(64, 7, 0.1);
        let dense = dense_extremes(&m, false);
        let cfg = EigenConfig::default().with_dense_max_dim(0);
        let it = extreme_eigenvalues(&DenseOp(m), &cfg).unwrap();
        assert!(it.matvecs > 0);
        assert!((it.min - dense.min).abs() <= 1e-8 * dense.norm());
        assert!((it.max - dense.max).abs() <= 1e-8 * dense.norm());
    }

    #[test]
    fn lanczos_with_restarts_on_larger_problem() {
        let m = random_hermitian(400, 11, 0.02);
        let dense = dense_extremes(&m, true);
        let cfg = EigenConfig {
            dense_max_dim: 0,
            krylov_dim: 30,
            ..EigenConfig::default()
        };
        let (e, v) = ground_state(&DenseOp(m.clone()), &cfg).unwrap();
        assert!((e - dense.min).abs() <= 1e-8 * dense.norm());
        let x = DVector::from_vec(v);
        assert!(((&m * &x) - &x * C64::new(e, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn commutator_of_x_and_z_has_norm_two() {
        let x = PauliOp::new(&PauliSum::from_text("1 X").unwrap(), 16).unwrap();
        let z = PauliOp::new(&PauliSum::from_text("1 Z").unwrap(), 16).unwrap();
        let v = commutator_norm(&x, &z, &EigenConfig::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_identity_norm() {
        let s = PauliSum::identity(3, -2.5);
        let v = hermitian_norm(&to_sparse(&s, 16).unwrap(), &EigenConfig::default()).unwrap();
        assert!((v - 2.5).abs() < 1e-14);
    }

    #[test]
    fn commutator_norm_matches_svd_at_dim_64() {
        let a = random_hermitian(64, 1, 0.3);
        let b = random_hermitian(64, 2, 0.3);
        let c = &a * &b - &b * &a;
        let cfg = EigenConfig::default().with_dense_max_dim(0);
        let v = commutator_norm(DenseOp(a), DenseOp(b), &cfg).unwrap();
        let exact = spectral_norm_dense(&c);
        assert!((v - exact).abs() <= 1e-8 * exact);
    }
}
