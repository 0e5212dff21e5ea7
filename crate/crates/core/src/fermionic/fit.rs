//! Full-rank fragment fitting by quasi-Newton least squares.
//!
//! A full-rank fragment has two-body tensor `A Λ Aᵀ` (supermatrix form) with
//! `A[(p q), i] = O_pi O_qi`. The fit minimizes the squared Frobenius norm of
//! the residual supermatrix over the Givens angles of `O` and the upper
//! triangle of `Λ`; acceptance and stopping use the entrywise L1 norm.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fragment::{pair_columns, two_body_tensor, FermionFragment, FragmentKind, Quadratic};
use super::lr::{low_rank_terms, one_body_fragments};
use super::rotation::{
    givens_angles, n_angles, orbital_angles, pair_order, rotation_matrix, spin_orbital_angles,
    to_special_orthogonal,
};
use super::{residual_l1, FermionPartition};
use crate::error::{Error, Result};
use crate::hamiltonian::{MolecularTensors, Tensor4};
use crate::linalg::{eigh_sorted, eigh_spin_adapted};
use crate::optimize::{minimize, BfgsOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub seed: u64,
    /// Independent starts per greedy step; the lowest objective wins.
    pub restarts: usize,
    pub max_iter: usize,
    /// Half-width of the uniform perturbation added to the seed angles.
    pub noise: f64,
    /// Force (`Some(true)`) or forbid spin-restricted rotations. `None` picks
    /// them whenever the target has molecular spin structure.
    pub spin_restricted: Option<bool>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 1,
            max_iter: 600,
            noise: 0.01,
            spin_restricted: None,
        }
    }
}

/// Whether `g` couples only same-spin index pairs and is unchanged when every
/// spin is flipped.
pub fn has_spin_structure(g: &Tensor4, tol: f64) -> bool {
    let n = g.dim();
    if !n.is_multiple_of(2) {
        return false;
    }
    let flip = |i: usize| i ^ 1;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = g.get(p, q, r, s);
                    if (p % 2 != q % 2 || r % 2 != s % 2) && v.abs() > tol {
                        return false;
                    }
                    if (v - g.get(flip(p), flip(q), flip(r), flip(s))).abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// How the parameters of one fragment are laid out and turned into `(O, Λ)`.
#[derive(Clone, Copy, Debug)]
struct Layout {
    n: usize,
    /// Dimension the Givens rotations act on: `n / 2` when spin-restricted.
    rot_dim: usize,
    restricted: bool,
}

impl Layout {
    fn new(n: usize, restricted: bool) -> Self {
        Self {
            n,
            rot_dim: if restricted { n / 2 } else { n },
            restricted,
        }
    }

    fn n_angles(&self) -> usize {
        n_angles(self.rot_dim)
    }

    fn len(&self) -> usize {
        self.n_angles() + self.n * (self.n + 1) / 2
    }

    fn rotation(&self, x: &[f64]) -> DMatrix<f64> {
        let o = rotation_matrix(self.rot_dim, &x[..self.n_angles()]).expect("layout length");
        if self.restricted {
            o.kronecker(&DMatrix::<f64>::identity(2, 2))
        } else {
            o
        }
    }

    fn lambda(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut lam = DMatrix::zeros(n, n);
        let mut k = self.n_angles();
        for i in 0..n {
            for j in i..n {
                lam[(i, j)] = x[k];
                lam[(j, i)] = x[k];
                k += 1;
            }
        }
        lam
    }

    fn encode(&self, angles: &[f64], lam: &DMatrix<f64>, out: &mut Vec<f64>) {
        out.extend_from_slice(angles);
        for i in 0..self.n {
            for j in i..self.n {
                out.push(lam[(i, j)]);
            }
        }
    }

    /// Fragment with angles on the full spin-orbital index set.
    fn fragment(&self, x: &[f64]) -> Result<FermionFragment> {
        let angles = if self.restricted {
            spin_orbital_angles(self.rot_dim, &x[..self.n_angles()])?
        } else {
            x[..self.n_angles()].to_vec()
        };
        Ok(FermionFragment {
            kind: FragmentKind::FullRank,
            n_modes: self.n,
            angles,
            quadratic: Some(Quadratic::Lambda(self.lambda(x))),
            onebody: None,
        })
    }

    /// Replaces `Λ` in `x` by the least-squares optimum for the rotation in `x`:
    /// `Λ = P Aᵀ T A P` with `P` the pseudo-inverse of `AᵀA`.
    fn fit_lambda(&self, x: &mut [f64], target: &DMatrix<f64>) {
        let a = pair_columns(&self.rotation(x));
        let gram = a.transpose() * &a;
        let Ok(p) = gram.pseudo_inverse(1e-12) else {
            return;
        };
        let lam = &p * a.transpose() * target * &a * &p;
        let lam = (&lam + lam.transpose()) * 0.5;
        let na = self.n_angles();
        let angles = x[..na].to_vec();
        let mut out = Vec::with_capacity(self.len());
        self.encode(&angles, &lam, &mut out);
        x.copy_from_slice(&out);
    }

    /// Seed parameters from the dominant low-rank term of `target`.
    fn seed(&self, target: &Tensor4) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.len());
        let Some(term) = low_rank_terms(target)?.into_iter().next() else {
            out.resize(self.len(), 0.0);
            return Ok(out);
        };
        let l = &term.generator;
        let angles = if self.restricted {
            let k = self.rot_dim;
            let up = DMatrix::from_fn(k, k, |i, j| l[(2 * i, 2 * j)]);
            let (_, vecs) = eigh_sorted(&up);
            givens_angles(&to_special_orthogonal(vecs))?
        } else {
            let (_, vecs) = eigh_spin_adapted(l);
            orbital_angles(&vecs)?
        };
        let mut full = Vec::with_capacity(self.len());
        self.encode(&angles, &DMatrix::zeros(self.n, self.n), &mut full);
        let o = self.rotation(&full);
        let d = (o.transpose() * l * &o).diagonal();
        let lam = &d * d.transpose() * term.weight;
        self.encode(&angles, &lam, &mut out);
        Ok(out)
    }
}

/// Squared-residual objective and its gradient for a set of fragments sharing one layout.
struct Objective<'a> {
    layout: Layout,
    target: &'a DMatrix<f64>,
    n_fragments: usize,
}

impl Objective<'_> {
    fn residual(
        &self,
        x: &[f64],
    ) -> (
        DMatrix<f64>,
        Vec<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)>,
    ) {
        let len = self.layout.len();
        let mut r = self.target.clone();
        let mut parts = Vec::with_capacity(self.n_fragments);
        for l in 0..self.n_fragments {
            let xl = &x[l * len..(l + 1) * len];
            let o = self.layout.rotation(xl);
            let lam = self.layout.lambda(xl);
            let a = pair_columns(&o);
            let al = &a * &lam;
            r.gemm(-1.0, &al, &a.transpose(), 1.0);
            parts.push((o, lam, a));
        }
        (r, parts)
    }

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let n = self.layout.n;
        let len = self.layout.len();
        let na = self.layout.n_angles();
        let (r, parts) = self.residual(x.as_slice());
        let f = r.norm_squared();
        let mut grad = DVector::zeros(x.len());
        for (l, (o, lam, a)) in parts.iter().enumerate() {
            let ra = &r * a;
            let g_lam = a.transpose() * &ra * -2.0;
            let g_a = &ra * lam * -4.0;
            let mut g_o = DMatrix::zeros(n, n);
            for x_ in 0..n {
                for i in 0..n {
                    let mut acc = 0.0;
                    for q in 0..n {
                        acc += g_a[(x_ * n + q, i)] * o[(q, i)] + g_a[(q * n + x_, i)] * o[(q, i)];
                    }
                    g_o[(x_, i)] = acc;
                }
            }
            let g_rot = if self.layout.restricted {
                let k = self.layout.rot_dim;
                DMatrix::from_fn(k, k, |a_, b| {
                    g_o[(2 * a_, 2 * b)] + g_o[(2 * a_ + 1, 2 * b + 1)]
                })
            } else {
                g_o
            };
            let xl = &x.as_slice()[l * len..(l + 1) * len];
            let g_angles = angle_gradient(self.layout.rot_dim, &xl[..na], &g_rot);
            let base = l * len;
            for (k, v) in g_angles.into_iter().enumerate() {
                grad[base + k] = v;
            }
            let mut k = base + na;
            for i in 0..n {
                for j in i..n {
                    grad[k] = if i == j {
                        g_lam[(i, i)]
                    } else {
                        g_lam[(i, j)] + g_lam[(j, i)]
                    };
                    k += 1;
                }
            }
        }
        (f, grad)
    }
}

/// Chain rule from `∂L/∂O` to the Givens angles of `O = G₁ ⋯ G_m`.
fn angle_gradient(dim: usize, angles: &[f64], g_o: &DMatrix<f64>) -> Vec<f64> {
    let pairs = pair_order(dim);
    let m = pairs.len();
    let cs: Vec<(f64, f64)> = angles.iter().map(|t| (t.cos(), t.sin())).collect();
    // suffix[j] = G_j ⋯ G_{m−1}
    let mut suffix = vec![DMatrix::<f64>::identity(dim, dim); m + 1];
    for j in (0..m).rev() {
        let (p, q) = pairs[j];
        let (c, s) = cs[j];
        let mut next = suffix[j + 1].clone();
        for col in 0..dim {
            let sq = suffix[j + 1][(q, col)];
            let sp = suffix[j + 1][(p, col)];
            next[(q, col)] = c * sq - s * sp;
            next[(p, col)] = s * sq + c * sp;
        }
        suffix[j] = next;
    }
    let mut q_mat = g_o.clone();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let (p, q) = pairs[j];
        let (c, s) = cs[j];
        let right = &suffix[j + 1];
        let entry =
            |a: usize, b: usize| -> f64 { (0..dim).map(|e| q_mat[(a, e)] * right[(b, e)]).sum() };
        let (m_qq, m_pp, m_pq, m_qp) = (entry(q, q), entry(p, p), entry(p, q), entry(q, p));
        out.push(-s * (m_qq + m_pp) + c * (m_pq - m_qp));
        for col in 0..dim {
            let rq = q_mat[(q, col)];
            let rp = q_mat[(p, col)];
            q_mat[(q, col)] = c * rq + s * rp;
            q_mat[(p, col)] = -s * rq + c * rp;
        }
    }
    out
}

fn choose_layout(g: &Tensor4, opts: &FitOptions) -> Layout {
    let n = g.dim();
    let restricted = n >= 2
        && opts
            .spin_restricted
            .unwrap_or_else(|| has_spin_structure(g, 1e-12));
    Layout::new(n, restricted)
}

fn bfgs_options(max_iter: usize) -> BfgsOptions {
    BfgsOptions {
        max_iter,
        gtol: 1e-10,
        ftol: 1e-12,
        patience: 10,
        ..BfgsOptions::default()
    }
}

fn perturb(x: &mut [f64], n_angle_params: usize, len: usize, noise: f64, rng: &mut ChaCha8Rng) {
    if noise <= 0.0 {
        return;
    }
    for (k, v) in x.iter_mut().enumerate() {
        if k % len < n_angle_params {
            *v += rng.random_range(-noise..noise);
        }
    }
}

fn partition_shell(
    t: &MolecularTensors,
    method: &str,
    threshold: f64,
    opts: &FitOptions,
) -> Result<FermionPartition> {
    Ok(FermionPartition {
        method: method.into(),
        seed: opts.seed,
        threshold,
        constant: t.constant,
        fragments: one_body_fragments(&t.h)?,
        residual_l1: 0.0,
        residual_history: Vec::new(),
        converged: false,
        diagnostics: Vec::new(),
        source: Some(t.clone()),
    })
}

/// Greedy full-rank optimization: fit one fragment to the current residual,
/// subtract it, and repeat until the residual L1 drops to `threshold` or
/// `max_fragments` two-body fragments have been produced.
pub fn gfro_decompose(
    t: &MolecularTensors,
    threshold: f64,
    max_fragments: usize,
    opts: &FitOptions,
) -> Result<FermionPartition> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be > 0, got {threshold}"
        )));
    }
    let mut part = partition_shell(t, "gfro", threshold, opts)?;
    let layout = choose_layout(&t.g, opts);
    let n = layout.n;
    let len = layout.len();
    let mut residual = t.g.clone();
    let mut l1 = residual.l1_norm();
    let target_f = threshold * threshold / (n as f64).powi(4);
    let mut step = 0u64;
    while l1 > threshold {
        if part.two_body_count() >= max_fragments {
            part.diagnostics.push(format!(
                "stopped at max_fragments = {max_fragments} with residual L1 {l1:.3e}"
            ));
            break;
        }
        let seed_x = layout.seed(&residual)?;
        let sup = residual.supermatrix();
        let objective = Objective {
            layout,
            target: &sup,
            n_fragments: 1,
        };
        let mut best: Option<(f64, DVector<f64>)> = None;
        for restart in 0..opts.restarts.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(
                opts.seed
                    ^ step.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    ^ (restart as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
            );
            let mut x0 = seed_x.clone();
            if restart == 0 {
                perturb(&mut x0, layout.n_angles(), len, opts.noise, &mut rng);
            } else {
                let pi = std::f64::consts::PI;
                x0[..layout.n_angles()]
                    .iter_mut()
                    .for_each(|a| *a = rng.random_range(-pi..pi));
            }
            layout.fit_lambda(&mut x0, &sup);
            let res = minimize(
                |x| objective.value_and_gradient(x),
                DVector::from_vec(x0),
                &bfgs_options(opts.max_iter),
                |_, f| f <= target_f,
            );
            if best.as_ref().is_none_or(|(f, _)| res.f < *f) {
                best = Some((res.f, res.x));
            }
        }
        let (_, x) = best.expect("at least one start");
        let frag = layout.fragment(x.as_slice())?;
        let next = residual.sub(&two_body_tensor(&frag.rotation(), &frag.lambda()));
        let next_l1 = next.l1_norm();
        if next_l1 >= l1 - 1e-12 {
            part.diagnostics.push(format!(
                "step {} failed to reduce the residual L1 ({l1:.6e} → {next_l1:.6e}); stopping",
                step + 1
            ));
            break;
        }
        log::debug!("gfro step {}: residual L1 {next_l1:.6e}", step + 1);
        part.fragments.push(frag);
        part.residual_history.push(next_l1);
        residual = next;
        l1 = next_l1;
        step += 1;
    }
    part.converged = l1 <= threshold;
    part.residual_l1 = residual_l1(t, &part);
    Ok(part)
}

/// Joint full-rank optimization of exactly `n_fragments` two-body fragments.
pub fn fro_decompose(
    t: &MolecularTensors,
    n_fragments: usize,
    threshold: f64,
    opts: &FitOptions,
) -> Result<FermionPartition> {
    if n_fragments == 0 {
        return Err(Error::InvalidArgument("n_fragments must be ≥ 1".into()));
    }
    let mut part = partition_shell(t, "fro", threshold, opts)?;
    let layout = choose_layout(&t.g, opts);
    let n = layout.n;
    let len = layout.len();
    let mut x0 = Vec::with_capacity(len * n_fragments);
    let mut residual = t.g.clone();
    for _ in 0..n_fragments {
        let xl = layout.seed(&residual)?;
        let o = layout.rotation(&xl);
        residual = residual.sub(&two_body_tensor(&o, &layout.lambda(&xl)));
        x0.extend(xl);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    perturb(&mut x0, layout.n_angles(), len, opts.noise, &mut rng);
    let sup = t.g.supermatrix();
    let objective = Objective {
        layout,
        target: &sup,
        n_fragments,
    };
    let target_f = threshold.max(0.0).powi(2) / (n as f64).powi(4);
    let res = minimize(
        |x| objective.value_and_gradient(x),
        DVector::from_vec(x0),
        &bfgs_options(opts.max_iter),
        |_, f| f <= target_f,
    );
    if !res.converged() {
        part.diagnostics.push(format!(
            "optimizer stopped with {:?} after {} iterations",
            res.termination, res.iterations
        ));
    }
    for l in 0..n_fragments {
        part.fragments
            .push(layout.fragment(&res.x.as_slice()[l * len..(l + 1) * len])?);
    }
    part.residual_l1 = residual_l1(t, &part);
    part.converged = res.converged() || part.residual_l1 <= threshold;
    Ok(part)
}
