//! Molecular integral tensors and the second-quantized electronic Hamiltonian
//!
//! ```text
//! H = c + Σ_pq h_pq a†_p a_q + Σ_pqrs g_pqrs a†_p a_q a†_r a_s
//! ```
//!
//! over spin-orbitals. Note the two-body ordering `a†a a†a`: it is *not* the
//! normal-ordered `a†a†aa` used by integral files. Converting chemist
//! integrals `(pq|rs)` to this form uses
//!
//! ```text
//! ½ Σ (pq|rs) a†_p a†_r a_s a_q = ½ Σ (pq|rs) a†_p a_q a†_r a_s − ½ Σ_pqs (pq|qs) a†_p a_s
//! ```
//!
//! so `g_pqrs = ½ (pq|rs)` and the one-body matrix picks up the correction
//! `h_ps −= ½ Σ_q (pq|qs)`. Spin-orbitals are interleaved: index `2i` is the
//! spin-up copy of spatial orbital `i`, `2i + 1` the spin-down copy.

mod fcidump;
mod json;
mod operator;

pub use fcidump::{load_fcidump, parse_fcidump, FcidumpHeader};
pub use json::{load_json, save_json, JSON_SCHEMA_VERSION};
pub use operator::{FermionOperator, FermionTerm, Ladder};

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default relative tolerance for the tensor symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense rank-4 tensor stored row-major, `[p][q][r][s] -> ((p n + q) n + r) n + s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[self.offset(p, q, r, s)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let o = self.offset(p, q, r, s);
        self.data[o] = v;
    }

    #[inline]
    pub fn add(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let o = self.offset(p, q, r, s);
        self.data[o] += v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// The `n² × n²` supermatrix `M[(pq),(rs)] = g_pqrs`.
    pub fn supermatrix(&self) -> DMatrix<f64> {
        let m = self.n * self.n;
        DMatrix::from_row_slice(m, m, &self.data)
    }

    pub fn from_supermatrix(n: usize, m: &DMatrix<f64>) -> Self {
        let nn = n * n;
        assert_eq!(m.shape(), (nn, nn));
        let mut data = Vec::with_capacity(nn * nn);
        for row in 0..nn {
            for col in 0..nn {
                data.push(m[(row, col)]);
            }
        }
        Self { n, data }
    }

    pub fn axpy(&mut self, alpha: f64, other: &Tensor4) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Rotates every index by the orthogonal matrix `o`:
    /// `out_pqrs = Σ o_ap o_bq o_cr o_ds t_abcd`, i.e. `Oᵀ t O` on each leg.
    pub fn rotate(&self, o: &DMatrix<f64>) -> Tensor4 {
        let n = self.n;
        assert_eq!(o.shape(), (n, n));
        let ot = o.transpose();
        // Contract one leg at a time; each step is an n⁵ loop.
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        let stride = [n * n * n, n * n, n, 1];
        for &st in stride.iter() {
            next.iter_mut().for_each(|v| *v = 0.0);
            for idx in 0..cur.len() {
                let i_leg = (idx / st) % n;
                let base = idx - i_leg * st;
                let v = cur[idx];
                if v == 0.0 {
                    continue;
                }
                for new in 0..n {
                    next[base + new * st] += ot[(new, i_leg)] * v;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Tensor4 { n, data: cur }
    }
}

/// The ingested problem: constant, one-body and two-body tensors over spin-orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularTensors {
    pub n_spatial: usize,
    /// Electron count of the neutral molecule, when the source declares it.
    pub n_electrons: Option<usize>,
    pub constant: f64,
    pub h: DMatrix<f64>,
    pub g: Tensor4,
}

impl MolecularTensors {
    /// Builds and validates.
    pub fn new(
        n_spatial: usize,
        constant: f64,
        h: DMatrix<f64>,
        g: Tensor4,
        n_electrons: Option<usize>,
    ) -> Result<Self> {
        let t = Self {
            n_spatial,
            n_electrons,
            constant,
            h,
            g,
        };
        let v = validate(&t);
        if v.is_empty() {
            Ok(t)
        } else {
            Err(Error::Validation(v.iter().map(|x| x.to_string()).collect()))
        }
    }

    pub fn zeros(n_spatial: usize) -> Self {
        let n = 2 * n_spatial;
        Self {
            n_spatial,
            n_electrons: None,
            constant: 0.0,
            h: DMatrix::zeros(n, n),
            g: Tensor4::zeros(n),
        }
    }

    #[inline]
    pub fn n_spin(&self) -> usize {
        2 * self.n_spatial
    }

    /// Same operator, expressed with the orbitals rotated by `o` (`Oᵀ h O`, and so on).
    pub fn rotated(&self, o: &DMatrix<f64>) -> MolecularTensors {
        MolecularTensors {
            n_spatial: self.n_spatial,
            n_electrons: self.n_electrons,
            constant: self.constant,
            h: o.transpose() * &self.h * o,
            g: self.g.rotate(o),
        }
    }

    /// Entrywise L1 distance over `h` and `g` (the constant is excluded).
    pub fn l1_distance(&self, other: &MolecularTensors) -> f64 {
        let dh: f64 = (&self.h - &other.h).iter().map(|v| v.abs()).sum();
        dh + self.g.sub(&other.g).l1_norm()
    }
}

/// One broken invariant, with the offending indices and magnitudes.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    OddSpinCount(usize),
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    NonFinite {
        what: &'static str,
        index: Vec<usize>,
    },
    OneBodyAsymmetry {
        p: usize,
        q: usize,
        pq: f64,
        qp: f64,
    },
    TwoBodyAsymmetry {
        index: [usize; 4],
        values: [f64; 4],
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OddSpinCount(n) => write!(f, "spin-orbital count {n} is odd"),
            Violation::Shape {
                what,
                expected,
                got,
            } => write!(f, "{what}: expected {expected} entries, got {got}"),
            Violation::NonFinite { what, index } => write!(f, "{what}{index:?} is not finite"),
            Violation::OneBodyAsymmetry { p, q, pq, qp } => {
                write!(f, "h[{p}][{q}] = {pq:e} but h[{q}][{p}] = {qp:e}")
            }
            Violation::TwoBodyAsymmetry { index, values } => {
                let [p, q, r, s] = *index;
                write!(
                    f,
                    "g[{p}][{q}][{r}][{s}] orbit values {values:?} differ (pq,rs / qp,sr / rs,pq / sr,qp)"
                )
            }
        }
    }
}

#[inline]
fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Lists every violated invariant; an empty list means the tensors are valid.
pub fn validate(t: &MolecularTensors) -> Vec<Violation> {
    validate_with_tol(t, SYMMETRY_TOL)
}

pub fn validate_with_tol(t: &MolecularTensors, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = t.n_spin();
    if !t.h.nrows().is_multiple_of(2) {
        out.push(Violation::OddSpinCount(t.h.nrows()));
    }
    if t.h.nrows() != n || t.h.ncols() != n {
        out.push(Violation::Shape {
            what: "h",
            expected: n * n,
            got: t.h.len(),
        });
        return out;
    }
    if t.g.dim() != n {
        out.push(Violation::Shape {
            what: "g",
            expected: n.pow(4),
            got: t.g.as_slice().len(),
        });
        return out;
    }
    if !t.constant.is_finite() {
        out.push(Violation::NonFinite {
            what: "constant",
            index: vec![],
        });
    }
    for p in 0..n {
        for q in 0..n {
            if !t.h[(p, q)].is_finite() {
                out.push(Violation::NonFinite {
                    what: "h",
                    index: vec![p, q],
                });
            }
        }
    }
    for p in 0..n {
        for q in (p + 1)..n {
            let (a, b) = (t.h[(p, q)], t.h[(q, p)]);
            if a.is_finite() && b.is_finite() && !close(a, b, tol) {
                out.push(Violation::OneBodyAsymmetry { p, q, pq: a, qp: b });
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = t.g.get(p, q, r, s);
                    if !v.is_finite() {
                        out.push(Violation::NonFinite {
                            what: "g",
                            index: vec![p, q, r, s],
                        });
                        continue;
                    }
                    let orbit = [[p, q, r, s], [q, p, s, r], [r, s, p, q], [s, r, q, p]];
                    // report each orbit once, from its lexicographically smallest member
                    if orbit.iter().any(|o| *o < [p, q, r, s]) {
                        continue;
                    }
                    let values = orbit.map(|[a, b, c, d]| t.g.get(a, b, c, d));
                    if values.iter().any(|x| !x.is_finite()) {
                        continue;
                    }
                    if values.iter().any(|&x| !close(x, v, tol)) {
                        out.push(Violation::TwoBodyAsymmetry {
                            index: [p, q, r, s],
                            values,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Spatial chemist-notation integrals `(ij|kl)`, 8-fold symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialIntegrals {
    pub constant: f64,
    pub h: DMatrix<f64>,
    pub eri: Tensor4,
    pub n_electrons: Option<usize>,
}

/// Expands spatial chemist integrals into the interleaved spin-orbital tensors
/// of the `a†a a†a` form described in the module docs.
pub fn expand_to_spin_orbitals(spatial: &SpatialIntegrals) -> Result<MolecularTensors> {
    let m = spatial.h.nrows();
    if spatial.h.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: spatial.h.ncols(),
        });
    }
    if spatial.eri.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: spatial.eri.dim(),
        });
    }
    let mut problems = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if !close(spatial.h[(i, j)], spatial.h[(j, i)], SYMMETRY_TOL) {
                problems.push(format!("h_spatial[{i}][{j}] != h_spatial[{j}][{i}]"));
            }
            for k in 0..m {
                for l in 0..m {
                    let v = spatial.eri.get(i, j, k, l);
                    let partners = [
                        spatial.eri.get(j, i, k, l),
                        spatial.eri.get(i, j, l, k),
                        spatial.eri.get(k, l, i, j),
                    ];
                    if partners.iter().any(|&w| !close(v, w, SYMMETRY_TOL)) {
                        problems.push(format!("(ij|kl) 8-fold symmetry broken at {i} {j} {k} {l}"));
                    }
                }
            }
        }
    }
    if !problems.is_empty() {
        problems.truncate(16);
        return Err(Error::Validation(problems));
    }

    let n = 2 * m;
    let mut h = DMatrix::zeros(n, n);
    let mut g = Tensor4::zeros(n);
    for i in 0..m {
        for j in 0..m {
            // reordering correction −½ Σ_k (ik|kj), same-spin only
            let corr: f64 = (0..m).map(|k| spatial.eri.get(i, k, k, j)).sum();
            let v = spatial.h[(i, j)] - 0.5 * corr;
            for sigma in 0..2 {
                h[(2 * i + sigma, 2 * j + sigma)] = v;
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = 0.5 * spatial.eri.get(i, j, k, l);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            g.set(2 * i + sigma, 2 * j + sigma, 2 * k + tau, 2 * l + tau, v);
                        }
                    }
                }
            }
        }
    }
    MolecularTensors::new(m, spatial.constant, h, g, spatial.n_electrons)
}

/// Fills a tensor with values drawn by `draw`, respecting the eight-fold symmetry
/// of real orbitals.
fn symmetric_random_tensor(n: usize, mut draw: impl FnMut() -> f64) -> Tensor4 {
    let mut g = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if (p, q) < (r, s) {
                        continue;
                    }
                    let v = draw();
                    for (a, b, c, d) in [
                        (p, q, r, s),
                        (q, p, r, s),
                        (p, q, s, r),
                        (q, p, s, r),
                        (r, s, p, q),
                        (s, r, p, q),
                        (r, s, q, p),
                        (s, r, q, p),
                    ] {
                        g.set(a, b, c, d, v);
                    }
                }
            }
        }
    }
    g
}

fn symmetric_random_matrix(n: usize, mut draw: impl FnMut() -> f64) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..=p {
            let v = draw();
            h[(p, q)] = v;
            h[(q, p)] = v;
        }
    }
    h
}

/// Random spin-orbital tensors with real-orbital symmetry but no spin structure.
/// Deterministic in `seed`; entries of `h` lie in `[-1, 1)` and of `g` in `[-0.5, 0.5)`.
pub fn random_tensors(n_spatial: usize, seed: u64) -> MolecularTensors {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * n_spatial;
    let h = symmetric_random_matrix(n, || rng.random_range(-1.0..1.0));
    let g = symmetric_random_tensor(n, || rng.random_range(-0.5..0.5));
    MolecularTensors::new(n_spatial, 0.3, h, g, None).expect("symmetric by construction")
}

/// Random spatial integrals expanded to spin-orbitals, so the result has the
/// same spin structure as a molecular Hamiltonian.
pub fn random_spatial_tensors(n_spatial: usize, seed: u64) -> MolecularTensors {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let h = symmetric_random_matrix(n_spatial, || rng.random_range(-1.0..1.0));
    let eri = symmetric_random_tensor(n_spatial, || rng.random_range(-0.5..0.5));
    expand_to_spin_orbitals(&SpatialIntegrals {
        constant: 0.3,
        h,
        eri,
        n_electrons: None,
    })
    .expect("symmetric by construction")
}
