use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::pauli::{i_pow, PauliString, PauliSum};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Matrix-free square operator on `C^dim`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// Overwrites `y` with `A x`.
    fn apply(&self, x: &[C64], y: &mut [C64]);

    /// Materializes the operator by applying it to every basis vector.
    fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![ZERO; n];
        let mut col = vec![ZERO; n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = ZERO;
        }
        m
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply(x, y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply(x, y)
    }
}

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOp(pub DMatrix<C64>);

impl DenseOp {
    pub fn from_real(m: &DMatrix<f64>) -> Self {
        DenseOp(m.map(|v| C64::new(v, 0.0)))
    }
}

impl LinearOperator for DenseOp {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = self.0.nrows();
        y.iter_mut().for_each(|v| *v = ZERO);
        // column-major storage: accumulate column by column
        for j in 0..n {
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            let col = self.0.column(j);
            for (yi, a) in y.iter_mut().zip(col.iter()) {
                *yi += a * xj;
            }
        }
    }
    fn to_dense(&self) -> DMatrix<C64> {
        self.0.clone()
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOp {
    /// Sums duplicate `(row, col)` entries and drops exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let mut keep_r = Vec::with_capacity(rows.len());
        let mut keep_c = Vec::with_capacity(rows.len());
        let mut keep_v = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                keep_r.push(r);
                keep_c.push(c);
                keep_v.push(v);
            }
        }
        for &r in &keep_r {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            cols: keep_c,
            vals: keep_v,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => ZERO,
        }
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                let d = (self.vals[k] - self.get(c, r).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }
}

impl LinearOperator for SparseOp {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr = acc;
        }
    }
}

/// Default cap on qubit count for explicit matrices.
pub const DEFAULT_MAX_QUBITS: usize = 16;

fn check_cap(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits > cap {
        return Err(Error::ResourceLimit {
            what: "qubit count for an explicit matrix",
            got: n_qubits,
            cap,
        });
    }
    Ok(())
}

/// Exact matrix of a Pauli sum, identity coefficient included.
pub fn to_sparse(h: &PauliSum, max_qubits: usize) -> Result<SparseOp> {
    check_cap(h.n_qubits, max_qubits)?;
    let dim = 1usize << h.n_qubits;
    let mut trip = Vec::with_capacity(dim * h.len());
    for (p, c) in h.iter() {
        let base = *c * i_pow((p.x & p.z).count_ones() as i64);
        for b in 0..dim as u64 {
            let v = if (p.z & b).count_ones() % 2 == 0 {
                base
            } else {
                -base
            };
            trip.push(((b ^ p.x) as usize, b as usize, v));
        }
    }
    Ok(SparseOp::from_triplets(dim, trip))
}

/// Matrix-free Pauli sum, terms bucketed by their X pattern so each bucket
/// acts as a diagonal followed by a bit-flip permutation.
#[derive(Clone, Debug)]
pub struct PauliOp {
    n_qubits: usize,
    buckets: Vec<Bucket>,
}

#[derive(Clone, Debug)]
struct Bucket {
    x: u64,
    // (z, coefficient including the i^{|x∧z|} factor)
    terms: Vec<(u64, C64)>,
    // precomputed Σ_z c_z (−1)^{|z∧b|} when memory allows
    diag: Option<Vec<C64>>,
}

/// Entries of precomputed bucket diagonals kept per operator.
const PAULI_DIAG_BUDGET: usize = 1 << 22;

impl PauliOp {
    pub fn new(h: &PauliSum, max_qubits: usize) -> Result<Self> {
        check_cap(h.n_qubits, max_qubits)?;
        let dim = 1usize << h.n_qubits;
        let mut by_x: BTreeMap<u64, Vec<(u64, C64)>> = BTreeMap::new();
        for (p, c) in h.iter() {
            by_x.entry(p.x)
                .or_default()
                .push((p.z, *c * i_pow((p.x & p.z).count_ones() as i64)));
        }
        let precompute = by_x.len() * dim <= PAULI_DIAG_BUDGET;
        let buckets = by_x
            .into_iter()
            .map(|(x, terms)| {
                let diag = precompute.then(|| {
                    (0..dim as u64)
                        .map(|b| bucket_value(&terms, b))
                        .collect::<Vec<_>>()
                });
                Bucket { x, terms, diag }
            })
            .collect();
        Ok(Self {
            n_qubits: h.n_qubits,
            buckets,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
}

#[inline]
fn bucket_value(terms: &[(u64, C64)], b: u64) -> C64 {
    let mut acc = ZERO;
    for &(z, c) in terms {
        if (z & b).count_ones().is_multiple_of(2) {
            acc += c;
        } else {
            acc -= c;
        }
    }
    acc
}

impl LinearOperator for PauliOp {
    fn dim(&self) -> usize {
        1 << self.n_qubits
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        for bk in &self.buckets {
            let flip = bk.x as usize;
            match &bk.diag {
                Some(d) => {
                    for (b, (&xb, &db)) in x.iter().zip(d).enumerate() {
                        y[b ^ flip] += db * xb;
                    }
                }
                None => {
                    for (b, &xb) in x.iter().enumerate() {
                        y[b ^ flip] += bucket_value(&bk.terms, b as u64) * xb;
                    }
                }
            }
        }
    }
}

/// `i (A B − B A)`, Hermitian whenever `A` and `B` are.
pub struct Commutator<A, B> {
    pub a: A,
    pub b: B,
}

impl<A: LinearOperator, B: LinearOperator> LinearOperator for Commutator<A, B> {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let n = x.len();
        let mut t = vec![ZERO; n];
        let mut u = vec![ZERO; n];
        self.b.apply(x, &mut t);
        self.a.apply(&t, &mut u);
        self.a.apply(x, &mut t);
        self.b.apply(&t, y);
        let i = C64::new(0.0, 1.0);
        for (yk, uk) in y.iter_mut().zip(&u) {
            *yk = i * (uk - *yk);
        }
    }
}

/// Sum of operators.
pub struct SumOp<T>(pub Vec<T>);

impl<T: LinearOperator> LinearOperator for SumOp<T> {
    fn dim(&self) -> usize {
        self.0.first().map_or(0, |o| o.dim())
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        let mut t = vec![ZERO; x.len()];
        for op in &self.0 {
            op.apply(x, &mut t);
            for (a, b) in y.iter_mut().zip(&t) {
                *a += b;
            }
        }
    }
}

/// `A + c·I`.
pub struct Shifted<A> {
    pub op: A,
    pub shift: f64,
}

impl<A: LinearOperator> LinearOperator for Shifted<A> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.op.apply(x, y);
        for (a, b) in y.iter_mut().zip(x) {
            *a += b * self.shift;
        }
    }
}

/// Real diagonal operator.
#[derive(Clone, Debug)]
pub struct DiagonalOp(pub Vec<f64>);

impl LinearOperator for DiagonalOp {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for ((a, b), d) in y.iter_mut().zip(x).zip(&self.0) {
            *a = b * d;
        }
    }
}

/// Identity helper for Pauli-string lookups in tests and symmetry code.
pub fn pauli_matrix(p: PauliString, n_qubits: usize) -> DMatrix<C64> {
    let sum = PauliSum::from_terms(n_qubits, [(p, C64::new(1.0, 0.0))]);
    to_sparse(&sum, 64).expect("within cap").to_dense()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(text: &str) -> PauliSum {
        PauliSum::from_text(text).unwrap()
    }

    #[test]
    fn z_on_one_qubit() {
        let m = to_sparse(&sum("1 Z"), 16).unwrap().to_dense();
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(-1.0, 0.0));
    }

    #[test]
    fn hopping_matrix() {
        let m = to_sparse(&sum("0.5 XX\n0.5 YY"), 16).unwrap().to_dense();
        // basis index: bit k is qubit k; |01⟩ ↔ 1, |10⟩ ↔ 2
        assert!((m[(1, 2)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(2, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(m[(0, 3)].norm() < 1e-15 && m[(3, 0)].norm() < 1e-15);
    }

    #[test]
    fn y_matrix_phase() {
        let m = to_sparse(&sum("1 Y"), 16).unwrap().to_dense();
        assert_eq!(m[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], C64::new(0.0, 1.0));
    }

    #[test]
    fn cap_is_enforced() {
        let s = PauliSum::identity(17, 1.0);
        assert!(matches!(
            to_sparse(&s, 16),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn matrix_free_matches_sparse() {
        let s = sum("0.3 XYZ\n-0.2 ZZI\n0.7 III\n0.1 YIX\n0.25 XYI");
        let a = to_sparse(&s, 16).unwrap().to_dense();
        let b = PauliOp::new(&s, 16).unwrap().to_dense();
        assert!((a - b).camax() < 1e-14);
    }
}
