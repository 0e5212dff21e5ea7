use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::rotation::{pair_order, rotation_matrix};
use crate::error::Result;
use crate::hamiltonian::{MolecularTensors, Tensor4};
use crate::spectra::operator::{LinearOperator, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FragmentKind {
    OneElectron,
    #[serde(rename = "LR")]
    LowRank,
    #[serde(rename = "FR")]
    FullRank,
    LcuReflection,
}

/// Coefficients of the quadratic part in the fragment's own orbital frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadratic {
    /// Symmetric `λ` on `n_i n_j` (or `r_i r_j` for reflection fragments).
    Lambda(DMatrix<f64>),
    /// `λ = weight · ε εᵀ` with `weight = ±1`.
    Rank1 { epsilon: DVector<f64>, weight: f64 },
}

impl Quadratic {
    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            Quadratic::Lambda(m) => m.clone(),
            Quadratic::Rank1 { epsilon, weight } => epsilon * epsilon.transpose() * *weight,
        }
    }
}

/// One exactly solvable piece `U (Σ f_i n_i + Σ λ_ij n_i n_j) U†`, where `U` is
/// the orbital rotation generated by `angles`. Reflection fragments use
/// `r_i = 1 − 2 n_i` in place of `n_i` in the quadratic part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionFragment {
    pub kind: FragmentKind,
    pub n_modes: usize,
    pub angles: Vec<f64>,
    pub quadratic: Option<Quadratic>,
    pub onebody: Option<DVector<f64>>,
}

impl FermionFragment {
    pub fn rotation(&self) -> DMatrix<f64> {
        rotation_matrix(self.n_modes, &self.angles).expect("angle count fixed at construction")
    }

    /// `λ` as a dense matrix (zero when the fragment has no quadratic part).
    pub fn lambda(&self) -> DMatrix<f64> {
        self.quadratic.as_ref().map_or_else(
            || DMatrix::zeros(self.n_modes, self.n_modes),
            Quadratic::matrix,
        )
    }

    pub fn has_two_body(&self) -> bool {
        self.quadratic.is_some()
    }

    /// Frame coefficients rewritten in number operators: `(constant, f, λ)` with
    /// the operator equal to `constant + Σ f_i n_i + Σ λ_ij n_i n_j` in the frame.
    pub fn number_form(&self) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = self.n_modes;
        let mut f = self.onebody.clone().unwrap_or_else(|| DVector::zeros(n));
        let lam = self.lambda();
        if self.kind == FragmentKind::LcuReflection {
            // Σ c r_i r_j = Σc − 4 Σ_i (Σ_j c_ij) n_i + 4 Σ c_ij n_i n_j
            let rows = DVector::from_iterator(n, lam.row_iter().map(|r| r.sum()));
            f -= rows * 4.0;
            (lam.sum(), f, lam * 4.0)
        } else {
            (0.0, f, lam)
        }
    }

    /// `(constant, h, g)` of the fragment in the original orbital basis.
    pub fn tensors(&self) -> (f64, DMatrix<f64>, Tensor4) {
        let n = self.n_modes;
        let o = self.rotation();
        let (c, f, lam) = self.number_form();
        let h = &o * DMatrix::from_diagonal(&f) * o.transpose();
        let g = if self.has_two_body() {
            two_body_tensor(&o, &lam)
        } else {
            Tensor4::zeros(n)
        };
        (c, h, g)
    }

    /// Diagonal energies `E(b)` over all occupation strings `b` (frame basis).
    pub fn frame_energies(&self) -> Vec<f64> {
        let n = self.n_modes;
        let (c, f, lam) = self.number_form();
        let dim = 1usize << n;
        let mut out = Vec::with_capacity(dim);
        let mut occ = Vec::with_capacity(n);
        for b in 0..dim {
            occ.clear();
            occ.extend((0..n).filter(|&i| b >> i & 1 == 1));
            let mut e = c;
            for &i in &occ {
                e += f[i];
                for &j in &occ {
                    e += lam[(i, j)];
                }
            }
            out.push(e);
        }
        out
    }

    /// `(E_min, E_max)` by enumerating occupations; exact because `U` is unitary.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        self.frame_energies()
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| {
                (a.min(e), b.max(e))
            })
    }

    pub fn operator(&self) -> FragmentOp {
        FragmentOp::new(self)
    }
}

/// `g_pqrs = Σ_ij λ_ij O_pi O_qi O_rj O_sj`, built as the supermatrix `A λ Aᵀ`.
pub fn two_body_tensor(o: &DMatrix<f64>, lam: &DMatrix<f64>) -> Tensor4 {
    let a = pair_columns(o);
    let sup = &a * lam * a.transpose();
    Tensor4::from_supermatrix(o.nrows(), &sup)
}

/// `A[(p q), i] = O_pi O_qi`, an `n² × n` matrix.
pub fn pair_columns(o: &DMatrix<f64>) -> DMatrix<f64> {
    let n = o.nrows();
    DMatrix::from_fn(n * n, n, |pq, i| o[(pq / n, i)] * o[(pq % n, i)])
}

/// Matrix-free action `U D U†` on the Fock space.
#[derive(Clone, Debug)]
pub struct FragmentOp {
    n_modes: usize,
    givens: Vec<(usize, usize, f64, f64)>,
    energies: Vec<f64>,
}

impl FragmentOp {
    pub fn new(frag: &FermionFragment) -> Self {
        let givens = pair_order(frag.n_modes)
            .into_iter()
            .zip(&frag.angles)
            .filter(|(_, &t)| t != 0.0)
            .map(|((p, q), &t)| (p, q, t.cos(), t.sin()))
            .collect();
        Self {
            n_modes: frag.n_modes,
            givens,
            energies: frag.frame_energies(),
        }
    }

    /// Applies `exp(θ(a†_p a_q − a†_q a_p))` (or its inverse) in place.
    fn rotate(&self, v: &mut [C64], p: usize, q: usize, c: f64, s: f64) {
        let bp = 1usize << p;
        let bq = 1usize << q;
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let between = ((1usize << hi) - 1) & !((1usize << (lo + 1)) - 1);
        for b in 0..v.len() {
            // visit each {q occupied, p empty} state once, paired with its partner
            if b & bq == 0 || b & bp != 0 {
                continue;
            }
            let partner = b ^ bq ^ bp;
            let sign = if (b & between).count_ones().is_multiple_of(2) {
                s
            } else {
                -s
            };
            let xq = v[b];
            let xp = v[partner];
            v[b] = xq * c - xp * sign;
            v[partner] = xq * sign + xp * c;
        }
    }
}

impl LinearOperator for FragmentOp {
    fn dim(&self) -> usize {
        1 << self.n_modes
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(x);
        // U† = V(G_m)† ⋯ V(G_1)†, so V(G_1)† acts first
        for &(p, q, c, s) in &self.givens {
            self.rotate(y, p, q, c, -s);
        }
        for (v, e) in y.iter_mut().zip(&self.energies) {
            *v *= e;
        }
        for &(p, q, c, s) in self.givens.iter().rev() {
            self.rotate(y, p, q, c, s);
        }
    }
}

/// Dense Fock matrix of `(constant, h, g)` tensors through the explicit builder.
pub fn fragment_matrix_via_tensors(frag: &FermionFragment) -> Result<crate::spectra::SparseOp> {
    let (c, h, g) = frag.tensors();
    let n = frag.n_modes;
    let t = MolecularTensors {
        n_spatial: n / 2,
        n_electrons: None,
        constant: c,
        h,
        g,
    };
    crate::spectra::tensors_to_sparse(&t, 64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermionic::rotation::n_angles;

    fn sample(kind: FragmentKind) -> FermionFragment {
        let n = 4;
        let angles: Vec<f64> = (0..n_angles(n)).map(|k| 0.3 * k as f64 - 0.7).collect();
        let lam = DMatrix::from_fn(n, n, |i, j| 0.1 * (i + j) as f64 - 0.05 * (i * j) as f64);
        FermionFragment {
            kind,
            n_modes: n,
            angles,
            quadratic: Some(Quadratic::Lambda(lam)),
            onebody: Some(DVector::from_vec(vec![0.2, -0.1, 0.05, 0.3])),
        }
    }

    #[test]
    fn matrix_free_action_matches_tensor_route() {
        for kind in [FragmentKind::FullRank, FragmentKind::LcuReflection] {
            let f = sample(kind);
            let via_tensors = fragment_matrix_via_tensors(&f).unwrap().to_dense();
            let direct = f.operator().to_dense();
            assert!((via_tensors - direct).camax() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn enumeration_gives_dense_extremes() {
        let f = sample(FragmentKind::FullRank);
        let ev = crate::spectra::dense_spectrum(&f.operator().to_dense());
        let (lo, hi) = f.spectral_bounds();
        assert!((ev[0] - lo).abs() < 1e-12 && (ev[ev.len() - 1] - hi).abs() < 1e-12);
    }

    #[test]
    fn rank1_matrix() {
        let q = Quadratic::Rank1 {
            epsilon: DVector::from_vec(vec![1.0, 2.0]),
            weight: -1.0,
        };
        assert_eq!(
            q.matrix(),
            DMatrix::from_row_slice(2, 2, &[-1.0, -2.0, -2.0, -4.0])
        );
    }
}
