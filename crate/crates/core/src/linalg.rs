//! Small dense helpers shared by the decompositions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn to_faer<T: Copy>(m: &DMatrix<T>) -> faer::Mat<T> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn eigh_faer<T>(m: faer::Mat<T>) -> (Vec<f64>, DMatrix<T>)
where
    T: faer::traits::ComplexField<Real = f64> + Copy + nalgebra::Scalar,
{
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::from_fn(0, 0, |_, _| m[(0, 0)]));
    }
    let eig = m
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigendecomposition of a finite matrix");
    let vals = eig
        .S()
        .column_vector()
        .iter()
        .map(|v| faer::traits::math_utils::real(v))
        .collect();
    let u = eig.U();
    (vals, DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev = to_faer(&sym)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("symmetric eigenvalues of a finite matrix");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Symmetric eigendecomposition with eigenvalues ascending and each
/// eigenvector's first non-negligible component made positive.
pub fn eigh_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let (vals, vecs) = eigh_faer(to_faer(&sym));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let sorted = DVector::from_iterator(n, order.iter().map(|&i| vals[i]));
    let mut out = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = vecs.column(i).into_owned();
        fix_sign(col.as_mut_slice());
        out.set_column(k, &col);
    }
    (sorted, out)
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut ev = to_faer(&hermitize(m))
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("Hermitian eigenvalues of a finite matrix");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues ascending with orthonormal eigenvectors as columns.
pub fn hermitian_eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let (vals, vecs) = eigh_faer(to_faer(&hermitize(m)));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let mut out = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        out.set_column(k, &vecs.column(i));
    }
    (order.iter().map(|&i| vals[i]).collect(), out)
}

/// Flips `v` so its first component above 1e-12 in magnitude is positive.
pub fn fix_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// True when `m` over interleaved spin-orbitals is `m_spatial ⊗ I₂` to within `tol`.
pub fn is_spin_restricted(m: &DMatrix<f64>, tol: f64) -> bool {
    let n = m.nrows();
    if !n.is_multiple_of(2) {
        return false;
    }
    for p in 0..n {
        for q in 0..n {
            let v = m[(p, q)];
            if p % 2 != q % 2 {
                if v.abs() > tol {
                    return false;
                }
            } else if p % 2 == 1 && (v - m[(p - 1, q - 1)]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Like [`eigh_sorted`], but a spin-restricted matrix is diagonalized on its
/// spin-up block so every eigenvector is a pure spin-up or spin-down orbital.
pub fn eigh_spin_adapted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n < 2 || !is_spin_restricted(m, 1e-13) {
        return eigh_sorted(m);
    }
    let k = n / 2;
    let block = DMatrix::from_fn(k, k, |i, j| m[(2 * i, 2 * j)]);
    let (vals, vecs) = eigh_sorted(&block);
    let mut out_vals = DVector::zeros(n);
    let mut out_vecs = DMatrix::zeros(n, n);
    for a in 0..k {
        for sigma in 0..2 {
            let col = 2 * a + sigma;
            out_vals[col] = vals[a];
            for i in 0..k {
                out_vecs[(2 * i + sigma, col)] = vecs[(i, a)];
            }
        }
    }
    (out_vals, out_vecs)
}

/// Determinant sign of an orthogonal matrix via LU.
pub fn det_sign(o: &DMatrix<f64>) -> f64 {
    if o.determinant() < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `‖OᵀO − I‖_max`.
pub fn orthogonality_defect(o: &DMatrix<f64>) -> f64 {
    let n = o.ncols();
    let d = o.transpose() * o - DMatrix::<f64>::identity(n, n);
    d.amax()
}


#[cfg(test)]
mod hermitian_tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn eigenpairs_of_a_random_hermitian_matrix() {
        let m = random_hermitian(9, 3);
        let (vals, vecs) = hermitian_eigh(&m);
        assert_eq!(vals.len(), 9);
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            9,
            vals.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        assert!((&m * &vecs - &vecs * d).camax() < 1e-10);
        assert!((vecs.adjoint() * &vecs - DMatrix::identity(9, 9)).camax() < 1e-10);
        let only = hermitian_eigenvalues(&m);
        assert!(only.iter().zip(&vals).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn degenerate_complex_spectrum_keeps_orthonormal_vectors() {
        let u = hermitian_eigh(&random_hermitian(6, 1)).1;
        let d = DMatrix::from_diagonal(&DVector::from_vec(
            [1.0, 1.0, 1.0, -2.0, -2.0, 0.5]
                .map(|v| Complex64::new(v, 0.0))
                .to_vec(),
        ));
        let m = &u * d * u.adjoint();
        let (vals, vecs) = hermitian_eigh(&m);
        assert_eq!(vals.len(), 6);
        assert!((vecs.adjoint() * &vecs - DMatrix::identity(6, 6)).camax() < 1e-10);
        assert!((vals[0] + 2.0).abs() < 1e-12 && (vals[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purely_imaginary_commutator() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -2.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert_eq!(hermitian_eigenvalues(&m).len(), 2);
        assert!((hermitian_eigenvalues(&m)[1] - 2.0).abs() < 1e-14);
    }
}
