//! Orbital rotations as ordered products of Givens rotations.
//!
//! For a pair `p > q` the rotation `G(p, q, θ)` is the identity except
//!
//! ```text
//! G[q][q] = G[p][p] = cos θ,   G[p][q] = sin θ,   G[q][p] = −sin θ
//! ```
//!
//! and it is the one-body matrix of the Fock-space unitary
//! `exp(θ (a†_p a_q − a†_q a_p))`, in the sense that conjugating `a†_i` by that
//! unitary yields `Σ_x G[x][i] a†_x`. The full rotation is
//! `O = G₁ G₂ ⋯ G_m` with pairs in descending lexicographic order
//! `(n−1, n−2), (n−1, n−3), …, (n−1, 0), (n−2, n−3), …, (1, 0)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn n_angles(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Pairs `(p, q)` with `p > q` in the fixed product order.
pub fn pair_order(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n_angles(n));
    for p in (1..n).rev() {
        for q in (0..p).rev() {
            out.push((p, q));
        }
    }
    out
}

pub fn givens(n: usize, p: usize, q: usize, theta: f64) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n, n);
    let (s, c) = theta.sin_cos();
    g[(q, q)] = c;
    g[(p, p)] = c;
    g[(p, q)] = s;
    g[(q, p)] = -s;
    g
}

fn check_len(n: usize, angles: &[f64]) -> Result<()> {
    if angles.len() != n_angles(n) {
        return Err(Error::DimensionMismatch {
            expected: n_angles(n),
            got: angles.len(),
        });
    }
    Ok(())
}

/// `O = G₁ G₂ ⋯ G_m` for the given angle vector.
pub fn rotation_matrix(n: usize, angles: &[f64]) -> Result<DMatrix<f64>> {
    check_len(n, angles)?;
    let mut m = DMatrix::<f64>::identity(n, n);
    for (&(p, q), &theta) in pair_order(n).iter().zip(angles) {
        if theta == 0.0 {
            continue;
        }
        let (s, c) = theta.sin_cos();
        for i in 0..n {
            let mq = m[(i, q)];
            let mp = m[(i, p)];
            m[(i, q)] = c * mq + s * mp;
            m[(i, p)] = -s * mq + c * mp;
        }
    }
    Ok(m)
}

/// Returns `Oᵀ h O` for the rotation generated by `angles`.
pub fn apply_orbital_rotation(angles: &[f64], h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.ncols(),
        });
    }
    let o = rotation_matrix(n, angles)?;
    Ok(o.transpose() * h * o)
}

/// Negates the last column when `det(o) < 0`, so the result lies in SO(n).
/// Fragments only depend on columns up to sign, so this never changes an operator.
pub fn to_special_orthogonal(mut o: DMatrix<f64>) -> DMatrix<f64> {
    let n = o.ncols();
    if n > 0 && o.determinant() < 0.0 {
        o.column_mut(n - 1).neg_mut();
    }
    o
}

/// Angles reproducing `o ∈ SO(n)` through [`rotation_matrix`].
///
/// Works by left-multiplying with `Gᵀ` in the product order so that each step
/// clears the entry `M[q][p]`, leaving the identity when `det o = +1`.
pub fn givens_angles(o: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = o.nrows();
    if o.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: o.ncols(),
        });
    }
    let mut m = o.clone();
    let mut angles = Vec::with_capacity(n_angles(n));
    for (p, q) in pair_order(n) {
        let a = m[(q, p)];
        let b = m[(p, p)];
        let theta = if a == 0.0 && b == 0.0 {
            0.0
        } else {
            (-a).atan2(b)
        };
        let (s, c) = theta.sin_cos();
        if theta != 0.0 {
            for j in 0..n {
                let rq = m[(q, j)];
                let rp = m[(p, j)];
                m[(q, j)] = c * rq + s * rp;
                m[(p, j)] = -s * rq + c * rp;
            }
        }
        angles.push(theta);
    }
    if n > 0 && m[(0, 0)] < 0.0 {
        return Err(Error::InvalidArgument(
            "rotation has determinant −1; use to_special_orthogonal first".into(),
        ));
    }
    Ok(angles)
}

/// Lifts spatial angles to interleaved spin-orbitals: same-spin pairs inherit
/// the spatial angle, mixed-spin pairs get zero. The resulting rotation is
/// `O_spatial ⊗ I₂`.
pub fn spin_orbital_angles(n_spatial: usize, spatial: &[f64]) -> Result<Vec<f64>> {
    check_len(n_spatial, spatial)?;
    let n = 2 * n_spatial;
    let spatial_index: std::collections::HashMap<(usize, usize), usize> = pair_order(n_spatial)
        .into_iter()
        .enumerate()
        .map(|(k, pq)| (pq, k))
        .collect();
    Ok(pair_order(n)
        .into_iter()
        .map(|(p, q)| {
            if p % 2 == q % 2 {
                spatial[spatial_index[&(p / 2, q / 2)]]
            } else {
                0.0
            }
        })
        .collect())
}

/// Angles for an orthogonal matrix, after fixing its determinant. A matrix of
/// the form `O_spatial ⊗ I₂` is decomposed on its spatial block so that no
/// mixed-spin rotation appears.
pub fn orbital_angles(o: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = o.nrows();
    if n >= 2 && crate::linalg::is_spin_restricted(o, 1e-13) {
        let k = n / 2;
        let spatial = DMatrix::from_fn(k, k, |i, j| o[(2 * i, 2 * j)]);
        let spatial = to_special_orthogonal(spatial);
        return spin_orbital_angles(k, &givens_angles(&spatial)?);
    }
    givens_angles(&to_special_orthogonal(o.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh_sorted, orthogonality_defect};
    use proptest::prelude::*;

    #[test]
    fn zero_angles_leave_h_unchanged() {
        let h = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 2.0, 0.3, 0.0, 0.3, -1.0]);
        assert_eq!(apply_orbital_rotation(&[0.0; 3], &h).unwrap(), h);
    }

    #[test]
    fn quarter_turn_on_two_orbitals() {
        let o = rotation_matrix(2, &[std::f64::consts::FRAC_PI_2]).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((o - expected).amax() < 1e-15);
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 3.0]);
        let r = apply_orbital_rotation(&[std::f64::consts::FRAC_PI_2], &h).unwrap();
        let swapped = DMatrix::from_row_slice(2, 2, &[3.0, -0.5, -0.5, 1.0]);
        assert!((r - swapped).amax() < 1e-14);
    }

    #[test]
    fn wrong_length_is_rejected() {
        assert!(rotation_matrix(3, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn pair_order_is_descending() {
        assert_eq!(pair_order(3), vec![(2, 1), (2, 0), (1, 0)]);
    }

    #[test]
    fn product_matches_explicit_givens() {
        let angles = [0.3, -0.7, 1.1];
        let mut expected = DMatrix::identity(3, 3);
        for (&(p, q), &t) in pair_order(3).iter().zip(&angles) {
            expected *= givens(3, p, q, t);
        }
        assert!((rotation_matrix(3, &angles).unwrap() - expected).amax() < 1e-15);
    }

    #[test]
    fn spin_lift_is_kronecker() {
        let spatial = [0.4, -0.2, 0.9];
        let o_sp = rotation_matrix(3, &spatial).unwrap();
        let lifted = rotation_matrix(6, &spin_orbital_angles(3, &spatial).unwrap()).unwrap();
        let kron = o_sp.kronecker(&DMatrix::<f64>::identity(2, 2));
        assert!((lifted - kron).amax() < 1e-14);
    }

    proptest! {
        #[test]
        fn rotation_is_orthogonal_and_preserves_spectrum(
            angles in prop::collection::vec(-3.2f64..3.2, 10),
            diag in prop::collection::vec(-2.0f64..2.0, 5),
            off in -1.0f64..1.0,
        ) {
            let o = rotation_matrix(5, &angles).unwrap();
            prop_assert!(orthogonality_defect(&o) <= 1e-12);
            let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
            h[(0, 3)] = off;
            h[(3, 0)] = off;
            let r = apply_orbital_rotation(&angles, &h).unwrap();
            let (a, _) = eigh_sorted(&h);
            let (b, _) = eigh_sorted(&r);
            prop_assert!((a - b).amax() < 1e-12);
        }

        #[test]
        fn givens_angles_round_trip(angles in prop::collection::vec(-3.0f64..3.0, 10)) {
            let o = rotation_matrix(5, &angles).unwrap();
            let back = rotation_matrix(5, &givens_angles(&o).unwrap()).unwrap();
            prop_assert!((o - back).amax() < 1e-12);
        }
    }
}
