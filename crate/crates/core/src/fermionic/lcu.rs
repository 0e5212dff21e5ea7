//! Rewriting two-body fragments in reflections `r_i = 1 − 2 n_i`.
//!
//! `Σ λ_ij n_i n_j = ¼ Σ λ_ij r_i r_j + Σ_i (Σ_j λ_ij) n_i − ¼ Σ λ_ij`, so each
//! fragment keeps its rotation and a quarter of its coefficients, while the
//! induced one-body and scalar parts move to the one-electron fragment and
//! the constant.

use nalgebra::DMatrix;

use super::fragment::{FermionFragment, FragmentKind, Quadratic};
use super::lr::one_electron_fragment;
use super::{residual_l1, FermionPartition};
use crate::error::Result;

pub fn lcu_postprocess(p: &FermionPartition) -> Result<FermionPartition> {
    if !p
        .fragments
        .iter()
        .any(|f| f.has_two_body() && f.kind != FragmentKind::LcuReflection)
    {
        return Ok(p.clone());
    }
    let n = p.n_modes();
    let mut constant = p.constant;
    let mut onebody = DMatrix::<f64>::zeros(n, n);
    let mut reflections = Vec::with_capacity(p.fragments.len());
    for frag in &p.fragments {
        if !frag.has_two_body() || frag.kind == FragmentKind::LcuReflection {
            if frag.kind == FragmentKind::OneElectron {
                let (c, h, _) = frag.tensors();
                constant += c;
                onebody += h;
            } else {
                reflections.push(frag.clone());
            }
            continue;
        }
        let (c, f, lam) = frag.number_form();
        let rows = nalgebra::DVector::from_iterator(n, lam.row_iter().map(|r| r.sum()));
        let o = frag.rotation();
        onebody += &o * DMatrix::from_diagonal(&(f + rows)) * o.transpose();
        constant += c - 0.25 * lam.sum();
        reflections.push(FermionFragment {
            kind: FragmentKind::LcuReflection,
            n_modes: n,
            angles: frag.angles.clone(),
            quadratic: Some(Quadratic::Lambda(lam * 0.25)),
            onebody: None,
        });
    }
    let mut fragments = Vec::with_capacity(reflections.len() + 1);
    if onebody.iter().any(|&v| v != 0.0) {
        fragments.push(one_electron_fragment(&onebody)?);
    }
    fragments.extend(reflections);
    let mut out = FermionPartition {
        method: format!("{}-lcu", p.method),
        constant,
        fragments,
        ..p.clone()
    };
    if let Some(src) = &p.source {
        out.residual_l1 = residual_l1(src, &out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermionic::{lr_decompose, reconstruct};
    use crate::hamiltonian::random_spatial_tensors;
    use crate::spectra::{tensors_to_sparse, LinearOperator};

    #[test]
    fn operator_is_unchanged() {
        let t = random_spatial_tensors(2, 4);
        let p = lr_decompose(&t, 0.0).unwrap();
        let q = lcu_postprocess(&p).unwrap();
        assert_eq!(q.method, "lr-lcu");
        let a = tensors_to_sparse(&reconstruct(&p), 16).unwrap().to_dense();
        let b = tensors_to_sparse(&reconstruct(&q), 16).unwrap().to_dense();
        assert!((a - b).camax() < 1e-10);
        assert!((q.residual_l1 - p.residual_l1).abs() < 1e-9);
    }

    #[test]
    fn coefficients_are_quartered() {
        let t = random_spatial_tensors(2, 8);
        let p = lr_decompose(&t, 0.0).unwrap();
        let q = lcu_postprocess(&p).unwrap();
        let before: Vec<_> = p.fragments.iter().filter(|f| f.has_two_body()).collect();
        let after: Vec<_> = q.fragments.iter().filter(|f| f.has_two_body()).collect();
        assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            assert_eq!(b.kind, FragmentKind::LcuReflection);
            assert_eq!(a.angles, b.angles);
            assert!((a.lambda() * 0.25 - b.lambda()).amax() == 0.0);
        }
    }

    #[test]
    fn one_body_only_partition_is_unchanged() {
        let mut t = random_spatial_tensors(2, 1);
        t.g = crate::hamiltonian::Tensor4::zeros(4);
        let p = lr_decompose(&t, 0.0).unwrap();
        assert_eq!(lcu_postprocess(&p).unwrap(), p);
    }
}
