use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::PauliSum;
use crate::spectra::{extreme_eigenvalues, EigenConfig, LinearOperator};

/// Spectral range of one fragment, with its LCU norm when known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragmentSpectrum {
    pub e_min: f64,
    pub e_max: f64,
    pub delta_e: f64,
    pub l1_norm: Option<f64>,
}

impl FragmentSpectrum {
    pub fn new(e_min: f64, e_max: f64, l1_norm: Option<f64>) -> Self {
        Self {
            e_min,
            e_max,
            delta_e: (e_max - e_min).max(0.0),
            l1_norm,
        }
    }

    pub fn of<A: LinearOperator + ?Sized>(
        op: &A,
        cfg: &EigenConfig,
        l1_norm: Option<f64>,
    ) -> Result<Self> {
        let e = extreme_eigenvalues(op, cfg)?;
        Ok(Self::new(e.min, e.max, l1_norm))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDescriptors {
    pub beta: f64,
    pub c: f64,
    pub s_l: f64,
    pub omega: Vec<f64>,
}

/// `β = Σ_{i>j} ΔE_i ΔE_j`, `C = Σ ΔE_i`, `ω_i = ΔE_i / C`, `S_L = 1 − Σ ω_i²`.
pub fn spectral_descriptors(ranges: &[f64]) -> Result<SpectralDescriptors> {
    if ranges.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one fragment is required".into(),
        ));
    }
    if let Some(bad) = ranges.iter().find(|r| !(**r >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "spectral range {bad} is negative"
        )));
    }
    let c: f64 = ranges.iter().sum();
    let mut beta = 0.0;
    let mut partial = 0.0;
    for &r in ranges {
        beta += r * partial;
        partial += r;
    }
    let (omega, s_l) = if c > 0.0 {
        let omega: Vec<f64> = ranges.iter().map(|r| r / c).collect();
        let s = 1.0 - omega.iter().map(|w| w * w).sum::<f64>();
        (omega, s.max(0.0))
    } else {
        (Vec::new(), 0.0)
    };
    let identity = 0.5 * c * c * s_l;
    if (beta - identity).abs() > 1e-10 * c.mul_add(c, 1.0) {
        return Err(Error::Internal(format!(
            "beta {beta} differs from C²S_L/2 = {identity}"
        )));
    }
    Ok(SpectralDescriptors {
        beta,
        c,
        s_l,
        omega,
    })
}

/// `Σ |c_k|` over the non-identity terms.
pub fn l1_bound(fragment: &PauliSum) -> f64 {
    fragment.non_identity().map(|(_, c)| c.norm()).sum()
}

/// Upper estimate `C³ S_L / 2` of the second-order error coefficient.
pub fn second_order_estimate(c: f64, s_l: f64) -> f64 {
    0.5 * c.powi(3) * s_l
}
