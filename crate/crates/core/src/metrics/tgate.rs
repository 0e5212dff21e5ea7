//! T-gate cost of Trotterized phase estimation.
//!
//! With Trotter error budget `ε_T`, phase-estimation budget `ε_PE` and
//! synthesis budget `ε_HT = ε − ε_T − ε_PE`, the cost model is
//!
//! `N_T = 0.76 π α N_R / (ε_T (ε − ε_T)) · [1.15 log₂(N_R α / (ε_HT ε_T)) + 9.2]`.
//!
//! The split is chosen by a log-spaced grid followed by coordinate-wise
//! golden-section refinement in log space around the best grid point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GRID: usize = 128;
/// Smallest budget share explored, relative to `ε`.
const MIN_SHARE: f64 = 1e-6;
const REFINE_ROUNDS: usize = 8;
const GOLDEN_STEPS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSplit {
    pub eps_t: f64,
    pub eps_pe: f64,
    pub eps_ht: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TgateEstimate {
    pub n_t: f64,
    pub split: ErrorSplit,
}

/// The cost model at a given split; `None` where it is undefined or non-positive.
pub fn tgate_cost(alpha: f64, n_rot: f64, epsilon: f64, eps_t: f64, eps_pe: f64) -> Option<f64> {
    let eps_ht = epsilon - eps_t - eps_pe;
    if eps_t <= 0.0 || eps_pe <= 0.0 || eps_ht <= 0.0 {
        return None;
    }
    let prefactor = 0.76 * std::f64::consts::PI * alpha * n_rot / (eps_t * (epsilon - eps_t));
    let synthesis = 1.15 * (n_rot * alpha / (eps_ht * eps_t)).log2() + 9.2;
    let n = prefactor * synthesis;
    (n.is_finite() && n > 0.0).then_some(n)
}

fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..k)
        .map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// Minimizes `f` over `[lo, hi]` in log coordinates; infeasible points count as `+∞`.
fn golden(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    for _ in 0..GOLDEN_STEPS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d.exp());
        }
    }
    let mut best = (a.exp(), f(a.exp()));
    for x in [b.exp(), c.exp(), d.exp()] {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Cheapest error split and its T-gate count.
pub fn tgate_count(alpha: f64, n_rot: usize, epsilon: f64) -> Result<TgateEstimate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if n_rot == 0 {
        return Err(Error::InvalidArgument(
            "at least one rotation is required".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let nr = n_rot as f64;
    let cost = |t: f64, p: f64| tgate_cost(alpha, nr, epsilon, t, p).unwrap_or(f64::INFINITY);
    let grid = log_grid(MIN_SHARE * epsilon, epsilon, GRID);
    let mut best = (f64::INFINITY, 0, 0);
    for (i, &t) in grid.iter().enumerate() {
        for (j, &p) in grid.iter().enumerate() {
            let v = cost(t, p);
            if v < best.0 {
                best = (v, i, j);
            }
        }
    }
    let (mut value, bi, bj) = best;
    if !value.is_finite() {
        return Err(Error::InfeasibleSplit(format!(
            "no split of epsilon = {epsilon} gives a positive cost for alpha = {alpha}, N_R = {n_rot}"
        )));
    }
    let bracket = |k: usize| (grid[k.saturating_sub(1)], grid[(k + 1).min(GRID - 1)]);
    let (t_range, p_range) = (bracket(bi), bracket(bj));
    let (mut t, mut p) = (grid[bi], grid[bj]);
    for _ in 0..REFINE_ROUNDS {
        let (nt, vt) = golden(t_range.0, t_range.1, |x| cost(x, p));
        if vt < value {
            t = nt;
            value = vt;
        }
        let (np, vp) = golden(p_range.0, p_range.1, |x| cost(t, x));
        if vp < value {
            p = np;
            value = vp;
        }
    }
    Ok(TgateEstimate {
        n_t: value,
        split: ErrorSplit {
            eps_t: t,
            eps_pe: p,
            eps_ht: epsilon - t - p,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_feasible_and_refined() {
        let e = tgate_count(0.05, 14, 1e-3).unwrap();
        let s = e.split;
        assert!(s.eps_t > 0.0 && s.eps_pe > 0.0 && s.eps_ht > 0.0);
        assert!((s.eps_t + s.eps_pe + s.eps_ht - 1e-3).abs() < 1e-15);
        assert_eq!(tgate_cost(0.05, 14.0, 1e-3, s.eps_t, s.eps_pe), Some(e.n_t));
        let grid = log_grid(1e-9, 1e-3, GRID);
        for &t in &grid {
            for &p in &grid {
                if let Some(v) = tgate_cost(0.05, 14.0, 1e-3, t, p) {
                    assert!(e.n_t <= v);
                }
            }
        }
    }

    #[test]
    fn doubling_alpha_or_rotations_costs_more() {
        let base = tgate_count(0.1, 20, 1e-3).unwrap().n_t;
        assert!(tgate_count(0.2, 20, 1e-3).unwrap().n_t > base);
        assert!(tgate_count(0.1, 40, 1e-3).unwrap().n_t > base);
    }

    #[test]
    fn bad_inputs() {
        assert!(tgate_count(0.0, 10, 1e-3).is_err());
        assert!(tgate_count(1.0, 0, 1e-3).is_err());
        assert!(tgate_count(1.0, 10, -1.0).is_err());
    }

    #[test]
    fn tiny_alpha_is_infeasible() {
        assert!(matches!(
            tgate_count(1e-300, 1, 1.0),
            Err(Error::InfeasibleSplit(_))
        ));
    }
}
