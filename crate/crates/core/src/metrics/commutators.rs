//! Sums of commutator norms over fragment pairs.
//!
//! Pairs are independent jobs. Each job first asks a caller-supplied
//! predicate whether the pair is known to commute exactly and is skipped if
//! so. Jobs are dispatched on the rayon pool and reduced in index order, so
//! the totals do not depend on scheduling. A deadline, when set, is checked
//! before each job starts; jobs that would start after it are left out and
//! the sum is marked incomplete.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::spectra::{
    commutator_norm, project, EigenConfig, LinearOperator, Projection, SumOp, SymmetrySector,
};

#[derive(Clone, Debug, Default)]
pub struct MetricOptions {
    pub eigen: EigenConfig,
    pub deadline: Option<Instant>,
}

impl MetricOptions {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// A sum over commutator jobs with bookkeeping.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairSum {
    pub value: f64,
    pub evaluated: usize,
    pub pruned: usize,
    /// Jobs not run because the deadline had passed.
    pub skipped: usize,
}

impl PairSum {
    pub fn complete(&self) -> bool {
        self.skipped == 0
    }
}

enum Outcome {
    Value(f64),
    Pruned,
    Skipped,
}

fn run_jobs<J>(
    jobs: Vec<J>,
    opts: &MetricOptions,
    job: impl Fn(&J) -> Result<Option<f64>> + Sync,
) -> Result<PairSum>
where
    J: Send + Sync,
{
    let outcomes: Vec<Result<Outcome>> = jobs
        .par_iter()
        .map(|j| {
            if opts.expired() {
                return Ok(Outcome::Skipped);
            }
            Ok(match job(j)? {
                Some(v) => Outcome::Value(v),
                None => Outcome::Pruned,
            })
        })
        .collect();
    let mut sum = PairSum::default();
    for o in outcomes {
        match o? {
            Outcome::Value(v) => {
                sum.value += v;
                sum.evaluated += 1;
            }
            Outcome::Pruned => sum.pruned += 1,
            Outcome::Skipped => sum.skipped += 1,
        }
    }
    Ok(sum)
}

fn common_dim<A: LinearOperator>(ops: &[A]) -> Result<usize> {
    let Some(first) = ops.first() else {
        return Err(Error::InvalidArgument(
            "at least one fragment is required".into(),
        ));
    };
    let d = first.dim();
    if let Some(bad) = ops.iter().find(|o| o.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.dim(),
        });
    }
    Ok(d)
}

/// `Σ_{n≠m} ‖[H_n, H_m]‖`, twice the sum over unordered pairs.
pub fn alpha<A>(ops: &[A], opts: &MetricOptions) -> Result<PairSum>
where
    A: LinearOperator + Sync,
{
    alpha_pruned(ops, opts, |_, _| false)
}

/// [`alpha`] with pairs for which `commute(i, j)` holds counted as zero.
pub fn alpha_pruned<A, F>(ops: &[A], opts: &MetricOptions, commute: F) -> Result<PairSum>
where
    A: LinearOperator + Sync,
    F: Fn(usize, usize) -> bool + Sync,
{
    common_dim(ops)?;
    let n = ops.len();
    let jobs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut sum = run_jobs(jobs, opts, |&(i, j)| {
        if commute(i, j) {
            return Ok(None);
        }
        commutator_norm(&ops[i], &ops[j], &opts.eigen).map(Some)
    })?;
    sum.value *= 2.0;
    Ok(sum)
}

/// `Σ_n ‖[H_n, Σ_{m<n} H_m]‖` in the given order.
pub fn alpha_ordered<A, F>(ops: &[A], opts: &MetricOptions, commute: F) -> Result<PairSum>
where
    A: LinearOperator + Sync,
    F: Fn(usize, usize) -> bool + Sync,
{
    alpha_ordered_with(ops, opts, commute, |n| Ok(SumOp(ops[..n].iter().collect())))
}

/// [`alpha_ordered`] with a caller-built operator for each prefix sum `Σ_{m<n} H_m`.
pub fn alpha_ordered_with<A, F, P, B>(
    ops: &[A],
    opts: &MetricOptions,
    commute: F,
    prefix: P,
) -> Result<PairSum>
where
    A: LinearOperator + Sync,
    F: Fn(usize, usize) -> bool + Sync,
    P: Fn(usize) -> Result<B> + Sync,
    B: LinearOperator,
{
    common_dim(ops)?;
    let jobs: Vec<usize> = (1..ops.len()).collect();
    run_jobs(jobs, opts, |&n| {
        if (0..n).all(|m| commute(m, n)) {
            return Ok(None);
        }
        let p = prefix(n)?;
        if p.dim() != ops[n].dim() {
            return Err(Error::DimensionMismatch {
                expected: ops[n].dim(),
                got: p.dim(),
            });
        }
        commutator_norm(&ops[n], p, &opts.eigen).map(Some)
    })
}

/// Sector projections of every fragment, computed in parallel.
pub fn project_all<A>(ops: &[A], sector: &SymmetrySector) -> Result<Vec<Projection>>
where
    A: LinearOperator + Sync,
{
    if sector.dim() == 0 {
        return Err(Error::EmptySector(format!("{:?}", sector.labels)));
    }
    ops.par_iter().map(|o| project(o, sector)).collect()
}

/// `‖[A, B]‖` for dense Hermitian matrices, via the eigenvalues of `i[A, B]`.
pub fn dense_commutator_norm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let ev = hermitian_eigenvalues(&((a * b - b * a) * C64::i()));
    ev[0].abs().max(ev[ev.len() - 1].abs())
}

/// `α` restricted to a sector, from already projected fragments.
pub fn alpha_projected<F>(
    projected: &[Projection],
    opts: &MetricOptions,
    commute: F,
) -> Result<PairSum>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    let mats: Vec<_> = projected.iter().map(|p| &p.matrix.0).collect();
    if let Some(first) = mats.first() {
        if let Some(bad) = mats.iter().find(|m| m.nrows() != first.nrows()) {
            return Err(Error::DimensionMismatch {
                expected: first.nrows(),
                got: bad.nrows(),
            });
        }
    } else {
        return Err(Error::InvalidArgument(
            "at least one fragment is required".into(),
        ));
    }
    let n = mats.len();
    let jobs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut sum = run_jobs(jobs, opts, |&(i, j)| {
        if commute(i, j) {
            return Ok(None);
        }
        Ok(Some(dense_commutator_norm(mats[i], mats[j])))
    })?;
    sum.value *= 2.0;
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{PauliString, PauliSum, C64};
    use crate::spectra::{DenseOp, PauliOp};

    fn op(n: usize, items: &[(&str, f64)]) -> PauliOp {
        let s = PauliSum::from_terms(
            n,
            items
                .iter()
                .map(|(l, c)| (PauliString::parse(l).unwrap(), C64::new(*c, 0.0))),
        );
        PauliOp::new(&s, 10).unwrap()
    }

    #[test]
    fn x_and_z() {
        let ops = [op(1, &[("X", 1.0)]), op(1, &[("Z", 1.0)])];
        let o = MetricOptions::default();
        let a = alpha(&ops, &o).unwrap();
        assert!((a.value - 4.0).abs() < 1e-10);
        assert_eq!(a.evaluated, 1);
        let ab = alpha_ordered(&ops, &o, |_, _| false).unwrap();
        assert!((ab.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn commuting_and_single() {
        let o = MetricOptions::default();
        let ops = [op(2, &[("ZI", 1.0)]), op(2, &[("IZ", 0.3), ("ZZ", 1.0)])];
        assert!(alpha(&ops, &o).unwrap().value.abs() < 1e-12);
        assert_eq!(alpha(&ops[..1], &o).unwrap().value, 0.0);
        let pruned = alpha_pruned(&ops, &o, |_, _| true).unwrap();
        assert_eq!((pruned.pruned, pruned.evaluated), (1, 0));
    }

    #[test]
    fn mismatch_and_empty() {
        let o = MetricOptions::default();
        let ops = [op(1, &[("X", 1.0)]), op(2, &[("ZZ", 1.0)])];
        assert!(matches!(
            alpha(&ops, &o),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(alpha::<PauliOp>(&[], &o).is_err());
    }

    #[test]
    fn full_sector_matches_alpha() {
        let o = MetricOptions::default();
        let ops = [
            op(2, &[("XI", 0.7), ("ZZ", 0.2)]),
            op(2, &[("ZI", 1.0), ("YX", -0.4)]),
        ];
        let full = alpha(&ops, &o).unwrap().value;
        let proj = project_all(&ops, &SymmetrySector::full(2)).unwrap();
        let q = alpha_projected(&proj, &o, |_, _| false).unwrap().value;
        assert!((full - q).abs() < 1e-9);
    }

    #[test]
    fn expired_deadline_skips_everything() {
        let o = MetricOptions {
            deadline: Some(Instant::now()),
            ..Default::default()
        };
        let ops = vec![DenseOp::from_real(&nalgebra::DMatrix::identity(2, 2)); 3];
        let s = alpha(&ops, &o).unwrap();
        assert_eq!(s.skipped, 3);
        assert!(!s.complete());
    }
}
