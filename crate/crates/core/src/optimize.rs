//! Dense BFGS with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when `‖∇f‖_∞ ≤ gtol`.
    pub gtol: f64,
    /// Stop when the relative decrease of `f` stays below `ftol` for `patience` iterations.
    pub ftol: f64,
    pub patience: usize,
    pub c1: f64,
    pub c2: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            gtol: 1e-12,
            ftol: 1e-14,
            patience: 5,
            c1: 1e-4,
            c2: 0.9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Gradient,
    Stalled,
    /// The caller's early-exit predicate fired.
    Target,
    MaxIter,
    LineSearch,
}

#[derive(Clone, Debug)]
pub struct BfgsResult {
    pub x: DVector<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

impl BfgsResult {
    pub fn converged(&self) -> bool {
        matches!(
            self.termination,
            Termination::Gradient | Termination::Stalled | Termination::Target
        )
    }
}

struct Probe {
    alpha: f64,
    f: f64,
    d: f64,
    x: DVector<f64>,
    g: DVector<f64>,
}

/// Minimizes `f`, where `fg(x)` returns the value and gradient. `done(x, f)` may
/// end the run early once an external criterion is met.
pub fn minimize<F, D>(mut fg: F, x0: DVector<f64>, opts: &BfgsOptions, mut done: D) -> BfgsResult
where
    F: FnMut(&DVector<f64>) -> (f64, DVector<f64>),
    D: FnMut(&DVector<f64>, f64) -> bool,
{
    let n = x0.len();
    let mut x = x0;
    let (mut f, mut g) = fg(&x);
    let mut evals = 1;
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut first = true;
    let mut quiet = 0;
    let mut termination = Termination::MaxIter;
    let mut iter = 0;

    while iter < opts.max_iter {
        if done(&x, f) {
            termination = Termination::Target;
            break;
        }
        if g.amax() <= opts.gtol {
            termination = Termination::Gradient;
            break;
        }
        let mut p = -(&hinv * &g);
        let mut d0 = p.dot(&g);
        if d0 >= 0.0 {
            hinv = DMatrix::identity(n, n);
            p = -g.clone();
            d0 = p.dot(&g);
            first = true;
        }
        let alpha0 = if first {
            (1.0 / g.amax()).min(1.0)
        } else {
            1.0
        };
        let Some(probe) = line_search(&mut fg, &x, f, &p, d0, alpha0, opts, &mut evals) else {
            if first {
                termination = Termination::LineSearch;
                break;
            }
            hinv = DMatrix::identity(n, n);
            first = true;
            iter += 1;
            continue;
        };
        let s = &probe.x - &x;
        let y = &probe.g - &g;
        let sy = s.dot(&y);
        let rel = (f - probe.f) / f.abs().max(1e-300);
        x = probe.x;
        g = probe.g;
        let f_prev = f;
        f = probe.f;
        if sy > 1e-300 {
            if first {
                let yy = y.dot(&y);
                hinv *= sy / yy;
            }
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            hinv.ger(-rho, &hy, &s, 1.0);
            hinv.ger(-rho, &s, &hy, 1.0);
            hinv.ger(rho * rho * yhy + rho, &s, &s, 1.0);
            first = false;
        }
        iter += 1;
        if rel < opts.ftol || f_prev - f <= 0.0 {
            quiet += 1;
            if quiet >= opts.patience {
                termination = Termination::Stalled;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if termination == Termination::MaxIter && done(&x, f) {
        termination = Termination::Target;
    }
    BfgsResult {
        x,
        f,
        iterations: iter,
        evaluations: evals,
        termination,
    }
}

#[allow(clippy::too_many_arguments)]
fn line_search<F>(
    fg: &mut F,
    x: &DVector<f64>,
    f0: f64,
    p: &DVector<f64>,
    d0: f64,
    alpha0: f64,
    opts: &BfgsOptions,
    evals: &mut usize,
) -> Option<Probe>
where
    F: FnMut(&DVector<f64>) -> (f64, DVector<f64>),
{
    let mut eval = |alpha: f64, evals: &mut usize| {
        let xa = x + p * alpha;
        let (fa, ga) = fg(&xa);
        *evals += 1;
        let d = ga.dot(p);
        Probe {
            alpha,
            f: fa,
            d,
            x: xa,
            g: ga,
        }
    };
    let mut prev = Probe {
        alpha: 0.0,
        f: f0,
        d: d0,
        x: x.clone(),
        g: DVector::zeros(0),
    };
    let mut alpha = alpha0;
    for i in 0..40 {
        let cur = eval(alpha, evals);
        if !cur.f.is_finite() {
            alpha *= 0.5;
            continue;
        }
        if flat_enough(&cur, f0, d0, opts) {
            return Some(cur);
        }
        if below_noise(cur.f, f0) {
            if cur.d >= 0.0 {
                return zoom(&mut eval, f0, d0, prev, cur, opts, evals);
            }
            alpha *= 2.0;
            prev = cur;
            continue;
        }
        if cur.f > f0 + opts.c1 * alpha * d0 || (i > 0 && cur.f >= prev.f) {
            return zoom(&mut eval, f0, d0, prev, cur, opts, evals);
        }
        if cur.d.abs() <= -opts.c2 * d0 {
            return Some(cur);
        }
        if cur.d >= 0.0 {
            return zoom(&mut eval, f0, d0, cur, prev, opts, evals);
        }
        alpha *= 2.0;
        prev = cur;
    }
    None
}

fn below_noise(f: f64, f0: f64) -> bool {
    (f - f0).abs() <= 1e-13 * f0.abs().max(1e-300)
}

/// Approximate Wolfe test for steps whose change in `f` is lost to rounding:
/// the slope alone must satisfy the curvature condition.
fn flat_enough(cur: &Probe, f0: f64, d0: f64, opts: &BfgsOptions) -> bool {
    below_noise(cur.f, f0) && cur.d.abs() <= -opts.c2 * d0
}

/// Cubic interpolation minimizer between two probes, safeguarded to the interior.
fn interpolate(lo: &Probe, hi: &Probe) -> f64 {
    let (a, b) = (lo.alpha, hi.alpha);
    let d1 = lo.d + hi.d - 3.0 * (lo.f - hi.f) / (a - b);
    let disc = d1 * d1 - lo.d * hi.d;
    let mid = 0.5 * (a + b);
    if disc < 0.0 {
        return mid;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (hi.d + d2 - d1) / (hi.d - lo.d + 2.0 * d2);
    let (l, r) = if a < b { (a, b) } else { (b, a) };
    let margin = 0.1 * (r - l);
    if t.is_finite() && t > l + margin && t < r - margin {
        t
    } else {
        mid
    }
}

fn zoom<E>(
    eval: &mut E,
    f0: f64,
    d0: f64,
    mut lo: Probe,
    mut hi: Probe,
    opts: &BfgsOptions,
    evals: &mut usize,
) -> Option<Probe>
where
    E: FnMut(f64, &mut usize) -> Probe,
{
    for _ in 0..40 {
        if (hi.alpha - lo.alpha).abs() < 1e-16 * lo.alpha.abs().max(1.0) {
            break;
        }
        let alpha = interpolate(&lo, &hi);
        let cur = eval(alpha, evals);
        if flat_enough(&cur, f0, d0, opts) {
            return Some(cur);
        }
        if below_noise(cur.f, f0) && below_noise(lo.f, f0) {
            if cur.d * (hi.alpha - lo.alpha) >= 0.0 {
                hi = cur;
            } else {
                lo = cur;
            }
            continue;
        }
        if cur.f > f0 + opts.c1 * alpha * d0 || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.d.abs() <= -opts.c2 * d0 {
                return Some(cur);
            }
            if cur.d * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    // accept the best sufficient-decrease point found, if any
    (lo.alpha > 0.0 && lo.f < f0).then_some(lo)
}
