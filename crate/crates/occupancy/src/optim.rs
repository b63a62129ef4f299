//! Scalar root finding, derivative-free maximization on the unit square,
//! and finite-difference curvature.
//!
//! Nothing in here knows about the occupancy model: objectives arrive as
//! closures and tolerances in [`OptimSettings`], so each piece can be tested
//! against textbook functions with known answers.

use thiserror::Error;

/// Shared optimizer tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimSettings {
    /// Convergence tolerance on coordinates (default `1e-10`).
    pub tol_x: f64,
    /// Convergence tolerance on objective values (default `1e-12`).
    pub tol_f: f64,
    /// Iteration cap for either algorithm (default `500`).
    pub max_iter: usize,
    /// Relative finite-difference step for Hessians (default `1e-5`);
    /// the step at coordinate `x` is `fd_step·max(1, |x|)`.
    pub fd_step: f64,
}

impl Default for OptimSettings {
    fn default() -> Self {
        Self {
            tol_x: 1e-10,
            tol_f: 1e-12,
            max_iter: 500,
            fd_step: 1e-5,
        }
    }
}

/// Failures of the numerical routines.
#[derive(Debug, Error)]
pub enum OptimError {
    /// The endpoint values do not straddle zero.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    /// The iteration cap was reached before the tolerances were met.
    #[error("no convergence within {0} iterations")]
    MaxIter(usize),
    /// The objective is `−∞` or `NaN` at the starting point.
    #[error("objective is not finite at the starting point")]
    NonFinite,
    /// The observed information matrix is not positive definite.
    #[error("observed information matrix is not positive definite")]
    Singular,
}

/// A bracketed root together with the iteration count that found it.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Finds a root of `f` on `[lo, hi]` by Brent's method: inverse-quadratic
/// or secant steps are accepted only while they stay inside the current
/// bracket and shrink it fast enough, with bisection as the fallback, so
/// convergence is guaranteed for any continuous sign-changing `f`. Never
/// evaluates `f` outside `[lo, hi]`.
///
/// # Errors
///
/// [`OptimError::NoBracket`] when `f(lo)` and `f(hi)` have the same sign,
/// [`OptimError::MaxIter`] when the cap is exhausted.
pub fn root_find_1d<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: &OptimSettings,
) -> Result<Root, OptimError> {
    assert!(lo < hi, "empty interval [{lo}, {hi}]");
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Root {
            x: lo,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Root {
            x: hi,
            iterations: 0,
        });
    }
    if !(f_lo.signum() * f_hi.signum() < 0.0) {
        return Err(OptimError::NoBracket { lo, hi, f_lo, f_hi });
    }

    // (b, fb) is the best iterate, (c, fc) its bracket mate with fb·fc < 0,
    // (a, fa) the previous iterate used for interpolation.
    let (mut a, mut fa) = (lo, f_lo);
    let (mut b, mut fb) = (hi, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = b - a;
    for it in 1..=settings.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * settings.tol_x;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(Root { x: b, iterations: it });
        }
        if e.abs() < tol || fa.abs() <= fb.abs() {
            // interpolation is not making progress: bisect
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // secant
                (2.0 * m * s, 1.0 - s)
            } else {
                // inverse quadratic interpolation through (a, b, c)
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                // interpolated point lies inside the bracket: take it
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    Err(OptimError::MaxIter(settings.max_iter))
}

fn logit(x: f64) -> f64 {
    (x / (1.0 - x)).ln()
}

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// The outcome of a simplex maximization, with coordinates back on the
/// unit square.
#[derive(Debug, Clone, Copy)]
pub struct Maximum {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes `f` over the open unit square `(0, 1)²` by Nelder–Mead on
/// logit-transformed coordinates: iterates can approach the edges but never
/// touch them, so a maximizer past an edge shows up as a boundary-adjacent
/// point rather than an evaluation error. The two coordinates are treated
/// symmetrically. Converges when the simplex extent on the probability
/// scale falls below `tol_x` or the value spread below `tol_f`.
///
/// # Errors
///
/// [`OptimError::NonFinite`] when `f(start)` is `−∞`/`NaN`,
/// [`OptimError::MaxIter`] when the cap is exhausted.
///
/// # Panics
///
/// When `start` is not interior to the square.
pub fn maximize_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    start: (f64, f64),
    settings: &OptimSettings,
) -> Result<Maximum, OptimError> {
    assert!(
        start.0 > 0.0 && start.0 < 1.0 && start.1 > 0.0 && start.1 < 1.0,
        "start ({}, {}) must be interior to the unit square",
        start.0,
        start.1
    );
    const STEP: f64 = 0.5; // initial simplex leg on the logit scale
    // Cap logit coordinates at ±20, where the sigmoid is already flat to
    // within 2e-9. Without the cap, a maximizer past an edge lets the
    // expansion legs double without bound, dragging the other coordinate
    // into the saturated zone where the probability-scale spread collapses
    // and convergence fires at a spurious point.
    const CAP: f64 = 20.0;
    let clamp = |u: f64| u.clamp(-CAP, CAP);
    let g = |u: f64, v: f64| f(sigmoid(u), sigmoid(v));
    let (u0, v0) = (clamp(logit(start.0)), clamp(logit(start.1)));
    let value0 = g(u0, v0);
    if !value0.is_finite() {
        return Err(OptimError::NonFinite);
    }
    let mut simplex = [
        (u0, v0, value0),
        (clamp(u0 + STEP), v0, g(clamp(u0 + STEP), v0)),
        (u0, clamp(v0 + STEP), g(u0, clamp(v0 + STEP))),
    ];
    for it in 1..=settings.max_iter {
        // best first, worst last
        simplex.sort_by(|p, q| q.2.total_cmp(&p.2));
        // Candidates clamped to the same cap corner can make two vertices
        // collide exactly, after which reflections only reproduce the
        // duplicate and the simplex degenerates; re-seed fresh legs around
        // the best vertex, pointing away from the caps, and keep going.
        let collided = |i: usize, j: usize| {
            simplex[i].0 == simplex[j].0 && simplex[i].1 == simplex[j].1
        };
        if collided(0, 1) || collided(1, 2) || collided(0, 2) {
            let (u, v, _) = simplex[0];
            let u1 = clamp(u + if u > 0.0 { -STEP } else { STEP });
            let v2 = clamp(v + if v > 0.0 { -STEP } else { STEP });
            simplex[1] = (u1, v, g(u1, v));
            simplex[2] = (u, v2, g(u, v2));
            simplex.sort_by(|p, q| q.2.total_cmp(&p.2));
        }
        let best = simplex[0];
        let worst = simplex[2];
        let px: Vec<f64> = simplex.iter().map(|v| sigmoid(v.0)).collect();
        let py: Vec<f64> = simplex.iter().map(|v| sigmoid(v.1)).collect();
        let pu: Vec<f64> = simplex.iter().map(|v| v.0).collect();
        let pv: Vec<f64> = simplex.iter().map(|v| v.1).collect();
        let spread = |c: &[f64]| {
            c.iter().fold(f64::MIN, |m, &v| m.max(v)) - c.iter().fold(f64::MAX, |m, &v| m.min(v))
        };
        // Near the caps the flat sigmoid compresses a loose simplex into an
        // apparently tight one — on the probability scale and in value — so
        // neither criterion may fire until the logit-scale spread is small.
        let tight_u = spread(&pu).max(spread(&pv)) <= 1e-6;
        if tight_u
            && (spread(&px).max(spread(&py)) <= settings.tol_x
                || (best.2 - worst.2).abs() <= settings.tol_f)
        {
            return Ok(Maximum {
                x: px[0],
                y: py[0],
                value: best.2,
                iterations: it,
            });
        }
        let cu = 0.5 * (simplex[0].0 + simplex[1].0);
        let cv = 0.5 * (simplex[0].1 + simplex[1].1);
        let (ru, rv) = (clamp(cu + (cu - worst.0)), clamp(cv + (cv - worst.1)));
        let rf = g(ru, rv);
        if rf > best.2 {
            let (eu, ev) = (
                clamp(cu + 2.0 * (cu - worst.0)),
                clamp(cv + 2.0 * (cv - worst.1)),
            );
            let ef = g(eu, ev);
            simplex[2] = if ef > rf { (eu, ev, ef) } else { (ru, rv, rf) };
        } else if rf > simplex[1].2 {
            simplex[2] = (ru, rv, rf);
        } else {
            // contract outside if the reflection at least beat the worst
            // vertex, inside otherwise; shrink when even that fails
            let (hu, hv) = if rf > worst.2 {
                (
                    clamp(cu + 0.5 * (cu - worst.0)),
                    clamp(cv + 0.5 * (cv - worst.1)),
                )
            } else {
                (cu - 0.5 * (cu - worst.0), cv - 0.5 * (cv - worst.1))
            };
            let hf = g(hu, hv);
            if hf > rf.max(worst.2) {
                simplex[2] = (hu, hv, hf);
            } else {
                for i in 1..3 {
                    let su = best.0 + 0.5 * (simplex[i].0 - best.0);
                    let sv = best.1 + 0.5 * (simplex[i].1 - best.1);
                    simplex[i] = (su, sv, g(su, sv));
                }
            }
        }
    }
    Err(OptimError::MaxIter(settings.max_iter))
}

/// Central-difference Hessian of `f` at `point`, with relative steps
/// `h_i = fd_step·max(1, |x_i|)`. The single mixed estimate fills both
/// off-diagonal slots, so the result is symmetric by construction.
pub fn numerical_hessian<F: Fn(f64, f64) -> f64>(
    f: F,
    point: (f64, f64),
    settings: &OptimSettings,
) -> [[f64; 2]; 2] {
    let (x, y) = point;
    let hx = settings.fd_step * x.abs().max(1.0);
    let hy = settings.fd_step * y.abs().max(1.0);
    let center = f(x, y);
    let dxx = (f(x + hx, y) - 2.0 * center + f(x - hx, y)) / (hx * hx);
    let dyy = (f(x, y + hy) - 2.0 * center + f(x, y - hy)) / (hy * hy);
    let dxy = (f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy))
        / (4.0 * hx * hy);
    [[dxx, dxy], [dxy, dyy]]
}

/// Standard errors from the Hessian of a log-likelihood at its maximum:
/// inverts the observed information `−H` and returns the square roots of
/// its diagonal as `(se_x, se_y)`.
///
/// # Errors
///
/// [`OptimError::Singular`] unless `−H` is positive definite (which also
/// catches non-finite Hessian entries).
pub fn information_se(hessian: [[f64; 2]; 2]) -> Result<(f64, f64), OptimError> {
    let i11 = -hessian[0][0];
    let i22 = -hessian[1][1];
    let i12 = -hessian[0][1];
    let det = i11 * i22 - i12 * i12;
    if !(i11 > 0.0 && det > 0.0) {
        return Err(OptimError::Singular);
    }
    Ok(((i22 / det).sqrt(), (i11 / det).sqrt()))
}
