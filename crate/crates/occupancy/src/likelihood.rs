//! Log-likelihood kernels for the homogeneous occupancy model.
//!
//! With sufficient statistics `(S, τ, f0, y, b)`, `O = S − f0` and
//! `θ = 1 − (1 − p)^τ`, the joint log-likelihood of `(ψ, p)` is
//!
//! ```text
//! ℓ(ψ, p) = f0·ln(1 − ψθ) + O·ln ψ + y·ln p + (Oτ − y)·ln(1 − p)
//! ```
//!
//! Substituting `η = ψθ` gives the same surface in orthogonal coordinates,
//!
//! ```text
//! ℓ(η, p) = f0·ln(1 − η) + O·ln η + y·ln p + (Oτ − y)·ln(1 − p) − O·ln θ
//! ```
//!
//! which separates into a function of `η` plus a function of `p`: the mixed
//! second derivative is identically zero. The `η` part is a binomial
//! (`η̂ = O/S` in closed form); the `p` part is the conditional
//! log-likelihood of the detections given which sites were detected. The
//! conditional part further factors into a first-detection-time piece and a
//! plain binomial over the `b` post-first-detection occasions — dropping the
//! middle piece is what yields the closed-form partial estimator.
//!
//! All kernels use the `0·ln 0 = 0` convention for zero counts and return a
//! `−∞` sentinel (never an error, never `NaN`) when a positive count meets a
//! zero probability, so optimizers may probe boundaries freely.

use crate::data::SuffStats;
use crate::model::{theta_of, ModelParams, OrthParams};

/// `c·ln(x)` with `0·ln 0 = 0`; `−∞` when `c > 0` and `x = 0`.
fn xlogy(c: f64, x: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * x.ln()
    }
}

/// Joint log-likelihood of `(ψ, p)`. See the module docs for the formula
/// and boundary conventions.
pub fn full_loglik(params: ModelParams, stats: &SuffStats) -> f64 {
    loglik_psi_p(params.psi, params.p, stats)
}

/// The same kernel without the `[0, 1]` clamp on `ψ`: any `ψ ≥ 0` with
/// `ψθ ≤ 1` is evaluated, which Newton refinement and Hessian probes rely
/// on when the unconstrained maximizer sits past `ψ = 1`. Out-of-domain
/// arguments get the `−∞` sentinel.
pub(crate) fn loglik_psi_p(psi: f64, p: f64, stats: &SuffStats) -> f64 {
    if !(0.0..=1.0).contains(&p) || psi < 0.0 {
        return f64::NEG_INFINITY;
    }
    let theta = theta_of(p, stats.occasions());
    let eta = psi * theta;
    if eta > 1.0 {
        return f64::NEG_INFINITY;
    }
    let o = stats.detected() as f64;
    let tau = stats.occasions() as f64;
    let y = stats.y() as f64;
    xlogy(stats.f0() as f64, 1.0 - eta) + xlogy(o, psi) + xlogy(y, p) + xlogy(o * tau - y, 1.0 - p)
}

/// Log-likelihood in the orthogonal coordinates `(η, p)`. At `η = ψθ` this
/// equals [`full_loglik`] — it is the same surface reparameterized — but
/// the two coordinates are information-orthogonal.
pub fn orth_loglik(orth: OrthParams, stats: &SuffStats) -> f64 {
    let o = stats.detected() as f64;
    let tau = stats.occasions() as f64;
    let y = stats.y() as f64;
    // p = 0 with detected sites: the conditional factor is 0/0; resolve to
    // the sentinel (no detection process can produce a detected site).
    if stats.detected() > 0 && orth.p == 0.0 {
        return f64::NEG_INFINITY;
    }
    let theta = theta_of(orth.p, stats.occasions());
    xlogy(stats.f0() as f64, 1.0 - orth.eta)
        + xlogy(o, orth.eta)
        + xlogy(y, orth.p)
        + xlogy(o * tau - y, 1.0 - orth.p)
        - xlogy(o, theta)
}

/// The `p`-only part of [`orth_loglik`]: the log-likelihood of the
/// detection pattern conditional on which sites were detected,
/// `y·ln p + (Oτ − y)·ln(1 − p) − O·ln θ`.
pub fn conditional_loglik(p: f64, stats: &SuffStats) -> f64 {
    if stats.detected() > 0 && p == 0.0 {
        return f64::NEG_INFINITY;
    }
    let o = stats.detected() as f64;
    let tau = stats.occasions() as f64;
    let theta = theta_of(p, stats.occasions());
    xlogy(stats.y() as f64, p) + xlogy(o * tau - stats.y() as f64, 1.0 - p) - xlogy(o, theta)
}

/// `∂ℓ/∂η = −f0/(1 − η) + O/η`. Linear in the counts, with the closed-form
/// root `η̂ = O/S`. Interior `η` only; boundaries divide by zero.
pub fn score_eta(orth: OrthParams, stats: &SuffStats) -> f64 {
    -(stats.f0() as f64) / (1.0 - orth.eta) + stats.detected() as f64 / orth.eta
}

/// Derivative in `p` of the conditional (equivalently, orthogonal)
/// log-likelihood:
///
/// ```text
/// ∂ℓ/∂p = y/p − (Oτ − y)/(1 − p) − Oτ(1 − p)^{τ−1}/θ
/// ```
///
/// The last term is `−O·d(ln θ)/dp` with `(1 − θ)/(1 − p)` collapsed to
/// `(1 − p)^{τ−1}`; the uncollapsed form divides two quantities that both
/// lose digits as `p → 0`, this one does not. Interior `p` only.
pub fn score_p_conditional(p: f64, stats: &SuffStats) -> f64 {
    let o = stats.detected() as f64;
    let tau_i = stats.occasions();
    let tau = tau_i as f64;
    let theta = theta_of(p, tau_i);
    stats.y() as f64 / p - (o * tau - stats.y() as f64) / (1.0 - p)
        - o * tau * (1.0 - p).powi(tau_i as i32 - 1) / theta
}

/// Second derivative in `p` of the conditional log-likelihood,
///
/// ```text
/// ℓ'' = −y/p² − (Oτ − y)/(1 − p)²
///       + Oτ[(τ − 1)(1 − p)^{τ−2}·θ + τ(1 − p)^{2(τ−1)}]/θ²
/// ```
///
/// used for the information-based standard error of the conditional `p̂`
/// (`SE = (−ℓ'')^{−1/2}`). Interior `p` only.
pub fn conditional_curvature(p: f64, stats: &SuffStats) -> f64 {
    let o = stats.detected() as f64;
    let tau_i = stats.occasions();
    let tau = tau_i as f64;
    let y = stats.y() as f64;
    let q = 1.0 - p;
    let theta = theta_of(p, tau_i);
    let bent = if tau_i >= 2 {
        (tau - 1.0) * q.powi(tau_i as i32 - 2) * theta
    } else {
        0.0
    };
    -y / (p * p) - (o * tau - y) / (q * q)
        + o * tau * (bent + tau * q.powi(2 * (tau_i as i32 - 1))) / (theta * theta)
}

/// The three additive pieces of the orthogonal log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    /// `f0·ln(1 − η) + O·ln η`: which sites were ever detected.
    pub detection: f64,
    /// `O·ln p + a·ln(1 − p) − O·ln θ`: where the first detections fell,
    /// given that each detected site has one.
    pub first_detection: f64,
    /// `(y − O)·ln p + (b − y + O)·ln(1 − p)`: detections after the first —
    /// the binomial the partial estimator maximizes.
    pub post_first: f64,
}

impl Decomposition {
    /// `detection + first_detection + post_first`, which re-assembles
    /// [`orth_loglik`].
    pub fn total(&self) -> f64 {
        self.detection + self.first_detection + self.post_first
    }
}

/// Splits [`orth_loglik`] into its three factors. Exact in real
/// arithmetic: the pieces sum back to the orthogonal log-likelihood.
///
/// # Panics
///
/// When `stats.b()` is `None`; the split needs the first-detection
/// bookkeeping.
pub fn partial_decomposition(orth: OrthParams, stats: &SuffStats) -> Decomposition {
    let b = stats
        .b()
        .expect("partial decomposition requires the post-first-detection count b")
        as f64;
    let a = stats.a().unwrap() as f64;
    let o = stats.detected() as f64;
    let y = stats.y() as f64;
    let detection = xlogy(stats.f0() as f64, 1.0 - orth.eta) + xlogy(o, orth.eta);
    let first_detection = if stats.detected() > 0 && orth.p == 0.0 {
        f64::NEG_INFINITY
    } else {
        let theta = theta_of(orth.p, stats.occasions());
        xlogy(o, orth.p) + xlogy(a, 1.0 - orth.p) - xlogy(o, theta)
    };
    let post_first = xlogy(y - o, orth.p) + xlogy(b - (y - o), 1.0 - orth.p);
    Decomposition {
        detection,
        first_detection,
        post_first,
    }
}

/// Gradient of [`full_loglik`] in the natural coordinates,
/// `(∂ℓ/∂ψ, ∂ℓ/∂p)`:
///
/// ```text
/// ∂ℓ/∂ψ = (O − Sψθ) / (ψ(1 − ψθ))
/// ∂ℓ/∂p = y/p − (Oτ − y)/(1 − p) − f0·ψτ(1 − p)^{τ−1}/(1 − ψθ)
/// ```
///
/// Setting both to zero and eliminating yields `ψ̂ = O/(S·θ̂)`: the joint
/// system and the two-stage system share their root. Interior arguments
/// with `ψθ < 1` only.
pub fn joint_scores_full(params: ModelParams, stats: &SuffStats) -> (f64, f64) {
    joint_scores_raw(params.psi, params.p, stats)
}

/// [`joint_scores_full`] without the `ψ ≤ 1` restriction, for refining a
/// maximizer that sits past the boundary.
pub(crate) fn joint_scores_raw(psi: f64, p: f64, stats: &SuffStats) -> (f64, f64) {
    let tau_i = stats.occasions();
    let theta = theta_of(p, tau_i);
    let eta = psi * theta;
    let s = stats.sites() as f64;
    let o = stats.detected() as f64;
    let tau = tau_i as f64;
    let y = stats.y() as f64;
    let d_psi = (o - s * eta) / (psi * (1.0 - eta));
    let d_p = y / p - (o * tau - y) / (1.0 - p)
        - stats.f0() as f64 * psi * tau * (1.0 - p).powi(tau_i as i32 - 1) / (1.0 - eta);
    (d_psi, d_p)
}
