//! The three estimators.
//!
//! All of them consume [`SuffStats`] and return a [`FitResult`] carrying
//! point estimates, the derived `θ̂` and `η̂`, and — when the usual
//! information argument applies — standard errors.
//!
//! * [`fit_full`] maximizes the joint log-likelihood over `(ψ, p)`.
//! * [`fit_two_stage`] exploits orthogonality: `η̂ = O/S` in closed form,
//!   a one-dimensional root-find of the conditional score for `p̂`, then
//!   `ψ̂ = η̂/θ̂`.
//! * [`fit_partial`] is the fully closed form `p̃ = (y − O)/b` from the
//!   post-first-detection binomial alone.
//!
//! The first two land on the same maximum — that is the point of the
//! orthogonal parameterization — so their results differ only by optimizer
//! tolerances; the crate keeps their code paths independent so the
//! agreement stays a checkable fact rather than an artifact of shared code.
//! The partial estimator trades a little efficiency for having no
//! iteration at all.
//!
//! # Edge policy
//!
//! Estimates are reported as computed: `ψ̂ ≥ 1` is returned with
//! `boundary_flag` set, never truncated to 1. Standard errors are `None` at
//! boundaries and whenever the observed information is not positive
//! definite — they are never fabricated. Data configurations with no
//! interior maximum come back as errors, not numbers: see [`FitError`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::SuffStats;
use crate::likelihood::{
    conditional_curvature, joint_scores_raw, loglik_psi_p, orth_loglik, score_eta,
    score_p_conditional,
};
use crate::model::{theta_of, OrthParams};
use crate::optim::{
    information_se, maximize_2d, numerical_hessian, root_find_1d, OptimError, OptimSettings,
};

/// Distance kept from {0, 1} when bracketing the conditional score.
const BRACKET_EPS: f64 = 1e-12;
/// Newton refinement: step cap and score tolerance for early exit.
const NEWTON_STEPS: usize = 25;
const NEWTON_GTOL: f64 = 1e-9;
/// A fit counts as converged when no score component exceeds this.
const SCORE_TOL: f64 = 1e-6;

/// Which estimator produced a [`FitResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Full,
    TwoStage,
    Partial,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Full => "full",
            Method::TwoStage => "two_stage",
            Method::Partial => "partial",
        })
    }
}

/// Point estimates and standard errors from one estimator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitResult {
    pub method: Method,
    /// Occupancy estimate, as computed — may exceed 1 (see `boundary_flag`).
    pub psi_hat: f64,
    /// Per-occasion detection estimate.
    pub p_hat: f64,
    /// `θ̂ = 1 − (1 − p̂)^τ`.
    pub theta_hat: f64,
    /// `η̂ = ψ̂θ̂`, the detected-site probability.
    pub eta_hat: f64,
    /// Information-based standard errors; `None` when undefined (boundary
    /// estimates or a singular information matrix).
    pub se_psi: Option<f64>,
    pub se_p: Option<f64>,
    /// Whether the final score norm met the convergence tolerance. Closed
    /// forms are always converged.
    pub converged: bool,
    /// Optimizer iterations spent (0 for closed forms).
    pub iterations: usize,
    /// Set when the maximizer sits on or past an edge of the parameter
    /// space: `ψ̂ ≥ 1` or `p̂ ∈ {0, 1}`.
    pub boundary_flag: bool,
}

/// Why an estimator declined to produce estimates.
#[derive(Debug, Error)]
pub enum FitError {
    /// The statistics carry no usable signal for this estimator.
    #[error("degenerate data: {0}")]
    Degenerate(String),
    /// With one occasion per site only `η = ψθ` is estimable; the error
    /// carries its estimate rather than inventing a `(ψ, p)` split.
    #[error("psi and p are not separately identifiable with tau = 1; eta_hat = {eta_hat}")]
    NotIdentifiable { eta_hat: f64 },
    /// Every detected site was detected exactly once: `p̂ = 0`, so
    /// `θ̂ = 0` and `ψ̂ = η̂/θ̂` is undefined.
    #[error("every detected site was detected exactly once (y = O); p_hat = 0 leaves psi undefined")]
    UndefinedPsi,
    /// The optimizer gave up.
    #[error(transparent)]
    Optim(#[from] OptimError),
}

/// A saturated data set (`y = Oτ`) pins `p̂ = 1` and `ψ̂ = O/S` exactly;
/// shared by every estimator.
fn saturated(method: Method, eta_hat: f64) -> FitResult {
    FitResult {
        method,
        psi_hat: eta_hat,
        p_hat: 1.0,
        theta_hat: 1.0,
        eta_hat,
        se_psi: None,
        se_p: None,
        converged: true,
        iterations: 0,
        boundary_flag: true,
    }
}

/// Two-stage conditional estimator: closed-form `η̂ = O/S`, Brent root of
/// the conditional score for `p̂`, analytic curvature for `SE(p̂)`, and the
/// delta method for `SE(ψ̂)`:
///
/// ```text
/// Var(ψ̂) = Var(η̂)/θ̂² + η̂²·τ²(1 − p̂)^{2(τ−1)}·Var(p̂)/θ̂⁴
/// ```
///
/// with `Var(η̂) = η̂(1 − η̂)/S`. No cross term appears — that is the
/// orthogonality.
pub fn fit_two_stage(stats: &SuffStats, settings: &OptimSettings) -> Result<FitResult, FitError> {
    let o = stats.detected();
    if o == 0 {
        return Err(FitError::Degenerate("no site has any detection (O = 0)".into()));
    }
    let eta_hat = o as f64 / stats.sites() as f64;
    if stats.occasions() == 1 {
        return Err(FitError::NotIdentifiable { eta_hat });
    }
    if stats.y() == (o * stats.occasions()) as u64 {
        return Ok(saturated(Method::TwoStage, eta_hat));
    }
    if stats.y() == o as u64 {
        return Err(FitError::UndefinedPsi);
    }
    // O < y < Oτ guarantees the score runs from +∞ to −∞ on (0, 1)
    let root = root_find_1d(
        |p| score_p_conditional(p, stats),
        BRACKET_EPS,
        1.0 - BRACKET_EPS,
        settings,
    )?;
    let p_hat = root.x;
    let theta_hat = theta_of(p_hat, stats.occasions());
    let psi_hat = eta_hat / theta_hat;
    let var_p = -1.0 / conditional_curvature(p_hat, stats);
    let (se_psi, se_p) = if var_p.is_finite() && var_p > 0.0 {
        let var_eta = eta_hat * (1.0 - eta_hat) / stats.sites() as f64;
        let dtheta = stats.occasions() as f64
            * (1.0 - p_hat).powi(stats.occasions() as i32 - 1);
        let th2 = theta_hat * theta_hat;
        let var_psi = var_eta / th2 + eta_hat * eta_hat * dtheta * dtheta * var_p / (th2 * th2);
        (Some(var_psi.sqrt()), Some(var_p.sqrt()))
    } else {
        (None, None)
    };
    Ok(FitResult {
        method: Method::TwoStage,
        psi_hat,
        p_hat,
        theta_hat,
        eta_hat,
        se_psi,
        se_p,
        converged: score_p_conditional(p_hat, stats).abs() <= SCORE_TOL * stats.y() as f64,
        iterations: root.iterations,
        boundary_flag: psi_hat >= 1.0,
    })
}

/// Full maximum likelihood for `(ψ, p)`: simplex maximization of the
/// orthogonal surface (better conditioned — its information is diagonal),
/// then Newton refinement on the joint score equations, then standard
/// errors from the numerically observed information of the joint surface.
///
/// When the unconstrained `ψ̂` lands at or past 1 the refinement stays in
/// `(η, p)` coordinates, where the maximum is still interior, and the
/// result carries `boundary_flag`.
pub fn fit_full(stats: &SuffStats, settings: &OptimSettings) -> Result<FitResult, FitError> {
    let o = stats.detected();
    if o == 0 {
        return Err(FitError::Degenerate("no site has any detection (O = 0)".into()));
    }
    if stats.f0() == 0 {
        return Err(FitError::Degenerate(
            "every site has a detection (f0 = 0); the joint likelihood has no interior maximum in psi"
                .into(),
        ));
    }
    let eta_closed = o as f64 / stats.sites() as f64;
    if stats.occasions() == 1 {
        return Err(FitError::NotIdentifiable { eta_hat: eta_closed });
    }
    if stats.y() == (o * stats.occasions()) as u64 {
        return Ok(saturated(Method::Full, eta_closed));
    }
    if stats.y() == o as u64 {
        return Err(FitError::UndefinedPsi);
    }

    // start from the partial estimates when the data allow them
    let start = match fit_partial(stats) {
        Ok(r) if r.p_hat > 0.0 && r.p_hat < 1.0 => (
            r.eta_hat.clamp(1e-6, 1.0 - 1e-6),
            r.p_hat.clamp(1e-6, 1.0 - 1e-6),
        ),
        _ => (0.5, 0.5),
    };
    let surface = |eta: f64, p: f64| orth_loglik(OrthParams { eta, p }, stats);
    let max = maximize_2d(surface, start, settings)?;
    let mut iterations = max.iterations;
    let (mut eta_hat, mut p_hat) = (max.x, max.y);
    let mut theta_hat = theta_of(p_hat, stats.occasions());
    let mut psi_hat = eta_hat / theta_hat;

    if psi_hat < 1.0 {
        // refine on the joint scores in the natural coordinates
        let obj = |psi: f64, p: f64| loglik_psi_p(psi, p, stats);
        for _ in 0..NEWTON_STEPS {
            let (g1, g2) = joint_scores_raw(psi_hat, p_hat, stats);
            if g1.abs().max(g2.abs()) < NEWTON_GTOL {
                break;
            }
            match newton_step(&obj, (psi_hat, p_hat), (g1, g2), settings) {
                Some((x, y)) => {
                    psi_hat = x;
                    p_hat = y;
                    iterations += 1;
                }
                None => break,
            }
        }
        theta_hat = theta_of(p_hat, stats.occasions());
        eta_hat = psi_hat * theta_hat;
    } else {
        // maximizer past psi = 1: refine where it is interior
        for _ in 0..NEWTON_STEPS {
            let g1 = score_eta(OrthParams { eta: eta_hat, p: p_hat }, stats);
            let g2 = score_p_conditional(p_hat, stats);
            if g1.abs().max(g2.abs()) < NEWTON_GTOL {
                break;
            }
            match newton_step(&surface, (eta_hat, p_hat), (g1, g2), settings) {
                Some((x, y)) => {
                    eta_hat = x;
                    p_hat = y;
                    iterations += 1;
                }
                None => break,
            }
        }
        theta_hat = theta_of(p_hat, stats.occasions());
        psi_hat = eta_hat / theta_hat;
    }

    let (g1, g2) = joint_scores_raw(psi_hat, p_hat, stats);
    let converged = g1.abs().max(g2.abs()) <= SCORE_TOL * stats.sites() as f64;
    let hessian = numerical_hessian(
        |psi, p| loglik_psi_p(psi, p, stats),
        (psi_hat, p_hat),
        settings,
    );
    let (se_psi, se_p) = match information_se(hessian) {
        Ok((a, b)) if a.is_finite() && b.is_finite() => (Some(a), Some(b)),
        _ => (None, None),
    };
    Ok(FitResult {
        method: Method::Full,
        psi_hat,
        p_hat,
        theta_hat,
        eta_hat,
        se_psi,
        se_p,
        converged,
        iterations,
        boundary_flag: psi_hat >= 1.0,
    })
}

/// One damped Newton step toward a root of the gradient `g` of `obj`,
/// using the finite-difference Hessian as the Jacobian. Halves the step
/// until the objective stops decreasing and the point stays in-domain;
/// `None` when no acceptable step exists (already at the optimum to
/// machine precision, or the Hessian is unusable).
fn newton_step<F: Fn(f64, f64) -> f64>(
    obj: &F,
    at: (f64, f64),
    g: (f64, f64),
    settings: &OptimSettings,
) -> Option<(f64, f64)> {
    let h = numerical_hessian(obj, at, settings);
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if !det.is_finite() || det.abs() < f64::MIN_POSITIVE {
        return None;
    }
    let dx = (h[1][1] * g.0 - h[0][1] * g.1) / det;
    let dy = (h[0][0] * g.1 - h[1][0] * g.0) / det;
    let base = obj(at.0, at.1);
    let mut lambda = 1.0;
    for _ in 0..40 {
        let cand = (at.0 - lambda * dx, at.1 - lambda * dy);
        if cand.0 > 0.0 && cand.1 > 0.0 && cand.1 < 1.0 {
            let value = obj(cand.0, cand.1);
            if value.is_finite() && value >= base - 1e-9 {
                return Some(cand);
            }
        }
        lambda *= 0.5;
    }
    None
}

/// Closed-form partial estimator from the post-first-detection binomial:
/// `p̃ = (y − O)/b`, `ψ̃ = (O/S)/θ̃`, `SE(p̃) = √(p̃(1 − p̃)/b)`, and
/// `SE(ψ̃)` from [`var_psi_partial`]. No iteration at all.
pub fn fit_partial(stats: &SuffStats) -> Result<FitResult, FitError> {
    let o = stats.detected();
    if o == 0 {
        return Err(FitError::Degenerate("no site has any detection (O = 0)".into()));
    }
    let eta_hat = o as f64 / stats.sites() as f64;
    if stats.occasions() == 1 {
        return Err(FitError::NotIdentifiable { eta_hat });
    }
    let b = match stats.b() {
        None => {
            return Err(FitError::Degenerate(
                "the post-first-detection count b is not recorded in these statistics".into(),
            ))
        }
        Some(0) => {
            return Err(FitError::Degenerate(
                "no occasions after first detection (b = 0)".into(),
            ))
        }
        Some(b) => b,
    };
    let p_hat = (stats.y() - o as u64) as f64 / b as f64;
    if p_hat == 0.0 {
        return Err(FitError::UndefinedPsi);
    }
    if p_hat == 1.0 {
        return Ok(saturated(Method::Partial, eta_hat));
    }
    let theta_hat = theta_of(p_hat, stats.occasions());
    let psi_hat = eta_hat / theta_hat;
    Ok(FitResult {
        method: Method::Partial,
        psi_hat,
        p_hat,
        theta_hat,
        eta_hat,
        se_psi: Some(var_psi_partial(psi_hat, p_hat, stats).sqrt()),
        se_p: Some((p_hat * (1.0 - p_hat) / b as f64).sqrt()),
        converged: true,
        iterations: 0,
        boundary_flag: psi_hat >= 1.0,
    })
}

/// Sampling variance of the partial `ψ̃`, propagating both stages by the
/// delta method:
///
/// ```text
/// Var(ψ̃) = [ψ(1 − ψθ)/(Sθ) + ψ²]·τ²(1 − p)^{2(τ−1)}/θ²·p(1 − p)/b
///         + ψ(1 − ψθ)/(Sθ)
/// ```
///
/// evaluated at the supplied `(ψ, p)`; `S`, `τ`, and `b` come from
/// `stats`.
///
/// # Panics
///
/// When `stats.b()` is `None` or zero, `p` is not interior, or `ψθ > 1`.
pub fn var_psi_partial(psi: f64, p: f64, stats: &SuffStats) -> f64 {
    let b = stats.b().expect("var_psi_partial requires b") as f64;
    assert!(b > 0.0, "var_psi_partial requires b > 0");
    assert!(p > 0.0 && p < 1.0, "p = {p} must be interior");
    let tau_i = stats.occasions();
    let theta = theta_of(p, tau_i);
    let eta = psi * theta;
    assert!(
        psi > 0.0 && eta <= 1.0 + 1e-9,
        "psi = {psi} must be positive with psi*theta <= 1"
    );
    let base = psi * (1.0 - eta) / (stats.sites() as f64 * theta);
    let dlog = tau_i as f64 * (1.0 - p).powi(tau_i as i32 - 1) / theta;
    (base + psi * psi) * dlog * dlog * p * (1.0 - p) / b + base
}
