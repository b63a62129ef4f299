//! Parameterizations of the homogeneous occupancy model.
//!
//! The natural parameters are `ψ` (probability a site is occupied) and `p`
//! (per-occasion detection probability given occupancy). Two derived
//! quantities recur everywhere:
//!
//! * `θ = 1 − (1 − p)^τ` — probability of at least one detection in `τ`
//!   occasions at an occupied site;
//! * `η = ψθ` — unconditional probability that a site yields at least one
//!   detection.
//!
//! `(η, p)` is an alternative coordinate system for the same model. Its
//! observed information is diagonal — the mixed second derivative of the
//! log-likelihood vanishes identically — which is what makes the two-stage
//! estimator exact rather than approximate.

/// Occupancy and detection probabilities `(ψ, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub psi: f64,
    pub p: f64,
}

impl ModelParams {
    /// Returns `None` unless both probabilities lie in `[0, 1]`.
    pub fn new(psi: f64, p: f64) -> Option<Self> {
        if (0.0..=1.0).contains(&psi) && (0.0..=1.0).contains(&p) {
            Some(Self { psi, p })
        } else {
            None
        }
    }
}

/// The orthogonal coordinates `(η, p)` where `η = ψθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthParams {
    pub eta: f64,
    pub p: f64,
}

impl OrthParams {
    /// Returns `None` unless both coordinates lie in `[0, 1]`.
    pub fn new(eta: f64, p: f64) -> Option<Self> {
        if (0.0..=1.0).contains(&eta) && (0.0..=1.0).contains(&p) {
            Some(Self { eta, p })
        } else {
            None
        }
    }
}

/// `θ = 1 − (1 − p)^τ`, computed as `−expm1(τ·ln1p(−p))` so tiny `p` keeps
/// full relative accuracy (the naive power loses all digits once
/// `(1 − p)^τ` rounds to 1). Exact at both endpoints: `θ(0) = 0`,
/// `θ(1) = 1`.
///
/// # Panics
///
/// When `p` is outside `[0, 1]` or `τ = 0`.
pub fn theta_of(p: f64, tau: usize) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p = {p} is outside [0, 1]");
    assert!(tau >= 1, "tau must be at least 1");
    -(tau as f64 * (-p).ln_1p()).exp_m1()
}

/// `η = ψ·θ(p, τ)`.
pub fn eta_of(params: ModelParams, tau: usize) -> f64 {
    params.psi * theta_of(params.p, tau)
}
