//! What-if profile for the detection/occupancy split.
//!
//! The identity `ψ̄(p) = (O/S)/θ(p)` answers: if per-occasion detection
//! were really `p`, what occupancy would reproduce the observed fraction of
//! detected sites? Sweeping `p` across a grid shows how hard the data pin
//! down the split between "absent" and "present but missed". The profile
//! decreases from arbitrarily large values at `p → 0` to the floor `O/S`
//! at `p → 1` — the occupancy a perfect detector would imply — and the
//! region where `ψ̄ > 1` marks detection rates too low to explain the data
//! with any valid occupancy.

use serde::Serialize;

use crate::data::SuffStats;
use crate::fit::FitError;
use crate::model::theta_of;

/// One grid point of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityPoint {
    /// Assumed per-occasion detection probability.
    pub p: f64,
    /// Implied occupancy `ψ̄ = (O/S)/θ(p)`.
    pub psi_bar: f64,
    /// Sensitivity index `(S − f0)·τ(1 − p)^{τ−1}/(S·θ)`: the profile floor
    /// `O/S` times the magnitude of the logarithmic slope
    /// `|d ln ψ̄/dp| = τ(1 − p)^{τ−1}/θ`, a scale-free measure of how fast
    /// implied occupancy falls as assumed detectability rises.
    pub derivative: f64,
}

/// A full profile, with enough context to evaluate off-grid points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityProfile {
    pub points: Vec<SensitivityPoint>,
    sites: usize,
    occasions: usize,
    f0: usize,
}

impl SensitivityProfile {
    /// The horizontal asymptote `O/S`: implied occupancy under perfect
    /// detection.
    pub fn floor(&self) -> f64 {
        (self.sites - self.f0) as f64 / self.sites as f64
    }

    /// Evaluates the profile at an arbitrary `p` in `(0, 1)` — used for
    /// marker rows at a fitted `p̂`.
    ///
    /// # Panics
    ///
    /// When `p` is not interior.
    pub fn evaluate(&self, p: f64) -> SensitivityPoint {
        assert!(p > 0.0 && p < 1.0, "p = {p} must be interior");
        let theta = theta_of(p, self.occasions);
        let floor = self.floor();
        SensitivityPoint {
            p,
            psi_bar: floor / theta,
            derivative: floor * self.occasions as f64 * (1.0 - p).powi(self.occasions as i32 - 1)
                / theta,
        }
    }
}

/// Profiles `ψ̄(p)` on the uniform interior grid `p_i = i/(n + 1)`,
/// `i = 1..=n`, so no grid point touches 0 or 1.
///
/// # Errors
///
/// [`FitError::Degenerate`] when `f0 = 0` (the profile would sit at the
/// trivial floor 1 with nothing to trade off) or `O = 0` (no detections to
/// explain).
///
/// # Panics
///
/// When `grid_size` is 0.
pub fn sensitivity_profile(
    stats: &SuffStats,
    grid_size: usize,
) -> Result<SensitivityProfile, FitError> {
    assert!(grid_size >= 1, "grid_size must be at least 1");
    if stats.detected() == 0 {
        return Err(FitError::Degenerate("no site has any detection (O = 0)".into()));
    }
    if stats.f0() == 0 {
        return Err(FitError::Degenerate(
            "every site has a detection (f0 = 0); there is no occupancy/detection trade-off to profile"
                .into(),
        ));
    }
    let mut profile = SensitivityProfile {
        points: Vec::with_capacity(grid_size),
        sites: stats.sites(),
        occasions: stats.occasions(),
        f0: stats.f0(),
    };
    for i in 1..=grid_size {
        let p = i as f64 / (grid_size + 1) as f64;
        profile.points.push(profile.evaluate(p));
    }
    Ok(profile)
}
