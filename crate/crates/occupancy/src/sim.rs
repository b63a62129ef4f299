//! Synthetic histories and the Monte-Carlo study engine.
//!
//! Replicates are deterministic given a cell: replicate `i` draws from
//! counter stream `i` of a ChaCha generator seeded with the cell seed, so a
//! study parallelizes freely without losing reproducibility, and any single
//! replicate can be replayed in isolation. Summaries are medians and MADs
//! rather than means — one wild replicate should not move the report — but
//! efficiency ratios use variances, with squared-MAD ratios alongside as a
//! robust cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::DetectionHistory;
use crate::fit::{fit_full, fit_partial};
use crate::optim::OptimSettings;

/// Draws one `sites × occasions` history: each site is occupied with
/// probability `psi`, and each occasion at an occupied site detects with
/// probability `p`. Unoccupied sites are all-zero rows by construction and
/// consume no further randomness.
///
/// # Panics
///
/// When a dimension is zero or a probability is outside `[0, 1]`.
pub fn simulate_history<R: Rng + ?Sized>(
    sites: usize,
    occasions: usize,
    psi: f64,
    p: f64,
    rng: &mut R,
) -> DetectionHistory {
    assert!(
        sites >= 1 && occasions >= 1,
        "need at least one site and one occasion"
    );
    assert!(
        (0.0..=1.0).contains(&psi) && (0.0..=1.0).contains(&p),
        "psi = {psi} and p = {p} must be probabilities"
    );
    let mut rows = Vec::with_capacity(sites);
    for _ in 0..sites {
        let mut row = vec![0u8; occasions];
        if rng.random_bool(psi) {
            for cell in &mut row {
                *cell = u8::from(rng.random_bool(p));
            }
        }
        rows.push(row);
    }
    DetectionHistory::from_rows(rows).expect("simulated rows are rectangular and binary")
}

/// One design point of a simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyCell {
    #[serde(rename = "S")]
    pub sites: usize,
    #[serde(rename = "tau")]
    pub occasions: usize,
    /// True occupancy probability.
    pub psi: f64,
    /// True per-occasion detection probability.
    pub p: f64,
    /// Number of replicates.
    pub n_sim: usize,
    /// Base seed; replicate `i` uses stream `i` of this seed.
    pub seed: u64,
}

impl StudyCell {
    /// Checks the design is simulable and estimable: positive counts, at
    /// least two occasions, probabilities strictly inside `(0, 1)`.
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::InvalidCell(msg));
        if self.sites == 0 {
            return fail("S must be at least 1".into());
        }
        if self.occasions < 2 {
            return fail(format!(
                "tau must be at least 2 to separate psi from p (got {})",
                self.occasions
            ));
        }
        if self.n_sim == 0 {
            return fail("n_sim must be at least 1".into());
        }
        if !(self.psi > 0.0 && self.psi < 1.0) {
            return fail(format!("psi = {} must be inside (0, 1)", self.psi));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return fail(format!("p = {} must be inside (0, 1)", self.p));
        }
        Ok(())
    }
}

/// Failures of the study engine.
#[derive(Debug, Error)]
pub enum SimError {
    /// The cell fails [`StudyCell::validate`].
    #[error("invalid study cell: {0}")]
    InvalidCell(String),
    /// Every replicate was dropped (failed fits or boundary estimates).
    #[error("no usable replicates: 0 of {total} retained")]
    AllDropped { total: usize },
    /// A summary was requested for an empty batch.
    #[error("cannot summarize an empty sample")]
    EmptySample,
}

/// Median, scaled MAD, and sample variance of one batch of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustSummary {
    pub median: f64,
    /// `1.4826 · median(|x − median|)`, consistent for a normal σ.
    pub mad: f64,
    /// Unbiased sample variance (0 for a single value).
    pub variance: f64,
}

/// Computes [`RobustSummary`] for a batch.
///
/// # Errors
///
/// [`SimError::EmptySample`] for an empty slice.
pub fn robust_summaries(values: &[f64]) -> Result<RobustSummary, SimError> {
    if values.is_empty() {
        return Err(SimError::EmptySample);
    }
    let median = median_of(values);
    let deviations: Vec<f64> = values.iter().map(|v| (v - median).abs()).collect();
    let mad = 1.4826 * median_of(&deviations);
    let n = values.len();
    let variance = if n > 1 {
        let mean = values.iter().sum::<f64>() / n as f64;
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Ok(RobustSummary {
        median,
        mad,
        variance,
    })
}

fn median_of(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Summaries of one parameter under one estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSummary {
    pub median_estimate: f64,
    /// Median of the reported standard errors across retained replicates;
    /// `None` when no retained replicate carried one.
    pub median_se: Option<f64>,
    /// Scaled MAD of the estimates.
    pub mad: f64,
    /// Sample variance of the estimates (the efficiency numerator or
    /// denominator).
    pub variance: f64,
}

/// Everything [`run_study`] reports for one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub cell: StudyCell,
    pub partial_p: ParamSummary,
    pub partial_psi: ParamSummary,
    pub full_p: ParamSummary,
    pub full_psi: ParamSummary,
    /// `Var(full)/Var(partial)` across retained replicates; `None` when the
    /// partial variance vanishes.
    pub efficiency_p: Option<f64>,
    pub efficiency_psi: Option<f64>,
    /// Squared MAD ratios: a robust companion to the variance ratios.
    pub efficiency_mad_p: Option<f64>,
    pub efficiency_mad_psi: Option<f64>,
    /// Replicates entering the summaries.
    pub n_used: usize,
    /// Replicates dropped (failed fits, or boundary fits under
    /// `drop_boundary`).
    pub n_dropped: usize,
}

/// Per-replicate outcomes retained for summarizing: estimates and SEs for
/// (partial p, partial ψ, full p, full ψ). Missing SEs travel as NaN and
/// are filtered before the SE medians.
type Outcome = [f64; 8];

/// Runs every replicate of one cell and summarizes the two estimators
/// side by side.
///
/// A replicate is retained when both the partial and the full fit succeed,
/// and — with `drop_boundary` — neither sits at a boundary (`ψ̂ ≥ 1` or
/// `p̂ ∈ {0, 1}`). Failed fits (no detections, all-singleton detections,
/// `b = 0`, every site detected) are always dropped and counted. Replicates
/// run in parallel but the result is bit-identical run to run and across
/// thread counts, because each replicate owns stream `i` of the cell seed
/// and the collected order is the replicate order.
pub fn run_study(
    cell: &StudyCell,
    drop_boundary: bool,
    settings: &OptimSettings,
) -> Result<StudySummary, SimError> {
    cell.validate()?;
    let outcomes: Vec<Option<Outcome>> = (0..cell.n_sim)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cell.seed);
            rng.set_stream(i as u64);
            let history = simulate_history(cell.sites, cell.occasions, cell.psi, cell.p, &mut rng);
            let stats = history.stats();
            let partial = fit_partial(&stats).ok()?;
            let full = fit_full(&stats, settings).ok()?;
            if drop_boundary && (partial.boundary_flag || full.boundary_flag) {
                return None;
            }
            Some([
                partial.p_hat,
                partial.psi_hat,
                partial.se_p.unwrap_or(f64::NAN),
                partial.se_psi.unwrap_or(f64::NAN),
                full.p_hat,
                full.psi_hat,
                full.se_p.unwrap_or(f64::NAN),
                full.se_psi.unwrap_or(f64::NAN),
            ])
        })
        .collect();

    let kept: Vec<Outcome> = outcomes.into_iter().flatten().collect();
    let n_used = kept.len();
    if n_used == 0 {
        return Err(SimError::AllDropped { total: cell.n_sim });
    }
    let column = |j: usize| kept.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let summarize = |est_col: usize, se_col: usize| {
        let est = robust_summaries(&column(est_col)).expect("kept is non-empty");
        let ses: Vec<f64> = column(se_col).into_iter().filter(|v| v.is_finite()).collect();
        ParamSummary {
            median_estimate: est.median,
            median_se: if ses.is_empty() {
                None
            } else {
                Some(median_of(&ses))
            },
            mad: est.mad,
            variance: est.variance,
        }
    };
    let partial_p = summarize(0, 2);
    let partial_psi = summarize(1, 3);
    let full_p = summarize(4, 6);
    let full_psi = summarize(5, 7);
    let ratio = |num: f64, den: f64| if den > 0.0 { Some(num / den) } else { None };
    Ok(StudySummary {
        cell: *cell,
        efficiency_p: ratio(full_p.variance, partial_p.variance),
        efficiency_psi: ratio(full_psi.variance, partial_psi.variance),
        efficiency_mad_p: ratio(full_p.mad * full_p.mad, partial_p.mad * partial_p.mad),
        efficiency_mad_psi: ratio(full_psi.mad * full_psi.mad, partial_psi.mad * partial_psi.mad),
        partial_p,
        partial_psi,
        full_p,
        full_psi,
        n_used,
        n_dropped: cell.n_sim - n_used,
    })
}
