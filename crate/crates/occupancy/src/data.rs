//! Detection histories and the sufficient statistics that summarize them.
//!
//! A detection history is an `S × τ` binary matrix: one row per site, one
//! column per survey occasion, with a 1 wherever the species was detected.
//! Under the homogeneous model every likelihood in this crate depends on the
//! matrix only through a handful of counts, collected in [`SuffStats`]:
//!
//! * `S`  — number of sites,
//! * `τ`  — number of occasions per site,
//! * `f0` — sites with no detections at all,
//! * `y`  — total detections over all sites and occasions,
//! * `b`  — total occasions strictly after the first detection, summed over
//!   detected sites (needed only by the partial estimator).
//!
//! Two derived counts recur in the formulas: `O = S − f0`, the number of
//! sites with at least one detection, and `a = Oτ − O − b`, the occasions
//! strictly before the first detection.

use serde::Serialize;
use thiserror::Error;

/// Errors from building histories or sufficient statistics.
#[derive(Debug, Error)]
pub enum DataError {
    /// The matrix has no rows or no columns.
    #[error("detection history is empty")]
    Empty,
    /// A row's length differs from the first row's.
    #[error("row {row} has {got} occasions; expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    /// A cell holds something other than 0 or 1.
    #[error("cell at row {row}, column {col} is {value}; detections must be 0 or 1")]
    NonBinaryCell { row: usize, col: usize, value: u8 },
    /// A count inequality required of sufficient statistics fails.
    #[error("invalid sufficient statistics: {0}")]
    InvariantViolation(String),
}

/// A binary site-by-occasion detection matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionHistory {
    cells: Vec<u8>,
    sites: usize,
    occasions: usize,
}

impl DetectionHistory {
    /// Builds a history from one row per site, validating that the matrix is
    /// non-empty, rectangular, and strictly 0/1. Row and column numbers in
    /// errors are 1-based.
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self, DataError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(DataError::Empty);
        }
        let occasions = rows[0].len();
        let mut cells = Vec::with_capacity(rows.len() * occasions);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != occasions {
                return Err(DataError::RaggedRow {
                    row: r + 1,
                    got: row.len(),
                    expected: occasions,
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(DataError::NonBinaryCell {
                        row: r + 1,
                        col: c + 1,
                        value: v,
                    });
                }
                cells.push(v);
            }
        }
        Ok(Self {
            cells,
            sites: rows.len(),
            occasions,
        })
    }

    /// Number of sites (rows).
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Number of occasions (columns).
    pub fn occasions(&self) -> usize {
        self.occasions
    }

    /// The 0/1 detections for one site (0-based index).
    pub fn row(&self, site: usize) -> &[u8] {
        let start = site * self.occasions;
        &self.cells[start..start + self.occasions]
    }

    /// Collapses the matrix to the counts the likelihoods need.
    pub fn stats(&self) -> SuffStats {
        SuffStats::from_history(self)
    }
}

/// The sufficient statistics `(S, τ, f0, y, b)` of a detection history.
///
/// `b` is optional because aggregated data sets often report only
/// `(S, τ, f0, y)`; everything except the partial estimator works without
/// it. Constructed values always satisfy the count inequalities below, so
/// downstream code can divide without re-checking:
///
/// * `S ≥ 1`, `τ ≥ 1`, `f0 ≤ S`;
/// * `O ≤ y ≤ Oτ` where `O = S − f0`, with `y = 0` forced when `O = 0`;
/// * when `b` is present, `y − O ≤ b ≤ O(τ − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuffStats {
    #[serde(rename = "S")]
    sites: usize,
    #[serde(rename = "tau")]
    occasions: usize,
    f0: usize,
    y: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<u64>,
}

impl SuffStats {
    /// Validates the count inequalities and builds the statistics. Error
    /// messages name the first inequality that fails.
    pub fn new(
        sites: usize,
        occasions: usize,
        f0: usize,
        y: u64,
        b: Option<u64>,
    ) -> Result<Self, DataError> {
        let fail = |msg: String| Err(DataError::InvariantViolation(msg));
        if sites == 0 {
            return fail("S >= 1 fails: S = 0".into());
        }
        if occasions == 0 {
            return fail("tau >= 1 fails: tau = 0".into());
        }
        if f0 > sites {
            return fail(format!("f0 <= S fails: f0 = {f0}, S = {sites}"));
        }
        let o = (sites - f0) as u64;
        let o_tau = o * occasions as u64;
        if o == 0 && y != 0 {
            return fail(format!("y = 0 when O = 0 fails: y = {y}"));
        }
        if y < o {
            return fail(format!("O <= y fails: O = {o}, y = {y}"));
        }
        if y > o_tau {
            return fail(format!("y <= O*tau fails: y = {y}, O*tau = {o_tau}"));
        }
        if let Some(b) = b {
            let b_max = o * (occasions as u64 - 1);
            if b > b_max {
                return fail(format!(
                    "b <= O*(tau-1) fails: b = {b}, O*(tau-1) = {b_max}"
                ));
            }
            if y - o > b {
                return fail(format!("y - O <= b fails: y - O = {}, b = {b}", y - o));
            }
        }
        Ok(Self {
            sites,
            occasions,
            f0,
            y,
            b,
        })
    }

    /// Counts the statistics directly from a matrix; `b` is always present
    /// on this path.
    pub fn from_history(history: &DetectionHistory) -> Self {
        let tau = history.occasions();
        let mut f0 = 0usize;
        let mut y = 0u64;
        let mut b = 0u64;
        for site in 0..history.sites() {
            let row = history.row(site);
            match row.iter().position(|&v| v == 1) {
                None => f0 += 1,
                Some(first) => {
                    y += row.iter().map(|&v| u64::from(v)).sum::<u64>();
                    b += (tau - 1 - first) as u64;
                }
            }
        }
        Self {
            sites: history.sites(),
            occasions: tau,
            f0,
            y,
            b: Some(b),
        }
    }

    /// `S`: number of sites.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `τ`: occasions per site.
    pub fn occasions(&self) -> usize {
        self.occasions
    }

    /// `f0`: sites with zero detections.
    pub fn f0(&self) -> usize {
        self.f0
    }

    /// `O = S − f0`: sites with at least one detection.
    pub fn detected(&self) -> usize {
        self.sites - self.f0
    }

    /// `y`: total detections.
    pub fn y(&self) -> u64 {
        self.y
    }

    /// `b`: occasions strictly after the first detection, summed over
    /// detected sites. `None` when the data arrived pre-aggregated without it.
    pub fn b(&self) -> Option<u64> {
        self.b
    }

    /// `a = Oτ − O − b`: occasions strictly before the first detection.
    pub fn a(&self) -> Option<u64> {
        let o = self.detected() as u64;
        self.b.map(|b| o * self.occasions as u64 - o - b)
    }
}
