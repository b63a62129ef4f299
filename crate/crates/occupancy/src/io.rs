//! File formats: detection-history CSV, sufficient-statistics JSON, study
//! configuration JSON, and the emitters for fit, study, and sensitivity
//! output.
//!
//! Parsers report positions in user coordinates — 1-based physical rows and
//! columns of the file as the user sees it — and refuse anything ambiguous:
//! a history cell must be exactly `0` or `1`, and a leading header row is
//! skipped only when none of its tokens parses as a number.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::data::{DataError, DetectionHistory, SuffStats};
use crate::fit::FitResult;
use crate::sensitivity::SensitivityProfile;
use crate::sim::{StudyCell, StudySummary};

/// Output encodings shared by the emitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Failures while reading or decoding input files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path} is empty")]
    EmptyFile { path: PathBuf },
    /// A history cell that is not literally `0` or `1`.
    #[error("row {row}, column {col}: expected 0 or 1, found {token:?}")]
    MalformedCell {
        row: usize,
        col: usize,
        token: String,
    },
    #[error("row {row} has {got} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    /// A study cell that fails validation, located by its array index.
    #[error("study cell {index}: {message}")]
    InvalidCell { index: usize, message: String },
    #[error(transparent)]
    Data(#[from] DataError),
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim().is_empty() {
        return Err(IoError::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(text)
}

/// Reads a comma-separated detection history: one row per site, cells `0`
/// or `1`. Blank lines are ignored; a first row whose tokens are all
/// non-numeric (e.g. `occ1,occ2,occ3`) is treated as a header and skipped.
/// Error positions refer to physical file rows, counted from 1.
pub fn parse_history_csv(path: &Path) -> Result<DetectionHistory, IoError> {
    let text = read_to_string(path)?;
    // (physical row number, tokens)
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| (i + 1, line.split(',').map(str::trim).collect()))
        .collect();
    if rows.is_empty() {
        return Err(IoError::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    let is_header = rows[0].1.iter().all(|tok| tok.parse::<f64>().is_err());
    let data_rows = if is_header && rows.len() > 1 {
        &rows[1..]
    } else {
        &rows[..]
    };
    let expected = data_rows[0].1.len();
    let mut matrix = Vec::with_capacity(data_rows.len());
    for (row_no, tokens) in data_rows {
        if tokens.len() != expected {
            return Err(IoError::RaggedRows {
                row: *row_no,
                got: tokens.len(),
                expected,
            });
        }
        let mut row = Vec::with_capacity(expected);
        for (j, tok) in tokens.iter().enumerate() {
            match *tok {
                "0" => row.push(0u8),
                "1" => row.push(1u8),
                other => {
                    return Err(IoError::MalformedCell {
                        row: *row_no,
                        col: j + 1,
                        token: other.to_string(),
                    })
                }
            }
        }
        matrix.push(row);
    }
    Ok(DetectionHistory::from_rows(matrix)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStats {
    #[serde(rename = "S")]
    sites: usize,
    tau: usize,
    f0: usize,
    y: u64,
    #[serde(default)]
    b: Option<u64>,
}

/// Reads sufficient statistics from JSON: `{"S": …, "tau": …, "f0": …,
/// "y": …, "b": …}` with `b` optional. The count inequalities are checked
/// and violations are reported by name.
pub fn parse_suffstats_json(path: &Path) -> Result<SuffStats, IoError> {
    let text = read_to_string(path)?;
    let raw: RawStats = serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(SuffStats::new(raw.sites, raw.tau, raw.f0, raw.y, raw.b)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    #[serde(rename = "S")]
    sites: usize,
    tau: usize,
    psi: f64,
    p: f64,
    n_sim: usize,
    #[serde(default)]
    seed: Option<u64>,
}

/// Reads a study configuration: a JSON array of cells. A cell may pin its
/// own `seed`; cells without one get `default_seed + index` so distinct
/// cells never share streams by accident.
pub fn parse_study_config(path: &Path, default_seed: u64) -> Result<Vec<StudyCell>, IoError> {
    let text = read_to_string(path)?;
    let raw: Vec<RawCell> = serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cells = Vec::with_capacity(raw.len());
    for (index, rc) in raw.into_iter().enumerate() {
        let cell = StudyCell {
            sites: rc.sites,
            occasions: rc.tau,
            psi: rc.psi,
            p: rc.p,
            n_sim: rc.n_sim,
            seed: rc.seed.unwrap_or(default_seed.wrapping_add(index as u64)),
        };
        cell.validate().map_err(|e| IoError::InvalidCell {
            index,
            message: e.to_string(),
        })?;
        cells.push(cell);
    }
    Ok(cells)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders fit results as a JSON array (round-trippable via serde) or as
/// CSV with one row per method. Empty CSV fields mean the standard error
/// was unavailable.
pub fn emit_fit(results: &[FitResult], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(results).expect("fit results serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from(
                "method,psi_hat,se_psi,p_hat,se_p,theta_hat,eta_hat,converged,iterations,boundary_flag\n",
            );
            for r in results {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.method,
                    r.psi_hat,
                    fmt_opt(r.se_psi),
                    r.p_hat,
                    fmt_opt(r.se_p),
                    r.theta_hat,
                    r.eta_hat,
                    r.converged,
                    r.iterations,
                    r.boundary_flag
                );
            }
            out
        }
    }
}

/// Renders study summaries. The CSV form prints five statistic rows per
/// cell — `median_estimate`, `median_se`, `mad`, `efficiency`,
/// `efficiency_mad` — with the efficiency ratios carried in the partial
/// columns and the full columns left empty on those rows.
pub fn emit_study(summaries: &[StudySummary], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(summaries).expect("summaries serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from(
                "S,tau,psi_true,p_true,n_sim,seed,statistic,partial_p,partial_psi,full_p,full_psi,n_used,n_dropped\n",
            );
            for s in summaries {
                let c = &s.cell;
                let prefix = format!(
                    "{},{},{},{},{},{}",
                    c.sites, c.occasions, c.psi, c.p, c.n_sim, c.seed
                );
                let suffix = format!("{},{}", s.n_used, s.n_dropped);
                let _ = writeln!(
                    out,
                    "{prefix},median_estimate,{},{},{},{},{suffix}",
                    s.partial_p.median_estimate,
                    s.partial_psi.median_estimate,
                    s.full_p.median_estimate,
                    s.full_psi.median_estimate
                );
                let _ = writeln!(
                    out,
                    "{prefix},median_se,{},{},{},{},{suffix}",
                    fmt_opt(s.partial_p.median_se),
                    fmt_opt(s.partial_psi.median_se),
                    fmt_opt(s.full_p.median_se),
                    fmt_opt(s.full_psi.median_se)
                );
                let _ = writeln!(
                    out,
                    "{prefix},mad,{},{},{},{},{suffix}",
                    s.partial_p.mad, s.partial_psi.mad, s.full_p.mad, s.full_psi.mad
                );
                let _ = writeln!(
                    out,
                    "{prefix},efficiency,{},{},,,{suffix}",
                    fmt_opt(s.efficiency_p),
                    fmt_opt(s.efficiency_psi)
                );
                let _ = writeln!(
                    out,
                    "{prefix},efficiency_mad,{},{},,,{suffix}",
                    fmt_opt(s.efficiency_mad_p),
                    fmt_opt(s.efficiency_mad_psi)
                );
            }
            out
        }
    }
}

/// Renders a sensitivity profile as CSV: one row per grid point, plus an
/// interpolated marker row when `marker_p` is given (flagged in the
/// `is_marker` column, inserted in grid order).
pub fn emit_sensitivity(profile: &SensitivityProfile, marker_p: Option<f64>) -> String {
    let mut rows: Vec<(f64, f64, f64, bool)> = profile
        .points
        .iter()
        .map(|pt| (pt.p, pt.psi_bar, pt.derivative, false))
        .collect();
    if let Some(mp) = marker_p {
        let marker = profile.evaluate(mp);
        let at = rows.partition_point(|r| r.0 < mp);
        rows.insert(at, (marker.p, marker.psi_bar, marker.derivative, true));
    }
    let mut out = String::from("p,psi_bar,derivative,exceeds_one,is_marker\n");
    for (p, psi_bar, derivative, is_marker) in rows {
        let _ = writeln!(
            out,
            "{p},{psi_bar},{derivative},{},{is_marker}",
            psi_bar > 1.0
        );
    }
    out
}

/// Renders a detection history as bare CSV rows of `0`/`1`.
pub fn emit_history_csv(history: &DetectionHistory) -> String {
    let mut out = String::new();
    for site in 0..history.sites() {
        let cells: Vec<String> = history.row(site).iter().map(u8::to_string).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
