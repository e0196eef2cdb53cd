//! On-disk state files and report documents.
//!
//! A state file is a single self-describing JSON document: the party
//! dimensions plus a row-major D x D array of [re, im] pairs, where
//! `matrix[i-1][j-1]` is the 1-based entry (i, j). Serialization uses the
//! shortest round-trip decimal form, so gen -> check reproduces the
//! in-memory matrix bit for bit.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use sepcrit::criteria::CriterionReport;
use sepcrit::oracle::OracleSummary;
use sepcrit::{DensityMatrix, Error, Implication, SubsystemDims, ValidationConfig};

/// Entries below this magnitude are written as 0.
const TINY_FLUSH: f64 = 1e-300;

#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    /// Row-major D x D array of [re, im] pairs, 1-based semantics:
    /// matrix[i-1][j-1] holds rho_{i,j}.
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<StateMetadata>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
pub struct StateMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix, metadata: Option<StateMetadata>) -> Self {
        let d = rho.total();
        let flush = |x: f64| if x.abs() < TINY_FLUSH { 0.0 } else { x };
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let z = rho.matrix()[(i, j)];
                        [flush(z.re), flush(z.im)]
                    })
                    .collect()
            })
            .collect();
        Self {
            dims: rho.dims().dims().to_vec(),
            matrix,
            metadata,
        }
    }

    pub fn to_state(&self, cfg: &ValidationConfig) -> sepcrit::Result<DensityMatrix> {
        let dims = SubsystemDims::new(self.dims.clone())?;
        let d = dims.total();
        if self.matrix.len() != d || self.matrix.iter().any(|row| row.len() != d) {
            return Err(Error::DimensionMismatch {
                rows: self.matrix.len(),
                cols: self.matrix.first().map_or(0, |r| r.len()),
                expected: d,
            });
        }
        let m = DMatrix::from_fn(d, d, |i, j| {
            Complex64::new(self.matrix[i][j][0], self.matrix[i][j][1])
        });
        DensityMatrix::build(dims, m, cfg)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: String,
    pub implication: String,
    pub tolerance: f64,
}

impl From<&CriterionReport> for CriterionRecord {
    fn from(r: &CriterionReport) -> Self {
        Self {
            id: r.id.short_id().to_string(),
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            verdict: r.verdict.as_str().to_string(),
            implication: r.implication.as_str().to_string(),
            tolerance: r.tolerance,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SkippedRecord {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub input: String,
    pub dims: Vec<usize>,
    pub tolerance: f64,
    pub criteria: Vec<CriterionRecord>,
    pub skipped: Vec<SkippedRecord>,
    /// Strongest certified class: genuine-multipartite-entangled if any
    /// biseparability criterion is violated, else not-fully-separable if
    /// any full-separability criterion is, else inconclusive.
    pub overall: String,
}

impl ReportFile {
    pub fn new(
        input: String,
        dims: Vec<usize>,
        tolerance: f64,
        reports: &[CriterionReport],
        skipped: Vec<SkippedRecord>,
    ) -> Self {
        let overall = if reports
            .iter()
            .any(|r| r.implication == Implication::GenuineMultipartiteEntangled)
        {
            Implication::GenuineMultipartiteEntangled
        } else if reports
            .iter()
            .any(|r| r.implication == Implication::NotFullySeparable)
        {
            Implication::NotFullySeparable
        } else {
            Implication::Inconclusive
        };
        Self {
            input,
            dims,
            tolerance,
            criteria: reports.iter().map(CriterionRecord::from).collect(),
            skipped,
            overall: overall.as_str().to_string(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {}", self.input);
        let _ = writeln!(out, "dims: {:?}", self.dims);
        let _ = writeln!(out, "tolerance: {:?}", self.tolerance);
        for c in &self.criteria {
            let _ = writeln!(
                out,
                "criterion {}: lhs = {:?}  rhs = {:?}  margin = {:?}  verdict = {}  implication = {}",
                c.id, c.lhs, c.rhs, c.margin, c.verdict, c.implication
            );
        }
        for s in &self.skipped {
            let _ = writeln!(out, "skipped {}: {}", s.id, s.reason);
        }
        let _ = writeln!(out, "overall: {}", self.overall);
        out
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub criterion: String,
    pub n: usize,
    pub p_bisection: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_closed_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
}

impl ThresholdReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "criterion: {}", self.criterion);
        let _ = writeln!(out, "n: {}", self.n);
        let _ = writeln!(out, "p_bisection: {:?}", self.p_bisection);
        if let (Some(p), Some(diff)) = (self.p_closed_form, self.difference) {
            let _ = writeln!(out, "p_closed_form: {p:?}");
            let _ = writeln!(out, "difference: {diff:?}");
        }
        out
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OracleRow {
    pub mode: String,
    pub criterion: String,
    pub samples: usize,
    pub violations: usize,
    pub max_margin: f64,
    pub max_abs_margin: f64,
    pub worst_sample: usize,
    pub worst_seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OracleReportFile {
    pub dims: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_terms: usize,
    pub rows: Vec<OracleRow>,
    pub total_violations: usize,
    pub sound: bool,
}

impl OracleReportFile {
    pub fn new(
        dims: Vec<usize>,
        samples: usize,
        seed: u64,
        max_terms: usize,
        summary: &OracleSummary,
    ) -> Self {
        let rows = summary
            .rows
            .iter()
            .map(|r| OracleRow {
                mode: r.mode.clone(),
                criterion: r.criterion.short_id().to_string(),
                samples: r.samples,
                violations: r.violations,
                max_margin: r.max_margin,
                max_abs_margin: r.max_abs_margin,
                worst_sample: r.worst_sample,
                worst_seed: r.worst_seed,
            })
            .collect();
        Self {
            dims,
            samples,
            seed,
            tolerance: summary.tol,
            max_terms,
            rows,
            total_violations: summary.total_violations(),
            sound: summary.is_sound(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dims: {:?}", self.dims);
        let _ = writeln!(out, "samples: {}", self.samples);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "tolerance: {:?}", self.tolerance);
        let _ = writeln!(out, "max_terms: {}", self.max_terms);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "mode {}, criterion {}: violations = {}, max_margin = {:?}, max_abs_margin = {:?}, worst_sample = {}, worst_seed = {}",
                r.mode, r.criterion, r.violations, r.max_margin, r.max_abs_margin, r.worst_sample, r.worst_seed
            );
        }
        let _ = writeln!(out, "total_violations: {}", self.total_violations);
        let _ = writeln!(out, "sound: {}", self.sound);
        out
    }
}
