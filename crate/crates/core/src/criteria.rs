//! The element-wise entanglement criteria and their verdicts.
//!
//! Each check compares one coherence functional of the matrix entries (lhs)
//! against a population functional (rhs) and reports the margin lhs - rhs.
//! A margin above tolerance certifies the entanglement class the criterion
//! detects; a satisfied criterion is inconclusive. The one exception is the
//! exact classifier [`classify_ghz_noise`], which is both necessary and
//! sufficient on the GHZ-with-white-noise family.

use std::fmt;

use crate::density_matrix::DensityMatrix;
use crate::state_factory::{ghz_white_noise, NoiseFamilyParams};
use crate::tensor_index::{
    corner_indices, mirror_index, pair_excitation_index, single_excitation_indices,
};
use crate::{Error, Result};

/// Default decision tolerance: a criterion counts as violated only when
/// lhs - rhs exceeds this, so rounding noise never claims entanglement.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Identifies one of the implemented criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionId {
    /// Anti-diagonal biseparability bound, all-qubit systems (`t1`).
    BisepQubitT1,
    /// Anti-diagonal biseparability bound, general qudit systems (`t2`).
    BisepQuditT2,
    /// Single-excitation biseparability bound, qubits only (`t3`).
    WTypeT3,
    /// Anti-diagonal full-separability bound, all-qubit systems (`t4a`).
    FullSepGhzTypeT4a,
    /// Single-excitation full-separability bound, qubits only (`t4b`).
    FullSepWTypeT4b,
    /// Exact classifier of the GHZ-with-white-noise family (`t5`).
    GhzNoiseExactT5,
    /// Anti-diagonal full-separability bound, general qudit systems (`t6`).
    FullSepQuditT6,
}

impl CriterionId {
    pub const ALL: [CriterionId; 7] = [
        CriterionId::BisepQubitT1,
        CriterionId::BisepQuditT2,
        CriterionId::WTypeT3,
        CriterionId::FullSepGhzTypeT4a,
        CriterionId::FullSepWTypeT4b,
        CriterionId::GhzNoiseExactT5,
        CriterionId::FullSepQuditT6,
    ];

    /// Lowercase short id used in CLIs and reports.
    pub fn short_id(self) -> &'static str {
        match self {
            CriterionId::BisepQubitT1 => "t1",
            CriterionId::BisepQuditT2 => "t2",
            CriterionId::WTypeT3 => "t3",
            CriterionId::FullSepGhzTypeT4a => "t4a",
            CriterionId::FullSepWTypeT4b => "t4b",
            CriterionId::GhzNoiseExactT5 => "t5",
            CriterionId::FullSepQuditT6 => "t6",
        }
    }

    pub fn from_short_id(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|id| id.short_id() == s)
    }

    /// Entanglement class a violation of this criterion certifies.
    pub fn detects(self) -> Implication {
        match self {
            CriterionId::BisepQubitT1 | CriterionId::BisepQuditT2 | CriterionId::WTypeT3 => {
                Implication::GenuineMultipartiteEntangled
            }
            CriterionId::FullSepGhzTypeT4a
            | CriterionId::FullSepWTypeT4b
            | CriterionId::GhzNoiseExactT5
            | CriterionId::FullSepQuditT6 => Implication::NotFullySeparable,
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Violated,
    Satisfied,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Violated => "violated",
            Verdict::Satisfied => "satisfied",
        }
    }
}

/// What a criterion outcome says about the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Implication {
    GenuineMultipartiteEntangled,
    NotFullySeparable,
    FullySeparable,
    Inconclusive,
}

impl Implication {
    pub fn as_str(self) -> &'static str {
        match self {
            Implication::GenuineMultipartiteEntangled => "genuine-multipartite-entangled",
            Implication::NotFullySeparable => "not-fully-separable",
            Implication::FullySeparable => "fully-separable",
            Implication::Inconclusive => "inconclusive",
        }
    }
}

/// Outcome of evaluating a single criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionReport {
    pub id: CriterionId,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs; positive beyond tolerance means violated.
    pub margin: f64,
    pub verdict: Verdict,
    pub implication: Implication,
    pub tolerance: f64,
}

impl CriterionReport {
    fn evaluate(id: CriterionId, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        let verdict = if margin > tolerance {
            Verdict::Violated
        } else {
            Verdict::Satisfied
        };
        let implication = match verdict {
            Verdict::Violated => id.detects(),
            Verdict::Satisfied => Implication::Inconclusive,
        };
        Self {
            id,
            lhs,
            rhs,
            margin,
            verdict,
            implication,
            tolerance,
        }
    }
}

/// Tiny negative populations (inside validation tolerance) must not poison
/// square roots or logarithms.
fn clamped(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

fn require_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().all_qubits() {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension {
            dims: rho.dims().dims().to_vec(),
        })
    }
}

/// Biseparability bound on the anti-diagonal coherence:
///
/// ```text
/// |rho_{1,D}| <= (1/2) sum_{i in A} sqrt(rho_{i,i} rho_{D-i+1,D-i+1})
/// ```
///
/// with A the corner index set. Every biseparable state satisfies it, so a
/// violation certifies genuine multipartite entanglement. Reported as `t1`
/// on all-qubit systems (where A is all of 2..=D-1) and `t2` otherwise.
pub fn check_bisep_qudit(rho: &DensityMatrix, tol: f64) -> CriterionReport {
    let d = rho.total();
    let lhs = rho.at(1, d).norm();
    let corners = corner_indices(rho.dims());
    let mut sum = 0.0;
    for &i in &corners {
        let m = mirror_index(i, d).expect("corner index in range");
        sum += (clamped(rho.diag(i)) * clamped(rho.diag(m))).sqrt();
    }
    let rhs = 0.5 * sum;
    let id = if rho.dims().all_qubits() {
        CriterionId::BisepQubitT1
    } else {
        CriterionId::BisepQuditT2
    };
    CriterionReport::evaluate(id, lhs, rhs, tol)
}

/// Biseparability bound on the single-excitation coherences of an n-qubit
/// state (`t3`):
///
/// ```text
/// sum_{j<i} |rho_{r_i,r_j}| <= sum_{j<i} sqrt(rho_{1,1} rho_{q_ij,q_ij})
///                              + (n-2)/2 * sum_i rho_{r_i,r_i}
/// ```
///
/// where r_k = 2^(n-k) + 1 and q_ij = 2^(n-i) + 2^(n-j) + 1. This is the
/// detector that catches W-type entanglement, which has no anti-diagonal
/// coherence at all.
pub fn check_w_type(rho: &DensityMatrix, tol: f64) -> Result<CriterionReport> {
    require_qubits(rho)?;
    let n = rho.dims().n();
    let r = single_excitation_indices(n);
    let ground = clamped(rho.diag(1));
    let mut lhs = 0.0;
    let mut cross = 0.0;
    for i in 2..=n {
        for j in 1..i {
            lhs += rho.at(r[i - 1], r[j - 1]).norm();
            let q = pair_excitation_index(i, j, n).expect("i > j");
            cross += (ground * clamped(rho.diag(q))).sqrt();
        }
    }
    let populations: f64 = r.iter().map(|&ri| rho.diag(ri)).sum();
    let rhs = cross + (n as f64 - 2.0) / 2.0 * populations;
    Ok(CriterionReport::evaluate(
        CriterionId::WTypeT3,
        lhs,
        rhs,
        tol,
    ))
}

/// Full-separability bound on the anti-diagonal coherence:
///
/// ```text
/// |rho_{1,D}| <= (prod_{i in A} rho_{i,i})^(1/(2^n - 2))
/// ```
///
/// The geometric mean is computed in the log domain (the direct product of
/// 2^n - 2 factors of size ~2^-n underflows near n = 12), with an early
/// exit to 0 on any vanishing factor. Equality holds for every pure product
/// state. Reported as `t4a` on all-qubit systems and `t6` otherwise; a
/// violation certifies the state is not fully separable.
pub fn check_fullsep_ghz_type(rho: &DensityMatrix, tol: f64) -> CriterionReport {
    let d = rho.total();
    let lhs = rho.at(1, d).norm();
    let corners = corner_indices(rho.dims());
    let mut log_sum = 0.0;
    let mut vanishes = false;
    for &i in &corners {
        let x = clamped(rho.diag(i));
        if x == 0.0 {
            vanishes = true;
            break;
        }
        log_sum += x.ln();
    }
    let rhs = if vanishes {
        0.0
    } else {
        (log_sum / corners.len() as f64).exp()
    };
    let id = if rho.dims().all_qubits() {
        CriterionId::FullSepGhzTypeT4a
    } else {
        CriterionId::FullSepQuditT6
    };
    CriterionReport::evaluate(id, lhs, rhs, tol)
}

/// Full-separability bound on the single-excitation coherences of an
/// n-qubit state (`t4b`):
///
/// ```text
/// sum_{j<i} |rho_{r_i,r_j}| <= sum_{j<i} sqrt(rho_{1,1} rho_{q_ij,q_ij})
/// ```
///
/// Each summand is an equality on pure product states.
pub fn check_fullsep_w_type(rho: &DensityMatrix, tol: f64) -> Result<CriterionReport> {
    require_qubits(rho)?;
    let n = rho.dims().n();
    let r = single_excitation_indices(n);
    let ground = clamped(rho.diag(1));
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 2..=n {
        for j in 1..i {
            lhs += rho.at(r[i - 1], r[j - 1]).norm();
            let q = pair_excitation_index(i, j, n).expect("i > j");
            rhs += (ground * clamped(rho.diag(q))).sqrt();
        }
    }
    Ok(CriterionReport::evaluate(
        CriterionId::FullSepWTypeT4b,
        lhs,
        rhs,
        tol,
    ))
}

/// Verdict of the exact noise-family classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseClass {
    FullySeparable,
    Entangled,
}

impl NoiseClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseClass::FullySeparable => "fully-separable",
            NoiseClass::Entangled => "entangled",
        }
    }
}

/// Exact classification of the GHZ-with-white-noise family, with the
/// threshold and the backing criterion report.
#[derive(Debug, Clone)]
pub struct NoiseClassification {
    pub class: NoiseClass,
    /// The family is fully separable exactly for p >= p_star.
    pub p_star: f64,
    pub report: CriterionReport,
}

/// Threshold p* = 1 - 1/(2^(n-1) + 1) of the white-noise family.
pub fn ghz_noise_threshold(n: usize) -> f64 {
    1.0 - 1.0 / ((1u64 << (n - 1)) as f64 + 1.0)
}

/// Slack applied to the p >= p* comparison. p and p* each carry a rounding
/// error of a few ulps from their own arithmetic routes (e.g. 2.0/3.0 lands
/// one ulp below 1.0 - 1.0/3.0), and an exact-boundary case must not flip
/// to Entangled over that.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Classify rho(p) = (1-p)|GHZ_n><GHZ_n| + (p/2^n) I exactly: fully
/// separable iff p >= p*. The anti-diagonal full-separability bound is both
/// necessary and sufficient on this family, so the classification is also
/// cross-checked against [`check_fullsep_ghz_type`] on the constructed
/// matrix; a violated bound on the fully separable side is reported as a
/// numeric failure.
pub fn classify_ghz_noise(params: &NoiseFamilyParams, tol: f64) -> Result<NoiseClassification> {
    let p_star = ghz_noise_threshold(params.n());
    let class = if params.p() >= p_star - BOUNDARY_SLACK {
        NoiseClass::FullySeparable
    } else {
        NoiseClass::Entangled
    };
    let rho = ghz_white_noise(params);
    let base = check_fullsep_ghz_type(&rho, tol);
    if base.verdict == Verdict::Violated && class == NoiseClass::FullySeparable {
        return Err(Error::NumericFailure(format!(
            "family classification inconsistent: p = {} >= p* = {p_star} but margin = {:e}",
            params.p(),
            base.margin
        )));
    }
    let implication = match (base.verdict, class) {
        (Verdict::Violated, _) => Implication::NotFullySeparable,
        (Verdict::Satisfied, NoiseClass::FullySeparable) => Implication::FullySeparable,
        (Verdict::Satisfied, NoiseClass::Entangled) => Implication::Inconclusive,
    };
    let report = CriterionReport {
        id: CriterionId::GhzNoiseExactT5,
        implication,
        ..base
    };
    Ok(NoiseClassification {
        class,
        p_star,
        report,
    })
}

/// Recognize a matrix of the white-noise family form and recover p.
/// Returns `None` when the system is not all-qubit or any entry deviates
/// from the family pattern by more than `tol`.
pub fn detect_ghz_noise(rho: &DensityMatrix, tol: f64) -> Option<NoiseFamilyParams> {
    if !rho.dims().all_qubits() {
        return None;
    }
    let d = rho.total();
    // every interior diagonal of the family equals p / 2^n
    let p = (rho.diag(2) * d as f64).clamp(0.0, 1.0);
    let params = NoiseFamilyParams::new(rho.dims().n(), p).ok()?;
    let expected = ghz_white_noise(&params);
    for i in 1..=d {
        for j in 1..=d {
            if (rho.at(i, j) - expected.at(i, j)).norm() > tol {
                return None;
            }
        }
    }
    Some(params)
}

/// Dispatch one criterion on a matrix. `t5` additionally requires the
/// matrix to match the white-noise family pattern entry-wise.
pub fn evaluate_criterion(
    id: CriterionId,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<CriterionReport> {
    match id {
        CriterionId::BisepQubitT1 | CriterionId::BisepQuditT2 => Ok(check_bisep_qudit(rho, tol)),
        CriterionId::WTypeT3 => check_w_type(rho, tol),
        CriterionId::FullSepGhzTypeT4a | CriterionId::FullSepQuditT6 => {
            Ok(check_fullsep_ghz_type(rho, tol))
        }
        CriterionId::FullSepWTypeT4b => check_fullsep_w_type(rho, tol),
        CriterionId::GhzNoiseExactT5 => {
            let params = detect_ghz_noise(rho, tol).ok_or_else(|| {
                Error::Inapplicable("t5 classifies only GHZ-with-white-noise family states".into())
            })?;
            Ok(classify_ghz_noise(&params, tol)?.report)
        }
    }
}

/// Margin of `criterion` on the white-noise family at noise weight p.
fn family_margin(criterion: CriterionId, n: usize, p: f64, tol: f64) -> Result<f64> {
    let params = NoiseFamilyParams::new(n, p)?;
    let rho = ghz_white_noise(&params);
    Ok(evaluate_criterion(criterion, &rho, tol)?.margin)
}

/// Bisect for the noise weight where `criterion`'s margin crosses zero on
/// the n-qubit white-noise family. The margin is affine in p on this
/// family, so bisection converges; the endpoints must bracket a sign
/// change. Returns the midpoint of a final interval no wider than `tol`.
pub fn critical_noise(criterion: CriterionId, n: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidParams(format!(
            "need lo < hi, got [{lo}, {hi}]"
        )));
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidParams(format!(
            "bisection tolerance must be positive, got {tol}"
        )));
    }
    let mut lo = lo;
    let mut hi = hi;
    let mut margin_lo = family_margin(criterion, n, lo, DEFAULT_TOLERANCE)?;
    let margin_hi = family_margin(criterion, n, hi, DEFAULT_TOLERANCE)?;
    if margin_lo == 0.0 {
        return Ok(lo);
    }
    if margin_hi == 0.0 {
        return Ok(hi);
    }
    if (margin_lo > 0.0) == (margin_hi > 0.0) {
        return Err(Error::BracketFailure {
            lo,
            hi,
            margin_lo,
            margin_hi,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval hit float resolution
        }
        let margin_mid = family_margin(criterion, n, mid, DEFAULT_TOLERANCE)?;
        if margin_mid == 0.0 {
            return Ok(mid);
        }
        if (margin_mid > 0.0) == (margin_lo > 0.0) {
            lo = mid;
            margin_lo = margin_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density_matrix::ValidationConfig;
    use crate::state_factory::{ghz, ghz_qudit, random_pure_product, w_state};
    use crate::tensor_index::SubsystemDims;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    const TOL: f64 = DEFAULT_TOLERANCE;

    fn maximally_mixed(dims: SubsystemDims) -> DensityMatrix {
        let d = dims.total();
        let m = DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0));
        DensityMatrix::build(dims, m, &ValidationConfig::default()).unwrap()
    }

    #[test]
    fn bisep_detects_ghz() {
        let report = check_bisep_qudit(&ghz(3).unwrap(), TOL);
        assert_eq!(report.id, CriterionId::BisepQubitT1);
        assert_eq!(report.lhs, 0.5);
        assert_eq!(report.rhs, 0.0);
        assert_eq!(report.verdict, Verdict::Violated);
        assert_eq!(
            report.implication,
            Implication::GenuineMultipartiteEntangled
        );
    }

    #[test]
    fn bisep_inconclusive_on_maximally_mixed() {
        let report = check_bisep_qudit(&maximally_mixed(SubsystemDims::qubits(3).unwrap()), TOL);
        assert_eq!(report.lhs, 0.0);
        assert!((report.rhs - 0.375).abs() < 1e-15); // (1/2) * 6 * (1/8)
        assert_eq!(report.verdict, Verdict::Satisfied);
        assert_eq!(report.implication, Implication::Inconclusive);
    }

    #[test]
    fn bisep_margin_vanishes_at_family_crossing() {
        // lhs = rhs on the noise family at p = 2^(n-1)/(2^n - 1)
        let params = NoiseFamilyParams::new(3, 4.0 / 7.0).unwrap();
        let report = check_bisep_qudit(&ghz_white_noise(&params), TOL);
        assert!(report.margin.abs() < 1e-12, "margin = {:e}", report.margin);
    }

    #[test]
    fn bisep_detects_qutrit_ghz() {
        let report = check_bisep_qudit(&ghz_qudit(3, 3).unwrap(), TOL);
        assert_eq!(report.id, CriterionId::BisepQuditT2);
        assert!((report.lhs - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(report.rhs, 0.0);
        assert_eq!(report.verdict, Verdict::Violated);
    }

    #[test]
    fn w_type_detects_w_state() {
        let report = check_w_type(&w_state(3).unwrap(), TOL).unwrap();
        assert!((report.lhs - 1.0).abs() < 1e-12);
        assert!((report.rhs - 0.5).abs() < 1e-12);
        assert_eq!(report.verdict, Verdict::Violated);
        assert_eq!(
            report.implication,
            Implication::GenuineMultipartiteEntangled
        );
    }

    #[test]
    fn w_type_inconclusive_on_mixed_and_ghz() {
        let mixed = check_w_type(&maximally_mixed(SubsystemDims::qubits(3).unwrap()), TOL).unwrap();
        assert_eq!(mixed.lhs, 0.0);
        assert_eq!(mixed.verdict, Verdict::Satisfied);

        // GHZ has no single-excitation support at all: margin exactly 0
        let ghz_report = check_w_type(&ghz(3).unwrap(), TOL).unwrap();
        assert_eq!(ghz_report.lhs, 0.0);
        assert_eq!(ghz_report.rhs, 0.0);
        assert_eq!(ghz_report.verdict, Verdict::Satisfied);
    }

    #[test]
    fn w_type_rejects_qudits() {
        let rho = ghz_qudit(3, 3).unwrap();
        assert!(matches!(
            check_w_type(&rho, TOL),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            check_fullsep_w_type(&rho, TOL),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn fullsep_ghz_type_on_pure_product_is_equality() {
        let dims = SubsystemDims::qubits(3).unwrap();
        for seed in 0..20 {
            let rho = random_pure_product(&dims, seed);
            let report = check_fullsep_ghz_type(&rho, TOL);
            assert!(
                report.margin.abs() <= 1e-10,
                "seed {seed}: margin = {:e}",
                report.margin
            );
        }
    }

    #[test]
    fn fullsep_ghz_type_boundary_case() {
        let params = NoiseFamilyParams::new(3, 0.8).unwrap();
        let report = check_fullsep_ghz_type(&ghz_white_noise(&params), TOL);
        assert!((report.lhs - 0.1).abs() < 1e-15);
        assert!((report.rhs - 0.1).abs() < 1e-12);
        assert!(report.margin.abs() < 1e-12);
        assert_eq!(report.verdict, Verdict::Satisfied);
    }

    #[test]
    fn fullsep_ghz_type_detects_ghz() {
        let report = check_fullsep_ghz_type(&ghz(3).unwrap(), TOL);
        assert_eq!(report.id, CriterionId::FullSepGhzTypeT4a);
        assert_eq!(report.lhs, 0.5);
        assert_eq!(report.rhs, 0.0);
        assert_eq!(report.implication, Implication::NotFullySeparable);
    }

    #[test]
    fn fullsep_w_type_examples() {
        let report = check_fullsep_w_type(&w_state(3).unwrap(), TOL).unwrap();
        assert!((report.lhs - 1.0).abs() < 1e-12);
        assert_eq!(report.rhs, 0.0);
        assert_eq!(report.verdict, Verdict::Violated);

        let dims = SubsystemDims::qubits(3).unwrap();
        for seed in 100..110 {
            let rho = random_pure_product(&dims, seed);
            let report = check_fullsep_w_type(&rho, TOL).unwrap();
            assert!(report.margin.abs() <= 1e-10, "margin = {:e}", report.margin);
        }

        let mixed =
            check_fullsep_w_type(&maximally_mixed(SubsystemDims::qubits(3).unwrap()), TOL).unwrap();
        assert_eq!(mixed.lhs, 0.0);
        assert_eq!(mixed.verdict, Verdict::Satisfied);
    }

    #[test]
    fn classify_noise_family() {
        let at_threshold =
            classify_ghz_noise(&NoiseFamilyParams::new(3, 0.8).unwrap(), TOL).unwrap();
        assert_eq!(at_threshold.class, NoiseClass::FullySeparable);
        assert!((at_threshold.p_star - 0.8).abs() < 1e-15);
        assert_eq!(at_threshold.report.id, CriterionId::GhzNoiseExactT5);
        assert_eq!(at_threshold.report.implication, Implication::FullySeparable);

        let below = classify_ghz_noise(&NoiseFamilyParams::new(3, 0.79).unwrap(), TOL).unwrap();
        assert_eq!(below.class, NoiseClass::Entangled);
        assert_eq!(below.report.verdict, Verdict::Violated);
        assert_eq!(below.report.implication, Implication::NotFullySeparable);

        let two = classify_ghz_noise(&NoiseFamilyParams::new(2, 2.0 / 3.0).unwrap(), TOL).unwrap();
        assert_eq!(two.class, NoiseClass::FullySeparable);
        assert!((two.p_star - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn classification_agrees_with_criterion_margin_on_grid() {
        for n in 2..=8 {
            for k in 0..=100u32 {
                let p = f64::from(k) / 100.0;
                let result =
                    classify_ghz_noise(&NoiseFamilyParams::new(n, p).unwrap(), TOL).unwrap();
                let fully_separable = result.class == NoiseClass::FullySeparable;
                let margin_nonpositive = result.report.margin <= TOL;
                assert_eq!(
                    fully_separable, margin_nonpositive,
                    "n = {n}, p = {p}, margin = {:e}",
                    result.report.margin
                );
            }
        }
    }

    #[test]
    fn critical_noise_bisep_closed_form() {
        for n in [2usize, 3, 4] {
            let expected = (1u64 << (n - 1)) as f64 / ((1u64 << n) as f64 - 1.0);
            let found = critical_noise(CriterionId::BisepQubitT1, n, 0.0, 1.0, 1e-9).unwrap();
            assert!(
                (found - expected).abs() <= 1e-9,
                "n = {n}: found {found}, expected {expected}"
            );
        }
    }

    #[test]
    fn critical_noise_fullsep_matches_threshold() {
        for n in [2usize, 3, 4] {
            let found = critical_noise(CriterionId::FullSepGhzTypeT4a, n, 0.0, 1.0, 1e-9).unwrap();
            assert!((found - ghz_noise_threshold(n)).abs() <= 1e-9);
        }
    }

    #[test]
    fn critical_noise_bracket_failure() {
        // margin is negative on all of [0.9, 1.0] for t1 at n = 3
        let err = critical_noise(CriterionId::BisepQubitT1, 3, 0.9, 1.0, 1e-9).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn detect_noise_family_pattern() {
        let params = NoiseFamilyParams::new(3, 0.37).unwrap();
        let detected = detect_ghz_noise(&ghz_white_noise(&params), 1e-10).unwrap();
        assert_eq!(detected.n(), 3);
        assert!((detected.p() - 0.37).abs() < 1e-12);

        // GHZ is the p = 0 member; W is not in the family
        assert!(detect_ghz_noise(&ghz(3).unwrap(), 1e-10).is_some());
        assert!(detect_ghz_noise(&w_state(3).unwrap(), 1e-10).is_none());
        assert!(detect_ghz_noise(&ghz_qudit(3, 3).unwrap(), 1e-10).is_none());
    }

    #[test]
    fn evaluate_criterion_dispatch() {
        let rho = ghz(3).unwrap();
        let t1 = evaluate_criterion(CriterionId::BisepQubitT1, &rho, TOL).unwrap();
        assert_eq!(t1.id, CriterionId::BisepQubitT1);
        let t5 = evaluate_criterion(CriterionId::GhzNoiseExactT5, &rho, TOL).unwrap();
        assert_eq!(t5.id, CriterionId::GhzNoiseExactT5);
        assert_eq!(t5.verdict, Verdict::Violated);
        assert!(matches!(
            evaluate_criterion(CriterionId::GhzNoiseExactT5, &w_state(3).unwrap(), TOL),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn tiny_negative_diagonals_do_not_poison_reports() {
        // within validation tolerance a diagonal may sit at -1e-16; the
        // sqrt/log paths must clamp it instead of producing NaN
        let dims = SubsystemDims::qubits(2).unwrap();
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(-1e-16, 0.0);
        m[(2, 2)] = Complex64::new(1e-16, 0.0);
        m[(3, 3)] = Complex64::new(0.5, 0.0);
        m[(0, 3)] = Complex64::new(0.3, 0.0);
        m[(3, 0)] = Complex64::new(0.3, 0.0);
        let rho = DensityMatrix::build(dims, m, &ValidationConfig::default()).unwrap();

        let bisep = check_bisep_qudit(&rho, TOL);
        assert!(bisep.rhs == 0.0 && bisep.margin.is_finite());
        assert_eq!(bisep.verdict, Verdict::Violated);

        let fullsep = check_fullsep_ghz_type(&rho, TOL);
        assert!(fullsep.rhs == 0.0 && fullsep.margin.is_finite());

        let w = check_w_type(&rho, TOL).unwrap();
        assert!(w.lhs.is_finite() && w.rhs.is_finite());
    }

    #[test]
    fn short_ids_round_trip() {
        for id in CriterionId::ALL {
            assert_eq!(CriterionId::from_short_id(id.short_id()), Some(id));
        }
        assert_eq!(CriterionId::from_short_id("bogus"), None);
    }
}
