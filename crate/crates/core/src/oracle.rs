//! Sampling harness that stress-tests criterion soundness and the
//! pure-state equality identities.
//!
//! Soundness here means: states built separable by construction never
//! violate the matching criterion. The harness samples mixtures through
//! [`crate::state_factory`], evaluates the requested criteria, and
//! aggregates worst-case margins. A positive margin above tolerance on a
//! sound run is a bug certificate, reported in the summary rather than as
//! an error. Per-sample sub-seeding keeps every run reproducible and
//! schedule-independent under parallel evaluation.

use rayon::prelude::*;

use crate::criteria::{evaluate_criterion, CriterionId};
use crate::state_factory::{
    derive_seed, random_pure_product, random_separable_mixture, SampleMode, SeparableSampleSpec,
};
use crate::tensor_index::{
    corner_indices, linear_index, pair_excitation_index, single_excitation_indices, Bipartition,
    MultiIndex, SubsystemDims,
};
use crate::{Error, Result};

/// Default cap on mixture terms per sampled state; each sample draws its
/// term count uniformly from 1..=max_terms.
pub const DEFAULT_MAX_TERMS: usize = 6;

/// One soundness run: how many states to draw, how, and which criteria to
/// evaluate at which tolerance.
#[derive(Debug, Clone)]
pub struct OracleRunSpec {
    dims: SubsystemDims,
    samples: usize,
    seed: u64,
    modes: Vec<SampleMode>,
    criteria: Vec<CriterionId>,
    tol: f64,
    max_terms: usize,
}

impl OracleRunSpec {
    pub fn new(
        dims: SubsystemDims,
        samples: usize,
        seed: u64,
        modes: Vec<SampleMode>,
        criteria: Vec<CriterionId>,
        tol: f64,
    ) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParams("samples must be >= 1".into()));
        }
        if modes.is_empty() {
            return Err(Error::InvalidParams(
                "need at least one sampling mode".into(),
            ));
        }
        if criteria.is_empty() {
            return Err(Error::InvalidParams("need at least one criterion".into()));
        }
        if criteria.contains(&CriterionId::GhzNoiseExactT5) {
            return Err(Error::InvalidParams(
                "t5 classifies the white-noise family exactly; it is not a sampled soundness criterion"
                    .into(),
            ));
        }
        if tol < 0.0 {
            return Err(Error::InvalidParams("tolerance must be nonnegative".into()));
        }
        for mode in &modes {
            if let SampleMode::BiseparableFixed(b) = mode {
                if b.n() != dims.n() {
                    return Err(Error::InvalidBipartition(format!(
                        "partition over {} parties does not match {} subsystems",
                        b.n(),
                        dims.n()
                    )));
                }
            }
        }
        Ok(Self {
            dims,
            samples,
            seed,
            modes,
            criteria,
            tol,
            max_terms: DEFAULT_MAX_TERMS,
        })
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidParams("max_terms must be >= 1".into()));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn modes(&self) -> &[SampleMode] {
        &self.modes
    }

    pub fn criteria(&self) -> &[CriterionId] {
        &self.criteria
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

/// Aggregate over one (mode, criterion) cell of a run.
#[derive(Debug, Clone)]
pub struct CriterionStats {
    pub mode: String,
    pub criterion: CriterionId,
    pub samples: usize,
    /// Count of samples with margin > tol; must be 0 on a sound run.
    pub violations: usize,
    /// Largest signed margin seen (closest approach to violation).
    pub max_margin: f64,
    /// Largest |margin| seen; the quantity bounded in equality runs.
    pub max_abs_margin: f64,
    /// Index of the max-margin sample within the run.
    pub worst_sample: usize,
    /// Derived seed of that sample, sufficient to rebuild it.
    pub worst_seed: u64,
}

/// Result of a soundness run.
#[derive(Debug, Clone)]
pub struct OracleSummary {
    pub tol: f64,
    pub rows: Vec<CriterionStats>,
}

impl OracleSummary {
    pub fn total_violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }

    pub fn is_sound(&self) -> bool {
        self.total_violations() == 0
    }
}

struct SampleOutcome {
    sample: usize,
    seed: u64,
    margins: Vec<f64>,
}

/// Sample states per the spec and aggregate criterion margins.
///
/// Factory and criteria errors (for example a qubit-only criterion on qudit
/// dims) propagate; a soundness failure is a reported result, not an error.
pub fn run_soundness(spec: &OracleRunSpec) -> Result<OracleSummary> {
    let mut rows = Vec::with_capacity(spec.modes().len() * spec.criteria().len());
    for (mode_idx, mode) in spec.modes().iter().enumerate() {
        let mode_seed = derive_seed(spec.seed(), mode_idx as u64);
        let outcomes: Result<Vec<SampleOutcome>> = (0..spec.samples())
            .into_par_iter()
            .map(|sample| {
                let sample_seed = derive_seed(mode_seed, sample as u64);
                let num_terms =
                    1 + (derive_seed(sample_seed, u64::MAX) % spec.max_terms() as u64) as usize;
                let draw = SeparableSampleSpec::new(
                    spec.dims().clone(),
                    num_terms,
                    sample_seed,
                    mode.clone(),
                )?;
                let rho = random_separable_mixture(&draw);
                let margins = spec
                    .criteria()
                    .iter()
                    .map(|&c| evaluate_criterion(c, &rho, spec.tol()).map(|r| r.margin))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(SampleOutcome {
                    sample,
                    seed: sample_seed,
                    margins,
                })
            })
            .collect();
        let outcomes = outcomes?;

        for (ci, &criterion) in spec.criteria().iter().enumerate() {
            let mut stats = CriterionStats {
                mode: mode.label(),
                criterion,
                samples: spec.samples(),
                violations: 0,
                max_margin: f64::NEG_INFINITY,
                max_abs_margin: 0.0,
                worst_sample: 0,
                worst_seed: 0,
            };
            for outcome in &outcomes {
                let margin = outcome.margins[ci];
                if margin > spec.tol() {
                    stats.violations += 1;
                }
                if margin > stats.max_margin {
                    stats.max_margin = margin;
                    stats.worst_sample = outcome.sample;
                    stats.worst_seed = outcome.seed;
                }
                stats.max_abs_margin = stats.max_abs_margin.max(margin.abs());
            }
            rows.push(stats);
        }
    }
    Ok(OracleSummary {
        tol: spec.tol(),
        rows,
    })
}

/// Deviation of |rho_{1,D}| from sqrt(rho_{a,a} rho_{b,b}) on a random pure
/// state that is product across `partition`. Here a is the label with every
/// left-block party at its top level, b the same for the right block; the
/// two are mirror-paired corners, and the difference vanishes identically
/// for states product across this split.
pub fn check_pure_biseparable_identity(
    dims: &SubsystemDims,
    partition: &Bipartition,
    seed: u64,
) -> Result<f64> {
    if partition.n() != dims.n() {
        return Err(Error::InvalidBipartition(format!(
            "partition over {} parties does not match {} subsystems",
            partition.n(),
            dims.n()
        )));
    }
    let draw = SeparableSampleSpec::new(
        dims.clone(),
        1,
        seed,
        SampleMode::BiseparableFixed(partition.clone()),
    )?;
    let rho = random_separable_mixture(&draw);
    let d = rho.total();
    let a = block_top_index(dims, partition.left())?;
    let b = block_top_index(dims, partition.right())?;
    debug_assert_eq!(b, d - a + 1, "the two block labels are mirror partners");
    let lhs = rho.entry(1, d).expect("in range").norm();
    let rhs = (rho.entry(a, a).expect("in range").re * rho.entry(b, b).expect("in range").re)
        .max(0.0)
        .sqrt();
    Ok((lhs - rhs).abs())
}

/// Linear index of the label with every party in `parties` at its top
/// level and everything else at 0.
fn block_top_index(dims: &SubsystemDims, parties: impl Iterator<Item = usize>) -> Result<usize> {
    let mut digits = vec![0usize; dims.n()];
    for p in parties {
        digits[p - 1] = dims.dim(p) - 1;
    }
    linear_index(&MultiIndex::new(digits), dims)
}

/// Max deviation across the pure-product equalities on one random product
/// state: the corner geometric-mean identity, and (on all-qubit systems)
/// every per-pair single-excitation identity
/// |rho_{r_i,r_j}| = sqrt(rho_{1,1} rho_{q_ij,q_ij}).
///
/// The geometric mean is taken as a product of (2^n - 2)-th roots — a
/// different route from the criteria's log-domain evaluation, so the two
/// cross-check each other.
pub fn check_pure_product_equalities(dims: &SubsystemDims, seed: u64) -> f64 {
    let rho = random_pure_product(dims, seed);
    let d = rho.total();
    let corners = corner_indices(dims);
    let root = 1.0 / corners.len() as f64;
    let mut geo = 1.0;
    for &i in &corners {
        let x = rho.entry(i, i).expect("in range").re;
        if x <= 0.0 {
            geo = 0.0;
            break;
        }
        geo *= x.powf(root);
    }
    let mut deviation = (rho.entry(1, d).expect("in range").norm() - geo).abs();

    if dims.all_qubits() {
        let n = dims.n();
        let r = single_excitation_indices(n);
        let ground = rho.entry(1, 1).expect("in range").re.max(0.0);
        for i in 2..=n {
            for j in 1..i {
                let q = pair_excitation_index(i, j, n).expect("i > j");
                let lhs = rho.entry(r[i - 1], r[j - 1]).expect("in range").norm();
                let rhs = (ground * rho.entry(q, q).expect("in range").re.max(0.0)).sqrt();
                deviation = deviation.max((lhs - rhs).abs());
            }
        }
    }
    deviation
}
