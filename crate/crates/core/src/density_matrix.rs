//! Validated dense complex density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::tensor_index::SubsystemDims;
use crate::{Error, Result};

/// QR-step cap for the eigensolver behind [`DensityMatrix::min_eigenvalue`].
const MAX_EIG_ITERS: usize = 100_000;

/// Tolerances used when accepting a matrix as a density matrix.
///
/// Defaults leave headroom over the ~1e-15 accuracy of double-precision
/// state construction so that file round-trips still validate. The PSD
/// check is opt-in: the criteria read matrix elements only, so an
/// eigendecomposition is validation, not required math.
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    pub hermiticity_tol: f64,
    pub trace_tol: f64,
    pub psd_tol: f64,
    pub check_psd: bool,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            hermiticity_tol: 1e-10,
            trace_tol: 1e-10,
            psd_tol: 1e-9,
            check_psd: false,
        }
    }
}

/// Immutable density matrix over an n-partite tensor-product basis.
///
/// Entries are addressed 1-based, matching the [`crate::tensor_index`]
/// convention. Construction validates and rejects; it never repairs the
/// input, so a file-format bug surfaces as an error instead of a silently
/// symmetrized state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: SubsystemDims,
    entries: DMatrix<Complex64>,
    psd_checked: bool,
}

impl DensityMatrix {
    pub fn build(
        dims: SubsystemDims,
        entries: DMatrix<Complex64>,
        cfg: &ValidationConfig,
    ) -> Result<Self> {
        if cfg.hermiticity_tol < 0.0 || cfg.trace_tol < 0.0 || cfg.psd_tol < 0.0 {
            return Err(Error::InvalidParams(
                "validation tolerances must be nonnegative".into(),
            ));
        }
        let d = dims.total();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch {
                rows: entries.nrows(),
                cols: entries.ncols(),
                expected: d,
            });
        }
        for i in 0..d {
            for j in i..d {
                let deviation = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if deviation > cfg.hermiticity_tol {
                    return Err(Error::HermiticityViolation {
                        i: i + 1,
                        j: j + 1,
                        deviation,
                    });
                }
            }
        }
        let mut trace = 0.0;
        for i in 0..d {
            let z = entries[(i, i)];
            if z.re < -cfg.psd_tol {
                return Err(Error::NegativeDiagonal {
                    index: i + 1,
                    value: z.re,
                });
            }
            trace += z.re;
        }
        if (trace - 1.0).abs() > cfg.trace_tol {
            return Err(Error::TraceViolation { trace });
        }
        let mut rho = Self {
            dims,
            entries,
            psd_checked: false,
        };
        if cfg.check_psd {
            let min_eigenvalue = rho.min_eigenvalue()?;
            if min_eigenvalue < -cfg.psd_tol {
                return Err(Error::PsdViolation { min_eigenvalue });
            }
            rho.psd_checked = true;
        }
        Ok(rho)
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    /// Total dimension D.
    pub fn total(&self) -> usize {
        self.dims.total()
    }

    /// Whether construction included the positive-semidefiniteness check.
    pub fn psd_checked(&self) -> bool {
        self.psd_checked
    }

    /// Entry rho_{i,j}, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> Result<Complex64> {
        let d = self.total();
        if i < 1 || i > d || j < 1 || j > d {
            return Err(Error::InvalidIndex(format!(
                "entry ({i},{j}) out of range 1..={d}"
            )));
        }
        Ok(self.entries[(i - 1, j - 1)])
    }

    /// 1-based access without the range check; callers pass indices
    /// produced by `tensor_index`.
    pub(crate) fn at(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i - 1, j - 1)]
    }

    /// Real part of the 1-based diagonal entry.
    pub(crate) fn diag(&self, i: usize) -> f64 {
        self.entries[(i - 1, i - 1)].re
    }

    /// Smallest eigenvalue of the Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig =
            nalgebra::SymmetricEigen::try_new(self.entries.clone(), f64::EPSILON, MAX_EIG_ITERS)
                .ok_or_else(|| {
                    Error::NumericFailure("hermitian eigensolver did not converge".into())
                })?;
        Ok(eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min))
    }

    /// The raw entry storage (0-based), for serialization front ends.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }
}
