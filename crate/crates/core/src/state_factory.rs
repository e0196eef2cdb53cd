//! Constructors and seeded samplers for the states the criteria run on.
//!
//! All randomness is ChaCha12 keyed by an explicit 64-bit seed; mixture
//! terms use per-term counter streams, so every output is a deterministic
//! function of its spec and safe to sample in parallel.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::density_matrix::{DensityMatrix, ValidationConfig};
use crate::tensor_index::{decompose_index, single_excitation_indices, Bipartition, SubsystemDims};
use crate::{Error, Result};

/// Parameters (n, p) of the GHZ-with-white-noise family
/// rho(p) = (1 - p) |GHZ_n><GHZ_n| + (p / 2^n) I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseFamilyParams {
    n: usize,
    p: f64,
}

impl NoiseFamilyParams {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        SubsystemDims::qubits(n)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "noise weight p = {p} outside [0, 1]"
            )));
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// How [`random_separable_mixture`] draws each pure component.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleMode {
    /// Product over all n parties.
    FullySeparable,
    /// Product across one fixed bipartition, Haar-random on each block.
    BiseparableFixed(Bipartition),
    /// Product across a fresh uniformly drawn bipartition per term.
    BiseparableMixedPartitions,
}

impl SampleMode {
    pub fn label(&self) -> String {
        match self {
            SampleMode::FullySeparable => "full-sep".into(),
            SampleMode::BiseparableFixed(b) => format!("bisep-fixed({})", b.label()),
            SampleMode::BiseparableMixedPartitions => "bisep-mixed".into(),
        }
    }
}

/// One reproducible separable-mixture draw.
#[derive(Debug, Clone)]
pub struct SeparableSampleSpec {
    dims: SubsystemDims,
    num_terms: usize,
    seed: u64,
    mode: SampleMode,
}

impl SeparableSampleSpec {
    pub fn new(dims: SubsystemDims, num_terms: usize, seed: u64, mode: SampleMode) -> Result<Self> {
        if num_terms == 0 {
            return Err(Error::InvalidParams("num_terms must be >= 1".into()));
        }
        if let SampleMode::BiseparableFixed(b) = &mode {
            if b.n() != dims.n() {
                return Err(Error::InvalidBipartition(format!(
                    "partition over {} parties does not match {} subsystems",
                    b.n(),
                    dims.n()
                )));
            }
        }
        Ok(Self {
            dims,
            num_terms,
            seed,
            mode,
        })
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn num_terms(&self) -> usize {
        self.num_terms
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> &SampleMode {
        &self.mode
    }
}

/// Derive an independent per-item seed from a base seed (splitmix64 step).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// |GHZ_n> = (|0...0> + |1...1>)/sqrt(2) as a rank-1 projector. The only
/// nonzero entries are the four 1/2 values at (1,1), (1,D), (D,1), (D,D).
pub fn ghz(n: usize) -> Result<DensityMatrix> {
    ghz_qudit(n, 2)
}

/// Qudit generalization (sum_{k=0}^{d-1} |k k ... k>)/sqrt(d).
///
/// The projector entries are written out exactly: every entry on the
/// d x d support lattice is 1/d, so reports carry the definitional values
/// instead of a rounded square of 1/sqrt(d).
pub fn ghz_qudit(n: usize, d: usize) -> Result<DensityMatrix> {
    let dims = SubsystemDims::new(vec![d; n])?;
    let val = Complex64::new(1.0 / d as f64, 0.0);
    // |k k ... k> sits at offset k * (d^{n-1} + ... + d + 1)
    let step: usize = (0..n).map(|l| d.pow(l as u32)).sum();
    let mut m = DMatrix::zeros(dims.total(), dims.total());
    for k in 0..d {
        for l in 0..d {
            m[(k * step, l * step)] = val;
        }
    }
    DensityMatrix::build(dims, m, &ValidationConfig::default())
}

/// White-noise mixture of |GHZ_n> at noise weight p.
pub fn ghz_white_noise(params: &NoiseFamilyParams) -> DensityMatrix {
    let dims = SubsystemDims::qubits(params.n()).expect("validated by NoiseFamilyParams");
    let total = dims.total();
    let noise = params.p() / total as f64;
    let coherence = (1.0 - params.p()) / 2.0;
    let mut m = DMatrix::zeros(total, total);
    for i in 0..total {
        m[(i, i)] = Complex64::new(noise, 0.0);
    }
    m[(0, 0)] += Complex64::new(coherence, 0.0);
    m[(total - 1, total - 1)] += Complex64::new(coherence, 0.0);
    m[(0, total - 1)] = Complex64::new(coherence, 0.0);
    m[(total - 1, 0)] = Complex64::new(coherence, 0.0);
    DensityMatrix::build(dims, m, &ValidationConfig::default())
        .expect("noise-family state is a valid density matrix")
}

/// W_n: equal superposition of the n single-excitation labels, as a
/// projector. Entries are exactly 1/n on the single-excitation block.
pub fn w_state(n: usize) -> Result<DensityMatrix> {
    let dims = SubsystemDims::qubits(n)?;
    let val = Complex64::new(1.0 / n as f64, 0.0);
    let support = single_excitation_indices(n);
    let mut m = DMatrix::zeros(dims.total(), dims.total());
    for &r in &support {
        for &s in &support {
            m[(r - 1, s - 1)] = val;
        }
    }
    DensityMatrix::build(dims, m, &ValidationConfig::default())
}

/// Projector onto a product of independent Haar-random single-party states.
pub fn random_pure_product(dims: &SubsystemDims, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let psi = product_vector(dims, &mut rng);
    pure_state(dims.clone(), &psi).expect("sampled product state is a valid density matrix")
}

/// Convex mixture of `num_terms` random separable pure states. Weights are
/// uniform on the simplex (normalized Exp(1) variates); term t draws from
/// counter stream t + 1 of the spec seed, the weights from stream 0.
pub fn random_separable_mixture(spec: &SeparableSampleSpec) -> DensityMatrix {
    let dims = spec.dims();
    let total = dims.total();

    let mut wrng = ChaCha12Rng::seed_from_u64(spec.seed());
    wrng.set_stream(0);
    let mut weights: Vec<f64> = (0..spec.num_terms()).map(|_| wrng.sample(Exp1)).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }

    let mut m = DMatrix::<Complex64>::zeros(total, total);
    for (t, &w) in weights.iter().enumerate() {
        let mut rng = ChaCha12Rng::seed_from_u64(spec.seed());
        rng.set_stream(t as u64 + 1);
        let psi = match spec.mode() {
            SampleMode::FullySeparable => product_vector(dims, &mut rng),
            SampleMode::BiseparableFixed(b) => bipartite_vector(dims, b, &mut rng),
            SampleMode::BiseparableMixedPartitions => {
                let b = random_bipartition(dims.n(), &mut rng);
                bipartite_vector(dims, &b, &mut rng)
            }
        };
        let wc = Complex64::new(w, 0.0);
        for j in 0..total {
            let col = wc * psi[j].conj();
            for i in 0..total {
                m[(i, j)] += psi[i] * col;
            }
        }
    }
    DensityMatrix::build(dims.clone(), m, &ValidationConfig::default())
        .expect("convex mixture of pure states is a valid density matrix")
}

fn pure_state(dims: SubsystemDims, psi: &DVector<Complex64>) -> Result<DensityMatrix> {
    let m = psi * psi.adjoint();
    DensityMatrix::build(dims, m, &ValidationConfig::default())
}

/// Normalized vector of independent standard complex Gaussians.
fn haar_vector(dim: usize, rng: &mut ChaCha12Rng) -> DVector<Complex64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

fn product_vector(dims: &SubsystemDims, rng: &mut ChaCha12Rng) -> DVector<Complex64> {
    let mut psi = haar_vector(dims.dims()[0], rng);
    for &d in &dims.dims()[1..] {
        let factor = haar_vector(d, rng);
        psi = psi.kronecker(&factor);
    }
    psi
}

/// Product state across a bipartition: Haar-random on each block, embedded
/// into the full party ordering (blocks need not be contiguous).
fn bipartite_vector(
    dims: &SubsystemDims,
    partition: &Bipartition,
    rng: &mut ChaCha12Rng,
) -> DVector<Complex64> {
    let left: Vec<usize> = partition.left().collect();
    let right: Vec<usize> = partition.right().collect();
    let ldim: usize = left.iter().map(|&p| dims.dim(p)).product();
    let rdim: usize = right.iter().map(|&p| dims.dim(p)).product();
    let lvec = haar_vector(ldim, rng);
    let rvec = haar_vector(rdim, rng);

    let mut psi = DVector::zeros(dims.total());
    for i in 1..=dims.total() {
        let m = decompose_index(i, dims).expect("index in range");
        let li = block_index(m.digits(), &left, dims);
        let ri = block_index(m.digits(), &right, dims);
        psi[i - 1] = lvec[li] * rvec[ri];
    }
    psi
}

/// Mixed-radix index of the digits restricted to `parties` (ascending).
fn block_index(digits: &[usize], parties: &[usize], dims: &SubsystemDims) -> usize {
    let mut idx = 0;
    for &p in parties {
        idx = idx * dims.dim(p) + digits[p - 1];
    }
    idx
}

/// Uniform draw over the 2^(n-1) - 1 unordered nonempty proper splits;
/// party 1 is pinned to the left block to quotient out the side swap.
fn random_bipartition(n: usize, rng: &mut ChaCha12Rng) -> Bipartition {
    let mask: u64 = rng.random_range(0..(1u64 << (n - 1)) - 1);
    let left = std::iter::once(1).chain((2..=n).filter(move |&p| mask & (1 << (p - 2)) != 0));
    Bipartition::new(left, n).expect("mask yields a valid proper split")
}
