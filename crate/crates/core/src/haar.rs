//! Seeded randomness: Haar unitaries and states, random mixed states and POVMs.
//!
//! Every stochastic routine takes either an explicit seed or a caller-owned
//! generator. Generators are ChaCha20 streams; [`split_rng`] derives
//! independent streams from one seed for parallel workers.

use crate::ensemble::{DensityMatrix, HermitianOperator, Povm};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn split_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Entry of a Ginibre matrix: `(x + iy)/√2` with `x, y ~ N(0, 1)`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed `d×d` unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let qr = ginibre(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { linalg::ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_random_unitary(d: usize, seed: u64) -> Result<CMat> {
    if d == 0 {
        return Err(Error::domain("unitary dimension must be at least 1"));
    }
    Ok(sample_haar_unitary(d, &mut rng_from_seed(seed)))
}

/// Haar-random pure state (first column of a Haar unitary in distribution).
pub fn haar_random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let g = CVec::from_fn(d, |_, _| complex_gaussian(rng));
    let n = g.norm();
    g.unscale(n)
}

/// Random mixed state from the Hilbert–Schmidt measure, `GG†/tr(GG†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    let w = &g * g.adjoint();
    let tr = linalg::trace_re(&w);
    DensityMatrix::from_matrix(w.unscale(tr)).expect("Wishart matrix is a valid state")
}

/// Random `k`-outcome POVM: `M_b = S^{-1/2} G_b G_b† S^{-1/2}` with `S = Σ G_b G_b†`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Povm {
    let raw: Vec<CMat> = (0..k)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * g.adjoint()
        })
        .collect();
    let total = raw.iter().fold(linalg::zeros(d), |acc, m| acc + m);
    let inv_sqrt = linalg::spectral_map(&total, |l| 1.0 / l.sqrt());
    let mut elements: Vec<HermitianOperator> = raw
        .iter()
        .map(|m| HermitianOperator::new(linalg::hermitize(&(&inv_sqrt * m * &inv_sqrt))).unwrap())
        .collect();
    // push the last element's roundoff into completeness
    let sum = elements.iter().fold(linalg::zeros(d), |acc, e| acc + e.matrix());
    let fix = linalg::identity(d) - sum;
    let last = elements.pop().unwrap();
    elements.push(HermitianOperator::new(last.matrix() + fix).unwrap());
    Povm::new(elements).expect("normalized Wishart family is a POVM")
}
