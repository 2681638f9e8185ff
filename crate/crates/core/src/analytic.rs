//! Closed-form critical visibilities and explicit low-rank simulations of
//! isotropic ensembles.
//!
//! For `m` orthonormal pure states mixed with white noise at visibility `v`,
//! the constructions here give `r`-simulations exactly at the critical
//! visibility, which together with the witness bound makes that visibility
//! tight.

use crate::ensemble::{check_normalized, make_isotropic, DensityMatrix, SubspaceProjector};
use crate::error::{Error, Result};
use crate::haar::{sample_haar_unitary, split_rng};
use crate::linalg::{self, binomial, combinations, outer, CMat, CVec};
use crate::simulation::{Simulation, SimulationComponent};
use crate::stats::{from_hermitian_coordinates, hermitian_coordinates, SampleSet};
use rayon::prelude::*;

/// Haar draws whose subspace overlap with a target state is below this are redrawn.
pub const REJECT_OVERLAP: f64 = 1e-12;

const ORTHONORMAL_TOL: f64 = 1e-9;
const MC_CHUNKS: u64 = 64;
const BOOTSTRAP_RESAMPLES: usize = 200;

fn check_rank(d: usize, r: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::domain("critical visibility needs d ≥ 2"));
    }
    if r == 0 || r > d {
        return Err(Error::domain(format!("rank {r} outside 1..={d}")));
    }
    Ok(())
}

/// `(r − 1)/(d − 1)`: below this every isotropic ensemble of pure states is `r`-simulable.
pub fn vcrit_general(d: usize, r: usize) -> Result<f64> {
    check_rank(d, r)?;
    Ok((r - 1) as f64 / (d - 1) as f64)
}

/// Critical visibility for `m` orthonormal states in dimension `d`:
/// `(r−1)/(d−1) · (1 + (d−m)/m · (d(m−r)+r)/(d(m−r)+r−1))`.
pub fn vcrit_m_states(d: usize, m: usize, r: usize) -> Result<f64> {
    check_rank(d, r)?;
    if m < r || m > d {
        return Err(Error::domain(format!("need r ≤ m ≤ d, got r={r}, m={m}, d={d}")));
    }
    let base = d * (m - r);
    if base + r - 1 == 0 {
        return Err(Error::domain("formula is 0/0 at r = m = 1"));
    }
    let (d_, m_, r_) = (d as f64, m as f64, r as f64);
    let base = base as f64;
    let v = (r_ - 1.0) / (d_ - 1.0) * (1.0 + (d_ - m_) / m_ * (base + r_) / (base + r_ - 1.0));
    Ok(v.min(1.0))
}

/// Lower bound on the critical visibility for ensembles spanning an
/// `s`-dimensional subspace: `(r−1)/(d−1−r(d/s−1))`.
pub fn vcrit_subspace(d: usize, s: usize, r: usize) -> Result<f64> {
    check_rank(d, r)?;
    if s < r || s > d {
        return Err(Error::domain(format!("need r ≤ s ≤ d, got r={r}, s={s}, d={d}")));
    }
    let denom = (d - 1) as f64 - r as f64 * (d as f64 / s as f64 - 1.0);
    if denom <= 0.0 {
        return Err(Error::domain(format!("denominator {denom} is not positive")));
    }
    Ok(((r - 1) as f64 / denom).min(1.0))
}

fn check_orthonormal_columns(v: &CMat, what: &str) -> Result<()> {
    let gram = v.adjoint() * v;
    let defect = linalg::frobenius(&(gram - linalg::identity(v.ncols())));
    if defect > ORTHONORMAL_TOL {
        return Err(Error::validation(format!("{what} columns are not orthonormal (defect {defect:e})")));
    }
    Ok(())
}

/// Components over the span of the columns `b_0..b_{k-1}` of `basis`: one per
/// `r`-subset `S`, with `σ_x = |b_x⟩⟨b_x|` for `x ∈ S` and `Π_S / r` otherwise.
fn subset_components(basis: &CMat, r: usize, weight: f64) -> Result<Vec<SimulationComponent>> {
    let k = basis.ncols();
    let columns: Vec<CVec> = (0..k).map(|i| basis.column(i).into_owned()).collect();
    combinations(k, r)
        .into_iter()
        .map(|subset| {
            let v = CMat::from_fn(basis.nrows(), r, |row, j| basis[(row, subset[j])]);
            let projector = SubspaceProjector::from_isometry(&v)?;
            let flat = DensityMatrix::from_matrix(projector.matrix().unscale(r as f64))?;
            let states = (0..k)
                .map(|x| {
                    if subset.contains(&x) {
                        DensityMatrix::pure(&columns[x])
                    } else {
                        Ok(flat.clone())
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SimulationComponent {
                weight,
                projector,
                states,
            })
        })
        .collect()
}

/// `r`-simulation of `{v|i⟩⟨i| + (1−v)𝟙/d}_{i=1..d}` at `v = (r−1)/(d−1)`,
/// using all `C(d, r)` coordinate subspaces with equal weight.
pub fn build_finite_orthonormal_simulation(d: usize, r: usize) -> Result<Simulation> {
    build_finite_basis_simulation(&linalg::identity(d), r)
}

/// As [`build_finite_orthonormal_simulation`] for the basis given by the columns of a unitary.
pub fn build_finite_basis_simulation(u: &CMat, r: usize) -> Result<Simulation> {
    let d = u.nrows();
    if u.ncols() != d {
        return Err(Error::validation("basis matrix must be square"));
    }
    check_rank(d, r)?;
    check_orthonormal_columns(u, "basis")?;
    let weight = 1.0 / binomial(d, r) as f64;
    Simulation::new(r, subset_components(u, r, weight)?)
}

/// `r`-simulation of `m < d` orthonormal pure states `ψ_x` (columns of
/// `states`) at visibility [`vcrit_m_states`].
///
/// `complement` holds an orthonormal basis `φ_y` of the orthogonal complement.
/// With probability `α = (m−1)(m−r+1)/(d(m−r)+r−1)` the finite construction
/// runs inside `span{ψ}`; otherwise a complement vector `φ_y` and `r−1` of the
/// `ψ` are chosen uniformly, and `ψ_x` is prepared if it was chosen and `φ_y`
/// if not.
pub fn build_m_state_simulation(states: &CMat, complement: &CMat, r: usize) -> Result<Simulation> {
    let d = states.nrows();
    let m = states.ncols();
    let k = complement.ncols();
    if k > 0 && complement.nrows() != d {
        return Err(Error::validation("complement vectors have the wrong length"));
    }
    if m + k != d {
        return Err(Error::validation(format!("{m} states and {k} complement vectors do not span dimension {d}")));
    }
    vcrit_m_states(d, m, r)?;
    let mut full = CMat::zeros(d, d);
    full.columns_mut(0, m).copy_from(states);
    if k > 0 {
        full.columns_mut(m, k).copy_from(complement);
    }
    check_orthonormal_columns(&full, "state and complement")?;

    // α = num/den as exact integers
    let num = ((m - 1) * (m - r + 1)) as u128;
    let den = (d * (m - r) + r - 1) as u128;
    let mut components = subset_components(states, r, num as f64 / (den * binomial(m, r)) as f64)?;

    if k > 0 {
        let count = k as u128 * binomial(m, r - 1);
        let weight = (den - num) as f64 / (den * count) as f64;
        let psi: Vec<CVec> = (0..m).map(|i| states.column(i).into_owned()).collect();
        for y in 0..k {
            let phi = complement.column(y).into_owned();
            let phi_state = DensityMatrix::pure(&phi)?;
            for chosen in combinations(m, r - 1) {
                let mut v = CMat::zeros(d, r);
                for (j, &i) in chosen.iter().enumerate() {
                    v.set_column(j, &psi[i]);
                }
                v.set_column(r - 1, &phi);
                let projector = SubspaceProjector::from_isometry(&v)?;
                let sigmas = (0..m)
                    .map(|x| {
                        if chosen.contains(&x) {
                            DensityMatrix::pure(&psi[x])
                        } else {
                            Ok(phi_state.clone())
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                components.push(SimulationComponent {
                    weight,
                    projector,
                    states: sigmas,
                });
            }
        }
    }
    Simulation::new(r, components)
}

/// [`build_m_state_simulation`] for the first `m` computational basis states.
pub fn build_standard_m_state_simulation(d: usize, m: usize, r: usize) -> Result<Simulation> {
    if m == 0 || m > d {
        return Err(Error::domain(format!("need 1 ≤ m ≤ d, got m={m}, d={d}")));
    }
    let id = linalg::identity(d);
    build_m_state_simulation(&id.columns(0, m).into_owned(), &id.columns(m, d - m).into_owned(), r)
}

#[derive(Debug, Clone)]
pub struct HaarStateCheck {
    pub mean: DensityMatrix,
    pub target: DensityMatrix,
    /// `‖mean − target‖_F`.
    pub distance: f64,
    /// Bootstrap standard error of the mean, in Frobenius norm.
    pub standard_error: f64,
}

impl HaarStateCheck {
    /// `distance ≤ k·SE` (with a floor of 1e-12 for noiseless cases such as `r = d`).
    pub fn within(&self, k: f64) -> bool {
        self.distance <= k * self.standard_error + 1e-12
    }
}

#[derive(Debug, Clone)]
pub struct HaarCheckReport {
    pub dim: usize,
    pub rank: usize,
    pub samples: usize,
    /// Draws discarded because some target state was (numerically) orthogonal to the subspace.
    pub rejected: usize,
    /// `(r−1)/(d−1)`, the visibility of the targets.
    pub visibility: f64,
    pub states: Vec<HaarStateCheck>,
}

impl HaarCheckReport {
    pub fn passes(&self, k: f64) -> bool {
        self.states.iter().all(|s| s.within(k))
    }
}

/// Monte Carlo check of the Haar-subspace simulation: draw `Π_U` onto a
/// Haar-random rank-`r` subspace and prepare `Π_U ψ_x Π_U / ⟨ψ_x|Π_U|ψ_x⟩`.
/// The average over draws should equal the isotropic state at `(r−1)/(d−1)`
/// for every pure `ψ_x`.
///
/// Work is split into a fixed number of chunks with independent streams, so
/// the result does not depend on the thread count.
pub fn monte_carlo_haar_check(pure_states: &[CVec], r: usize, samples: usize, seed: u64) -> Result<HaarCheckReport> {
    let Some(first) = pure_states.first() else {
        return Err(Error::domain("need at least one state"));
    };
    let d = first.len();
    let visibility = vcrit_general(d, r)?;
    if samples < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    for (i, psi) in pure_states.iter().enumerate() {
        if psi.len() != d {
            return Err(Error::validation(format!("state {i} has length {}, expected {d}", psi.len())));
        }
        check_normalized(psi)?;
    }
    let stride = d * d;
    let k = pure_states.len();

    let per_chunk: Vec<(Vec<SampleSet>, usize)> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let quota = samples / MC_CHUNKS as usize + usize::from((chunk as usize) < samples % MC_CHUNKS as usize);
            let mut rng = split_rng(seed, chunk);
            let mut sets = vec![SampleSet::new(stride); k];
            let mut rejected = 0;
            let mut drawn = 0;
            let mut sigmas = Vec::with_capacity(k);
            while drawn < quota {
                let u = sample_haar_unitary(d, &mut rng);
                let v = u.columns(0, r).into_owned();
                sigmas.clear();
                let mut ok = true;
                for psi in pure_states {
                    let proj = v.adjoint() * psi;
                    let p = proj.norm_squared();
                    if p < REJECT_OVERLAP {
                        ok = false;
                        break;
                    }
                    let phi = (&v * proj).unscale(p.sqrt());
                    sigmas.push(outer(&phi));
                }
                if !ok {
                    rejected += 1;
                    continue;
                }
                for (set, sigma) in sets.iter_mut().zip(&sigmas) {
                    hermitian_coordinates(sigma, &mut set.data);
                }
                drawn += 1;
            }
            (sets, rejected)
        })
        .collect();

    let mut sets = vec![SampleSet::new(stride); k];
    let mut rejected = 0;
    for (chunk_sets, rej) in &per_chunk {
        rejected += rej;
        for (all, part) in sets.iter_mut().zip(chunk_sets) {
            all.append(part);
        }
    }

    let states = sets
        .iter()
        .zip(pure_states)
        .enumerate()
        .map(|(i, (set, psi))| {
            let mean_vec = set.mean();
            let mean = DensityMatrix::from_matrix(from_hermitian_coordinates(&mean_vec, d))?;
            let target = make_isotropic(psi, visibility)?;
            let distance = linalg::frobenius(&(mean.matrix() - target.matrix()));
            let standard_error = set.bootstrap_se(BOOTSTRAP_RESAMPLES, seed ^ (0x5eed_0000 + i as u64));
            Ok(HaarStateCheck {
                mean,
                target,
                distance,
                standard_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(HaarCheckReport {
        dim: d,
        rank: r,
        samples,
        rejected,
        visibility,
        states,
    })
}
