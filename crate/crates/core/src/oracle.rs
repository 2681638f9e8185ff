//! Independent checks: exact answers where they are cheap, and a Monte Carlo
//! test of the invariance argument behind isotropic noise.

use crate::discrimination::certify_via_discrimination;
use crate::ensemble::{span_dimension, DensityMatrix, Ensemble};
use crate::error::{Error, Result};
use crate::haar::{sample_haar_unitary, split_rng};
use crate::linalg::{self, CMat, CVec};
use crate::simulate_sdp::{max_visibility, SubspaceFamily};
use crate::stats::{from_hermitian_coordinates, hermitian_coordinates, SampleSet};
use rayon::prelude::*;

/// Largest pairwise distance for states to count as identical.
pub const IDENTICAL_TOL: f64 = 1e-9;
const PURITY_TOL: f64 = 1e-9;
const TWIRL_CHUNKS: u64 = 64;
const BOOTSTRAP_RESAMPLES: usize = 200;

/// An ensemble has absolute dimension one iff all its states coincide.
pub fn is_one_simulable(ensemble: &Ensemble) -> bool {
    let states = ensemble.states();
    states
        .iter()
        .enumerate()
        .all(|(i, a)| states[i + 1..].iter().all(|b| a.distance(b) <= IDENTICAL_TOL))
}

/// Exact absolute dimension of a pure ensemble: the dimension of the span.
pub fn pure_ensemble_rq(pure_states: &[CVec]) -> Result<usize> {
    span_dimension(pure_states)
}

/// As [`pure_ensemble_rq`] for density matrices that must each be rank one.
pub fn pure_ensemble_rq_of(ensemble: &Ensemble) -> Result<usize> {
    let vectors = ensemble
        .states()
        .iter()
        .enumerate()
        .map(|(x, rho)| {
            let (vals, vecs) = linalg::eigh_desc(rho.matrix());
            if vals[0] < 1.0 - PURITY_TOL {
                return Err(Error::domain(format!("state {x} is not pure (largest eigenvalue {})", vals[0])));
            }
            Ok(vecs.column(0).into_owned())
        })
        .collect::<Result<Vec<_>>>()?;
    pure_ensemble_rq(&vectors)
}

/// Unitary whose first column is `ψ`, completed deterministically: standard
/// basis vectors are Gram–Schmidt orthogonalized in order of increasing `|ψ_i|`
/// (ties broken by index), skipping any that are numerically dependent.
pub fn orthonormal_completion(psi: &CVec) -> Result<CMat> {
    let d = psi.len();
    crate::ensemble::check_normalized(psi)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| psi[a].norm().total_cmp(&psi[b].norm()).then(a.cmp(&b)));
    let mut cols: Vec<CVec> = vec![psi.clone()];
    for i in order {
        if cols.len() == d {
            break;
        }
        let mut v = linalg::basis_vector(d, i);
        for _ in 0..2 {
            for c in &cols {
                let overlap = c.dotc(&v);
                v -= c * overlap;
            }
        }
        let n = v.norm();
        if n > 1e-6 {
            cols.push(v.unscale(n));
        }
    }
    Ok(CMat::from_columns(&cols))
}

#[derive(Debug, Clone)]
pub struct TwirlReport {
    /// Empirical average of `U ρ U†` over `U = W(1 ⊕ H)W†`, `H` Haar on the complement of `ψ`.
    pub state: DensityMatrix,
    /// `v` solving `⟨ψ|ρ|ψ⟩ = v + (1−v)/d`.
    pub fitted_v: f64,
    /// The isotropic state about `ψ` at `fitted_v`.
    pub target: DensityMatrix,
    /// `‖state − target‖_F`.
    pub residual: f64,
    pub standard_error: f64,
}

impl TwirlReport {
    pub fn within(&self, k: f64) -> bool {
        self.residual <= k * self.standard_error + 1e-12
    }
}

/// Average of `ρ` over unitaries that fix `ψ`. For large `n` the result is
/// isotropic about `ψ`.
pub fn twirl_about_state(rho: &DensityMatrix, psi: &CVec, samples: usize, seed: u64) -> Result<TwirlReport> {
    let d = rho.dim();
    if psi.len() != d {
        return Err(Error::validation(format!("vector length {} does not match dimension {d}", psi.len())));
    }
    if d < 2 {
        return Err(Error::domain("twirling needs d ≥ 2"));
    }
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let w = orthonormal_completion(psi)?;
    let rho_frame = w.adjoint() * rho.matrix() * &w;

    let parts: Vec<SampleSet> = (0..TWIRL_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let quota = samples / TWIRL_CHUNKS as usize + usize::from((chunk as usize) < samples % TWIRL_CHUNKS as usize);
            let mut rng = split_rng(seed, chunk);
            let mut set = SampleSet::new(d * d);
            for _ in 0..quota {
                let h = sample_haar_unitary(d - 1, &mut rng);
                let mut u = linalg::identity(d);
                u.view_mut((1, 1), (d - 1, d - 1)).copy_from(&h);
                let twirled = &w * (&u * &rho_frame * u.adjoint()) * w.adjoint();
                hermitian_coordinates(&linalg::hermitize(&twirled), &mut set.data);
            }
            set
        })
        .collect();
    let mut all = SampleSet::new(d * d);
    for p in &parts {
        all.append(p);
    }

    let state = DensityMatrix::from_matrix(from_hermitian_coordinates(&all.mean(), d))?;
    let overlap = psi.dotc(&(rho.matrix() * psi)).re;
    let fitted_v = (d as f64 * overlap - 1.0) / (d as f64 - 1.0);
    let target_matrix = linalg::outer(psi).scale(fitted_v) + linalg::identity(d).scale((1.0 - fitted_v) / d as f64);
    let target = DensityMatrix::from_matrix(target_matrix)?;
    let residual = linalg::frobenius(&(state.matrix() - target.matrix()));
    let standard_error = if samples > 1 {
        all.bootstrap_se(BOOTSTRAP_RESAMPLES, seed ^ 0x7e1_0000)
    } else {
        0.0
    };
    Ok(TwirlReport {
        state,
        fitted_v,
        target,
        residual,
        standard_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundSource {
    /// Every ensemble has absolute dimension at least one.
    Trivial,
    Discrimination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperBoundSource {
    /// The Hilbert-space dimension.
    Dimension,
    IdenticalStates,
    /// Random-subspace model for isotropic noise at `v ≤ (r−1)/(d−1)`.
    HaarModel,
    /// Simulation found by the subspace SDP.
    Sdp,
}

/// Bracket `lower ≤ r_Q ≤ upper` from certified lower bounds and explicit simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionInterval {
    pub lower: usize,
    pub upper: usize,
    pub lower_source: LowerBoundSource,
    pub upper_source: UpperBoundSource,
}

impl DimensionInterval {
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Interval for an arbitrary ensemble: discrimination below, and above the
/// smallest `r` at which the computational-and-Fourier subspace SDP reproduces
/// the ensemble itself.
pub fn dimension_interval(ensemble: &Ensemble) -> Result<DimensionInterval> {
    let d = ensemble.dim();
    let (lower, lower_source) = if ensemble.len() >= 2 {
        (certify_via_discrimination(ensemble)?, LowerBoundSource::Discrimination)
    } else {
        (1, LowerBoundSource::Trivial)
    };
    if is_one_simulable(ensemble) {
        return Ok(DimensionInterval {
            lower,
            upper: 1,
            lower_source,
            upper_source: UpperBoundSource::IdenticalStates,
        });
    }
    // searched independently of `lower` so that the two bounds check each other
    for r in 2..d {
        let family = SubspaceFamily::computational_and_fourier(d, r)?;
        if max_visibility(ensemble, &family)?.simulates_original() {
            return Ok(DimensionInterval {
                lower,
                upper: r,
                lower_source,
                upper_source: UpperBoundSource::Sdp,
            });
        }
    }
    Ok(DimensionInterval {
        lower,
        upper: d,
        lower_source,
        upper_source: UpperBoundSource::Dimension,
    })
}

/// Interval for `{v|ψ_x⟩⟨ψ_x| + (1−v)𝟙/d}`, tightening the general interval
/// with the random-subspace model, which simulates any such ensemble with
/// `r = ⌈v(d−1)⌉ + 1`.
pub fn isotropic_dimension_interval(pure_states: &[CVec], v: f64) -> Result<DimensionInterval> {
    let ensemble = Ensemble::isotropic(pure_states, v)?;
    let d = ensemble.dim();
    let mut interval = dimension_interval(&ensemble)?;
    let haar_r = ((v * (d as f64 - 1.0) - 1e-12).ceil().max(0.0) as usize + 1).min(d);
    if haar_r < interval.upper {
        interval.upper = haar_r;
        interval.upper_source = UpperBoundSource::HaarModel;
    }
    Ok(interval)
}
