//! Optimal minimum-error discrimination and the dimension bound it implies.
//!
//! `W_disc = max_M (1/m) Σ_x tr(ρ_x M_x)` over `m`-outcome POVMs is the
//! strongest discrimination witness. Ensembles built from rank-`r` subspaces
//! have `W_disc ≤ r/m`, so `⌈m · W_disc⌉` lower-bounds the absolute dimension.

use crate::ensemble::{Ensemble, HermitianOperator, Povm};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::sdp::{ConicBackend, ConicProblem, InteriorPoint, SolverReport};

/// Slack (per state) subtracted before rounding `m · W_disc` up.
pub const CERTIFY_TOL: f64 = 1e-7;

/// Largest tolerated change of the success probability when the solver's
/// POVM is projected back onto exact POVMs.
const CLEANUP_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    /// Success probability of [`DiscriminationResult::povm`] on the ensemble.
    pub w_disc: f64,
    pub povm: Povm,
    pub certified_lower_bound: usize,
    /// `log2(m · W_disc)`, in bits.
    pub accessible_info: f64,
    pub solver: SolverReport,
}

/// `⌈m·w − m·CERTIFY_TOL⌉`, clamped to `1..=d`.
///
/// A success probability of exactly `r/m` certifies `r`, not `r + 1`.
pub fn dimension_bound_from_success(w_disc: f64, m: usize, d: usize) -> usize {
    let m = m as f64;
    let raw = (m * w_disc - m * CERTIFY_TOL).ceil();
    if raw.is_nan() || raw < 1.0 {
        1
    } else {
        (raw as usize).min(d)
    }
}

/// Solves the discrimination SDP with the built-in interior-point backend.
pub fn optimal_discrimination(ensemble: &Ensemble) -> Result<DiscriminationResult> {
    optimal_discrimination_with(ensemble, &InteriorPoint::default())
}

pub fn optimal_discrimination_with(ensemble: &Ensemble, backend: &dyn ConicBackend) -> Result<DiscriminationResult> {
    let m = ensemble.len();
    let d = ensemble.dim();
    if m < 2 {
        return Err(Error::domain("discrimination needs at least two states"));
    }

    let mut problem = ConicProblem::new();
    let blocks: Vec<_> = (0..m).map(|_| problem.add_block(d)).collect();
    for (block, rho) in blocks.iter().zip(ensemble.states()) {
        problem.set_objective(*block, rho.matrix().scale(-1.0 / m as f64));
    }
    let id = linalg::identity(d);
    for b in linalg::hermitian_basis(d) {
        let rhs = linalg::re_trace_product(&b, &id);
        problem.add_constraint(blocks.iter().map(|&k| (k, b.clone())), rhs);
    }

    let solution = backend.solve(&problem)?;
    let povm = clean_povm(blocks.iter().map(|&k| solution.block(k)).collect())?;
    let w_disc = success_probability(ensemble, &povm);
    let solver_value = -solution.primal_objective;
    if (w_disc - solver_value).abs() > CLEANUP_TOL {
        return Err(Error::Solver(format!(
            "cleaned POVM scores {w_disc}, solver reported {solver_value}"
        )));
    }
    let accessible_info = (m as f64 * w_disc).max(1.0).log2();
    Ok(DiscriminationResult {
        w_disc,
        certified_lower_bound: dimension_bound_from_success(w_disc, m, d),
        accessible_info,
        povm,
        solver: solution.report(),
    })
}

/// Lower bound on the absolute dimension from optimal discrimination.
pub fn certify_via_discrimination(ensemble: &Ensemble) -> Result<usize> {
    Ok(optimal_discrimination(ensemble)?.certified_lower_bound)
}

/// `(1/m) Σ_x tr(ρ_x M_x)`.
pub fn success_probability(ensemble: &Ensemble, povm: &Povm) -> f64 {
    let m = ensemble.len() as f64;
    ensemble
        .states()
        .iter()
        .zip(povm.elements())
        .map(|(rho, el)| el.inner(rho.operator()))
        .sum::<f64>()
        / m
}

/// Symmetrize, clip negative eigenvalues, and restore completeness with
/// `M_x ↦ S^{-1/2} M_x S^{-1/2}`.
fn clean_povm(raw: Vec<&CMat>) -> Result<Povm> {
    let d = raw[0].nrows();
    let clipped: Vec<CMat> = raw
        .into_iter()
        .map(|m| linalg::spectral_map(&linalg::hermitize(m), |l| l.max(0.0)))
        .collect();
    let total = clipped.iter().fold(linalg::zeros(d), |acc, m| acc + m);
    if linalg::min_eigenvalue(&total) <= 1e-6 {
        return Err(Error::Solver("solver POVM is far from complete".into()));
    }
    let inv_sqrt = linalg::spectral_map(&total, |l| 1.0 / l.sqrt());
    let elements = clipped
        .iter()
        .map(|m| HermitianOperator::new(linalg::hermitize(&(&inv_sqrt * m * &inv_sqrt))))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(elements)
}
