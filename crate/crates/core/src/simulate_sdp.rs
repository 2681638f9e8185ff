//! Best visibility at which a noisy ensemble is `r`-simulable with a fixed
//! family of subspaces.
//!
//! Every basis `U` in the family contributes the `C(d, r)` coordinate
//! subspaces spanned by `r` of its columns. The program
//!
//! ```text
//! maximize v
//! subject to  v ρ_x + (1−v) 𝟙/d = Σ_λ V_λ σ̃_{x,λ} V_λ†     for every x
//!             tr σ̃_{x,λ} = q_λ,  Σ_λ q_λ = 1,  σ̃ ⪰ 0,  0 ≤ v ≤ 1
//! ```
//!
//! is solved with each `σ̃_{x,λ}` stored as an `r×r` block in the frame of the
//! isometry `V_λ`, so confinement to the subspace holds by construction.

use crate::analytic::vcrit_general;
use crate::ensemble::{basis_isometry, uniform_superposition, DensityMatrix, Ensemble, SubspaceProjector};
use crate::error::{Error, Result};
use crate::haar::{rng_from_seed, sample_haar_unitary};
use crate::linalg::{self, basis_vector, combinations, CMat, CVec};
use crate::sdp::{BlockId, ConicBackend, ConicProblem, InteriorPoint, SolverReport};
use crate::simulation::{Simulation, SimulationComponent};
use rayon::prelude::*;

/// Components whose weight is at most this are dropped from the exported simulation.
pub const PRUNE_WEIGHT: f64 = 1e-12;
/// `v* ≥ 1 − DECISION_TOL` counts as "the ensemble itself is `r`-simulable".
pub const DECISION_TOL: f64 = 1e-6;

const UNITARY_TOL: f64 = 1e-10;

/// A finite set of bases together with all their rank-`r` coordinate subspaces.
#[derive(Debug, Clone)]
pub struct SubspaceFamily {
    dim: usize,
    rank: usize,
    unitaries: Vec<CMat>,
    subsets: Vec<Vec<usize>>,
}

impl SubspaceFamily {
    pub fn new(rank: usize, unitaries: Vec<CMat>) -> Result<Self> {
        let Some(first) = unitaries.first() else {
            return Err(Error::validation("subspace family needs at least one basis"));
        };
        let dim = first.nrows();
        if rank == 0 || rank > dim {
            return Err(Error::domain(format!("rank {rank} outside 1..={dim}")));
        }
        for (i, u) in unitaries.iter().enumerate() {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::validation(format!("basis {i} is not {dim}×{dim}")));
            }
            let defect = linalg::unitarity_defect(u);
            if defect > UNITARY_TOL {
                return Err(Error::validation(format!("basis {i} is not unitary (defect {defect:e})")));
            }
        }
        Ok(Self {
            dim,
            rank,
            unitaries,
            subsets: combinations(dim, rank),
        })
    }

    /// Computational and Fourier bases.
    pub fn computational_and_fourier(d: usize, r: usize) -> Result<Self> {
        Self::new(r, vec![linalg::identity(d), linalg::fourier(d)])
    }

    /// Appends `count` Haar-random bases drawn from `seed`.
    pub fn with_haar_bases(mut self, count: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        self.unitaries
            .extend((0..count).map(|_| sample_haar_unitary(self.dim, &mut rng)));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn unitaries(&self) -> &[CMat] {
        &self.unitaries
    }

    /// The `C(d, r)` subsets in lexicographic order (0-based).
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// Number of subspaces `|𝒰| · C(d, r)`.
    pub fn len(&self) -> usize {
        self.unitaries.len() * self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `d×r` isometries, basis-major then subset order.
    pub fn isometries(&self) -> Vec<CMat> {
        self.unitaries
            .iter()
            .flat_map(|u| {
                self.subsets
                    .iter()
                    .map(move |s| basis_isometry(u, s).expect("subset indices are valid"))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SdpSimulationResult {
    pub v_star: f64,
    /// An `r`-simulation of the ensemble depolarized to `v_star`.
    pub simulation: Simulation,
    pub solver: SolverReport,
}

impl SdpSimulationResult {
    /// Whether the undepolarized ensemble is `r`-simulable within this family.
    pub fn simulates_original(&self) -> bool {
        self.v_star >= 1.0 - DECISION_TOL
    }
}

pub fn max_visibility(ensemble: &Ensemble, family: &SubspaceFamily) -> Result<SdpSimulationResult> {
    max_visibility_with(ensemble, family, &InteriorPoint::default())
}

pub fn max_visibility_with(
    ensemble: &Ensemble,
    family: &SubspaceFamily,
    backend: &dyn ConicBackend,
) -> Result<SdpSimulationResult> {
    let d = ensemble.dim();
    if family.dim() != d {
        return Err(Error::validation(format!(
            "family dimension {} does not match ensemble dimension {d}",
            family.dim()
        )));
    }
    let r = family.rank();
    let m = ensemble.len();
    let isometries = family.isometries();
    let basis = linalg::hermitian_basis(d);
    let noise = linalg::identity(d).unscale(d as f64);

    let mut problem = ConicProblem::new();
    let v = problem.add_scalar();
    let slack = problem.add_scalar();
    let q: Vec<BlockId> = isometries.iter().map(|_| problem.add_scalar()).collect();
    let sigma: Vec<Vec<BlockId>> = (0..m)
        .map(|_| isometries.iter().map(|_| problem.add_block(r)).collect())
        .collect();
    problem.set_objective(v, -linalg::identity(1));

    // V† B V for every subspace and Hermitian basis element, shared by all x
    let pulled: Vec<Vec<CMat>> = isometries
        .iter()
        .map(|iso| basis.iter().map(|b| iso.adjoint() * b * iso).collect())
        .collect();
    let scalar = |t: f64| CMat::from_element(1, 1, linalg::c(t, 0.0));

    for (x, rho) in ensemble.states().iter().enumerate() {
        let shift = rho.matrix() - &noise;
        for (k, b) in basis.iter().enumerate() {
            let terms = sigma[x]
                .iter()
                .zip(&pulled)
                .map(|(&blk, coeffs)| (blk, coeffs[k].clone()))
                .chain(std::iter::once((v, scalar(-linalg::re_trace_product(b, &shift)))));
            problem.add_constraint(terms, linalg::re_trace_product(b, &noise));
        }
    }
    let id_r = linalg::identity(r);
    for blocks in &sigma {
        for (&blk, &ql) in blocks.iter().zip(&q) {
            problem.add_constraint([(blk, id_r.clone()), (ql, scalar(-1.0))], 0.0);
        }
    }
    problem.add_constraint(q.iter().map(|&ql| (ql, scalar(1.0))), 1.0);
    problem.add_constraint([(v, scalar(1.0)), (slack, scalar(1.0))], 1.0);

    let solution = backend.solve(&problem).map_err(|e| match e {
        Error::Infeasible(msg) => Error::Infeasible(format!(
            "the {} bases × {} subspaces cannot reproduce the maximally mixed state ({msg})",
            family.unitaries().len(),
            family.subsets().len()
        )),
        other => other,
    })?;

    let v_star = solution.scalar(v).clamp(0.0, 1.0);
    let weights: Vec<f64> = q
        .iter()
        .enumerate()
        .map(|(lam, _)| {
            // the common trace, averaged over x to spread solver residuals
            (0..m)
                .map(|x| linalg::trace_re(solution.block(sigma[x][lam])))
                .sum::<f64>()
                / m as f64
        })
        .collect();
    let total: f64 = weights.iter().filter(|&&w| w > PRUNE_WEIGHT).sum();
    let mut components = Vec::new();
    for (lam, iso) in isometries.iter().enumerate() {
        if weights[lam] <= PRUNE_WEIGHT {
            continue;
        }
        let projector = SubspaceProjector::from_isometry(iso)?;
        let states = (0..m)
            .map(|x| {
                let block = linalg::hermitize(solution.block(sigma[x][lam]));
                let block = linalg::spectral_map(&block, |l| l.max(0.0));
                let tr = linalg::trace_re(&block);
                if tr <= 0.0 {
                    return DensityMatrix::from_matrix(projector.matrix().unscale(r as f64));
                }
                DensityMatrix::from_matrix(linalg::hermitize(&(iso * block * iso.adjoint())).unscale(tr))
            })
            .collect::<Result<Vec<_>>>()?;
        components.push(SimulationComponent {
            weight: weights[lam] / total,
            projector,
            states,
        });
    }
    Ok(SdpSimulationResult {
        v_star,
        simulation: Simulation::new(r, components)?,
        solver: solution.report(),
    })
}

/// `|1⟩, …, |d−1⟩` together with the uniform superposition, as pure vectors.
pub fn basis_and_uniform_states(d: usize) -> Result<Vec<CVec>> {
    if d < 2 {
        return Err(Error::domain("need d ≥ 2"));
    }
    let mut states: Vec<CVec> = (0..d - 1).map(|i| basis_vector(d, i)).collect();
    states.push(uniform_superposition(d));
    Ok(states)
}

/// [`basis_and_uniform_states`] as an ensemble at visibility 1.
pub fn basis_and_uniform_ensemble(d: usize) -> Result<Ensemble> {
    Ensemble::isotropic(&basis_and_uniform_states(d)?, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityRow {
    pub r: usize,
    pub v_numerical: f64,
    pub v_analytical: f64,
    pub difference: f64,
}

/// SDP visibility with the computational and Fourier bases against the
/// universal value `(r−1)/(d−1)`, for the basis-and-uniform ensemble and each
/// rank in `ranks`. Ranks are solved in parallel.
pub fn visibility_table(d: usize, ranks: &[usize]) -> Result<Vec<VisibilityRow>> {
    let ensemble = basis_and_uniform_ensemble(d)?;
    ranks
        .par_iter()
        .map(|&r| {
            let family = SubspaceFamily::computational_and_fourier(d, r)?;
            let v_numerical = max_visibility(&ensemble, &family)?.v_star;
            let v_analytical = vcrit_general(d, r)?;
            Ok(VisibilityRow {
                r,
                v_numerical,
                v_analytical,
                difference: v_numerical - v_analytical,
            })
        })
        .collect()
}

/// The eight-dimensional table for `r = 2..=7`.
pub fn reproduce_table1() -> Result<Vec<VisibilityRow>> {
    visibility_table(8, &[2, 3, 4, 5, 6, 7])
}

/// CSV with header `r,v_numerical,v_analytical,difference` at full precision.
pub fn table_csv(rows: &[VisibilityRow]) -> String {
    let mut out = String::from("r,v_numerical,v_analytical,difference\n");
    for row in rows {
        out.push_str(&format!(
            "{},{:?},{:?},{:?}\n",
            row.r, row.v_numerical, row.v_analytical, row.difference
        ));
    }
    out
}
