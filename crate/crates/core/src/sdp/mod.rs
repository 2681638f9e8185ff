//! Conic problem description and solver interface.
//!
//! Problems are stated in primal standard form over a product of complex
//! Hermitian PSD blocks:
//!
//! ```text
//! minimize    Σ_k ⟨C_k, X_k⟩
//! subject to  Σ_k ⟨A_ik, X_k⟩ = b_i    for every constraint i
//!             X_k ⪰ 0                  for every block k
//! ```
//!
//! A block of size 1 is a nonnegative scalar. Science code builds a
//! [`ConicProblem`] and hands it to any [`ConicBackend`]; the only backend
//! shipped is [`InteriorPoint`], which works natively on Hermitian blocks.
//! [`real_embedding`] is the map to use for a backend that only accepts real
//! symmetric cones.

mod ipm;
mod presolve;

pub use ipm::{InteriorPoint, IpmSettings};

use crate::error::Result;
use crate::linalg::CMat;
use nalgebra::DMatrix;

/// Index of a PSD block inside a [`ConicProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockId(pub usize);

/// One term `⟨A, X_block⟩` of a linear constraint.
#[derive(Debug, Clone)]
pub struct Term {
    pub block: BlockId,
    pub coeff: CMat,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ConicProblem {
    block_sizes: Vec<usize>,
    objective: Vec<Option<CMat>>,
    constraints: Vec<Constraint>,
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a Hermitian PSD block of the given size.
    pub fn add_block(&mut self, size: usize) -> BlockId {
        assert!(size > 0, "PSD block must have positive size");
        self.block_sizes.push(size);
        self.objective.push(None);
        BlockId(self.block_sizes.len() - 1)
    }

    /// Adds a nonnegative scalar (a 1×1 block).
    pub fn add_scalar(&mut self) -> BlockId {
        self.add_block(1)
    }

    /// Sets the objective coefficient `C_k` (the problem is a minimization).
    pub fn set_objective(&mut self, block: BlockId, coeff: CMat) {
        assert_eq!(coeff.nrows(), self.block_sizes[block.0]);
        self.objective[block.0] = Some(coeff);
    }

    /// Adds `Σ ⟨A, X⟩ = rhs`. Terms whose coefficient is numerically zero are
    /// dropped; repeated blocks are merged.
    pub fn add_constraint(&mut self, terms: impl IntoIterator<Item = (BlockId, CMat)>, rhs: f64) {
        let mut merged: Vec<Term> = Vec::new();
        for (block, coeff) in terms {
            assert_eq!(coeff.nrows(), self.block_sizes[block.0], "coefficient size mismatch");
            if coeff.iter().all(|z| z.norm() <= 1e-14) {
                continue;
            }
            match merged.iter_mut().find(|t| t.block == block) {
                Some(t) => t.coeff += coeff,
                None => merged.push(Term { block, coeff }),
            }
        }
        self.constraints.push(Constraint { terms: merged, rhs });
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self, block: BlockId) -> Option<&CMat> {
        self.objective[block.0].as_ref()
    }

    /// `Σ_k ⟨C_k, X_k⟩` for a candidate point.
    pub fn objective_value(&self, x: &[CMat]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .filter_map(|(c, xk)| c.as_ref().map(|c| crate::linalg::re_trace_product(c, xk)))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Stopped at the iteration cap with residuals above target but below 1e-5.
    AlmostOptimal,
}

/// Primal-dual pair returned by a backend.
#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Primal blocks `X_k`.
    pub x: Vec<CMat>,
    /// Equality multipliers, one per constraint of the original problem.
    pub y: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|p − d| / (1 + |p| + |d|)`.
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

impl ConicSolution {
    pub fn report(&self) -> SolverReport {
        SolverReport {
            status: self.status,
            primal_objective: self.primal_objective,
            dual_objective: self.dual_objective,
            relative_gap: self.relative_gap,
            primal_infeasibility: self.primal_infeasibility,
            dual_infeasibility: self.dual_infeasibility,
            iterations: self.iterations,
        }
    }

    pub fn block(&self, id: BlockId) -> &CMat {
        &self.x[id.0]
    }

    pub fn scalar(&self, id: BlockId) -> f64 {
        self.x[id.0][(0, 0)].re
    }
}

/// Convergence summary of a solve, without the primal and dual variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverReport {
    pub status: SolveStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

/// A conic solver that accepts Hermitian PSD block problems.
pub trait ConicBackend: Send + Sync {
    fn solve(&self, problem: &ConicProblem) -> Result<ConicSolution>;
}

/// Real symmetric embedding `[[Re H, −Im H], [Im H, Re H]]` of a Hermitian matrix.
///
/// `H ⪰ 0` iff the embedding is PSD; each eigenvalue of `H` appears twice in
/// the embedding's spectrum and `tr` doubles.
pub fn real_embedding(h: &CMat) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{random_density_matrix, rng_from_seed};
    use crate::linalg::{self, c};
    use nalgebra::SymmetricEigen;

    #[test]
    fn embedding_doubles_spectrum() {
        let mut rng = rng_from_seed(3);
        let rho = random_density_matrix(3, &mut rng);
        let mut herm = rho.matrix().clone();
        herm[(0, 0)] -= c(0.4, 0.0);
        let emb = real_embedding(&herm);
        assert!((emb.clone() - emb.transpose()).norm() < 1e-15);
        let mut ev: Vec<f64> = SymmetricEigen::new(emb).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        let hv = linalg::eigvalsh_desc(&herm);
        for (k, l) in hv.iter().enumerate() {
            assert!((ev[2 * k] - l).abs() < 1e-12);
            assert!((ev[2 * k + 1] - l).abs() < 1e-12);
        }
    }

    #[test]
    fn constraint_terms_are_merged_and_pruned() {
        let mut p = ConicProblem::new();
        let a = p.add_block(2);
        let b = p.add_scalar();
        p.add_constraint(
            [
                (a, linalg::identity(2)),
                (b, linalg::zeros(1)),
                (a, linalg::identity(2)),
            ],
            1.0,
        );
        let con = &p.constraints()[0];
        assert_eq!(con.terms.len(), 1);
        assert_eq!(con.terms[0].coeff[(1, 1)], c(2.0, 0.0));
    }
}
