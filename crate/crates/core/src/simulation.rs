//! Explicit `r`-simulations: mixtures of ensembles confined to rank-`r` subspaces.

use crate::ensemble::{DensityMatrix, Ensemble, SubspaceProjector};
use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance on `Σ q_λ = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Tolerance on `‖Π σ Π − σ‖_F`.
pub const CONFINEMENT_TOL: f64 = 1e-9;

/// One term `q_λ (Π_λ, {σ_{x,λ}})` of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationComponent {
    pub weight: f64,
    pub projector: SubspaceProjector,
    pub states: Vec<DensityMatrix>,
}

/// `ρ_x = Σ_λ q_λ σ_{x,λ}` with every `σ_{x,λ}` supported on `Π_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    rank: usize,
    dim: usize,
    components: Vec<SimulationComponent>,
}

impl Simulation {
    pub fn new(rank: usize, components: Vec<SimulationComponent>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::validation("simulation has no components"));
        };
        let dim = first.projector.dim();
        let m = first.states.len();
        if m == 0 {
            return Err(Error::validation("simulation components carry no states"));
        }
        let mut total = 0.0;
        for (k, comp) in components.iter().enumerate() {
            if !comp.weight.is_finite() || comp.weight < 0.0 {
                return Err(Error::validation(format!("component {k} has weight {}", comp.weight)));
            }
            total += comp.weight;
            if comp.projector.rank() != rank {
                return Err(Error::validation(format!(
                    "component {k} projector has rank {}, expected {rank}",
                    comp.projector.rank()
                )));
            }
            if comp.projector.dim() != dim {
                return Err(Error::validation(format!("component {k} has dimension {}", comp.projector.dim())));
            }
            if comp.states.len() != m {
                return Err(Error::validation(format!(
                    "component {k} has {} states, expected {m}",
                    comp.states.len()
                )));
            }
            for (x, sigma) in comp.states.iter().enumerate() {
                if sigma.dim() != dim {
                    return Err(Error::validation(format!("state {x} of component {k} has wrong dimension")));
                }
                let defect = comp.projector.confinement_defect(sigma.matrix());
                if defect > CONFINEMENT_TOL {
                    return Err(Error::validation(format!(
                        "state {x} of component {k} leaks out of its subspace (defect {defect:e})"
                    )));
                }
            }
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::validation(format!("component weights sum to {total}")));
        }
        Ok(Self { rank, dim, components })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_states(&self) -> usize {
        self.components[0].states.len()
    }

    pub fn components(&self) -> &[SimulationComponent] {
        &self.components
    }

    /// The simulated ensemble `ρ_x = Σ_λ q_λ σ_{x,λ}`.
    pub fn reconstruct(&self) -> Ensemble {
        let states = (0..self.num_states())
            .map(|x| {
                let acc = self
                    .components
                    .iter()
                    .fold(linalg::zeros(self.dim), |acc, comp| acc + comp.states[x].matrix().scale(comp.weight));
                DensityMatrix::from_matrix(acc).expect("convex combination of states")
            })
            .collect();
        Ensemble::new(states).expect("components share dimension and size")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{projector_from_basis_subset, DensityMatrix};
    use crate::linalg::{basis_vector, identity};

    fn qubit_component(weight: f64, axis: usize) -> SimulationComponent {
        let proj = projector_from_basis_subset(&identity(2), &[axis]).unwrap();
        let s = DensityMatrix::pure(&basis_vector(2, axis)).unwrap();
        SimulationComponent {
            weight,
            projector: proj,
            states: vec![s.clone(), s],
        }
    }

    #[test]
    fn reconstruct_mixes_components() {
        let sim = Simulation::new(1, vec![qubit_component(0.5, 0), qubit_component(0.5, 1)]).unwrap();
        let ens = sim.reconstruct();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(ens.states().iter().all(|s| s.distance(&mixed) < 1e-15));
    }

    #[test]
    fn validation_failures() {
        assert!(Simulation::new(1, vec![qubit_component(0.4, 0), qubit_component(0.5, 1)]).is_err());
        assert!(Simulation::new(2, vec![qubit_component(1.0, 0)]).is_err());
        let mut leaky = qubit_component(1.0, 0);
        leaky.states[1] = DensityMatrix::pure(&basis_vector(2, 1)).unwrap();
        assert!(Simulation::new(1, vec![leaky]).is_err());
        assert!(Simulation::new(1, vec![]).is_err());
    }
}
