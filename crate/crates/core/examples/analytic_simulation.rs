//! Build explicit lower-rank simulations of noisy orthonormal states and
//! check that they reproduce the target ensemble.
//!
//! Run with `cargo run --example analytic_simulation`.

use absdim::analytic::{
    build_finite_orthonormal_simulation, build_standard_m_state_simulation, vcrit_general, vcrit_m_states,
    vcrit_subspace,
};
use absdim::ensemble::Ensemble;

fn main() -> absdim::Result<()> {
    let (d, r) = (6, 3);
    let sim = build_finite_orthonormal_simulation(d, r)?;
    let v = vcrit_general(d, r)?;
    let err = sim.reconstruct().max_distance(&Ensemble::orthonormal(d, d, v)?);
    println!(
        "all {d} basis states, rank {r}: {} subspaces, v = {v:.4}, reconstruction error {err:.1e}",
        sim.components().len()
    );

    for m in r..d {
        let sim = build_standard_m_state_simulation(d, m, r)?;
        let v = vcrit_m_states(d, m, r)?;
        let err = sim.reconstruct().max_distance(&Ensemble::orthonormal(d, m, v)?);
        println!(
            "{m} of {d} basis states: {} components, v = {v:.4} (subspace bound {:.4}), error {err:.1e}",
            sim.components().len(),
            vcrit_subspace(d, m, r)?
        );
    }
    Ok(())
}
