//! Maximize the simulable visibility over a family of subspaces, and show
//! that adding random bases can only help.
//!
//! Run with `cargo run --release --example sdp_simulation`.

use absdim::analytic::vcrit_general;
use absdim::simulate_sdp::{basis_and_uniform_ensemble, max_visibility, SubspaceFamily};

fn main() -> absdim::Result<()> {
    let (d, r) = (3, 2);
    let ensemble = basis_and_uniform_ensemble(d)?;
    println!("universal model: v = {:.4}", vcrit_general(d, r)?);

    let family = SubspaceFamily::computational_and_fourier(d, r)?;
    let res = max_visibility(&ensemble, &family)?;
    println!(
        "computational + Fourier bases: v* = {:.4} with {} active subspaces, gap {:.1e}",
        res.v_star,
        res.simulation.components().len(),
        res.solver.relative_gap
    );
    let target = ensemble.depolarized(res.v_star)?;
    println!("  reconstruction error {:.1e}", res.simulation.reconstruct().max_distance(&target));

    for extra in [1, 3, 6] {
        let family = SubspaceFamily::computational_and_fourier(d, r)?.with_haar_bases(extra, 42);
        let res = max_visibility(&ensemble, &family)?;
        println!("  plus {extra} Haar bases: v* = {:.4}", res.v_star);
    }
    Ok(())
}
