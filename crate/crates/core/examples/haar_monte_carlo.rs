//! Monte Carlo check that projecting pure states onto Haar-random rank-r
//! subspaces reproduces isotropic noise at visibility (r−1)/(d−1).
//!
//! Run with `cargo run --release --example haar_monte_carlo`.

use absdim::analytic::monte_carlo_haar_check;
use absdim::ensemble::uniform_superposition;
use absdim::haar::{haar_random_state, rng_from_seed};
use absdim::linalg::basis_vector;

fn main() -> absdim::Result<()> {
    for (d, r) in [(3, 2), (4, 2), (4, 3), (5, 3)] {
        let mut rng = rng_from_seed(d as u64);
        let states = vec![basis_vector(d, 0), uniform_superposition(d), haar_random_state(d, &mut rng)];
        let rep = monte_carlo_haar_check(&states, r, 100_000, 1)?;
        print!("d = {d}, r = {r}, v = {:.4}:", rep.visibility);
        for s in &rep.states {
            print!("  {:.2e} ± {:.1e}", s.distance, s.standard_error);
        }
        println!("  {}", if rep.passes(3.0) { "ok" } else { "outside 3 SE" });
    }
    Ok(())
}
