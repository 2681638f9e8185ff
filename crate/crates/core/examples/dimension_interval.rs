//! Bracket the absolute dimension of random noisy ensembles between the
//! discrimination bound and the best explicit simulation.
//!
//! Run with `cargo run --release --example dimension_interval`.

use absdim::haar::{haar_random_state, rng_from_seed};
use absdim::linalg::CVec;
use absdim::oracle::isotropic_dimension_interval;
use rand::Rng;

fn main() -> absdim::Result<()> {
    let mut rng = rng_from_seed(2);
    println!(" d  m    v     lower  upper  (sources)");
    for _ in 0..12 {
        let d = rng.random_range(2..=5);
        let m = rng.random_range(2..=d + 1);
        let v: f64 = rng.random();
        let states: Vec<CVec> = (0..m).map(|_| haar_random_state(d, &mut rng)).collect();
        let iv = isotropic_dimension_interval(&states, v)?;
        println!(
            " {d}  {m}  {v:.3}    {}      {}     ({:?}, {:?})",
            iv.lower, iv.upper, iv.lower_source, iv.upper_source
        );
    }
    Ok(())
}
