//! Evaluate a discrimination witness on noisy orthonormal states and read off
//! the certified lower bound on the absolute dimension as the noise drops.
//!
//! Run with `cargo run --example witness_certificate`.

use absdim::ensemble::{Ensemble, Povm};
use absdim::witness::{certify, vcrit_witness, WitnessSpec};

fn main() -> absdim::Result<()> {
    let d = 4;
    let spec = WitnessSpec::discrimination(Povm::computational(d))?;
    println!("critical visibilities:");
    for r in 1..=d {
        println!("  r = {r}: {:.4}", vcrit_witness(d, r)?);
    }
    println!("\n   v      W     certified r_Q ≥");
    for step in 0..=10 {
        let v = step as f64 / 10.0;
        let cert = certify(&spec, &Ensemble::orthonormal(d, d, v)?)?;
        println!("  {v:.1}  {:.4}  {}", cert.witness_value, cert.certified_lower_bound);
    }
    Ok(())
}
