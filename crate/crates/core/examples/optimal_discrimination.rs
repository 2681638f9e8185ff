//! Solve minimum-error discrimination by semidefinite programming for the
//! qubit trine and for noisy orthonormal ensembles.
//!
//! Run with `cargo run --release --example optimal_discrimination`.

use absdim::discrimination::optimal_discrimination;
use absdim::ensemble::Ensemble;
use absdim::linalg::{c, CVec};

fn main() -> absdim::Result<()> {
    let trine: Vec<CVec> = (0..3)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            CVec::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)])
        })
        .collect();
    let res = optimal_discrimination(&Ensemble::isotropic(&trine, 1.0)?)?;
    println!(
        "trine: success {:.6}, accessible information {:.4} bits, r_Q ≥ {} ({} iterations)",
        res.w_disc, res.accessible_info, res.certified_lower_bound, res.solver.iterations
    );

    for d in [3, 5] {
        for v in [0.2, 0.5, 0.9] {
            let res = optimal_discrimination(&Ensemble::orthonormal(d, d, v)?)?;
            println!(
                "d = {d}, v = {v}: success {:.6} (closed form {:.6}), r_Q ≥ {}",
                res.w_disc,
                (v * (d as f64 - 1.0) + 1.0) / d as f64,
                res.certified_lower_bound
            );
        }
    }
    Ok(())
}
