//! Average a random state over the unitaries that fix a pure state ψ. The
//! result is isotropic about ψ, which is why isotropic noise is the natural
//! worst case.
//!
//! Run with `cargo run --release --example twirl_invariance`.

use absdim::ensemble::DensityMatrix;
use absdim::haar::{haar_random_state, random_density_matrix, rng_from_seed};
use absdim::linalg::{eigh_desc, outer};
use absdim::oracle::twirl_about_state;

fn main() -> absdim::Result<()> {
    let mut rng = rng_from_seed(12);
    for d in [2, 3, 5] {
        let psi = haar_random_state(d, &mut rng);
        // a random state biased towards ψ
        let noise = random_density_matrix(d, &mut rng);
        let rho = DensityMatrix::from_matrix(outer(&psi).scale(0.4) + noise.matrix().scale(0.6))?;
        let rep = twirl_about_state(&rho, &psi, 50_000, 3)?;
        let (_, vecs) = eigh_desc(rep.state.matrix());
        let overlap = psi.dotc(&vecs.column(0).into_owned()).norm_sqr();
        println!(
            "d = {d}: fitted v = {:+.4}, off-isotropic residual {:.2e} (SE {:.1e}), top eigenvector overlap {:.5}",
            rep.fitted_v, rep.residual, rep.standard_error, overlap
        );
    }
    Ok(())
}
