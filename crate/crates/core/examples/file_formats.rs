//! Write an ensemble, a witness and a simulation to line-delimited JSON and
//! read them back.
//!
//! Run with `cargo run --example file_formats`.

use absdim::analytic::build_finite_orthonormal_simulation;
use absdim::ensemble::{Ensemble, Povm};
use absdim::io::{self, EnsembleMeta};
use absdim::witness::WitnessSpec;

fn main() -> absdim::Result<()> {
    let ensemble = Ensemble::orthonormal(2, 2, 0.8)?;
    let meta = EnsembleMeta {
        label: Some("noisy qubit basis".into()),
        visibility: Some(0.8),
        ..Default::default()
    };
    let text = io::to_string(|w| io::write_ensemble(&ensemble, &meta, w))?;
    println!("{text}");
    let back = io::read_ensemble(&mut text.as_bytes())?;
    assert_eq!(back.ensemble, ensemble);

    let spec = WitnessSpec::discrimination(Povm::computational(2))?;
    println!("{}", io::to_string(|w| io::write_witness(&spec, w))?);

    let sim = build_finite_orthonormal_simulation(3, 2)?;
    let text = io::to_string(|w| io::write_simulation(&sim, w))?;
    println!("simulation file: {} lines", text.lines().count());
    assert_eq!(io::read_simulation(&mut text.as_bytes())?, sim);

    match io::read_ensemble(&mut "{\"kind\":\"ensemble\",\"dim\":2}".as_bytes()) {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
