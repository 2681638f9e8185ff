//! End-to-end runs of the command-line front end through real files.

use absdim::cli::run;
use absdim::ensemble::Povm;
use absdim::io;
use absdim::linalg::{fourier, identity};
use absdim::witness::WitnessSpec;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut stdin: &[u8] = b"";
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("absdim").chain(args.iter().copied()), &mut stdin, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_witness_discriminate() {
    let dir = tempfile::tempdir().unwrap();
    let ens_path = dir.path().join("ens.jsonl");
    let spec_path = dir.path().join("spec.jsonl");
    let povm_path = dir.path().join("povm.jsonl");

    let (code, _, err) = call(&["gen", "--kind", "orthonormal", "--d", "4", "--v", "0.5", "-o", path_str(&ens_path)]);
    assert_eq!(code, 0, "{err}");
    let file = io::read_ensemble(&mut BufReader::new(File::open(&ens_path).unwrap())).unwrap();
    assert_eq!(file.meta.visibility, Some(0.5));

    let spec = WitnessSpec::discrimination(Povm::computational(4)).unwrap();
    io::write_witness(&spec, &mut File::create(&spec_path).unwrap()).unwrap();
    let (code, out, _) = call(&["witness", "--ensemble", path_str(&ens_path), "--spec", path_str(&spec_path)]);
    assert_eq!(code, 0);
    // W = (0.5·3 + 1)/4 = 0.625 exceeds β_2 = 0.5
    assert!(out.contains("witness_value 0.625"), "{out}");
    assert!(out.contains("beta_2 0.5"), "{out}");
    assert!(out.contains("certified_lower_bound 3"), "{out}");

    let (code, out, _) = call(&["discriminate", "--ensemble", path_str(&ens_path), "-o", path_str(&povm_path)]);
    assert_eq!(code, 0);
    assert!(out.contains("w_disc 0.625"), "{out}");
    let povm = io::read_povm(&mut BufReader::new(File::open(&povm_path).unwrap())).unwrap();
    assert_eq!(povm.len(), 4);
}

#[test]
fn simulate_analytic_and_sdp() {
    let dir = tempfile::tempdir().unwrap();
    let sim_path = dir.path().join("sim.jsonl");
    let (code, out, _) = call(&["simulate", "analytic", "--d", "5", "--r", "3", "--m", "4", "-o", path_str(&sim_path)]);
    assert_eq!(code, 0);
    assert!(out.contains("components 10"), "{out}");
    let sim = io::read_simulation(&mut BufReader::new(File::open(&sim_path).unwrap())).unwrap();
    assert_eq!(sim.rank(), 3);
    assert_eq!(sim.num_states(), 4);

    let ens_path = dir.path().join("paper.jsonl");
    let bases_path = dir.path().join("bases.jsonl");
    let out_path = dir.path().join("sdp.jsonl");
    assert_eq!(call(&["gen", "--kind", "paper", "--d", "3", "-o", path_str(&ens_path)]).0, 0);
    io::write_bases(&[identity(3), fourier(3)], &mut File::create(&bases_path).unwrap()).unwrap();
    let (code, out, err) = call(&[
        "simulate", "sdp", "--ensemble", path_str(&ens_path), "--r", "2", "--bases", path_str(&bases_path),
        "-o", path_str(&out_path),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("v_star 0.5909"), "{out}");
    let sim = io::read_simulation(&mut BufReader::new(File::open(&out_path).unwrap())).unwrap();
    assert_eq!(sim.rank(), 2);
}

#[test]
fn haar_check_and_errors() {
    let (code, out, _) = call(&["check", "haar", "--d", "3", "--r", "2", "--n", "4000", "--seed", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("target_visibility 0.5"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"kind\":\"ensemble\",\"dim\":2,\"states\":1}\n{\"state\":0,\"matrix\":[[[1,0],[0,0]]]}\n").unwrap();
    let (code, _, err) = call(&["discriminate", "--ensemble", path_str(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2") && err.contains("matrix"), "{err}");

    let (code, _, _) = call(&["discriminate", "--ensemble", path_str(&dir.path().join("missing"))]);
    assert_eq!(code, 2);
    assert_eq!(call(&["simulate"]).0, 1);
}
