//! Command-line front end. [`cli_main`] parses arguments, dispatches to the
//! library and maps errors to exit codes: 0 success, 1 usage, 2 invalid input,
//! 3 solver failure or infeasibility.

use crate::analytic::{
    build_finite_orthonormal_simulation, build_standard_m_state_simulation, monte_carlo_haar_check,
    vcrit_general, vcrit_m_states, vcrit_subspace,
};
use crate::discrimination::optimal_discrimination;
use crate::ensemble::{uniform_superposition, Ensemble};
use crate::error::{Error, Result};
use crate::haar::{haar_random_state, rng_from_seed};
use crate::io::{self, EnsembleMeta};
use crate::linalg::{basis_vector, CVec};
use crate::simulate_sdp::{basis_and_uniform_states, max_visibility, reproduce_table1, table_csv, SubspaceFamily};
use crate::witness::{certify, vcrit_witness};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "absdim", version, about = "Absolute dimension of quantum ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an ensemble file.
    Gen(GenArgs),
    /// Evaluate a linear witness and its bounds.
    Witness {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Optimal discrimination and the dimension bound it certifies.
    Discriminate {
        /// Ensemble file, `-` for stdin.
        #[arg(long, default_value = "-")]
        ensemble: PathBuf,
        /// Where to write the optimal measurement.
        #[arg(short = 'o', long)]
        povm: Option<PathBuf>,
    },
    /// Closed-form critical visibilities.
    Vcrit {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
    },
    /// Build lower-rank simulations.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Regenerate published tables.
    #[command(subcommand)]
    Reproduce(ReproduceCommand),
    /// Statistical self-checks.
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    /// First `m` computational basis states.
    Orthonormal,
    /// `|1⟩ … |d−1⟩` and the uniform superposition.
    Paper,
    /// `m` Haar-random pure states.
    Haar,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: Option<usize>,
    /// Visibility of the pure states against white noise.
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// Explicit finite simulation of orthonormal states at the critical visibility.
    Analytic {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Visibility-maximizing simulation over a family of bases.
    Sdp {
        #[arg(long, default_value = "-")]
        ensemble: PathBuf,
        #[arg(long)]
        r: usize,
        /// Bases file replacing the default computational and Fourier bases.
        #[arg(long)]
        bases: Option<PathBuf>,
        /// Extra Haar-random bases appended to the family.
        #[arg(long, default_value_t = 0)]
        haar_bases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ReproduceCommand {
    /// SDP versus universal visibility in dimension 8 for r = 2..7.
    Table1 {
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    /// Monte Carlo check of the random-subspace simulation.
    Haar {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Reals printed to six significant digits.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let s = format!("{:.*}", (5 - exp).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) | Error::Solver(_) => 3,
        _ => 2,
    }
}

/// Runs the CLI on real process streams.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(argv, &mut input, &mut out, &mut err)
}

/// Runs the CLI against the given streams and returns the exit code.
pub fn run<I, T>(argv: I, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, stdin, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn open_input<'a>(path: &PathBuf, stdin: &'a mut dyn BufRead) -> Result<Box<dyn BufRead + 'a>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(stdin))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn with_output(path: &Option<PathBuf>, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let mut file = std::io::BufWriter::new(File::create(p)?);
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        _ => f(out),
    }
}

fn generated_states(args: &GenArgs) -> Result<Vec<CVec>> {
    let d = args.d;
    if d == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let m = args.m.unwrap_or(d);
    match args.kind {
        Kind::Orthonormal => {
            if m == 0 || m > d {
                return Err(Error::domain(format!("need 1 ≤ m ≤ d, got m={m}")));
            }
            Ok((0..m).map(|i| basis_vector(d, i)).collect())
        }
        Kind::Paper => {
            if m != d {
                return Err(Error::domain("this ensemble always has m = d states"));
            }
            basis_and_uniform_states(d)
        }
        Kind::Haar => {
            if m == 0 {
                return Err(Error::domain("need at least one state"));
            }
            let mut rng = rng_from_seed(args.seed);
            Ok((0..m).map(|_| haar_random_state(d, &mut rng)).collect())
        }
    }
}

fn dispatch(command: Command, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Gen(args) => {
            let states = generated_states(&args)?;
            let ensemble = Ensemble::isotropic(&states, args.v)?;
            let meta = EnsembleMeta {
                label: None,
                visibility: Some(args.v),
                generator: Some(format!("{:?}", args.kind).to_lowercase()),
                seed: matches!(args.kind, Kind::Haar).then_some(args.seed),
            };
            with_output(&args.output, out, |w| io::write_ensemble(&ensemble, &meta, w))
        }
        Command::Witness { ensemble, spec } => {
            let ens = io::read_ensemble(&mut *open_input(&ensemble, stdin)?)?.ensemble;
            let spec = io::read_witness(&mut BufReader::new(File::open(spec)?))?;
            let cert = certify(&spec, &ens)?;
            writeln!(out, "witness_value {}", fmt6(cert.witness_value))?;
            for (r, beta) in cert.bounds.iter().enumerate() {
                writeln!(out, "beta_{} {}", r + 1, fmt6(*beta))?;
            }
            writeln!(out, "certified_lower_bound {}", cert.certified_lower_bound)?;
            Ok(())
        }
        Command::Discriminate { ensemble, povm } => {
            let ens = io::read_ensemble(&mut *open_input(&ensemble, stdin)?)?.ensemble;
            let res = optimal_discrimination(&ens)?;
            writeln!(out, "w_disc {}", fmt6(res.w_disc))?;
            writeln!(out, "accessible_info_bits {}", fmt6(res.accessible_info))?;
            writeln!(out, "certified_lower_bound {}", res.certified_lower_bound)?;
            writeln!(out, "solver_iterations {}", res.solver.iterations)?;
            if let Some(path) = povm {
                let mut file = std::io::BufWriter::new(File::create(path)?);
                io::write_povm(&res.povm, &mut file)?;
                file.flush()?;
            }
            Ok(())
        }
        Command::Vcrit { d, r, m, s } => {
            writeln!(out, "witness {}", fmt6(vcrit_witness(d, r)?))?;
            writeln!(out, "general {}", fmt6(vcrit_general(d, r)?))?;
            if let Some(m) = m {
                writeln!(out, "m_states {}", fmt6(vcrit_m_states(d, m, r)?))?;
            }
            if let Some(s) = s {
                writeln!(out, "subspace {}", fmt6(vcrit_subspace(d, s, r)?))?;
            }
            Ok(())
        }
        Command::Simulate(SimulateCommand::Analytic { d, r, m, output }) => {
            let m = m.unwrap_or(d);
            let (sim, v) = if m == d {
                (build_finite_orthonormal_simulation(d, r)?, vcrit_general(d, r)?)
            } else {
                (build_standard_m_state_simulation(d, m, r)?, vcrit_m_states(d, m, r)?)
            };
            let target = Ensemble::orthonormal(d, m, v)?;
            let residual = sim.reconstruct().max_distance(&target);
            let report = format!(
                "visibility {}\ncomponents {}\nreconstruction_residual {:e}\n",
                fmt6(v),
                sim.components().len(),
                residual
            );
            match &output {
                Some(p) if p.as_os_str() != "-" => {
                    with_output(&output, out, |w| io::write_simulation(&sim, w))?;
                    write!(out, "{report}")?;
                }
                _ => {
                    io::write_simulation(&sim, out)?;
                }
            }
            Ok(())
        }
        Command::Simulate(SimulateCommand::Sdp {
            ensemble,
            r,
            bases,
            haar_bases,
            seed,
            output,
        }) => {
            let ens = io::read_ensemble(&mut *open_input(&ensemble, stdin)?)?.ensemble;
            let d = ens.dim();
            let family = match bases {
                Some(path) => SubspaceFamily::new(r, io::read_bases(&mut BufReader::new(File::open(path)?))?)?,
                None => SubspaceFamily::computational_and_fourier(d, r)?,
            }
            .with_haar_bases(haar_bases, seed);
            let res = max_visibility(&ens, &family)?;
            let report = format!(
                "v_star {}\nsimulates_original {}\nbases {}\ncomponents {}\nsolver_iterations {}\nrelative_gap {:e}\n",
                fmt6(res.v_star),
                res.simulates_original(),
                family.unitaries().len(),
                res.simulation.components().len(),
                res.solver.iterations,
                res.solver.relative_gap
            );
            match &output {
                Some(p) if p.as_os_str() != "-" => {
                    with_output(&output, out, |w| io::write_simulation(&res.simulation, w))?;
                    write!(out, "{report}")?;
                }
                _ => write!(out, "{report}")?,
            }
            Ok(())
        }
        Command::Reproduce(ReproduceCommand::Table1 { output }) => {
            let rows = reproduce_table1()?;
            let csv = table_csv(&rows);
            match &output {
                Some(p) if p.as_os_str() != "-" => {
                    std::fs::write(p, &csv)?;
                    writeln!(out, "r  v_numerical  v_analytical  difference")?;
                    for row in &rows {
                        writeln!(
                            out,
                            "{}  {}  {}  {}",
                            row.r,
                            fmt6(row.v_numerical),
                            fmt6(row.v_analytical),
                            fmt6(row.difference)
                        )?;
                    }
                }
                _ => write!(out, "{csv}")?,
            }
            Ok(())
        }
        Command::Check(CheckCommand::Haar { d, r, n, seed }) => {
            if d == 0 {
                return Err(Error::domain("dimension must be positive"));
            }
            let states = vec![basis_vector(d, 0), uniform_superposition(d)];
            let rep = monte_carlo_haar_check(&states, r, n, seed)?;
            writeln!(out, "d {d} r {r} samples {n} rejected {}", rep.rejected)?;
            writeln!(out, "target_visibility {}", fmt6(rep.visibility))?;
            for (label, s) in ["basis", "uniform"].iter().zip(&rep.states) {
                writeln!(
                    out,
                    "{label}: distance {} se {} ratio {}",
                    fmt6(s.distance),
                    fmt6(s.standard_error),
                    if s.standard_error > 0.0 { fmt6(s.distance / s.standard_error) } else { "-".into() }
                )?;
            }
            writeln!(out, "{}", if rep.passes(3.0) { "PASS" } else { "FAIL" })?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("absdim").chain(args.iter().copied());
        let code = run(argv, &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(3.0 / 7.0), "0.428571");
        assert_eq!(fmt6(0.5), "0.5");
        assert_eq!(fmt6(1.0), "1");
        assert_eq!(fmt6(123.456789), "123.457");
        assert_eq!(fmt6(1.5e-7), "1.50000e-7");
        assert_eq!(fmt6(0.0), "0");
    }

    #[test]
    fn vcrit_prints_closed_forms() {
        let (code, out, _) = call(&["vcrit", "--d", "8", "--r", "4"], "");
        assert_eq!(code, 0);
        assert!(out.contains("general 0.428571"), "{out}");
        let (code, out, _) = call(&["vcrit", "--d", "4", "--r", "2", "--m", "3", "--s", "2"], "");
        assert_eq!(code, 0);
        assert!(out.contains("m_states 0.466667"), "{out}");
        assert!(out.contains("subspace 1"), "{out}");
    }

    #[test]
    fn gen_pipes_into_discriminate() {
        let (code, file, _) = call(&["gen", "--kind", "orthonormal", "--d", "2", "--v", "0"], "");
        assert_eq!(code, 0);
        let (code, out, _) = call(&["discriminate"], &file);
        assert_eq!(code, 0);
        assert!(out.contains("w_disc 0.5\n"), "{out}");
        assert!(out.contains("certified_lower_bound 1"), "{out}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["vcrit", "--d", "8"], "").0, 1);
        assert_eq!(call(&["frobnicate"], "").0, 1);
        assert_eq!(call(&["--help"], "").0, 0);
        assert_eq!(call(&["vcrit", "--d", "3", "--r", "5"], "").0, 2);
        let (code, _, err) = call(&["discriminate"], "{\"kind\":\"ensemble\",\"dim\":2}\n");
        assert_eq!(code, 2);
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn gen_is_deterministic() {
        let a = call(&["gen", "--kind", "haar", "--d", "3", "--m", "2", "--v", "0.5", "--seed", "9"], "").1;
        let b = call(&["gen", "--kind", "haar", "--d", "3", "--m", "2", "--v", "0.5", "--seed", "9"], "").1;
        assert_eq!(a, b);
        let c = call(&["gen", "--kind", "haar", "--d", "3", "--m", "2", "--v", "0.5", "--seed", "10"], "").1;
        assert_ne!(a, c);
    }
}
