//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use absdim::analytic::{
    build_finite_basis_simulation, build_finite_orthonormal_simulation, build_m_state_simulation,
    build_standard_m_state_simulation, monte_carlo_haar_check, vcrit_general, vcrit_m_states,
};
use absdim::discrimination::{certify_via_discrimination, optimal_discrimination};
use absdim::ensemble::{uniform_superposition, Ensemble};
use absdim::haar::{haar_random_state, random_density_matrix, random_povm, rng_from_seed, sample_haar_unitary, SimRng};
use absdim::linalg::{basis_vector, c, CVec};
use absdim::oracle::{isotropic_dimension_interval, pure_ensemble_rq};
use absdim::simulate_sdp::{
    basis_and_uniform_ensemble, basis_and_uniform_states, max_visibility, reproduce_table1, SubspaceFamily,
};
use absdim::simulation::Simulation;
use absdim::witness::{witness_bound, witness_bounds, witness_value, WitnessSpec};
use rand::Rng;
use std::time::Instant;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// `(r−1)(d(m−r)+m) / (m(d(m−r)+r−1))`, the second printed form of the m-state visibility.
fn m_state_visibility_alt(d: usize, m: usize, r: usize) -> f64 {
    let (d, m, r) = (d as f64, m as f64, r as f64);
    (r - 1.0) * (d * (m - r) + m) / (m * (d * (m - r) + r - 1.0))
}

fn criterion_1_table() -> Outcome {
    let expected = [0.1537, 0.3099, 0.4647, 0.6133, 0.7525, 0.8800];
    let start = Instant::now();
    let rows = match reproduce_table1() {
        Ok(rows) => rows,
        Err(e) => return check(false, format!("solver error: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let mut ok = secs <= 600.0;
    let mut parts = Vec::new();
    for (row, want) in rows.iter().zip(expected) {
        let analytic_exact = row.v_analytical == (row.r - 1) as f64 / 7.0;
        ok &= (row.v_numerical - want).abs() <= 1e-3 && analytic_exact;
        parts.push(format!("r={} {:.4}", row.r, row.v_numerical));
    }
    ok &= rows.len() == 6;
    check(ok, format!("{} in {secs:.1}s", parts.join(", ")))
}

fn criterion_2_spot_value() -> Outcome {
    let ens = basis_and_uniform_ensemble(3).unwrap();
    let fam = SubspaceFamily::computational_and_fourier(3, 2).unwrap();
    match max_visibility(&ens, &fam) {
        Ok(res) => check(
            (res.v_star - 0.5909).abs() <= 1e-3 && res.v_star > 0.5,
            format!("v = {:.6}", res.v_star),
        ),
        Err(e) => check(false, format!("solver error: {e}")),
    }
}

fn criterion_3_finite() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d in 2..=8 {
        for r in 2..=d {
            let sim = build_finite_orthonormal_simulation(d, r).unwrap();
            let target = Ensemble::orthonormal(d, d, (r - 1) as f64 / (d - 1) as f64).unwrap();
            worst = worst.max(sim.reconstruct().max_distance(&target));
            cases += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        cases == 28 && worst <= 1e-12 && secs < 1.0,
        format!("{cases} cases, max error {worst:.2e}, {secs:.3}s"),
    )
}

fn criterion_4_m_states() -> Outcome {
    let mut worst_rec: f64 = 0.0;
    let mut worst_alg: f64 = 0.0;
    let mut cases = 0;
    for d in 2..=6 {
        for m in 1..d {
            for r in 1..=m {
                if r == 1 && m == 1 {
                    // both printed forms are 0/0 here
                    continue;
                }
                let v = m_state_visibility_alt(d, m, r);
                let sim = build_standard_m_state_simulation(d, m, r).unwrap();
                let target = Ensemble::orthonormal(d, m, v).unwrap();
                worst_rec = worst_rec.max(sim.reconstruct().max_distance(&target));
                worst_alg = worst_alg.max((vcrit_m_states(d, m, r).unwrap() - v).abs());
                cases += 1;
            }
        }
    }
    check(
        worst_rec <= 1e-12 && worst_alg <= 1e-12,
        format!("{cases} cases (r = m = 1 excluded), reconstruction {worst_rec:.2e}, forms differ by {worst_alg:.2e}"),
    )
}

fn trine() -> Ensemble {
    let states: Vec<CVec> = (0..3)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            CVec::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)])
        })
        .collect();
    Ensemble::isotropic(&states, 1.0).unwrap()
}

fn criterion_5_discrimination() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        for v in [0.0, 0.3, 0.7, 1.0] {
            let ens = Ensemble::orthonormal(d, d, v).unwrap();
            let w = optimal_discrimination(&ens).unwrap().w_disc;
            worst = worst.max((w - (v * (d as f64 - 1.0) + 1.0) / d as f64).abs());
        }
    }
    let trine_err = (optimal_discrimination(&trine()).unwrap().w_disc - 2.0 / 3.0).abs();
    check(
        worst <= 1e-6 && trine_err <= 1e-6,
        format!("isotropic max error {worst:.2e}, trine error {trine_err:.2e}"),
    )
}

fn criterion_6_certification() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for d in 2..=6 {
        for r in 1..=d {
            let vc = vcrit_general(d, r).unwrap();
            if r < d {
                let ens = Ensemble::orthonormal(d, d, vc + 0.02).unwrap();
                let got = certify_via_discrimination(&ens).unwrap();
                checked += 1;
                if got < r + 1 {
                    failures.push(format!("d={d} r={r} above: {got}"));
                }
            }
            if r > 1 {
                let ens = Ensemble::orthonormal(d, d, vc - 0.02).unwrap();
                let got = certify_via_discrimination(&ens).unwrap();
                checked += 1;
                if got > r {
                    failures.push(format!("d={d} r={r} below: {got}"));
                }
            }
        }
    }
    check(failures.is_empty(), format!("{checked} checks {}", failures.join("; ")))
}

fn criterion_7_haar() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, r) in [(3, 2), (4, 2), (4, 3)] {
        let start = Instant::now();
        let mut rng = rng_from_seed(700 + d as u64 * 10 + r as u64);
        let states = vec![basis_vector(d, 0), uniform_superposition(d), haar_random_state(d, &mut rng)];
        let rep = monte_carlo_haar_check(&states, r, 100_000, 7 + d as u64 * 10 + r as u64).unwrap();
        let secs = start.elapsed().as_secs_f64();
        ok &= rep.passes(3.0) && secs <= 60.0;
        let ratio = rep
            .states
            .iter()
            .map(|s| s.distance / s.standard_error)
            .fold(0.0, f64::max);
        parts.push(format!("(d={d},r={r}) max dist/SE {ratio:.2} in {secs:.1}s"));
    }
    check(ok, parts.join(", "))
}

fn random_spec(d: usize, m: usize, rng: &mut SimRng) -> WitnessSpec {
    let ny = rng.random_range(1..4);
    let mut povms = Vec::new();
    let mut tables = Vec::new();
    for _ in 0..ny {
        let k = rng.random_range(2..5);
        povms.push(random_povm(d, k, rng));
        tables.push((0..k).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect());
    }
    WitnessSpec::new(povms, tables, m).unwrap()
}

fn random_ensemble(d: usize, m: usize, rng: &mut SimRng) -> Ensemble {
    Ensemble::new((0..m).map(|_| random_density_matrix(d, rng)).collect()).unwrap()
}

fn random_isotropic(d: usize, m: usize, v: f64, rng: &mut SimRng) -> Ensemble {
    let states: Vec<CVec> = (0..m).map(|_| haar_random_state(d, rng)).collect();
    Ensemble::isotropic(&states, v).unwrap()
}

/// Witness and discrimination bounds for rank `r` must hold on every `r`-simulation.
fn simulation_respects_bounds(sim: &Simulation, specs: &mut dyn FnMut(usize, usize) -> WitnessSpec) -> Result<(), String> {
    let ens = sim.reconstruct();
    let (d, m, r) = (ens.dim(), ens.len(), sim.rank());
    for _ in 0..3 {
        let spec = specs(d, m);
        let w = witness_value(&spec, &ens).unwrap();
        let beta = witness_bound(&spec, r).unwrap();
        if w > beta + 1e-9 {
            return Err(format!("witness {w} > β_{r} = {beta}"));
        }
    }
    if m >= 2 {
        let w = optimal_discrimination(&ens).map_err(|e| e.to_string())?.w_disc;
        if w > r as f64 / m as f64 + 1e-6 {
            return Err(format!("w_disc {w} > {r}/{m}"));
        }
    }
    Ok(())
}

fn criterion_8_properties() -> Outcome {
    const N: usize = 50;
    let mut rng = rng_from_seed(8_000);
    let mut failures: Vec<String> = Vec::new();

    // (a) monotonicity of β_r and (b) β_d equals the trace of Σ_x O_x
    for i in 0..N {
        let d = rng.random_range(2..7);
        let m = rng.random_range(1..6);
        let spec = random_spec(d, m, &mut rng);
        let b = witness_bounds(&spec);
        if !b.windows(2).all(|w| w[0] <= w[1] + 1e-12) {
            failures.push(format!("monotonicity #{i}"));
        }
        let trace: f64 = (0..m)
            .map(|x| absdim::witness::operator_o(&spec, x).unwrap().trace())
            .sum();
        if (b[d - 1] - trace).abs() > 1e-9 * (1.0 + trace) {
            failures.push(format!("trace identity #{i}"));
        }
    }

    // (c) unitary invariance of w_disc
    let mut worst_inv: f64 = 0.0;
    for _ in 0..N {
        let d = rng.random_range(2..5);
        let m = rng.random_range(2..5);
        let ens = random_ensemble(d, m, &mut rng);
        let u = sample_haar_unitary(d, &mut rng);
        let a = optimal_discrimination(&ens).unwrap().w_disc;
        let b = optimal_discrimination(&ens.rotated(&u)).unwrap().w_disc;
        worst_inv = worst_inv.max((a - b).abs());
    }
    if worst_inv > 1e-7 {
        failures.push(format!("unitary invariance {worst_inv:.2e}"));
    }

    // (d) soundness of bounds against constructed simulations
    let mut spec_rng = rng_from_seed(8_001);
    let mut specs = |d: usize, m: usize| random_spec(d, m, &mut spec_rng);
    let mut worst_rec: f64 = 0.0;
    for i in 0..N {
        let d = rng.random_range(2..6);
        let r = rng.random_range(1..=d);
        let sim = match i % 3 {
            0 => build_finite_basis_simulation(&sample_haar_unitary(d, &mut rng), r.max(2).min(d)).unwrap(),
            1 => {
                let m = rng.random_range(r.max(2)..=d);
                let u = sample_haar_unitary(d, &mut rng);
                build_m_state_simulation(&u.columns(0, m).into_owned(), &u.columns(m, d - m).into_owned(), r).unwrap()
            }
            _ => {
                let d = d.min(4);
                let r = r.min(d);
                let m = rng.random_range(2..=d + 1);
                let ens = random_isotropic(d, m, 1.0, &mut rng);
                let fam = SubspaceFamily::computational_and_fourier(d, r).unwrap();
                let res = max_visibility(&ens, &fam).unwrap();
                let target = ens.depolarized(res.v_star).unwrap();
                worst_rec = worst_rec.max(res.simulation.reconstruct().max_distance(&target));
                res.simulation
            }
        };
        if let Err(e) = simulation_respects_bounds(&sim, &mut specs) {
            failures.push(format!("soundness #{i}: {e}"));
        }
    }
    if worst_rec > 1e-6 {
        failures.push(format!("SDP reconstruction {worst_rec:.2e}"));
    }

    // (e) enlarging the family never lowers the visibility
    let mut worst_drop: f64 = 0.0;
    for _ in 0..N {
        let d = rng.random_range(2..5);
        let r = rng.random_range(1..d);
        let m = rng.random_range(2..=d);
        let ens = random_isotropic(d, m, 1.0, &mut rng);
        let extra = sample_haar_unitary(d, &mut rng);
        let small = SubspaceFamily::new(r, vec![absdim::linalg::identity(d)]).unwrap();
        let large = SubspaceFamily::new(r, vec![absdim::linalg::identity(d), extra]).unwrap();
        let a = max_visibility(&ens, &small).unwrap().v_star;
        let b = max_visibility(&ens, &large).unwrap().v_star;
        worst_drop = worst_drop.max(a - b);
    }
    if worst_drop > 1e-7 {
        failures.push(format!("family monotonicity drop {worst_drop:.2e}"));
    }

    check(
        failures.is_empty(),
        format!(
            "5 suites × {N}; invariance {worst_inv:.1e}, SDP reconstruction {worst_rec:.1e}, family drop {worst_drop:.1e} {}",
            failures.join("; ")
        ),
    )
}

fn criterion_9_oracles() -> Outcome {
    let mut failures = Vec::new();
    for d in 2..=8 {
        let rq = pure_ensemble_rq(&basis_and_uniform_states(d).unwrap()).unwrap();
        if rq != d {
            failures.push(format!("span d={d}: {rq}"));
        }
        let cert = certify_via_discrimination(&Ensemble::orthonormal(d, d, 1.0).unwrap()).unwrap();
        if cert != d {
            failures.push(format!("discrimination d={d}: {cert}"));
        }
    }
    check(failures.is_empty(), format!("d = 2..=8 {}", failures.join("; ")))
}

fn interval_soundness() -> Outcome {
    let mut rng = rng_from_seed(9_100);
    let mut exact = 0;
    for i in 0..100 {
        let d = rng.random_range(2..=5);
        let m = rng.random_range(2..=d + 1);
        let v: f64 = rng.random();
        let states: Vec<CVec> = (0..m).map(|_| haar_random_state(d, &mut rng)).collect();
        let iv = isotropic_dimension_interval(&states, v).unwrap();
        if !iv.is_consistent() {
            return check(false, format!("trial {i}: lower {} > upper {}", iv.lower, iv.upper));
        }
        exact += usize::from(iv.is_exact());
    }
    pass(format!("100 trials, lower ≤ upper in all, {exact} exact"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 table reproduction", criterion_1_table),
        ("2 d=3 spot value", criterion_2_spot_value),
        ("3 finite reconstruction", criterion_3_finite),
        ("4 m<d construction", criterion_4_m_states),
        ("5 discrimination SDP", criterion_5_discrimination),
        ("6 certification consistency", criterion_6_certification),
        ("7 Monte Carlo Haar check", criterion_7_haar),
        ("8 property suites", criterion_8_properties),
        ("9 oracle agreement", criterion_9_oracles),
        ("note interval soundness", interval_soundness),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.ok);
        println!(
            "criterion {name}: {verdict} ({:.1}s) {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
