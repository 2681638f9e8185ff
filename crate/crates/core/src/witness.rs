//! Linear dimension witnesses and their bounds on `r`-simulable ensembles.
//!
//! A witness is fixed by measurements `{M_{b|y}}` and nonnegative weights
//! `c_bxy`. Its value on an ensemble is `W = Σ c_bxy tr(ρ_x M_{b|y})`. Every
//! ensemble that can be prepared from rank-`r` subspaces obeys
//! `W ≤ β_r`, where `β_r` is the sum of the `r` largest eigenvalues of
//! `Σ_x O_x` and `O_x = Σ_{b,y} c_bxy M_{b|y}`. A value above `β_r` therefore
//! certifies an absolute dimension of at least `r + 1`.

use crate::ensemble::{Ensemble, HermitianOperator, Povm};
use crate::error::{Error, Result};
use crate::linalg;

/// Slack used when comparing a witness value against `β_r`.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSpec {
    dim: usize,
    states: usize,
    measurements: Vec<Povm>,
    /// `coefficients[y][b][x]`.
    coefficients: Vec<Vec<Vec<f64>>>,
}

impl WitnessSpec {
    /// `coefficients[y][b][x]` must match the outcome count of measurement `y`
    /// and the number of states `m`.
    pub fn new(measurements: Vec<Povm>, coefficients: Vec<Vec<Vec<f64>>>, states: usize) -> Result<Self> {
        let Some(first) = measurements.first() else {
            return Err(Error::validation("witness needs at least one measurement"));
        };
        if states == 0 {
            return Err(Error::validation("witness must address at least one state"));
        }
        let dim = first.dim();
        if coefficients.len() != measurements.len() {
            return Err(Error::validation(format!(
                "{} coefficient tables for {} measurements",
                coefficients.len(),
                measurements.len()
            )));
        }
        for (y, (povm, table)) in measurements.iter().zip(&coefficients).enumerate() {
            if povm.dim() != dim {
                return Err(Error::validation(format!("measurement {y} has dim {}, expected {dim}", povm.dim())));
            }
            if table.len() != povm.len() {
                return Err(Error::validation(format!(
                    "measurement {y} has {} outcomes but {} coefficient rows",
                    povm.len(),
                    table.len()
                )));
            }
            for (b, row) in table.iter().enumerate() {
                if row.len() != states {
                    return Err(Error::validation(format!(
                        "coefficient row (y={y}, b={b}) has {} entries, expected {states}",
                        row.len()
                    )));
                }
                if let Some(bad) = row.iter().find(|c| !c.is_finite() || **c < 0.0) {
                    return Err(Error::validation(format!(
                        "coefficient (y={y}, b={b}) = {bad} must be finite and nonnegative"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            states,
            measurements,
            coefficients,
        })
    }

    /// Minimum-error discrimination: one `m`-outcome measurement, `c_bx = δ_bx / m`.
    pub fn discrimination(povm: Povm) -> Result<Self> {
        let m = povm.len();
        let table = (0..m)
            .map(|b| (0..m).map(|x| if b == x { 1.0 / m as f64 } else { 0.0 }).collect())
            .collect();
        Self::new(vec![povm], vec![table], m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn measurements(&self) -> &[Povm] {
        &self.measurements
    }

    pub fn coefficients(&self) -> &[Vec<Vec<f64>>] {
        &self.coefficients
    }

    /// Same measurements with every coefficient multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let coefficients = self
            .coefficients
            .iter()
            .map(|table| table.iter().map(|row| row.iter().map(|c| c * t).collect()).collect())
            .collect();
        Self::new(self.measurements.clone(), coefficients, self.states)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCertificate {
    pub witness_value: f64,
    /// `β_r` for `r = 1..=d`, index `r − 1`.
    pub bounds: Vec<f64>,
    pub certified_lower_bound: usize,
}

/// `W(𝓔) = Σ_{b,x,y} c_bxy tr(ρ_x M_{b|y})`.
pub fn witness_value(spec: &WitnessSpec, ensemble: &Ensemble) -> Result<f64> {
    check_compatible(spec, ensemble)?;
    let mut total = 0.0;
    for (povm, table) in spec.measurements.iter().zip(&spec.coefficients) {
        for (element, row) in povm.elements().iter().zip(table) {
            for (rho, &coeff) in ensemble.states().iter().zip(row) {
                if coeff != 0.0 {
                    total += coeff * element.inner(rho.operator());
                }
            }
        }
    }
    Ok(total)
}

/// `O_x = Σ_{b,y} c_bxy M_{b|y}` for 0-based state index `x`.
pub fn operator_o(spec: &WitnessSpec, x: usize) -> Result<HermitianOperator> {
    if x >= spec.states {
        return Err(Error::domain(format!("state index {x} out of range 0..{}", spec.states)));
    }
    let mut acc = linalg::zeros(spec.dim);
    for (povm, table) in spec.measurements.iter().zip(&spec.coefficients) {
        for (element, row) in povm.elements().iter().zip(table) {
            if row[x] != 0.0 {
                acc += element.matrix().scale(row[x]);
            }
        }
    }
    HermitianOperator::new(acc)
}

/// `Σ_x O_x`.
pub fn total_operator(spec: &WitnessSpec) -> HermitianOperator {
    let mut acc = linalg::zeros(spec.dim);
    for x in 0..spec.states {
        acc += operator_o(spec, x).expect("index in range").matrix();
    }
    HermitianOperator::new(acc).expect("sum of Hermitian operators")
}

/// `β_r`: the sum of the `r` largest eigenvalues of `Σ_x O_x`.
pub fn witness_bound(spec: &WitnessSpec, r: usize) -> Result<f64> {
    if r == 0 || r > spec.dim {
        return Err(Error::domain(format!("rank {r} outside 1..={}", spec.dim)));
    }
    Ok(total_operator(spec).eigenvalues().iter().take(r).sum())
}

/// `β_1, …, β_d` from a single eigendecomposition.
pub fn witness_bounds(spec: &WitnessSpec) -> Vec<f64> {
    total_operator(spec)
        .eigenvalues()
        .iter()
        .scan(0.0, |acc, l| {
            *acc += l;
            Some(*acc)
        })
        .collect()
}

/// Witness value, all bounds, and the implied lower bound on the absolute dimension.
pub fn certify(spec: &WitnessSpec, ensemble: &Ensemble) -> Result<WitnessCertificate> {
    certify_with_tolerance(spec, ensemble, VIOLATION_TOL)
}

/// As [`certify`], with a caller-chosen violation slack (useful for noisy data).
pub fn certify_with_tolerance(spec: &WitnessSpec, ensemble: &Ensemble, eps: f64) -> Result<WitnessCertificate> {
    let witness_value = witness_value(spec, ensemble)?;
    let bounds = witness_bounds(spec);
    let violated = bounds
        .iter()
        .enumerate()
        .filter(|(_, &beta)| witness_value > beta + eps)
        .map(|(i, _)| i + 1)
        .max()
        .unwrap_or(0);
    Ok(WitnessCertificate {
        witness_value,
        certified_lower_bound: (violated + 1).min(spec.dim),
        bounds,
    })
}

/// Rank of `Π* O_x Π*` for each `x`, where `Π*` projects onto the top-`r`
/// eigenvectors of `Σ_x O_x`.
///
/// `β_r` is attained when all of these are rank one. When the `r`-th and
/// `(r+1)`-th eigenvalues tie, `Π*` is one of several optimal choices and the
/// report refers to that choice only.
pub fn tightness_diagnostic(spec: &WitnessSpec, r: usize) -> Result<Vec<usize>> {
    if r == 0 || r > spec.dim {
        return Err(Error::domain(format!("rank {r} outside 1..={}", spec.dim)));
    }
    let (_, vecs) = linalg::eigh_desc(total_operator(spec).matrix());
    let top = vecs.columns(0, r).into_owned();
    let proj = &top * top.adjoint();
    (0..spec.states)
        .map(|x| {
            let o = operator_o(spec, x)?;
            Ok(linalg::numerical_rank(&(&proj * o.matrix() * &proj), 1e-9))
        })
        .collect()
}

/// Visibility above which an isotropic ensemble with perfectly
/// distinguishable pure components must have absolute dimension at least `r + 1`:
/// `(r − 1)/(d − 1)`.
pub fn vcrit_witness(d: usize, r: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("critical visibility needs d ≥ 2"));
    }
    if r == 0 || r > d {
        return Err(Error::domain(format!("rank {r} outside 1..={d}")));
    }
    Ok((r - 1) as f64 / (d - 1) as f64)
}

/// One-shot accessible information `log2(m · W_disc)` in bits.
pub fn accessible_info(w_disc: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("need at least one state"));
    }
    let lo = 1.0 / m as f64;
    if !(lo - 1e-9..=1.0 + 1e-9).contains(&w_disc) {
        return Err(Error::domain(format!("success probability {w_disc} outside [1/{m}, 1]")));
    }
    Ok((m as f64 * w_disc.clamp(lo, 1.0)).log2())
}

fn check_compatible(spec: &WitnessSpec, ensemble: &Ensemble) -> Result<()> {
    if ensemble.dim() != spec.dim {
        return Err(Error::validation(format!(
            "ensemble dim {} does not match witness dim {}",
            ensemble.dim(),
            spec.dim
        )));
    }
    if ensemble.len() != spec.states {
        return Err(Error::validation(format!(
            "ensemble has {} states, witness expects {}",
            ensemble.len(),
            spec.states
        )));
    }
    Ok(())
}
