//! Infeasible-start primal-dual interior-point method for Hermitian block SDPs.
//!
//! Search direction: HKM (`ΔX = σμZ⁻¹ − X − X ΔZ Z⁻¹`, symmetrized), with a
//! Mehrotra predictor-corrector step. The Schur complement
//! `M_ij = Re tr(A_i X A_j Z⁻¹)` is assembled block by block, touching only
//! the constraints that act on each block, and factored densely.

use super::presolve::independent_constraints;
use super::{ConicBackend, ConicProblem, ConicSolution, Constraint, SolveStatus};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitize, re_trace_product, CMat};
use nalgebra::{Cholesky, DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct IpmSettings {
    /// Target for the relative duality gap.
    pub gap_tol: f64,
    /// Target for relative primal and dual residuals.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    pub verbose: bool,
}

impl Default for IpmSettings {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iter: 120,
            step_fraction: 0.95,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct InteriorPoint {
    pub settings: IpmSettings,
}

impl InteriorPoint {
    pub fn new(settings: IpmSettings) -> Self {
        Self { settings }
    }
}

impl ConicBackend for InteriorPoint {
    fn solve(&self, problem: &ConicProblem) -> Result<ConicSolution> {
        let kept = independent_constraints(problem)?;
        let reduced = Reduced::new(problem, &kept);
        let mut sol = reduced.run(&self.settings)?;
        // scatter multipliers back to the original numbering
        let mut y = vec![0.0; problem.num_constraints()];
        for (slot, &orig) in kept.iter().enumerate() {
            y[orig] = sol.y[slot];
        }
        sol.y = y;
        Ok(sol)
    }
}

struct Reduced<'a> {
    sizes: &'a [usize],
    cons: Vec<&'a Constraint>,
    b: DVector<f64>,
    c: Vec<CMat>,
    /// For each block, `(constraint, term)` pairs acting on it.
    by_block: Vec<Vec<(usize, usize)>>,
}

impl<'a> Reduced<'a> {
    fn new(problem: &'a ConicProblem, kept: &[usize]) -> Self {
        let cons: Vec<&Constraint> = kept.iter().map(|&i| &problem.constraints()[i]).collect();
        let b = DVector::from_iterator(cons.len(), cons.iter().map(|c| c.rhs));
        let sizes = problem.block_sizes();
        let c = (0..sizes.len())
            .map(|k| {
                problem
                    .objective(super::BlockId(k))
                    .cloned()
                    .unwrap_or_else(|| linalg::zeros(sizes[k]))
            })
            .collect();
        let mut by_block = vec![Vec::new(); sizes.len()];
        for (i, con) in cons.iter().enumerate() {
            for (t, term) in con.terms.iter().enumerate() {
                by_block[term.block.0].push((i, t));
            }
        }
        Self {
            sizes,
            cons,
            b,
            c,
            by_block,
        }
    }

    fn coeff(&self, i: usize, t: usize) -> &CMat {
        &self.cons[i].terms[t].coeff
    }

    /// `A(Y)_i = Σ_k Re tr(A_ik Y_k)`; `Y_k` need not be Hermitian.
    fn apply_a(&self, y: &[CMat]) -> DVector<f64> {
        DVector::from_iterator(
            self.cons.len(),
            self.cons.iter().map(|con| {
                con.terms
                    .iter()
                    .map(|t| re_trace_product(&t.coeff, &y[t.block.0]))
                    .sum::<f64>()
            }),
        )
    }

    /// `A*(y)_k = Σ_i y_i A_ik`.
    fn apply_at(&self, y: &DVector<f64>) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.sizes.iter().map(|&s| linalg::zeros(s)).collect();
        for (i, con) in self.cons.iter().enumerate() {
            if y[i] == 0.0 {
                continue;
            }
            for t in &con.terms {
                out[t.block.0] += t.coeff.scale(y[i]);
            }
        }
        out
    }

    fn schur(&self, x: &[CMat], zinv: &[CMat]) -> DMatrix<f64> {
        let p = self.cons.len();
        let mut m = DMatrix::<f64>::zeros(p, p);
        for (k, list) in self.by_block.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let g: Vec<CMat> = list
                .iter()
                .map(|&(j, tj)| &x[k] * self.coeff(j, tj) * &zinv[k])
                .collect();
            for (a, &(i, ti)) in list.iter().enumerate() {
                let ai = self.coeff(i, ti);
                for (bidx, &(j, _)) in list.iter().enumerate().skip(a) {
                    let v = re_trace_product(ai, &g[bidx]);
                    m[(i, j)] += v;
                    if i != j {
                        m[(j, i)] += v;
                    }
                }
            }
        }
        m
    }

    fn initial_point(&self) -> (Vec<CMat>, Vec<CMat>) {
        let mut x = Vec::with_capacity(self.sizes.len());
        let mut z = Vec::with_capacity(self.sizes.len());
        for (k, &s) in self.sizes.iter().enumerate() {
            let sf = s as f64;
            let mut xi = 10.0_f64.max(sf.sqrt());
            let mut eta = 10.0_f64.max(sf.sqrt()).max(linalg::frobenius(&self.c[k]));
            for &(i, t) in &self.by_block[k] {
                let norm = linalg::frobenius(self.coeff(i, t));
                xi = xi.max(sf * (1.0 + self.b[i].abs()) / (1.0 + norm));
                eta = eta.max(norm);
            }
            x.push(linalg::identity(s).scale(xi));
            z.push(linalg::identity(s).scale(eta));
        }
        (x, z)
    }

    fn run(&self, settings: &IpmSettings) -> Result<ConicSolution> {
        let n_total: f64 = self.sizes.iter().sum::<usize>() as f64;
        let b_norm = self.b.norm();
        let c_norm = self.c.iter().map(|c| linalg::frobenius(c).powi(2)).sum::<f64>().sqrt();

        let (mut x, mut z) = self.initial_point();
        let mut y = DVector::<f64>::zeros(self.cons.len());

        let mut last = None;
        for iter in 0..=settings.max_iter {
            let ax = self.apply_a(&x);
            let rp = &self.b - &ax;
            let aty = self.apply_at(&y);
            let rd: Vec<CMat> = (0..x.len()).map(|k| &self.c[k] - &aty[k] - &z[k]).collect();

            let pobj: f64 = (0..x.len()).map(|k| re_trace_product(&self.c[k], &x[k])).sum();
            let dobj = self.b.dot(&y);
            let xz: f64 = (0..x.len()).map(|k| re_trace_product(&x[k], &z[k])).sum();
            let mu = xz / n_total;
            let pinf = rp.norm() / (1.0 + b_norm);
            let dinf = rd.iter().map(|r| linalg::frobenius(r).powi(2)).sum::<f64>().sqrt() / (1.0 + c_norm);
            let denom = 1.0 + pobj.abs() + dobj.abs();
            let gap = ((pobj - dobj).abs()).max(xz.abs()) / denom;

            if settings.verbose {
                eprintln!(
                    "ipm {iter:3}  p {pobj:+.9e}  d {dobj:+.9e}  gap {gap:.2e}  pinf {pinf:.2e}  dinf {dinf:.2e}"
                );
            }

            let snapshot = |status| ConicSolution {
                status,
                x: x.clone(),
                y: y.as_slice().to_vec(),
                primal_objective: pobj,
                dual_objective: dobj,
                relative_gap: (pobj - dobj).abs() / denom,
                primal_infeasibility: pinf,
                dual_infeasibility: dinf,
                iterations: iter,
            };
            if gap <= settings.gap_tol && pinf <= settings.feas_tol && dinf <= settings.feas_tol {
                return Ok(snapshot(SolveStatus::Optimal));
            }
            if y.amax() > 1e10 && dinf <= 1e-6 {
                return Err(Error::Infeasible(format!(
                    "dual ray detected after {iter} iterations (primal residual {pinf:.2e})"
                )));
            }
            if iter == settings.max_iter {
                last = Some(snapshot(SolveStatus::AlmostOptimal));
                break;
            }

            let zinv: Vec<CMat> = z
                .iter()
                .map(|zk| {
                    Cholesky::new(hermitize(zk))
                        .map(|ch| hermitize(&ch.inverse()))
                        .ok_or_else(|| Error::Solver("dual iterate lost definiteness".into()))
                })
                .collect::<Result<_>>()?;
            let schur = factor_schur(self.schur(&x, &zinv))?;

            // X R_d Z⁻¹ enters both right-hand sides
            let x_rd_zinv: Vec<CMat> = (0..x.len()).map(|k| &x[k] * &rd[k] * &zinv[k]).collect();
            let base = &rp + &ax + self.apply_a(&x_rd_zinv);

            // predictor (σ = 0)
            let dy_a = schur.solve(&base);
            let dz_a = self.dual_direction(&rd, &dy_a);
            let dx_a: Vec<CMat> = (0..x.len())
                .map(|k| hermitize(&(-&x[k] - &x[k] * &dz_a[k] * &zinv[k])))
                .collect();
            let ap = max_step(&x, &dx_a)?.min(1.0);
            let ad = max_step(&z, &dz_a)?.min(1.0);
            let mu_aff: f64 = (0..x.len())
                .map(|k| re_trace_product(&(&x[k] + dx_a[k].scale(ap)), &(&z[k] + dz_a[k].scale(ad))))
                .sum::<f64>()
                / n_total;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            // corrector
            let second: Vec<CMat> = (0..x.len()).map(|k| &dx_a[k] * &dz_a[k] * &zinv[k]).collect();
            let centering: Vec<CMat> = zinv.iter().map(|zi| zi.scale(sigma * mu)).collect();
            let rhs = &base - self.apply_a(&centering) + self.apply_a(&second);
            let dy = schur.solve(&rhs);
            let dz = self.dual_direction(&rd, &dy);
            let dx: Vec<CMat> = (0..x.len())
                .map(|k| {
                    hermitize(&(&centering[k] - &x[k] - &x[k] * &dz[k] * &zinv[k] - &second[k]))
                })
                .collect();

            let tau = settings.step_fraction;
            let ap = (tau * max_step(&x, &dx)?).min(1.0);
            let ad = (tau * max_step(&z, &dz)?).min(1.0);
            for k in 0..x.len() {
                x[k] += dx[k].scale(ap);
                z[k] += dz[k].scale(ad);
            }
            y += dy.scale(ad);
        }

        let sol = last.expect("loop always records the final iterate");
        let worst = sol.relative_gap.max(sol.primal_infeasibility).max(sol.dual_infeasibility);
        if worst <= 1e-5 {
            Ok(sol)
        } else {
            Err(Error::Solver(format!(
                "no convergence in {} iterations (gap {:.2e}, pinf {:.2e}, dinf {:.2e})",
                settings.max_iter, sol.relative_gap, sol.primal_infeasibility, sol.dual_infeasibility
            )))
        }
    }

    fn dual_direction(&self, rd: &[CMat], dy: &DVector<f64>) -> Vec<CMat> {
        let at = self.apply_at(dy);
        rd.iter().zip(at).map(|(r, a)| r - a).collect()
    }
}

/// Cholesky of the Schur complement with a growing diagonal shift on failure.
fn factor_schur(m: DMatrix<f64>) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let scale = m.diagonal().amax().max(1.0);
    let mut shift = 0.0;
    for _ in 0..8 {
        let mut trial = m.clone();
        if shift > 0.0 {
            for i in 0..trial.nrows() {
                trial[(i, i)] += shift;
            }
        }
        if let Some(ch) = Cholesky::new(trial) {
            return Ok(ch);
        }
        shift = if shift == 0.0 { 1e-14 * scale } else { shift * 100.0 };
    }
    Err(Error::Solver("Schur complement is not positive definite".into()))
}

/// Largest `α` with `X_k + α D_k ⪰ 0` for every block.
fn max_step(x: &[CMat], d: &[CMat]) -> Result<f64> {
    let mut alpha = f64::INFINITY;
    for (xk, dk) in x.iter().zip(d) {
        if xk.nrows() == 1 {
            let (xv, dv) = (xk[(0, 0)].re, dk[(0, 0)].re);
            if dv < 0.0 {
                alpha = alpha.min(-xv / dv);
            }
            continue;
        }
        let ch = Cholesky::new(hermitize(xk))
            .ok_or_else(|| Error::Solver("iterate lost definiteness".into()))?;
        let l = ch.l();
        let t = l
            .solve_lower_triangular(dk)
            .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
        let w = l
            .solve_lower_triangular(&t.adjoint())
            .ok_or_else(|| Error::Solver("singular Cholesky factor".into()))?;
        let lmin = linalg::min_eigenvalue(&w);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMat};
    use crate::sdp::ConicProblem;

    /// min tr(C X) s.t. tr X = 1, X ⪰ 0 has value λ_min(C).
    #[test]
    fn smallest_eigenvalue_program() {
        let cm = CMat::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(2.0, 0.0)],
        );
        let mut p = ConicProblem::new();
        let x = p.add_block(2);
        p.set_objective(x, cm.clone());
        p.add_constraint([(x, linalg::identity(2))], 1.0);
        let sol = InteriorPoint::default().solve(&p).unwrap();
        let expected = linalg::eigvalsh_desc(&cm)[1];
        assert!((sol.primal_objective - expected).abs() < 1e-7);
        assert!((sol.dual_objective - expected).abs() < 1e-7);
        assert_eq!(sol.status, SolveStatus::Optimal);
    }

    /// A linear program in scalar blocks: min x0 + 2 x1, x0 + x1 = 1, x ≥ 0.
    #[test]
    fn scalar_lp() {
        let mut p = ConicProblem::new();
        let a = p.add_scalar();
        let b = p.add_scalar();
        p.set_objective(a, linalg::identity(1));
        p.set_objective(b, linalg::identity(1).scale(2.0));
        p.add_constraint([(a, linalg::identity(1)), (b, linalg::identity(1))], 1.0);
        let sol = InteriorPoint::default().solve(&p).unwrap();
        assert!((sol.scalar(a) - 1.0).abs() < 1e-7);
        assert!(sol.scalar(b).abs() < 1e-7);
    }

    /// Redundant rows are removed before the Newton system is formed.
    #[test]
    fn redundant_constraints_are_tolerated() {
        let mut p = ConicProblem::new();
        let a = p.add_scalar();
        let b = p.add_scalar();
        p.set_objective(a, -linalg::identity(1));
        for _ in 0..3 {
            p.add_constraint([(a, linalg::identity(1)), (b, linalg::identity(1))], 2.0);
        }
        let sol = InteriorPoint::default().solve(&p).unwrap();
        assert!((sol.scalar(a) - 2.0).abs() < 1e-7);
        assert_eq!(sol.y.len(), 3);
    }

    #[test]
    fn infeasible_program_is_reported() {
        // x ≥ 0 and x = −1
        let mut p = ConicProblem::new();
        let a = p.add_scalar();
        p.add_constraint([(a, linalg::identity(1))], -1.0);
        assert!(matches!(InteriorPoint::default().solve(&p), Err(Error::Infeasible(_))));
    }
}
