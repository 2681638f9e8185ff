//! Removal of linearly dependent equality constraints.
//!
//! The Schur complement of an interior-point step is singular when two
//! constraint rows are dependent, so dependent rows are detected once via a
//! pivoted Cholesky factorization of the constraint Gram matrix and dropped.
//! A dropped row whose right-hand side is not the matching combination of the
//! kept right-hand sides makes the problem infeasible.

use super::ConicProblem;
use crate::error::{Error, Result};
use crate::linalg::re_trace_product;

const RANK_TOL: f64 = 1e-10;
const CONSISTENCY_TOL: f64 = 1e-8;

/// Gram matrix `G_ij = Σ_k ⟨A_ik, A_jk⟩`, stored dense row-major.
fn constraint_gram(problem: &ConicProblem) -> Vec<Vec<f64>> {
    let p = problem.num_constraints();
    let mut by_block: Vec<Vec<(usize, usize)>> = vec![Vec::new(); problem.num_blocks()];
    for (i, con) in problem.constraints().iter().enumerate() {
        for (t, term) in con.terms.iter().enumerate() {
            by_block[term.block.0].push((i, t));
        }
    }
    let mut g = vec![vec![0.0; p]; p];
    let cons = problem.constraints();
    for list in &by_block {
        for (a, &(i, ti)) in list.iter().enumerate() {
            for &(j, tj) in &list[a..] {
                let v = re_trace_product(&cons[i].terms[ti].coeff, &cons[j].terms[tj].coeff);
                g[i][j] += v;
                if i != j {
                    g[j][i] += v;
                }
            }
        }
    }
    g
}

/// Indices of a maximal independent subset of the constraints, in original order.
pub(crate) fn independent_constraints(problem: &ConicProblem) -> Result<Vec<usize>> {
    let p = problem.num_constraints();
    if p == 0 {
        return Ok(Vec::new());
    }
    let g = constraint_gram(problem);
    let rhs: Vec<f64> = problem.constraints().iter().map(|c| c.rhs).collect();

    let mut residual: Vec<f64> = (0..p).map(|i| g[i][i]).collect();
    let top = residual.iter().copied().fold(0.0_f64, f64::max);
    let mut chosen = vec![false; p];
    // columns of the partial factor, each of length p
    let mut factor: Vec<Vec<f64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();

    loop {
        let next = (0..p)
            .filter(|&i| !chosen[i])
            .max_by(|&a, &b| residual[a].total_cmp(&residual[b]));
        let Some(j) = next else { break };
        if residual[j] <= RANK_TOL * top.max(f64::MIN_POSITIVE) {
            break;
        }
        let pivot = residual[j].sqrt();
        let mut col = g[j].clone();
        for prev in &factor {
            let s = prev[j];
            if s != 0.0 {
                for (c, &f) in col.iter_mut().zip(prev) {
                    *c -= s * f;
                }
            }
        }
        for c in col.iter_mut() {
            *c /= pivot;
        }
        for i in 0..p {
            if !chosen[i] {
                residual[i] -= col[i] * col[i];
            }
        }
        chosen[j] = true;
        pivots.push(j);
        factor.push(col);
    }

    // forward substitution L_K z = b_K in pivot order
    let k = pivots.len();
    let mut z = vec![0.0; k];
    for s in 0..k {
        let row = pivots[s];
        let mut acc = rhs[row];
        for t in 0..s {
            acc -= factor[t][row] * z[t];
        }
        z[s] = acc / factor[s][row];
    }
    let z_norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    for i in (0..p).filter(|&i| !chosen[i]) {
        let predicted: f64 = (0..k).map(|t| factor[t][i] * z[t]).sum();
        let row_norm = g[i][i].sqrt();
        let scale = 1.0 + rhs[i].abs() + row_norm * z_norm;
        if (rhs[i] - predicted).abs() > CONSISTENCY_TOL * scale {
            return Err(Error::Infeasible(format!(
                "equality constraint {i} contradicts the others (rhs {}, implied {predicted})",
                rhs[i]
            )));
        }
    }
    let mut kept: Vec<usize> = pivots;
    kept.sort_unstable();
    Ok(kept)
}
