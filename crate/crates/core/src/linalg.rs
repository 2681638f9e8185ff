//! Dense complex linear algebra shared by every module.
//!
//! Everything here works on `nalgebra` dynamic matrices with `Complex64`
//! entries. Matrices are small (d ≤ ~16), so no attempt is made at blocking
//! or sparsity.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(d: usize) -> CMat {
    CMat::zeros(d, d)
}

/// `(A + A†) / 2`.
pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Largest elementwise deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Re tr(A B)`; equals the Hilbert-Schmidt inner product when `A` is Hermitian.
pub fn re_trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)];
            let y = b[(k, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

pub fn trace_re(a: &CMat) -> f64 {
    (0..a.nrows()).map(|i| a[(i, i)].re).sum()
}

/// `|ψ⟩⟨ψ|`.
pub fn outer(psi: &CVec) -> CMat {
    psi * psi.adjoint()
}

pub fn basis_vector(d: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[i] = ONE;
    v
}

/// Discrete Fourier matrix `F_jk = exp(2πi jk/d)/√d`, `j,k ∈ {0,…,d-1}`.
pub fn fourier(d: usize) -> CMat {
    let norm = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |j, k| {
        let phase = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
        Complex64::from_polar(norm, phase)
    })
}

/// Eigen-decomposition of a Hermitian matrix, symmetrized first.
///
/// Eigenvalues come back in non-increasing order, with the eigenvector
/// columns permuted to match.
pub fn eigh_desc(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitize(a));
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigvalsh_desc(a: &CMat) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(hermitize(a)).eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    eigvalsh_desc(a).last().copied().unwrap_or(0.0)
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn spectral_map(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh_desc(a);
    let diag = CMat::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c(f(l), 0.0)),
    ));
    hermitize(&(&vecs * diag * vecs.adjoint()))
}

/// Numerical rank from singular values, relative to the largest one.
pub fn numerical_rank(a: &CMat, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let top = sv.iter().copied().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// `‖U†U − 𝟙‖_F`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    frobenius(&(u.adjoint() * u - identity(u.nrows())))
}

/// Orthonormal basis of the real space of `d×d` Hermitian matrices under
/// `⟨A, B⟩ = Re tr(AB)`: `E_jj`, `(E_jk + E_kj)/√2`, `i(E_jk − E_kj)/√2`.
pub fn hermitian_basis(d: usize) -> Vec<CMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut e = zeros(d);
        e[(j, j)] = ONE;
        out.push(e);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = zeros(d);
            sym[(j, k)] = c(s, 0.0);
            sym[(k, j)] = c(s, 0.0);
            out.push(sym);
            let mut anti = zeros(d);
            anti[(j, k)] = c(0.0, s);
            anti[(k, j)] = c(0.0, -s);
            out.push(anti);
        }
    }
    out
}

/// Number of `r`-subsets of an `n`-set, as `u128` to keep intermediate products exact.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Lexicographic enumeration of all `r`-subsets of `{0, …, n-1}`.
pub fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, r) as usize);
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        // rightmost position that can still advance
        let Some(pos) = (0..r).rev().find(|&i| idx[i] < n - r + i) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_basis_is_orthonormal() {
        for d in 1..5 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                assert!(hermiticity_defect(x) < 1e-15);
                for (j, y) in b.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((re_trace_product(x, y) - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(30, 15), 155_117_520);
    }

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let c = combinations(4, 2);
        assert_eq!(
            c,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        for n in 0..8 {
            for r in 0..=n {
                assert_eq!(combinations(n, r).len() as u128, binomial(n, r));
            }
        }
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn fourier_is_unitary() {
        for d in 1..9 {
            assert!(unitarity_defect(&fourier(d)) < 1e-12);
        }
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let a = CMat::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.5, 0.0),
                c(0.0, -1.0),
                c(3.0, 0.0),
                c(0.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
            ],
        );
        let (vals, vecs) = eigh_desc(&a);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let diag = CMat::from_diagonal(&CVec::from_iterator(3, vals.iter().map(|&v| c(v, 0.0))));
        let back = &vecs * diag * vecs.adjoint();
        assert!(frobenius(&(back - a)) < 1e-12);
    }

    #[test]
    fn numerical_rank_of_rank_one() {
        let psi = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert_eq!(numerical_rank(&outer(&psi), 1e-9), 1);
        assert_eq!(numerical_rank(&zeros(3), 1e-9), 0);
    }
}
