//! Sample means of Hermitian matrices with bootstrap standard errors.

use crate::haar::split_rng;
use crate::linalg::{c, CMat};
use rand::Rng;
use rayon::prelude::*;

/// Real coordinates of a Hermitian matrix whose Euclidean norm is the
/// Frobenius norm: diagonal, then `√2 Re` and `√2 Im` of the upper triangle.
pub fn hermitian_coordinates(h: &CMat, out: &mut Vec<f64>) {
    let d = h.nrows();
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        out.push(h[(i, i)].re);
    }
    for j in 0..d {
        for k in j + 1..d {
            out.push(s * h[(j, k)].re);
            out.push(s * h[(j, k)].im);
        }
    }
}

/// Inverse of [`hermitian_coordinates`].
pub fn from_hermitian_coordinates(v: &[f64], d: usize) -> CMat {
    let mut h = CMat::zeros(d, d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        h[(i, i)] = c(v[i], 0.0);
    }
    let mut p = d;
    for j in 0..d {
        for k in j + 1..d {
            let z = c(s * v[p], s * v[p + 1]);
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
            p += 2;
        }
    }
    h
}

/// Samples stored row-major, `stride` coordinates each.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub stride: usize,
    pub data: Vec<f64>,
}

impl SampleSet {
    pub fn new(stride: usize) -> Self {
        Self { stride, data: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn append(&mut self, other: &SampleSet) {
        self.data.extend_from_slice(&other.data);
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut acc = vec![0.0; self.stride];
        for row in self.data.chunks_exact(self.stride) {
            for (a, x) in acc.iter_mut().zip(row) {
                *a += x;
            }
        }
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    /// Bootstrap standard error of the mean, measured in Euclidean norm:
    /// the root-mean-square distance of `resamples` resampled means from the
    /// full-sample mean.
    pub fn bootstrap_se(&self, resamples: usize, seed: u64) -> f64 {
        let n = self.len();
        if n == 0 || resamples == 0 {
            return 0.0;
        }
        let mean = self.mean();
        let total: f64 = (0..resamples)
            .into_par_iter()
            .map(|b| {
                let mut rng = split_rng(seed, b as u64);
                let mut acc = vec![0.0; self.stride];
                for _ in 0..n {
                    let i = rng.random_range(0..n);
                    let row = &self.data[i * self.stride..(i + 1) * self.stride];
                    for (a, x) in acc.iter_mut().zip(row) {
                        *a += x;
                    }
                }
                acc.iter().zip(&mean).map(|(a, m)| (a / n as f64 - m).powi(2)).sum::<f64>()
            })
            .sum();
        (total / resamples as f64).sqrt()
    }
}
