//! Spectral identity det(A_1 - λ_0 I + xI) = ∏(x - λ_i) and the map to the
//! Toda Lagrangian.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{elementary_symmetric_sigma, LaurentPolynomial, Symbol};
use crate::mirror::Edge;

use super::CriticalPointRecord;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The matrix A_k of row-k edge values, of size n-k+2.
pub fn a_matrix(edges: &BTreeMap<Edge, Complex64>, n: usize, k: usize) -> DMatrix<Complex64> {
    let m = n - k + 2;
    let u = |j: usize| edges[&Edge::u(k, j)];
    let v = |j: usize| edges[&Edge::v(k, j)];
    let mut a = DMatrix::from_element(m, m, c(0.0));
    for j in 0..m {
        let mut d = c(0.0);
        if j >= 1 {
            d += v(j - 1);
        }
        if j <= n - k {
            d -= u(j);
            a[(j, j + 1)] = u(j) * v(j);
        }
        a[(j, j)] = d;
        if j >= 1 {
            a[(j, j - 1)] = c(-1.0);
        }
    }
    a
}

/// Coefficients of det(xI - M), leading first, by Faddeev–LeVerrier.
pub fn characteristic_coefficients(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let size = m.nrows();
    let id = DMatrix::<Complex64>::identity(size, size);
    let mut coeffs = vec![c(1.0)];
    let mut mk = DMatrix::from_element(size, size, c(0.0));
    for k in 1..=size {
        mk = m * &mk + &id * coeffs[k - 1];
        let t = (m * &mk).trace();
        coeffs.push(-t / k as f64);
    }
    coeffs
}

pub fn sigma_values(lambda: &[f64]) -> Vec<Complex64> {
    let lam: Vec<Complex64> = lambda.iter().map(|x| c(*x)).collect();
    elementary_symmetric_sigma(&lam)
}

/// max_i |coeff of x^{n+1-i} in det(A_1 - λ_0 I + xI) - σ_i(λ)|.
pub fn spectral_check(record: &CriticalPointRecord) -> f64 {
    let n = record.lambda.len() - 1;
    let a = a_matrix(&record.edges, n, 1);
    let shifted = -(a - DMatrix::identity(n + 1, n + 1) * c(record.lambda[0]));
    let coeffs = characteristic_coefficients(&shifted);
    let sigma = sigma_values(&record.lambda);
    coeffs[1..]
        .iter()
        .zip(&sigma)
        .map(|(x, s)| (x - s).norm())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianPoint {
    pub p: Vec<Complex64>,
    pub q: Vec<Complex64>,
}

/// p_i = (A_1)_{ii} - λ_0, q_i = u_{1,i-1} v_{1,i-1}.
pub fn to_lagrangian(record: &CriticalPointRecord) -> LagrangianPoint {
    let n = record.lambda.len() - 1;
    let a = a_matrix(&record.edges, n, 1);
    LagrangianPoint {
        p: (0..=n).map(|i| a[(i, i)] - record.lambda[0]).collect(),
        q: (0..n).map(|i| a[(i, i + 1)]).collect(),
    }
}

/// |D_i(p, q) - σ_i| for the commutative Toda polynomials.
pub fn lagrangian_residuals(point: &LagrangianPoint, lambda: &[f64], polys: &[LaurentPolynomial]) -> Vec<f64> {
    let sigma = sigma_values(lambda);
    polys
        .iter()
        .zip(&sigma)
        .map(|(d, s)| {
            let val: Complex64 = d.eval(|sym| match sym {
                Symbol::P(i) => point.p[i as usize],
                Symbol::Q(i) => point.q[i as usize - 1],
                other => panic!("unexpected symbol {other} in a Toda polynomial"),
            });
            (val - s).norm()
        })
        .collect()
}
