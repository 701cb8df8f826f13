//! D_i𝓘 = σ_i𝓘 by central differences in x_j = t_j - t_{j-1}, with one
//! Richardson level.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Symbol;
use crate::critical::spectral::sigma_values;
use crate::mirror::{build_graph, make_chart};
use crate::toda::toda_operators;

use super::{chart_phase, q_from_t, OscillatoryError, QuadratureControls};

#[derive(Clone, Debug, Serialize)]
pub struct EigenReport {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub q: Vec<f64>,
    pub hbar: f64,
    pub step: f64,
    /// |D_i𝓘 - σ_i𝓘| / |𝓘| for i = 1..n+1.
    pub residuals: Vec<f64>,
    pub value: f64,
    pub stencil_points: usize,
    pub evaluations: usize,
    pub max_relative_error: f64,
}

/// Second-order central stencil for the o-th derivative: (offset, weight).
fn stencil(order: u32) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => panic!("stencil order {order} not supported"),
    }
}

/// Tensor stencil for ∂^β at spacing `mult`·h (offsets in units of h).
fn tensor_stencil(beta: &[u32], mult: i32) -> Vec<(Vec<i32>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for &o in beta {
        let mut next = Vec::new();
        for (off, w) in &out {
            for &(k, c) in stencil(o) {
                let mut v = off.clone();
                v.push(k * mult);
                next.push((v, w * c));
            }
        }
        out = next;
    }
    out
}

/// ∂_{t_i} = ∂_{x_i} - ∂_{x_{i+1}}; returns ∏_i ∂_{t_i}^{κ_i} as a polynomial in ∂_x.
fn t_to_x(kappa: &[u32], n: usize) -> BTreeMap<Vec<u32>, f64> {
    let mut poly = BTreeMap::from([(vec![0u32; n], 1.0)]);
    for (i, &k) in kappa.iter().enumerate() {
        for _ in 0..k {
            let mut next = BTreeMap::new();
            for (beta, c) in &poly {
                let mut push = |j: usize, s: f64| {
                    let mut b = beta.clone();
                    b[j] += 1;
                    *next.entry(b).or_insert(0.0) += s * c;
                };
                if i >= 1 {
                    push(i - 1, 1.0);
                }
                if i < n {
                    push(i, -1.0);
                }
            }
            poly = next;
        }
    }
    poly.retain(|_, c| *c != 0.0);
    poly
}

/// Residuals for an arbitrary function of the differences x (length n),
/// evaluated around `x_base` with step h. `f` returns (value, relative error).
pub fn eigen_residual_with<F>(
    n: usize,
    lambda: &[f64],
    hbar: f64,
    x_base: &[f64],
    h: f64,
    f: F,
) -> Result<(Vec<f64>, f64, usize, f64), OscillatoryError>
where
    F: Fn(&[f64]) -> Result<(f64, f64), OscillatoryError> + Sync,
{
    let ops = toda_operators(n).map_err(|e| OscillatoryError::InvalidInput(e.to_string()))?;
    let q: Vec<f64> = x_base.iter().map(|x| x.exp()).collect();
    // Expand every operator into x-derivatives with numeric coefficients.
    let mut expanded: Vec<BTreeMap<Vec<u32>, f64>> = Vec::new();
    for op in &ops {
        let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (kappa, c) in op.terms() {
            let cv: f64 = c.eval(|s| match s {
                Symbol::Q(i) => q[i as usize - 1],
                Symbol::Hbar => hbar,
                other => panic!("unexpected symbol {other} in a Toda operator"),
            });
            let weight = cv * hbar.powi(kappa.iter().sum::<u32>() as i32);
            for (beta, m) in t_to_x(kappa, n) {
                *acc.entry(beta).or_insert(0.0) += weight * m;
            }
        }
        expanded.push(acc);
    }
    let betas: BTreeSet<Vec<u32>> = expanded.iter().flat_map(|m| m.keys().cloned()).collect();
    let mut points: BTreeSet<Vec<i32>> = BTreeSet::new();
    points.insert(vec![0; n]);
    for b in &betas {
        for mult in [1, 2] {
            points.extend(tensor_stencil(b, mult).into_iter().map(|(o, _)| o));
        }
    }
    let points: Vec<Vec<i32>> = points.into_iter().collect();
    let values: Vec<(f64, f64)> = points
        .par_iter()
        .map(|off| {
            let x: Vec<f64> = x_base.iter().zip(off).map(|(b, o)| b + *o as f64 * h).collect();
            f(&x)
        })
        .collect::<Result<_, _>>()?;
    let table: BTreeMap<&Vec<i32>, f64> = points.iter().zip(values.iter().map(|v| v.0)).collect();
    let max_err = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let center = table[&vec![0; n]];
    let derivative = |beta: &Vec<u32>| {
        let order = beta.iter().sum::<u32>() as i32;
        let at = |mult: i32| {
            tensor_stencil(beta, mult)
                .iter()
                .map(|(o, w)| w * table[o])
                .sum::<f64>()
                / (mult as f64 * h).powi(order)
        };
        if order == 0 {
            at(1)
        } else {
            (4.0 * at(1) - at(2)) / 3.0
        }
    };
    let derivs: BTreeMap<&Vec<u32>, f64> = betas.iter().map(|b| (b, derivative(b))).collect();
    let sigma: Vec<f64> = sigma_values(lambda).iter().map(|z| z.re).collect();
    let residuals = expanded
        .iter()
        .zip(&sigma)
        .map(|(m, s)| {
            let applied: f64 = m.iter().map(|(b, c)| c * derivs[b]).sum();
            ((applied - s * center) / center).abs()
        })
        .collect();
    Ok((residuals, center, points.len(), max_err))
}

/// Residuals of the mirror integral in the all-u chart at t_base.
pub fn eigen_residual(
    n: usize,
    lambda: &[f64],
    hbar: f64,
    t_base: &[f64],
    h: f64,
    controls: &QuadratureControls,
) -> Result<EigenReport, OscillatoryError> {
    eigen_residual_in_chart(n, &vec![0; n], lambda, hbar, t_base, h, controls)
}

/// As [`eigen_residual`], integrating in the chart with k-sequence `k`.
pub fn eigen_residual_in_chart(
    n: usize,
    k: &[usize],
    lambda: &[f64],
    hbar: f64,
    t_base: &[f64],
    h: f64,
    controls: &QuadratureControls,
) -> Result<EigenReport, OscillatoryError> {
    super::validate(n, lambda, hbar, t_base)?;
    let chart = make_chart(&build_graph(n)?, k)?;
    let x_base: Vec<f64> = t_base.windows(2).map(|w| w[1] - w[0]).collect();
    let evaluations = std::sync::atomic::AtomicUsize::new(0);
    let (residuals, value, stencil_points, max_err) = eigen_residual_with(n, lambda, hbar, &x_base, h, |x| {
        let q: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let phase = chart_phase(&chart, lambda, &q, true);
        phase.check_decay(hbar)?;
        let r = phase.integrate(hbar, controls)?;
        evaluations.fetch_add(r.evaluations, std::sync::atomic::Ordering::Relaxed);
        if !r.converged {
            return Err(OscillatoryError::NotConverged {
                reason: format!("stencil point x = {x:?}"),
            });
        }
        Ok((r.value, r.error_estimate / r.value))
    })?;
    Ok(EigenReport {
        n,
        lambda: lambda.to_vec(),
        q: q_from_t(t_base),
        hbar,
        step: h,
        residuals,
        value,
        stencil_points,
        evaluations: evaluations.into_inner(),
        max_relative_error: max_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule_n1() {
        // ∂_0∂_1 = (-∂_x)(∂_x) on functions of x = t_1 - t_0.
        let m = t_to_x(&[1, 1], 1);
        assert_eq!(m, BTreeMap::from([(vec![2], -1.0)]));
        assert!(t_to_x(&[1, 0], 1) == BTreeMap::from([(vec![1], -1.0)]));
    }

    #[test]
    fn stencils_exact_on_low_degree() {
        // Second-order stencils are exact for polynomials of degree order + 1.
        let cases: [(u32, fn(f64) -> f64, f64); 3] = [
            (1, |x| x * x + x, 3.0),
            (2, |x| 2.0 * x * x * x - x * x, 10.0),
            (3, |x| x * x * x * x, 24.0),
        ];
        for (o, f, exact) in cases {
            let h = 0.1;
            let v: f64 = tensor_stencil(&[o], 1)
                .iter()
                .map(|(off, w)| w * f(1.0 + off[0] as f64 * h))
                .sum::<f64>()
                / h.powi(o as i32);
            assert!((v - exact).abs() < 1e-9, "order {o}: {v}");
        }
    }
}
