//! The n = 1 example: p_±² = λ_0² + q, the closed form of the critical
//! value and the constant matrix Ψ diagonalizing the connection.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::critical::{continue_to, to_lagrangian, ContinuationOptions};
use crate::mirror::{build_graph, make_chart};

use super::OscillatoryError;

#[derive(Clone, Debug, Serialize)]
pub struct Cp1Report {
    pub lambda0: f64,
    pub q_grid: Vec<f64>,
    /// (p_+, p_-) per grid point, read off the continued records.
    pub p: Vec<(Complex64, Complex64)>,
    /// max |d/dt (u_± - closed form)|.
    pub derivative_mismatch: f64,
    /// max |du_±/dt - p_±|.
    pub du_dt_error: f64,
    /// max |p_+ + p_-| and |p_+p_- + λ_0² + q|.
    pub root_error: f64,
    /// max |A Ψ - Ψ diag(p_+, p_-)|.
    pub psi_eigen_residual: f64,
    /// max |Ψ^T G Ψ - I| for the pairing G = [[0,1],[1,0]].
    pub psi_pairing_residual: f64,
}

impl Cp1Report {
    pub fn max_deviation(&self) -> f64 {
        [
            self.derivative_mismatch,
            self.du_dt_error,
            self.root_error,
            self.psi_eigen_residual,
            self.psi_pairing_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// 2p + λ_0 ln(λ_1 + p) + λ_1 ln(λ_0 + p) with λ_1 = -λ_0.
pub fn closed_form(lambda0: f64, p: Complex64) -> Complex64 {
    2.0 * p + lambda0 * (p - lambda0).ln() - lambda0 * (p + lambda0).ln()
}

/// Richardson-extrapolated central derivative in t from values at t + j·h, j = -2..2.
fn d_dt(v: [Complex64; 5], h: f64) -> Complex64 {
    let d1 = (v[3] - v[1]) / (2.0 * h);
    let d2 = (v[4] - v[0]) / (4.0 * h);
    (4.0 * d1 - d2) / 3.0
}

fn psi_checks(p_plus: Complex64) -> (f64, f64) {
    let v = p_plus.sqrt();
    let i = Complex64::i();
    let s = 1.0 / 2f64.sqrt();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let psi = Matrix2::new(v * s, -i * v * s, s / v, i * s / v);
    let a = Matrix2::new(zero, v.powi(4), one, zero);
    let du = Matrix2::new(p_plus, zero, zero, -p_plus);
    let g = Matrix2::new(zero, one, one, zero);
    let eig = (a * psi - psi * du).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pair = (psi.transpose() * g * psi - Matrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    (eig, pair)
}

pub fn cp1_example_check(lambda0: f64, q_grid: &[f64]) -> Result<Cp1Report, OscillatoryError> {
    if lambda0 == 0.0 || q_grid.iter().any(|q| !(*q > 0.0)) {
        return Err(OscillatoryError::InvalidInput("need λ_0 ≠ 0 and q > 0".into()));
    }
    let graph = build_graph(1)?;
    let charts = [make_chart(&graph, &[0])?, make_chart(&graph, &[1])?];
    let lambda = [lambda0, -lambda0];
    let opts = ContinuationOptions::default();
    let h = 1e-3;
    let mut report = Cp1Report {
        lambda0,
        q_grid: q_grid.to_vec(),
        p: Vec::new(),
        derivative_mismatch: 0.0,
        du_dt_error: 0.0,
        root_error: 0.0,
        psi_eigen_residual: 0.0,
        psi_pairing_residual: 0.0,
    };
    for &q in q_grid {
        let mut ps = Vec::new();
        for chart in &charts {
            let mut u = [Complex64::new(0.0, 0.0); 5];
            let mut f = [Complex64::new(0.0, 0.0); 5];
            let mut p_here = Complex64::new(0.0, 0.0);
            for (slot, j) in (-2i32..=2).enumerate() {
                let qj = q * (j as f64 * h).exp();
                let rec = continue_to(chart, &lambda, &[qj], &opts)?;
                let p = to_lagrangian(&rec).p[1];
                u[slot] = rec.critical_value;
                f[slot] = closed_form(lambda0, p);
                if j == 0 {
                    p_here = p;
                }
            }
            let du = d_dt(u, h);
            let df = d_dt(f, h);
            report.derivative_mismatch = report.derivative_mismatch.max((du - df).norm());
            report.du_dt_error = report.du_dt_error.max((du - p_here).norm());
            ps.push(p_here);
        }
        // Order as (p_+, p_-) by real part.
        let (pp, pm) = if ps[0].re >= ps[1].re { (ps[0], ps[1]) } else { (ps[1], ps[0]) };
        let roots = (pp + pm).norm().max((pp * pm + lambda0 * lambda0 + q).norm());
        report.root_error = report.root_error.max(roots);
        let (eig, pair) = psi_checks(pp);
        report.psi_eigen_residual = report.psi_eigen_residual.max(eig);
        report.psi_pairing_residual = report.psi_pairing_residual.max(pair);
        report.p.push((pp, pm));
    }
    Ok(report)
}
