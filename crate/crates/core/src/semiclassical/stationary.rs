//! Leading stationary-phase terms amplitude/√det Hess at each critical point.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{LaurentPolynomial, Symbol};
use crate::critical::{all_critical_points, to_lagrangian, ContinuationOptions, CriticalPointRecord};
use crate::mirror::{all_charts, build_graph};
use crate::oscillatory::{chart_phase, OscillatoryError, QuadratureControls};

/// amplitude/√det H_w with the branch continued from q = 0.
pub fn stationary_leading(record: &CriticalPointRecord, amplitude: Complex64) -> Complex64 {
    amplitude / record.sqrt_hessian_det
}

/// An amplitude polynomial in p_i, q_i evaluated at φ(crit).
pub fn amplitude_at(record: &CriticalPointRecord, amplitude: &LaurentPolynomial) -> Complex64 {
    let point = to_lagrangian(record);
    amplitude.eval(|s| match s {
        Symbol::P(i) => point.p[i as usize],
        Symbol::Q(i) => point.q[i as usize - 1],
        other => panic!("amplitudes are polynomials in p and q, found {other}"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplaceReport {
    pub k: Vec<usize>,
    pub hbar: f64,
    /// Exponent of |ħ| in the (2π|ħ|)^{d/2} prefactor.
    pub prefactor_power: f64,
    pub integral: f64,
    pub leading: f64,
    pub relative_error: f64,
    /// Whether the continued √det agrees with the positive root here.
    pub tracked_branch_positive: bool,
}

/// Compares the positive-contour integral with its Laplace approximation
/// e^{u/ħ}(2π|ħ|)^{d/2}/(∏w √det H_w) at the real positive critical point.
pub fn laplace_check(n: usize, lambda: &[f64], q: &[f64], hbar: f64) -> Result<LaplaceReport, OscillatoryError> {
    let graph = build_graph(n)?;
    let records = all_critical_points(&graph, lambda, q, &ContinuationOptions::default())?;
    let real_positive = |r: &&CriticalPointRecord| {
        r.coordinates
            .iter()
            .all(|w| w.re > 0.0 && w.im.abs() <= 1e-10 * w.re)
    };
    let rec = records
        .iter()
        .find(real_positive)
        .ok_or_else(|| OscillatoryError::InvalidInput("no real positive critical point".into()))?;
    let chart = all_charts(&graph)?
        .into_iter()
        .find(|c| c.k == rec.k)
        .expect("record chart exists");
    let phase = chart_phase(&chart, lambda, q, true);
    let integral = phase.integrate(hbar, &QuadratureControls::default())?;
    let d = rec.coordinates.len() as f64;
    let det = rec.hessian_det.re;
    let prod_w: f64 = rec.coordinates.iter().map(|w| w.re).product();
    let leading = (rec.critical_value.re / hbar).exp() * (2.0 * std::f64::consts::PI * hbar.abs()).powf(d / 2.0)
        / (prod_w * det.sqrt());
    Ok(LaplaceReport {
        k: rec.k.clone(),
        hbar,
        prefactor_power: d / 2.0,
        integral: integral.value,
        leading,
        relative_error: (leading / integral.value - 1.0).abs(),
        tracked_branch_positive: rec.sqrt_hessian_det.re > 0.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub enum Pairing {
    /// Identity on the amplitude side (surrogate).
    Identity,
    Matrix(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiOscReport {
    pub n: usize,
    pub q_grid: Vec<Vec<f64>>,
    pub pairing: Pairing,
    /// Ψ_osc per grid point, rows = amplitudes, columns = charts.
    pub matrices: Vec<Vec<Vec<Complex64>>>,
    pub grams: Vec<Vec<Vec<Complex64>>>,
    /// max_k max |Gram(q_k) - Gram(q_0)|.
    pub gram_variation: f64,
}

fn to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// (Ψ_osc)_{κ,σ} = φ_κ(crit_σ)/√det Hess over a q grid, with the Gram data
/// Ψ^T G Ψ for the chosen pairing. The form ω = ∏dw/w contributes the
/// density 1/∏w to each amplitude, i.e. the Hessian is taken in log w.
pub fn psi_osc(
    n: usize,
    lambda: &[f64],
    q_grid: &[Vec<f64>],
    amplitudes: &[LaurentPolynomial],
    pairing: Pairing,
) -> Result<PsiOscReport, OscillatoryError> {
    let graph = build_graph(n)?;
    let g = match &pairing {
        Pairing::Identity => DMatrix::identity(amplitudes.len(), amplitudes.len()),
        Pairing::Matrix(rows) => {
            if rows.len() != amplitudes.len() || rows.iter().any(|r| r.len() != amplitudes.len()) {
                return Err(OscillatoryError::InvalidInput("pairing size must match amplitudes".into()));
            }
            DMatrix::from_fn(rows.len(), rows.len(), |i, j| Complex64::new(rows[i][j], 0.0))
        }
    };
    let mut matrices = Vec::new();
    let mut grams = Vec::new();
    for q in q_grid {
        let recs = all_critical_points(&graph, lambda, q, &ContinuationOptions::default())?;
        let psi = DMatrix::from_fn(amplitudes.len(), recs.len(), |kappa, s| {
            let density: Complex64 = recs[s].coordinates.iter().product();
            stationary_leading(&recs[s], amplitude_at(&recs[s], &amplitudes[kappa]) / density)
        });
        let gram = psi.transpose() * &g * &psi;
        matrices.push(psi);
        grams.push(gram);
    }
    let gram_variation = grams
        .iter()
        .map(|m| (m - &grams[0]).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    Ok(PsiOscReport {
        n,
        q_grid: q_grid.to_vec(),
        pairing,
        matrices: matrices.iter().map(to_rows).collect(),
        grams: grams.iter().map(to_rows).collect(),
        gram_variation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::continue_to;
    use crate::mirror::make_chart;

    #[test]
    fn n1_scalar_hessian() {
        let c = make_chart(&build_graph(1).unwrap(), &[1]).unwrap();
        let r = continue_to(&c, &[0.5, -0.5], &[1.0], &Default::default()).unwrap();
        let u = r.coordinates[0];
        let expected = 1.0 / (2.0 / (u * u * u) - 1.0 / (u * u)).sqrt();
        let got = stationary_leading(&r, Complex64::new(1.0, 0.0));
        assert!((got - expected).norm() < 1e-10 || (got + expected).norm() < 1e-10);
    }
}
