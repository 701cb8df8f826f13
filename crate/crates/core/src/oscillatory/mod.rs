//! Mirror integrals over the positive real subtorus in chart coordinates,
//! the eigenvalue equations by finite differences, and the q → 0 factorization.

pub mod cp1;
pub mod eigen;
pub mod quadrature;
pub mod special;

use serde::Serialize;
use thiserror::Error;

use crate::critical::{CriticalError, NumericChart};
use crate::mirror::{all_charts, build_graph, MirrorError, SigmaChart};

pub use cp1::{cp1_example_check, Cp1Report};
pub use eigen::{eigen_residual, eigen_residual_in_chart, eigen_residual_with, EigenReport};
pub use quadrature::{ExpPhase, QuadratureControls, QuadratureResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OscillatoryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integrand does not decay at the face {face}")]
    Divergence { face: String },
    #[error("quadrature did not converge: {reason}")]
    NotConverged { reason: String },
    #[error("no chart has every σ(i,j)/ħ ≥ {margin} at this λ")]
    NoAdmissibleChart { margin: f64 },
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error(transparent)]
    Mirror(#[from] MirrorError),
}

#[derive(Clone, Debug)]
pub struct IntegralTask {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub hbar: f64,
    pub chart: SigmaChart,
    /// t_0..t_n with Σt = 0.
    pub t: Vec<f64>,
    pub controls: QuadratureControls,
}

/// q_i = e^{t_i - t_{i-1}}.
pub fn q_from_t(t: &[f64]) -> Vec<f64> {
    t.windows(2).map(|w| (w[1] - w[0]).exp()).collect()
}

/// t with Σt = 0 and the given consecutive differences ln q_i.
pub fn t_from_q(q: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0];
    for x in q {
        t.push(t.last().unwrap() + x.ln());
    }
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    t.iter().map(|x| x - mean).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The chart phase at real λ and q > 0 as an exponential sum in s = ln w.
/// With `with_constant` false the Σρ_{1,s-1} ln q_s term is dropped.
pub fn chart_phase(chart: &SigmaChart, lambda: &[f64], q: &[f64], with_constant: bool) -> ExpPhase {
    let nc = NumericChart::new(chart);
    let terms = nc
        .terms
        .iter()
        .map(|t| {
            let c: f64 = t.q_exps.iter().zip(q).map(|(&e, qs)| qs.powi(e)).product();
            (t.exps.clone(), c)
        })
        .collect();
    let constant = if with_constant {
        nc.q_log_forms.iter().zip(q).map(|(f, qs)| dot(f, lambda) * qs.ln()).sum()
    } else {
        0.0
    };
    ExpPhase {
        sigma: nc.sigma_forms.iter().map(|f| dot(f, lambda)).collect(),
        terms,
        constant,
        names: chart.variables.iter().map(|e| e.symbol().to_string()).collect(),
    }
}

fn validate(n: usize, lambda: &[f64], hbar: f64, t: &[f64]) -> Result<(), OscillatoryError> {
    if n == 0 || n > 2 {
        return Err(OscillatoryError::InvalidInput(format!(
            "integrals are evaluated for n = 1, 2 only, got n = {n}"
        )));
    }
    if lambda.len() != n + 1 || t.len() != n + 1 {
        return Err(OscillatoryError::InvalidInput(format!("expected {} λ and t values", n + 1)));
    }
    if lambda.iter().sum::<f64>().abs() > 1e-12 || t.iter().sum::<f64>().abs() > 1e-9 {
        return Err(OscillatoryError::InvalidInput("λ and t must each sum to 0".into()));
    }
    if !(hbar < 0.0) {
        return Err(OscillatoryError::InvalidInput(format!("ħ must be negative, got {hbar}")));
    }
    Ok(())
}

/// ∫_{(0,∞)^d} e^{f_q/ħ} ∏ dw/w in the task's chart.
pub fn evaluate(task: &IntegralTask) -> Result<QuadratureResult, OscillatoryError> {
    validate(task.n, &task.lambda, task.hbar, &task.t)?;
    if task.chart.n != task.n {
        return Err(OscillatoryError::InvalidInput("chart size does not match n".into()));
    }
    let phase = chart_phase(&task.chart, &task.lambda, &q_from_t(&task.t), true);
    phase.check_decay(task.hbar)?;
    let r = phase.integrate(task.hbar, &task.controls)?;
    if !r.converged {
        return Err(OscillatoryError::NotConverged {
            reason: format!("error estimate {} after {} halvings", r.error_estimate, task.controls.max_subdivisions),
        });
    }
    Ok(r)
}

/// min over chart variables of σ(i,j)/ħ.
pub fn min_exponent_ratio(chart: &SigmaChart, lambda: &[f64], hbar: f64) -> f64 {
    let nc = NumericChart::new(chart);
    nc.sigma_forms
        .iter()
        .map(|f| dot(f, lambda) / hbar)
        .fold(f64::INFINITY, f64::min)
}

/// The chart maximizing min σ(i,j)/ħ, if that minimum reaches `margin`.
pub fn best_admissible_chart(n: usize, lambda: &[f64], hbar: f64, margin: f64) -> Result<SigmaChart, OscillatoryError> {
    let charts = all_charts(&build_graph(n)?)?;
    charts
        .into_iter()
        .map(|c| (min_exponent_ratio(&c, lambda, hbar), c))
        .filter(|(m, _)| *m >= margin)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
        .ok_or(OscillatoryError::NoAdmissibleChart { margin })
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub k: Vec<usize>,
    pub q_small: f64,
    pub integral: f64,
    pub product: f64,
    pub mismatch: f64,
}

/// Compares e^{-Σρ_{1,s-1} ln q_s/ħ}·𝓘 at q_i = q_small with ∏Γ(σ/ħ)(-ħ)^{σ/ħ}.
pub fn q_to_zero_factorization(
    chart: &SigmaChart,
    lambda: &[f64],
    hbar: f64,
    q_small: f64,
    controls: &QuadratureControls,
) -> Result<FactorizationReport, OscillatoryError> {
    let n = chart.n;
    validate(n, lambda, hbar, &vec![0.0; n + 1])?;
    let ratio = min_exponent_ratio(chart, lambda, hbar);
    if !(ratio > 0.0) {
        return Err(OscillatoryError::NoAdmissibleChart { margin: 0.0 });
    }
    let q = vec![q_small; n];
    let phase = chart_phase(chart, lambda, &q, false);
    phase.check_decay(hbar)?;
    let r = phase.integrate(hbar, controls)?;
    let log_product: f64 = phase
        .sigma
        .iter()
        .map(|c| special::log_one_variable_factor(*c, hbar))
        .sum();
    Ok(FactorizationReport {
        k: chart.k.clone(),
        q_small,
        integral: r.value,
        product: log_product.exp(),
        mismatch: (r.log_value - log_product).exp_m1().abs(),
    })
}
