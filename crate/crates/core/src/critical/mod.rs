//! Critical points of the mirror phase: continuation from q = 0 in every
//! chart, Hessians, critical values and the spectral map to the Toda
//! Lagrangian.

pub mod continuation;
pub mod spectral;
pub mod uv;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::mirror::{all_charts, Edge, MirrorError, MirrorGraph, SigmaChart};

pub use continuation::{ContinuationOptions, NumericChart, PathState, Segment};
pub use spectral::{lagrangian_residuals, spectral_check, to_lagrangian, LagrangianPoint};
pub use uv::{uv_identity_check, UvReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("exponent of {variable} vanishes in chart {k:?}; λ is not generic")]
    DegenerateLambda { k: Vec<usize>, variable: String },
    #[error("step size exhausted at τ = {tau} in chart {k:?}")]
    StepExhausted { k: Vec<usize>, tau: f64 },
    #[error("singular Hessian along the path at τ = {tau} in chart {k:?}")]
    Caustic { k: Vec<usize>, tau: f64 },
    #[error("invalid parameters: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Mirror(#[from] MirrorError),
}

#[derive(Clone, Debug)]
pub struct CriticalPointRecord {
    pub k: Vec<usize>,
    pub permutation: Vec<usize>,
    pub lambda: Vec<f64>,
    pub q: Vec<f64>,
    pub variables: Vec<Edge>,
    pub coordinates: Vec<Complex64>,
    /// Continuously tracked logarithms of the coordinates.
    pub logs: Vec<Complex64>,
    /// Every edge value in the ambient torus.
    pub edges: BTreeMap<Edge, Complex64>,
    pub critical_value: Complex64,
    pub gradient_norm: f64,
    pub hessian: DMatrix<Complex64>,
    pub hessian_det: Complex64,
    /// √det Hess with the branch continued from q = 0.
    pub sqrt_hessian_det: Complex64,
    /// σ_min/σ_max of the Hessian in log coordinates, W·H·W with W = diag(w).
    pub inverse_condition: f64,
    pub nondegenerate: bool,
    pub detoured: bool,
    pub steps: usize,
}

pub const NONDEGENERACY_THRESHOLD: f64 = 1e-8;

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|x| Complex64::new(*x, 0.0)).collect()
}

fn validate(lambda: &[f64], q: &[f64], n: usize) -> Result<(), CriticalError> {
    if lambda.len() != n + 1 || q.len() != n {
        return Err(CriticalError::InvalidInput(format!(
            "expected {} λ values and {n} q values",
            n + 1
        )));
    }
    let s: f64 = lambda.iter().sum();
    if s.abs() > 1e-12 * (1.0 + lambda.iter().map(|x| x.abs()).sum::<f64>()) {
        return Err(CriticalError::InvalidInput(format!("Σλ = {s}, expected 0")));
    }
    if q.iter().any(|x| !(*x > 0.0)) {
        return Err(CriticalError::InvalidInput("q must be positive".into()));
    }
    Ok(())
}

/// Start point at q = 0: w = -σ(i,j).
pub fn start_point(chart: &SigmaChart, lambda: &[f64]) -> Result<Vec<f64>, CriticalError> {
    let nc = NumericChart::new(chart);
    let st = continuation::initial_state(&nc, &to_complex(lambda))?;
    Ok(st.logs.iter().map(|l| l.exp().re).collect())
}

/// Builds the record for a converged state.
pub fn finish_record(
    chart: &NumericChart,
    state: &PathState,
    lambda: &[f64],
    q: &[f64],
    detoured: bool,
) -> CriticalPointRecord {
    let lam = to_complex(lambda);
    let qc = to_complex(q);
    let sigma = chart.sigma(&lam);
    let w: Vec<Complex64> = state.logs.iter().map(|l| l.exp()).collect();
    let r = chart.term_values(&state.logs, &qc);
    let g = chart.residual(&state.logs, &qc, &sigma);
    let gradient_norm = g
        .iter()
        .zip(&w)
        .map(|(gi, wi)| (gi / wi).norm())
        .fold(0.0, f64::max);
    let mut value = Complex64::new(0.0, 0.0);
    for a in 0..chart.dim() {
        value += w[a] + sigma[a] * state.logs[a] + r[a];
    }
    for (slot, form) in chart.q_log_forms.iter().enumerate() {
        let c: f64 = form.iter().zip(lambda).map(|(a, b)| a * b).sum();
        value += c * q[slot].ln();
    }
    let hessian = chart.hessian_w(&state.logs, &qc, &sigma);
    let hessian_det = hessian.clone().lu().determinant();
    let wd = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(w.clone()));
    let sv = (&wd * &hessian * &wd).singular_values();
    let inverse_condition = sv.min() / sv.max();
    let mut edges = BTreeMap::new();
    for (a, e) in chart.variables.iter().enumerate() {
        edges.insert(*e, w[a]);
        edges.insert(chart.terms[a].edge, r[a]);
    }
    CriticalPointRecord {
        k: chart.k.clone(),
        permutation: chart.permutation.clone(),
        lambda: lambda.to_vec(),
        q: q.to_vec(),
        variables: chart.variables.clone(),
        coordinates: w,
        logs: state.logs.clone(),
        edges,
        critical_value: value,
        gradient_norm,
        hessian,
        hessian_det,
        sqrt_hessian_det: state.sqrt_det,
        inverse_condition,
        nondegenerate: inverse_condition > NONDEGENERACY_THRESHOLD,
        detoured,
        steps: state.steps,
    }
}

/// Tracks the chart's critical point from q = 0 to `q` along the ray, with a
/// complex detour if the real ray runs into a fold.
pub fn continue_to(
    chart: &SigmaChart,
    lambda: &[f64],
    q: &[f64],
    opts: &ContinuationOptions,
) -> Result<CriticalPointRecord, CriticalError> {
    validate(lambda, q, chart.n)?;
    let nc = NumericChart::new(chart);
    let (state, detoured) = track_from_zero(&nc, lambda, q, opts)?;
    Ok(finish_record(&nc, &state, lambda, q, detoured))
}

fn track_from_zero(
    nc: &NumericChart,
    lambda: &[f64],
    q: &[f64],
    opts: &ContinuationOptions,
) -> Result<(PathState, bool), CriticalError> {
    let lam = to_complex(lambda);
    let start = continuation::initial_state(nc, &lam)?;
    let seg = |detour: f64| Segment {
        q0: vec![Complex64::new(0.0, 0.0); q.len()],
        q1: to_complex(q),
        l0: lam.clone(),
        l1: lam.clone(),
        detour,
    };
    match continuation::track(nc, &seg(opts.detour), start.clone(), opts) {
        Ok(s) => Ok((s, opts.detour != 0.0)),
        Err(e) if opts.detour == 0.0 => {
            for d in [0.5, -0.5, 1.0] {
                if let Ok(s) = continuation::track(nc, &seg(d), start.clone(), opts) {
                    return Ok((s, true));
                }
            }
            Err(e)
        }
        Err(e) => Err(e),
    }
}

/// Tracks from q = 0 at `lambda_start`, then moves λ to `lambda_target` at
/// fixed q. Reaches parameter points (such as λ = 0) where the q = 0 start
/// is degenerate.
pub fn continue_in_lambda(
    chart: &SigmaChart,
    lambda_start: &[f64],
    lambda_target: &[f64],
    q: &[f64],
    opts: &ContinuationOptions,
) -> Result<CriticalPointRecord, CriticalError> {
    validate(lambda_start, q, chart.n)?;
    if lambda_target.len() != lambda_start.len() || lambda_target.iter().sum::<f64>().abs() > 1e-12 {
        return Err(CriticalError::InvalidInput("target λ must have Σλ = 0".into()));
    }
    let nc = NumericChart::new(chart);
    let (state, mut detoured) = track_from_zero(&nc, lambda_start, q, opts)?;
    let seg = |detour: f64| Segment {
        q0: to_complex(q),
        q1: to_complex(q),
        l0: to_complex(lambda_start),
        l1: to_complex(lambda_target),
        detour,
    };
    let end = match continuation::track(&nc, &seg(0.0), state.clone(), opts) {
        Ok(s) => s,
        Err(e) => {
            detoured = true;
            [0.5, -0.5, 1.0]
                .iter()
                .find_map(|d| continuation::track(&nc, &seg(*d), state.clone(), opts).ok())
                .ok_or(e)?
        }
    };
    Ok(finish_record(&nc, &end, lambda_target, q, detoured))
}

pub fn all_critical_points(
    graph: &MirrorGraph,
    lambda: &[f64],
    q: &[f64],
    opts: &ContinuationOptions,
) -> Result<Vec<CriticalPointRecord>, CriticalError> {
    let charts = all_charts(graph)?;
    charts
        .par_iter()
        .map(|c| continue_to(c, lambda, q, opts))
        .collect()
}

/// Smallest pairwise distance between records in ambient edge coordinates.
pub fn min_pairwise_distance(records: &[CriticalPointRecord]) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..records.len() {
        for b in a + 1..records.len() {
            let d = records[a]
                .edges
                .iter()
                .map(|(e, x)| (x - records[b].edges[e]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            best = best.min(d);
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct Census {
    pub count: usize,
    pub expected: usize,
    pub all_nondegenerate: bool,
    pub min_abs_det: f64,
    pub min_distance: f64,
    pub max_gradient: f64,
}

impl Census {
    pub fn passed(&self) -> bool {
        self.count == self.expected
            && self.all_nondegenerate
            && self.min_abs_det > NONDEGENERACY_THRESHOLD
            && self.min_distance > 1e-6
    }
}

pub fn census(n: usize, records: &[CriticalPointRecord]) -> Census {
    Census {
        count: records.len(),
        expected: (1..=n + 1).product(),
        all_nondegenerate: records.iter().all(|r| r.nondegenerate),
        min_abs_det: records
            .iter()
            .map(|r| r.hessian_det.norm())
            .fold(f64::INFINITY, f64::min),
        min_distance: min_pairwise_distance(records),
        max_gradient: records.iter().map(|r| r.gradient_norm).fold(0.0, f64::max),
    }
}
