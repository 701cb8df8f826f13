//! Newton continuation of chart critical points from q = 0.
//!
//! Work happens in L = log w, where the critical equations become
//! G_a = w_a ∂f/∂w_a = w_a + Σ_r e_{r,a} r + σ_a and the Jacobian
//! J_ab = δ_ab w_a + Σ_r e_{r,a} e_{r,b} r is symmetric.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::{rational_to_f64_vec, Symbol};
use crate::mirror::{Edge, SigmaChart};

use super::CriticalError;

/// One eliminated edge as a numeric monomial: ∏ q_s^{q_exps[s]} ∏ w_a^{exps[a]}.
#[derive(Clone, Debug)]
pub struct NumericTerm {
    pub edge: Edge,
    pub exps: Vec<i32>,
    pub q_exps: Vec<i32>,
}

/// A chart with its λ-forms kept as coefficient vectors so λ can move.
#[derive(Clone, Debug)]
pub struct NumericChart {
    pub k: Vec<usize>,
    pub permutation: Vec<usize>,
    pub variables: Vec<Edge>,
    pub sigma_forms: Vec<Vec<f64>>,
    pub q_log_forms: Vec<Vec<f64>>,
    pub terms: Vec<NumericTerm>,
}

fn dot(form: &[f64], lambda: &[Complex64]) -> Complex64 {
    form.iter().zip(lambda).map(|(c, l)| l * *c).sum()
}

impl NumericChart {
    pub fn new(chart: &SigmaChart) -> Self {
        let n = chart.n;
        let index: BTreeMap<Symbol, usize> = chart
            .variables
            .iter()
            .enumerate()
            .map(|(a, e)| (e.symbol(), a))
            .collect();
        let terms = chart
            .eliminated
            .iter()
            .map(|(edge, m)| {
                let mut exps = vec![0; chart.variables.len()];
                let mut q_exps = vec![0; n];
                for &(s, e) in m.iter() {
                    match s {
                        Symbol::Q(slot) => q_exps[slot as usize - 1] = e,
                        _ => exps[index[&s]] = e,
                    }
                }
                NumericTerm {
                    edge: *edge,
                    exps,
                    q_exps,
                }
            })
            .collect();
        NumericChart {
            k: chart.k.clone(),
            permutation: chart.permutation.clone(),
            variables: chart.variables.clone(),
            sigma_forms: chart
                .exponents
                .iter()
                .map(|f| rational_to_f64_vec(f.coefficients()))
                .collect(),
            q_log_forms: (1..=n)
                .map(|s| rational_to_f64_vec(chart.q_log_coefficient(s).coefficients()))
                .collect(),
            terms,
        }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn sigma(&self, lambda: &[Complex64]) -> Vec<Complex64> {
        self.sigma_forms.iter().map(|f| dot(f, lambda)).collect()
    }

    fn q_coefficient(t: &NumericTerm, q: &[Complex64]) -> Complex64 {
        t.q_exps
            .iter()
            .zip(q)
            .fold(Complex64::new(1.0, 0.0), |acc, (&e, qs)| acc * qs.powi(e))
    }

    /// d/dτ of the q-coefficient along a path with velocity `dq`.
    fn q_coefficient_rate(t: &NumericTerm, q: &[Complex64], dq: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..q.len() {
            let e = t.q_exps[s];
            if e == 0 {
                continue;
            }
            let mut prod = dq[s] * q[s].powi(e - 1) * e as f64;
            for (r, qr) in q.iter().enumerate() {
                if r != s {
                    prod *= qr.powi(t.q_exps[r]);
                }
            }
            acc += prod;
        }
        acc
    }

    /// Values of the eliminated monomials at log-coordinates `logs`.
    pub fn term_values(&self, logs: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
        self.terms
            .iter()
            .map(|t| {
                let c = Self::q_coefficient(t, q);
                if c == Complex64::new(0.0, 0.0) {
                    return c;
                }
                let s: Complex64 = t.exps.iter().zip(logs).map(|(&e, l)| l * e as f64).sum();
                c * s.exp()
            })
            .collect()
    }

    pub fn residual(&self, logs: &[Complex64], q: &[Complex64], sigma: &[Complex64]) -> DVector<Complex64> {
        let r = self.term_values(logs, q);
        DVector::from_fn(self.dim(), |a, _| {
            let mut g = logs[a].exp() + sigma[a];
            for (t, rv) in self.terms.iter().zip(&r) {
                if t.exps[a] != 0 {
                    g += rv * t.exps[a] as f64;
                }
            }
            g
        })
    }

    pub fn jacobian(&self, logs: &[Complex64], q: &[Complex64]) -> DMatrix<Complex64> {
        let d = self.dim();
        let r = self.term_values(logs, q);
        let mut j = DMatrix::from_fn(d, d, |a, b| {
            if a == b {
                logs[a].exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for (t, rv) in self.terms.iter().zip(&r) {
            for a in 0..d {
                if t.exps[a] == 0 {
                    continue;
                }
                for b in 0..d {
                    if t.exps[b] != 0 {
                        j[(a, b)] += rv * (t.exps[a] * t.exps[b]) as f64;
                    }
                }
            }
        }
        j
    }

    /// ∂G/∂τ for a path with velocities (dq, dλ).
    fn parameter_rate(
        &self,
        logs: &[Complex64],
        q: &[Complex64],
        dq: &[Complex64],
        dlambda: &[Complex64],
    ) -> DVector<Complex64> {
        let dsigma = self.sigma(dlambda);
        DVector::from_fn(self.dim(), |a, _| {
            let mut g = dsigma[a];
            for t in &self.terms {
                if t.exps[a] == 0 {
                    continue;
                }
                let rate = Self::q_coefficient_rate(t, q, dq);
                if rate == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let s: Complex64 = t.exps.iter().zip(logs).map(|(&e, l)| l * e as f64).sum();
                g += rate * s.exp() * t.exps[a] as f64;
            }
            g
        })
    }

    /// Hessian of f in the chart variables w.
    pub fn hessian_w(&self, logs: &[Complex64], q: &[Complex64], sigma: &[Complex64]) -> DMatrix<Complex64> {
        let d = self.dim();
        let w: Vec<Complex64> = logs.iter().map(|l| l.exp()).collect();
        let r = self.term_values(logs, q);
        let mut h = DMatrix::from_fn(d, d, |a, b| {
            if a == b {
                -sigma[a] / (w[a] * w[a])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        for (t, rv) in self.terms.iter().zip(&r) {
            for a in 0..d {
                if t.exps[a] == 0 {
                    continue;
                }
                for b in 0..d {
                    let eb = t.exps[b] - if a == b { 1 } else { 0 };
                    if eb != 0 {
                        h[(a, b)] += rv * (t.exps[a] * eb) as f64 / (w[a] * w[b]);
                    }
                }
            }
        }
        h
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ContinuationOptions {
    pub tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_newton: usize,
    /// Imaginary bulge of the path; 0 is the straight real segment.
    pub detour: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            tol: 1e-12,
            max_step: 0.02,
            min_step: 1e-9,
            max_newton: 8,
            detour: 0.0,
        }
    }
}

/// A straight-or-bulged segment between two parameter points.
#[derive(Clone, Debug)]
pub struct Segment {
    pub q0: Vec<Complex64>,
    pub q1: Vec<Complex64>,
    pub l0: Vec<Complex64>,
    pub l1: Vec<Complex64>,
    pub detour: f64,
}

impl Segment {
    /// Position and velocity at τ. The bulge factor 1 + iδτ(1-τ) equals 1
    /// at both ends.
    fn at(&self, tau: f64) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let bulge = Complex64::new(1.0, self.detour * tau * (1.0 - tau));
        let dbulge = Complex64::new(0.0, self.detour * (1.0 - 2.0 * tau));
        let lerp = |a: &[Complex64], b: &[Complex64]| -> (Vec<Complex64>, Vec<Complex64>) {
            a.iter()
                .zip(b)
                .map(|(x, y)| {
                    let base = x + (y - x) * tau;
                    (base * bulge, (y - x) * bulge + base * dbulge)
                })
                .unzip()
        };
        let (q, dq) = lerp(&self.q0, &self.q1);
        let (l, dl) = lerp(&self.l0, &self.l1);
        (q, dq, l, dl)
    }
}

/// State carried along a path: log-coordinates and the continuously chosen
/// square root of det Hess_w.
#[derive(Clone, Debug)]
pub struct PathState {
    pub logs: Vec<Complex64>,
    pub sqrt_det: Complex64,
    pub steps: usize,
}

fn inf_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn scale_of(logs: &[Complex64]) -> f64 {
    logs.iter().map(|l| l.exp().norm()).fold(1.0, f64::max)
}

/// Newton iterations at fixed parameters. Returns the polished logs and the
/// size of the first correction.
pub fn newton(
    chart: &NumericChart,
    logs: &[Complex64],
    q: &[Complex64],
    sigma: &[Complex64],
    opts: &ContinuationOptions,
) -> Option<(Vec<Complex64>, f64)> {
    let mut x = logs.to_vec();
    let mut first = None;
    for _ in 0..opts.max_newton {
        let g = chart.residual(&x, q, sigma);
        if inf_norm(&g) <= opts.tol * scale_of(&x) && first.is_some() {
            return Some((x, first.unwrap_or(0.0)));
        }
        let j = chart.jacobian(&x, q);
        let dx = j.lu().solve(&g)?;
        let step = inf_norm(&dx);
        first.get_or_insert(step);
        for (xi, di) in x.iter_mut().zip(dx.iter()) {
            *xi -= di;
        }
        if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step <= 1e-15 * (1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            let g = chart.residual(&x, q, sigma);
            if inf_norm(&g) <= opts.tol * scale_of(&x) {
                return Some((x, first.unwrap_or(0.0)));
            }
        }
    }
    let g = chart.residual(&x, q, sigma);
    if inf_norm(&g) <= opts.tol * scale_of(&x) {
        Some((x, first.unwrap_or(0.0)))
    } else {
        None
    }
}

fn det_hessian(chart: &NumericChart, logs: &[Complex64], q: &[Complex64], sigma: &[Complex64]) -> Complex64 {
    chart.hessian_w(logs, q, sigma).lu().determinant()
}

fn nearest_root(det: Complex64, prev: Complex64) -> Complex64 {
    let r = det.sqrt();
    if (r - prev).norm() <= (r + prev).norm() {
        r
    } else {
        -r
    }
}

/// Follows the critical point of `chart` along `seg` starting from `state`,
/// which must solve the equations at τ = 0.
pub fn track(
    chart: &NumericChart,
    seg: &Segment,
    state: PathState,
    opts: &ContinuationOptions,
) -> Result<PathState, CriticalError> {
    let mut tau = 0.0;
    let mut h = opts.max_step;
    let mut st = state;
    while tau < 1.0 {
        h = h.min(1.0 - tau);
        if h < opts.min_step {
            return Err(CriticalError::StepExhausted {
                k: chart.k.clone(),
                tau,
            });
        }
        let (q, dq, _, dlam) = seg.at(tau);
        let jac = chart.jacobian(&st.logs, &q);
        let rate = chart.parameter_rate(&st.logs, &q, &dq, &dlam);
        let tangent = match jac.clone().lu().solve(&rate) {
            Some(t) => t,
            None => {
                return Err(CriticalError::Caustic {
                    k: chart.k.clone(),
                    tau,
                })
            }
        };
        let pred: Vec<Complex64> = st
            .logs
            .iter()
            .zip(tangent.iter())
            .map(|(l, t)| l - t * h)
            .collect();
        let (q1, _, lam1, _) = seg.at(tau + h);
        let sigma1 = chart.sigma(&lam1);
        let accepted = newton(chart, &pred, &q1, &sigma1, opts).filter(|(x, first)| {
            let moved = x
                .iter()
                .zip(&st.logs)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            *first < 0.05 && moved < 0.25
        });
        match accepted {
            Some((x, _)) => {
                let det = det_hessian(chart, &x, &q1, &sigma1);
                if !det.norm().is_finite() || det.norm() == 0.0 {
                    return Err(CriticalError::Caustic {
                        k: chart.k.clone(),
                        tau: tau + h,
                    });
                }
                st.sqrt_det = nearest_root(det, st.sqrt_det);
                st.logs = x;
                st.steps += 1;
                tau += h;
                h = (h * 1.5).min(opts.max_step);
            }
            None => h *= 0.5,
        }
    }
    Ok(st)
}

/// The q = 0 start: w_a = -σ_a with principal logs, and √det Hess_w with
/// det = ∏(-1/σ_a).
pub fn initial_state(chart: &NumericChart, lambda: &[Complex64]) -> Result<PathState, CriticalError> {
    let sigma = chart.sigma(lambda);
    if let Some(a) = sigma.iter().position(|s| s.norm() < 1e-12) {
        return Err(CriticalError::DegenerateLambda {
            k: chart.k.clone(),
            variable: chart.variables[a].to_string(),
        });
    }
    let logs = sigma.iter().map(|s| (-s).ln()).collect();
    let det = sigma
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, s| acc * (-1.0 / s));
    Ok(PathState {
        logs,
        sqrt_det: det.sqrt(),
        steps: 0,
    })
}
