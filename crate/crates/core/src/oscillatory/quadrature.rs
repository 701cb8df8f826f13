//! ∫_{ℝ^d} exp(f(s)/ħ) ds for phases f(s) = Σ e^{s_a} + σ·s + Σ_r c_r e^{e_r·s} + const
//! with c_r > 0 and ħ < 0. Such f is convex in s, so the integrand is
//! log-concave: we locate the mode by Newton, whiten by the Hessian there
//! and run a nested trapezoid rule that marches outward on each axis until
//! the integrand is negligible, halving the step until two rules agree.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::OscillatoryError;

/// The exponential-sum phase in log coordinates s = ln w.
#[derive(Clone, Debug)]
pub struct ExpPhase {
    pub sigma: Vec<f64>,
    /// (exponent vector, positive coefficient)
    pub terms: Vec<(Vec<i32>, f64)>,
    pub constant: f64,
    /// Names for error messages, one per coordinate.
    pub names: Vec<String>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureControls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of step halvings after the initial step.
    pub max_subdivisions: usize,
    pub initial_step: f64,
}

impl Default for QuadratureControls {
    fn default() -> Self {
        QuadratureControls {
            rel_tol: 1e-13,
            abs_tol: 0.0,
            max_subdivisions: 6,
            initial_step: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub log_value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub step: f64,
}

/// Relative cutoff for marching; e^{-40}.
const CUTOFF: f64 = 4.248354255291589e-18;
const ABS_CUTOFF: f64 = 1e-40;
const MAX_NODES: usize = 200_000;

impl ExpPhase {
    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    fn validate(&self) -> Result<(), OscillatoryError> {
        if self.sigma.is_empty() {
            return Err(OscillatoryError::InvalidInput("empty phase".into()));
        }
        if self.terms.iter().any(|(e, c)| e.len() != self.dim() || !(*c > 0.0)) {
            return Err(OscillatoryError::InvalidInput(
                "terms need positive coefficients and matching exponent length".into(),
            ));
        }
        Ok(())
    }

    /// f(s) without the constant.
    pub fn value(&self, s: &[f64]) -> f64 {
        let mut v = 0.0;
        for (a, x) in s.iter().enumerate() {
            v += x.exp() + self.sigma[a] * x;
        }
        for (e, c) in &self.terms {
            v += c * linear(e, s).exp();
        }
        v
    }

    fn gradient_hessian(&self, s: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.dim();
        let mut g = DVector::from_fn(d, |a, _| s[a].exp() + self.sigma[a]);
        let mut h = DMatrix::from_fn(d, d, |a, b| if a == b { s[a].exp() } else { 0.0 });
        for (e, c) in &self.terms {
            let r = c * linear(e, s).exp();
            for a in 0..d {
                if e[a] == 0 {
                    continue;
                }
                g[a] += e[a] as f64 * r;
                for b in 0..d {
                    h[(a, b)] += (e[a] * e[b]) as f64 * r;
                }
            }
        }
        (g, h)
    }

    /// Unique minimizer of the convex part, by damped Newton.
    pub fn mode(&self) -> Result<(Vec<f64>, DMatrix<f64>), OscillatoryError> {
        self.validate()?;
        let d = self.dim();
        let mut s = vec![0.0; d];
        let mut val = self.value(&s);
        let fail = |s: &[f64]| {
            self.probe_faces(s, 40.0).unwrap_or(OscillatoryError::NotConverged {
                reason: "Newton iteration for the mode stalled".into(),
            })
        };
        for _ in 0..500 {
            let (g, h) = self.gradient_hessian(&s);
            let chol = h.clone().cholesky().ok_or_else(|| fail(&s))?;
            let step = chol.solve(&(-&g));
            let decrement = -g.dot(&step);
            if decrement < 1e-24 * (1.0 + val.abs()) {
                return Ok((s, h));
            }
            if decrement < 1e-10 * (1.0 + val.abs()) {
                // Function values cannot resolve the remaining decrease;
                // Newton is in its quadratic regime.
                for (x, dx) in s.iter_mut().zip(step.iter()) {
                    *x += dx;
                }
                val = self.value(&s);
                continue;
            }
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> = s.iter().zip(step.iter()).map(|(x, dx)| x + t * dx).collect();
                let tv = self.value(&trial);
                if tv.is_finite() && tv <= val - 1e-4 * t * decrement {
                    s = trial;
                    val = tv;
                    break;
                }
                t *= 0.5;
                if t < 1e-12 {
                    return Err(fail(&s));
                }
            }
            if s.iter().any(|x| x.abs() > 600.0) {
                return Err(fail(&s));
            }
        }
        Err(fail(&s))
    }

    /// A coordinate ray from `s` along which f grows by less than `rise`.
    fn probe_faces(&self, s: &[f64], rise: f64) -> Option<OscillatoryError> {
        let base = self.value(s);
        for a in 0..self.dim() {
            for dir in [-1.0, 1.0] {
                let grows = (0..10).any(|p| {
                    let mut x = s.to_vec();
                    x[a] += dir * (1u32 << p) as f64;
                    self.value(&x) - base > rise
                });
                if !grows {
                    let name = self.names.get(a).cloned().unwrap_or_else(|| format!("s{a}"));
                    let face = if dir < 0.0 { format!("{name} → 0") } else { format!("{name} → ∞") };
                    return Some(OscillatoryError::Divergence { face });
                }
            }
        }
        None
    }

    /// Checks that f/|ħ| rises by at least 40 along every coordinate ray
    /// from the mode, i.e. that the integrand decays at every face.
    pub fn check_decay(&self, hbar: f64) -> Result<(), OscillatoryError> {
        let (s, _) = self.mode()?;
        match self.probe_faces(&s, 40.0 * hbar.abs()) {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn integrate(&self, hbar: f64, controls: &QuadratureControls) -> Result<QuadratureResult, OscillatoryError> {
        if !(hbar < 0.0) {
            return Err(OscillatoryError::InvalidInput(format!("ħ must be negative, got {hbar}")));
        }
        let (mode, hess) = self.mode()?;
        let d = self.dim();
        let scale = hbar.abs();
        let chol = (hess / scale)
            .cholesky()
            .ok_or_else(|| OscillatoryError::InvalidInput("Hessian at the mode is not positive".into()))?;
        let l = chol.l();
        let m = l
            .transpose()
            .try_inverse()
            .ok_or_else(|| OscillatoryError::InvalidInput("singular whitening".into()))?;
        let log_det_m: f64 = -(0..d).map(|i| l[(i, i)].ln()).sum::<f64>();
        let peak = self.value(&mode);
        let nested = Nested {
            phase: self,
            mode: &mode,
            m: &m,
            peak,
            scale,
        };
        let mut h = controls.initial_step;
        let mut evaluations = 0;
        let mut prev: Option<f64> = None;
        let mut last_err = f64::INFINITY;
        let mut sum = 0.0;
        for _ in 0..=controls.max_subdivisions {
            let mut z = vec![0.0; d];
            sum = nested.level(0, &mut z, h, &mut evaluations)? * h.powi(d as i32);
            if let Some(p) = prev {
                last_err = (sum - p).abs();
                if last_err <= controls.rel_tol * sum.abs() || last_err <= controls.abs_tol {
                    break;
                }
            }
            prev = Some(sum);
            h *= 0.5;
        }
        // f/ħ at the mode, with the constant.
        let log_peak = (peak + self.constant) / hbar;
        let log_value = log_peak + log_det_m + sum.ln();
        let log_scale = log_value - sum.ln();
        let error_estimate = last_err * log_scale.exp();
        let value = log_value.exp();
        let converged = last_err <= controls.rel_tol * sum.abs() || last_err <= controls.abs_tol;
        Ok(QuadratureResult {
            value,
            log_value,
            error_estimate,
            evaluations,
            converged,
            step: h,
        })
    }
}

fn linear(e: &[i32], s: &[f64]) -> f64 {
    e.iter().zip(s).map(|(a, b)| *a as f64 * b).sum()
}

struct Nested<'a> {
    phase: &'a ExpPhase,
    mode: &'a [f64],
    m: &'a DMatrix<f64>,
    peak: f64,
    scale: f64,
}

/// Neumaier compensated sum.
#[derive(Default)]
struct Sum {
    total: f64,
    carry: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        if self.total.abs() >= x.abs() {
            self.carry += (self.total - t) + x;
        } else {
            self.carry += (x - t) + self.total;
        }
        self.total = t;
    }

    fn value(&self) -> f64 {
        self.total + self.carry
    }
}

impl Nested<'_> {
    fn leaf(&self, z: &[f64]) -> f64 {
        let d = z.len();
        let s: Vec<f64> = (0..d)
            .map(|a| self.mode[a] + (0..d).map(|b| self.m[(a, b)] * z[b]).sum::<f64>())
            .collect();
        (-(self.phase.value(&s) - self.peak) / self.scale).exp()
    }

    /// Σ_k g(kh) along axis `level`, g being the integral over the later axes.
    fn level(&self, level: usize, z: &mut [f64], h: f64, evals: &mut usize) -> Result<f64, OscillatoryError> {
        if level == z.len() {
            *evals += 1;
            return Ok(self.leaf(z));
        }
        z[level] = 0.0;
        let center = self.level(level + 1, z, h, evals)?;
        let mut total = Sum::default();
        total.add(center);
        for dir in [1.0, -1.0] {
            let mut peak = center;
            let mut k = 1;
            loop {
                z[level] = dir * k as f64 * h;
                let v = self.level(level + 1, z, h, evals)?;
                total.add(v);
                peak = peak.max(v);
                if v <= CUTOFF * peak || v <= ABS_CUTOFF {
                    break;
                }
                k += 1;
                if k > MAX_NODES {
                    return Err(OscillatoryError::NotConverged {
                        reason: format!("axis {level} did not decay within {MAX_NODES} nodes"),
                    });
                }
            }
        }
        z[level] = 0.0;
        Ok(total.value())
    }
}
