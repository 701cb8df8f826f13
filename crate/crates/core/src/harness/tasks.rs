//! The verification tasks behind each subcommand.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{RunConfig, Task};
use super::report::Residual;
use super::HarnessError;
use crate::algebra::{format_rational, rat, rational_to_f64_vec, Rational};
use crate::critical::{
    all_critical_points, census, continue_to, lagrangian_residuals, spectral_check, to_lagrangian, ContinuationOptions,
    CriticalError, CriticalPointRecord,
};
use crate::mirror::{all_charts, build_graph, make_chart, MirrorError, MirrorGraph, SigmaChart};
use crate::oscillatory::special::bessel_k;
use crate::oscillatory::{eigen_residual_in_chart, eigen_residual_with, t_from_q, OscillatoryError};
use crate::semiclassical::verify_all;
use crate::toda::{build_hamiltonian, toda_operators, toda_polynomials};
use crate::virasoro::{
    commutation_check, family_commutation_check, point_virasoro, quantize, unquantized_bracket_check, DMap,
    LoopPairing, PointSource, VirasoroError,
};

/// What a task hands back before timing and bookkeeping are added.
#[derive(Default)]
pub struct TaskOutcome {
    pub params: Map<String, Value>,
    pub results: Vec<Value>,
    pub checks: Vec<Residual>,
    pub warnings: Vec<String>,
}

impl TaskOutcome {
    fn param(&mut self, key: &str, v: impl Serialize) {
        self.params.insert(key.to_string(), to_value(v));
    }

    fn result(&mut self, v: impl Serialize) {
        self.results.push(to_value(v));
    }

    /// Records a computational failure as a failing check.
    fn failure(&mut self, name: &str, err: impl std::fmt::Display) {
        self.warnings.push(format!("{name}: {err}"));
        self.checks.push(Residual::upper(name, f64::INFINITY, 0.0));
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn complex(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

trait InputError {
    fn invalid_input(&self) -> Option<String>;
}

impl InputError for MirrorError {
    fn invalid_input(&self) -> Option<String> {
        matches!(self, MirrorError::InvalidSize(_) | MirrorError::InvalidChart(_)).then(|| self.to_string())
    }
}

impl InputError for CriticalError {
    fn invalid_input(&self) -> Option<String> {
        match self {
            CriticalError::InvalidInput(_) | CriticalError::DegenerateLambda { .. } => Some(self.to_string()),
            CriticalError::Mirror(e) => e.invalid_input(),
            _ => None,
        }
    }
}

impl InputError for OscillatoryError {
    fn invalid_input(&self) -> Option<String> {
        match self {
            OscillatoryError::InvalidInput(_) | OscillatoryError::Divergence { .. } => Some(self.to_string()),
            OscillatoryError::Critical(e) => e.invalid_input(),
            OscillatoryError::Mirror(e) => e.invalid_input(),
            _ => None,
        }
    }
}

impl InputError for VirasoroError {
    fn invalid_input(&self) -> Option<String> {
        matches!(self, VirasoroError::InvalidInput(_)).then(|| self.to_string())
    }
}

/// Input errors abort the run; anything else becomes a failing check.
fn absorb<T, E: InputError + std::fmt::Display>(
    out: &mut TaskOutcome,
    name: &str,
    r: Result<T, E>,
) -> Result<Option<T>, HarnessError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) => match e.invalid_input() {
            Some(msg) => Err(HarnessError::InvalidInput(msg)),
            None => {
                out.failure(name, e);
                Ok(None)
            }
        },
    }
}

fn n_or(c: &RunConfig, default: usize, max: usize) -> Result<usize, HarnessError> {
    let n = c.n.unwrap_or(default);
    if n > max {
        return Err(HarnessError::InvalidInput(format!("{} supports n ≤ {max}, got {n}", c.task)));
    }
    Ok(n)
}

fn check_len(name: &str, v: &[Rational], want: usize) -> Result<(), HarnessError> {
    if v.len() != want {
        return Err(HarnessError::InvalidInput(format!("{name} needs {want} values, got {}", v.len())));
    }
    Ok(())
}

fn lambda_or(c: &RunConfig, n: usize, default: impl FnOnce() -> Vec<Rational>) -> Result<Vec<Rational>, HarnessError> {
    let l = c.lambda.clone().unwrap_or_else(default);
    check_len("lambda", &l, n + 1)?;
    Ok(l)
}

fn q_or_ones(c: &RunConfig, n: usize) -> Result<Vec<Rational>, HarnessError> {
    let q = c.q.clone().unwrap_or_else(|| vec![rat(1, 1); n]);
    check_len("q", &q, n)?;
    Ok(q)
}

fn require_distinct(l: &[Rational]) -> Result<(), HarnessError> {
    for i in 0..l.len() {
        for j in 0..i {
            if l[i] == l[j] {
                return Err(HarnessError::InvalidInput(format!("λ_{j} = λ_{i}; generic λ required")));
            }
        }
    }
    Ok(())
}

fn charts_for(c: &RunConfig, g: &MirrorGraph, out: &mut TaskOutcome) -> Result<Vec<SigmaChart>, HarnessError> {
    let charts = match &c.chart {
        Some(k) => make_chart(g, k).map(|ch| vec![ch]),
        None => all_charts(g),
    };
    Ok(absorb(out, "charts", charts)?.unwrap_or_default())
}

/// Distinct multiples of 1/8 in [-1, 1] summing to zero.
pub fn random_lambda(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    loop {
        let mut l: Vec<Rational> = (0..n).map(|_| rat(rng.random_range(-8..=8), 8)).collect();
        let s = l.iter().fold(Rational::zero(), |a, b| a + b);
        l.push(-s);
        if require_distinct(&l).is_ok() {
            return l;
        }
    }
}

pub fn run_task(c: &RunConfig) -> Result<TaskOutcome, HarnessError> {
    match c.task {
        Task::Commute => commute(c),
        Task::Mirror => mirror(c),
        Task::Critical => critical(c),
        Task::Eigen => eigen(c),
        Task::ClassicalLimit => classical_limit(c),
        Task::Virasoro => virasoro(c),
        Task::All => Err(HarnessError::InvalidInput("`all` is dispatched by the runner".into())),
    }
}

fn commute(c: &RunConfig) -> Result<TaskOutcome, HarnessError> {
    let mut out = TaskOutcome::default();
    let n = n_or(c, 3, 4)?;
    out.param("n", n);
    let ops = toda_operators(n).map_err(|e| HarnessError::InvalidInput(e.to_string()))?;
    let h = build_hamiltonian(n).map_err(|e| HarnessError::InvalidInput(e.to_string()))?;
    let mut pairs: Vec<(String, usize, usize)> = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            pairs.push((format!("[D{},D{}]", i + 1, j + 1), i, j));
        }
        pairs.push((format!("[H,D{}]", i + 1), usize::MAX, i));
    }
    let sizes: Vec<usize> = pairs
        .par_iter()
        .map(|(_, i, j)| {
            let a = if *i == usize::MAX { &h } else { &ops[*i] };
            a.commutator(&ops[*j]).map(|op| op.len()).unwrap_or(usize::MAX)
        })
        .collect();
    for ((name, _, _), terms) in pairs.iter().zip(sizes) {
        out.result(json!({ "commutator": name, "terms": terms }));
        out.checks.push(Residual::exact(name.clone(), terms));
    }
    Ok(out)
}

fn mirror(c: &RunConfig) -> Result<TaskOutcome, HarnessError> {
    let mut out = TaskOutcome::default();
    let n = n_or(c, 3, 4)?;
    out.param("n", n);
    out.param("chart", &c.chart);
    let g = absorb(&mut out, "graph", build_graph(n))?.expect("graph for valid n");
    let charts = charts_for(c, &g, &mut out)?;
    if c.chart.is_none() {
        let expected: usize = (1..=n + 1).product();
        out.checks.push(Residual::exact("chart count", charts.len().abs_diff(expected)));
    }
    for ch in &charts {
        let tag = format!("{:?}", ch.k);
        let jac = ch.jacobian_determinant(&g);
        let unimodular = jac.abs() == rat(1, 1);
        out.checks.push(Residual::exact(format!("jacobian {tag}"), usize::from(!unimodular)));
        if let Some(rel) = absorb(&mut out, &format!("relations {tag}"), ch.relation_residuals(&g))? {
            let bad = rel.iter().filter(|p| !p.is_zero()).count();
            out.checks.push(Residual::exact(format!("relations {tag}"), bad));
        }
        if let Some(sub) = absorb(&mut out, &format!("phase {tag}"), ch.substituted_phase(&g))? {
            let agree = sub.constrained() == ch.phase_in_chart().constrained();
            out.checks.push(Residual::exact(format!("phase routes {tag}"), usize::from(!agree)));
        }
        let (lo, hi) = ch.q_degree_bounds();
        out.result(json!({
            "chart": ch.report(),
            "jacobian_determinant": format_rational(&jac),
            "q_degree_bounds": [lo, hi],
        }));
    }
    Ok(out)
}

fn record_value(r: &CriticalPointRecord, spectral: f64, lagrangian: f64) -> Value {
    json!({
        "k": r.k,
        "permutation": r.permutation,
        "critical_value": complex(r.critical_value),
        "hessian_det": complex(r.hessian_det),
        "gradient_norm": r.gradient_norm,
        "inverse_condition": r.inverse_condition,
        "nondegenerate": r.nondegenerate,
        "spectral_deviation": spectral,
        "lagrangian_residual": lagrangian,
        "detoured": r.detoured,
    })
}

fn critical(c: &RunConfig) -> Result<TaskOutcome, HarnessError> {
    let mut out = TaskOutcome::default();
    let n = n_or(c, 2, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let lambda = lambda_or(c, n, || random_lambda(n, &mut rng))?;
    require_distinct(&lambda)?;
    let q = q_or_ones(c, n)?;
    let tol = c.tol.unwrap_or(1e-8);
    out.param("n", n);
    out.param("lambda", rationals(&lambda));
    out.param("q", rationals(&q));
    out.param("chart", &c.chart);
    out.param("tol", tol);
    out.param("seed", c.seed);
    let (lf, qf) = (rational_to_f64_vec(&lambda), rational_to_f64_vec(&q));
    let g = absorb(&mut out, "graph", build_graph(n))?.expect("graph for valid n");
    let opts = ContinuationOptions::default();
    let records = match &c.chart {
        Some(_) => {
            let charts = charts_for(c, &g, &mut out)?;
            let r = charts.iter().map(|ch| continue_to(ch, &lf, &qf, &opts)).collect::<Result<Vec<_>, _>>();
            absorb(&mut out, "continuation", r)?
        }
        None => absorb(&mut out, "continuation", all_critical_points(&g, &lf, &qf, &opts))?,
    };
    let Some(records) = records else { return Ok(out) };
    let polys = toda_polynomials(n).map_err(|e| HarnessError::InvalidInput(e.to_string()))?;
    let mut spectral_max = 0.0f64;
    let mut lagrangian_max = 0.0f64;
    for r in &records {
        let s = spectral_check(r);
        let l = lagrangian_residuals(&to_lagrangian(r), &lf, &polys).into_iter().fold(0.0, f64::max);
        spectral_max = spectral_max.max(s);
        lagrangian_max = lagrangian_max.max(l);
        out.result(record_value(r, s, l));
    }
    let cen = census(n, &records);
    if c.chart.is_none() {
        out.checks.push(Residual::exact("critical point count", cen.count.abs_diff(cen.expected)));
        out.checks.push(Residual::lower("min pairwise distance", cen.min_distance, 1e-6));
    }
    let degenerate = records.iter().filter(|r| !r.nondegenerate).count();
    out.checks.push(Residual::exact("degenerate points", degenerate));
    out.checks.push(Residual::lower("min |det Hessian|", cen.min_abs_det, 1e-8));
    out.checks.push(Residual::upper("max gradient norm", cen.max_gradient, tol));
    out.checks.push(Residual::upper("spectral deviation", spectral_max, tol));
    out.checks.push(Residual::upper("lagrangian residual", lagrangian_max, tol));
    Ok(out)
}

fn eigen(c: &RunConfig) -> Result<TaskOutcome, HarnessError> {
    let mut out = TaskOutcome::default();
    let n = n_or(c, 1, 3)?;
    let lambda = lambda_or(c, n, || match n {
        1 => vec![rat(1, 2), rat(-1, 2)],
        2 => vec![rat(1, 4), rat(1, 8), rat(-3, 8)],
        _ => vec![rat(3, 8), rat(1, 8), rat(-1, 8), rat(-3, 8)],
    })?;
    let q = q_or_ones(c, n)?;
    let hbar = c.hbar.clone().unwrap_or(rat(-1, 1));
    if !hbar.is_negative() {
        return Err(HarnessError::InvalidInput("the real-cycle integral needs ħ < 0".into()));
    }
    let tol = c.tol.unwrap_or(if n == 1 { 1e-6 } else { 1e-3 });
    let chart = c.chart.clone().unwrap_or_else(|| vec![0; n]);
    let step = 1e-2;
    out.param("n", n);
    out.param("lambda", rationals(&lambda));
    out.param("q", rationals(&q));
    out.param("hbar", format_rational(&hbar));
    out.param("chart", &chart);
    out.param("tol", tol);
    out.param("step", step);
    let (lf, qf) = (rational_to_f64_vec(&lambda), rational_to_f64_vec(&q));
    let hf = crate::algebra::poly::rational_to_f64(&hbar);
    let t = t_from_q(&qf);
    let rep = eigen_residual_in_chart(n, &chart, &lf, hf, &t, step, &Default::default());
    if let Some(rep) = absorb(&mut out, "eigen", rep)? {
        for (i, r) in rep.residuals.iter().enumerate() {
            out.checks.push(Residual::upper(format!("D{} residual", i + 1), *r, tol));
        }
        if n == 1 {
            let l0 = lf[0];
            let oracle = |x: f64| 2.0 * bessel_k(-2.0 * l0 / hf, -2.0 * (x.exp()).sqrt() / hf);
            let agreement = (rep.value / oracle(qf[0].ln()) - 1.0).abs();
            out.checks.push(Residual::upper("Bessel oracle agreement", agreement, 1e-8));
            let o = eigen_residual_with(1, &lf, hf, &[qf[0].ln()], step, |x| Ok((oracle(x[0]), 0.0)));
            if let Some((res, _, _, _)) = absorb(&mut out, "oracle", o)? {
                for (i, r) in res.iter().enumerate() {
                    out.checks.push(Residual::upper(format!("D{} residual on oracle", i + 1), *r, tol));
                }
            }
        }
        out.result(rep);
    }
    Ok(out)
}

fn classical_limit(c: &RunConfig) -> Result<TaskOutcome, HarnessError> {
    let mut out = TaskOutcome::default();
    let n = n_or(c, 3, 4)?;
    let order = c.order.unwrap_or(4);
    if order == 0 {
        return Err(HarnessError::InvalidInput("order must be at least 1".into()));
    }
    out.param("n", n);
    out.param("order", order);
    let reports = verify_all(n, order);
    let failed = reports.iter().filter(|r| !r.passed).count();
    out.checks.push(Residual::exact("permutations failing the identity", failed));
    for r in reports {
        out.result(r);
    }
    Ok(out)
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(-9..=9), rng.random_range(1..=5))
}

fn square(n: usize) -> Vec<Vec<Rational>> {
    vec![vec![Rational::zero(); n]; n]
}

/// μ = deg - dim/2 and ρ = c_1 ∪ on the cohomology of P^{N-1}.
pub fn projective_space(n: usize) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>, LoopPairing) {
    let mut mu = square(n);
    let mut rho = square(n);
    for i in 0..n {
        mu[i][i] = rat(2 * i as i64 - (n as i64 - 1), 2);
        if i + 1 < n {
            rho[i + 1][i] = rat(n as i64, 1);
        }
    }
    (mu, rho, LoopPairing::antidiagonal(n))
}

fn pairs() -> Vec<(i32, i32)> {
    let mut v = Vec::new();
    for m in -1..=2 {
        for mp in -1..=2 {
            if m + mp >= -1 {
                v.push((m, mp));
            }
        }
    }
    v
}

fn virasoro(c: &RunConfig) -> Result<TaskOutcome, HarnessError> {
    let mut out = TaskOutcome::default();
    let window = c.window.unwrap_or(4);
    if window < 4 {
        return Err(HarnessError::InvalidInput("window must be at least 4".into()));
    }
    out.param("window", window);
    out.param("seed", c.seed);

    // Quantized D_m against the closed-form point operators.
    let eta1 = LoopPairing::identity(1);
    for m in -1..=2 {
        let q = absorb(&mut out, "quantize", quantize(&DMap { n: 1, m }, &eta1, window))?;
        let shown = absorb(&mut out, "point operator", point_virasoro(m, window))?;
        if let (Some(q), Some(shown)) = (q, shown) {
            let diff = q.sub(&shown);
            if !diff.is_zero() {
                out.warnings.push(format!("quantized L_{m} differs from the closed form by {diff}"));
            }
            out.checks.push(Residual::exact(format!("quantize(D_{m}) vs closed form"), diff.term_count()));
            out.result(json!({ "m": m, "quantized": q, "closed_form": shown }));
        }
    }

    let reports: Vec<_> = pairs()
        .into_par_iter()
        .map(|(m, mp)| commutation_check(m, mp, window, PointSource::Quantized))
        .collect();
    for r in reports {
        if let Some(r) = absorb(&mut out, "point commutator", r)? {
            out.checks.push(Residual::exact(format!("[L_{},L_{}] forced scalar", r.m, r.m_prime), usize::from(!r.passed)));
            out.result(r);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    for n in 1..=3usize {
        let mut mu = square(n);
        let mut rho = square(n);
        for i in 0..n {
            mu[i][i] = small_rational(&mut rng);
            for j in 0..i {
                rho[i][j] = small_rational(&mut rng);
            }
        }
        let reports: Vec<_> = pairs()
            .into_par_iter()
            .map(|(m, mp)| unquantized_bracket_check(&mu, &rho, m, mp, 6))
            .collect();
        let mut mismatches = 0;
        for r in reports {
            if let Some(r) = absorb(&mut out, "bracket", r)? {
                mismatches += r.mismatches;
            }
        }
        out.checks.push(Residual::exact(format!("unquantized bracket, random N={n}"), mismatches));
        out.result(json!({
            "family": "random",
            "N": n,
            "mu_diagonal": (0..n).map(|i| format_rational(&mu[i][i])).collect::<Vec<_>>(),
            "bracket_mismatches": mismatches,
        }));
    }

    for n in [2usize, 3] {
        let (mu, rho, eta) = projective_space(n);
        let reports: Vec<_> = pairs()
            .into_par_iter()
            .filter(|(m, mp)| mp < m)
            .map(|(m, mp)| family_commutation_check(&mu, &rho, &eta, m, mp, 3, 2))
            .collect();
        for r in reports {
            if let Some(r) = absorb(&mut out, "family commutator", r)? {
                out.checks.push(Residual::exact(
                    format!("P^{} [L_{},L_{}] central", n - 1, r.m, r.m_prime),
                    usize::from(!r.passed),
                ));
                out.result(json!({ "family": format!("P^{}", n - 1), "report": r }));
            }
        }
    }
    Ok(out)
}
