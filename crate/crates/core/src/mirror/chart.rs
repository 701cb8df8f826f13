//! σ-charts: global monomial coordinates on the relation torus.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::matrix::determinant;
use crate::algebra::{format_rational, LaurentPolynomial, LinearForm, Monomial, Rational, Symbol};

use super::graph::{build_phase, Edge, MirrorGraph, PhaseExpression};
use super::MirrorError;

#[derive(Clone, Debug)]
pub struct SigmaChart {
    pub n: usize,
    /// k_1..k_n.
    pub k: Vec<usize>,
    /// Chart variables w_{ij}, ordered by (i, j).
    pub variables: Vec<Edge>,
    /// For each chart variable, its partner edge and the partner expressed
    /// as a monomial in chart variables and q.
    pub eliminated: Vec<(Edge, Monomial)>,
    /// Exponents σ(i,j), aligned with `variables`.
    pub exponents: Vec<LinearForm>,
    /// ρ_{i,j} for i = 1..n+1, j = -1..n-i+1.
    pub rho: BTreeMap<(usize, i64), LinearForm>,
    /// One-line notation: λ_{σ(j)} = ρ_{1,j} - ρ_{1,j-1}.
    pub permutation: Vec<usize>,
}

pub fn validate_k(n: usize, k: &[usize]) -> Result<(), MirrorError> {
    if k.len() != n {
        return Err(MirrorError::InvalidChart(format!(
            "expected {n} entries, got {}",
            k.len()
        )));
    }
    for (idx, &ki) in k.iter().enumerate() {
        let i = idx + 1;
        if ki > n - i + 1 {
            return Err(MirrorError::InvalidChart(format!(
                "k_{i} = {ki} exceeds {}",
                n - i + 1
            )));
        }
    }
    Ok(())
}

/// All k-sequences, lexicographic.
pub fn all_k_sequences(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 1..=n {
        let mut next = Vec::new();
        for prefix in &out {
            for ki in 0..=n - i + 1 {
                let mut p = prefix.clone();
                p.push(ki);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn rho_table(n: usize, k: &[usize]) -> BTreeMap<(usize, i64), LinearForm> {
    let mut rho = BTreeMap::new();
    rho.insert((n + 1, -1), LinearForm::zero(n));
    rho.insert((n + 1, 0), LinearForm::lambda(n, n));
    for i in (1..=n).rev() {
        rho.insert((i, -1), LinearForm::zero(n));
        rho.insert(((i), (n - i + 1) as i64), LinearForm::range_sum(i - 1, n, n));
        for j in 0..=(n - i) as i64 {
            let val = if (j as usize) < k[i - 1] {
                rho[&(i + 1, j)].clone()
            } else {
                &rho[&(i + 1, j - 1)] + &LinearForm::lambda(i - 1, n)
            };
            rho.insert((i, j), val);
        }
    }
    rho
}

/// Gauss–Jordan over ℚ. Returns None for a singular left block.
fn solve_left_block(mut m: Vec<Vec<Rational>>, d: usize) -> Option<Vec<Vec<Rational>>> {
    for col in 0..d {
        let pivot = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = Rational::one() / &m[col][col];
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Some(m)
}

pub fn make_chart(graph: &MirrorGraph, k: &[usize]) -> Result<SigmaChart, MirrorError> {
    let n = graph.n;
    validate_k(n, k)?;
    let mut variables = Vec::new();
    for i in 1..=n {
        for j in 0..=n - i {
            variables.push(if j < k[i - 1] { Edge::u(i, j) } else { Edge::v(i, j) });
        }
    }
    let partners: Vec<Edge> = variables.iter().map(Edge::partner).collect();
    let d = variables.len();

    let rho = rho_table(n, k);
    let diff = |i: usize, j: i64| &rho[&(i, j)] - &rho[&(i, j - 1)];

    for i in 1..=n + 1 {
        let mut got: Vec<usize> = Vec::new();
        for j in 0..=(n + 1 - i) as i64 {
            match diff(i, j).as_single() {
                Some(s) => got.push(s),
                None => return Err(MirrorError::Multiset { i, k: k.to_vec() }),
            }
        }
        got.sort();
        if got != (i - 1..=n).collect::<Vec<_>>() {
            return Err(MirrorError::Multiset { i, k: k.to_vec() });
        }
    }
    let permutation: Vec<usize> = (0..=n as i64)
        .map(|j| diff(1, j).as_single().expect("checked above"))
        .collect();

    let exponents = variables
        .iter()
        .map(|e| {
            let (i, j) = (e.i, e.j as i64);
            let lam = LinearForm::lambda(i - 1, n);
            if (e.j) < k[i - 1] {
                &lam - &diff(i, j)
            } else {
                &diff(i, j + 1) - &lam
            }
        })
        .collect();

    // log-linear relations: columns are [partners | variables | q_1..q_n]
    let col_of = |e: &Edge| -> usize {
        if let Some(p) = partners.iter().position(|x| x == e) {
            p
        } else {
            d + variables.iter().position(|x| x == e).expect("edge in chart")
        }
    };
    let mut rows = Vec::new();
    for b in &graph.boxes {
        let mut row = vec![Rational::zero(); 2 * d + n];
        for e in &b.lhs {
            row[col_of(e)] += Rational::one();
        }
        for e in &b.rhs {
            row[col_of(e)] -= Rational::one();
        }
        rows.push(row);
    }
    for r in &graph.roofs {
        let mut row = vec![Rational::zero(); 2 * d + n];
        for e in &r.edges {
            row[col_of(e)] += Rational::one();
        }
        row[2 * d + r.slot - 1] -= Rational::one();
        rows.push(row);
    }
    let reduced = solve_left_block(rows, d).ok_or_else(|| MirrorError::Singular(k.to_vec()))?;
    let mut eliminated = Vec::with_capacity(d);
    for (r, partner) in partners.iter().enumerate() {
        let mut pairs = Vec::new();
        for c in d..2 * d + n {
            let x = -&reduced[r][c];
            if !x.is_integer() {
                return Err(MirrorError::NonIntegral(k.to_vec()));
            }
            let e: i32 = x.to_integer().try_into().map_err(|_| MirrorError::NonIntegral(k.to_vec()))?;
            let sym = if c < 2 * d {
                variables[c - d].symbol()
            } else {
                Symbol::q(c - 2 * d + 1)
            };
            pairs.push((sym, e));
        }
        eliminated.push((*partner, Monomial::from_pairs(pairs)));
    }

    let chart = SigmaChart {
        n,
        k: k.to_vec(),
        variables,
        eliminated,
        exponents,
        rho,
        permutation,
    };
    let jac = chart.jacobian_determinant(graph);
    if jac.abs() != Rational::one() {
        return Err(MirrorError::Jacobian(k.to_vec(), format_rational(&jac)));
    }
    Ok(chart)
}

pub fn all_charts(graph: &MirrorGraph) -> Result<Vec<SigmaChart>, MirrorError> {
    all_k_sequences(graph.n)
        .par_iter()
        .map(|k| make_chart(graph, k))
        .collect()
}

impl SigmaChart {
    pub fn dimension(&self) -> usize {
        self.variables.len()
    }

    pub fn rho(&self, i: usize, j: i64) -> &LinearForm {
        &self.rho[&(i, j)]
    }

    /// Coefficient of ln q_slot in the chart form of the phase: ρ_{1,slot-1}.
    pub fn q_log_coefficient(&self, slot: usize) -> &LinearForm {
        self.rho(1, slot as i64 - 1)
    }

    /// Determinant of d(log w)/dT over the interior vertices.
    pub fn jacobian_determinant(&self, graph: &MirrorGraph) -> Rational {
        let verts = graph.interior_vertices();
        let m: Vec<Vec<Rational>> = self
            .variables
            .iter()
            .map(|e| {
                verts
                    .iter()
                    .map(|v| Rational::from_integer(e.incidence(*v).into()))
                    .collect()
            })
            .collect();
        determinant(&m)
    }

    /// Substitution sending each eliminated edge to its monomial.
    pub fn substitution(&self) -> BTreeMap<Symbol, LaurentPolynomial> {
        self.eliminated
            .iter()
            .map(|(e, m)| (e.symbol(), LaurentPolynomial::term(Rational::one(), m.clone())))
            .collect()
    }

    /// Ambient edge values as monomials in chart variables and q (chart
    /// variables map to themselves).
    pub fn edge_monomials(&self) -> BTreeMap<Edge, Monomial> {
        let mut out: BTreeMap<Edge, Monomial> = self
            .variables
            .iter()
            .map(|e| (*e, Monomial::var(e.symbol())))
            .collect();
        for (e, m) in &self.eliminated {
            out.insert(*e, m.clone());
        }
        out
    }

    /// The phase in chart variables assembled from ρ and σ(i,j):
    /// Σρ_{1,i-1} ln q_i + Σ(w + r + σ(i,j) ln w).
    pub fn phase_in_chart(&self) -> PhaseExpression {
        let mut f = PhaseExpression::new(self.n);
        for slot in 1..=self.n {
            f.add_log(Symbol::q(slot), self.q_log_coefficient(slot));
        }
        for (a, w) in self.variables.iter().enumerate() {
            f.algebraic += LaurentPolynomial::var(w.symbol());
            f.algebraic += LaurentPolynomial::term(Rational::one(), self.eliminated[a].1.clone());
            f.add_log(w.symbol(), &self.exponents[a]);
        }
        f
    }

    /// The ambient phase with eliminated edges substituted and their logs
    /// expanded. Independent of the ρ/σ bookkeeping.
    pub fn substituted_phase(&self, graph: &MirrorGraph) -> Result<PhaseExpression, MirrorError> {
        let ambient = build_phase(graph);
        let sub = self.substitution();
        let mut f = PhaseExpression::new(self.n);
        f.algebraic = ambient.algebraic.substitute(&sub)?;
        let monos = self.edge_monomials();
        for (s, form) in &ambient.logs {
            let edge = Edge::from_symbol(*s).expect("ambient logs are edges");
            for &(t, e) in monos[&edge].iter() {
                f.add_log(t, &form.scale(&Rational::from_integer(e.into())));
            }
        }
        Ok(f)
    }

    /// Every box and roof relation after substitution; all must vanish.
    pub fn relation_residuals(&self, graph: &MirrorGraph) -> Result<Vec<LaurentPolynomial>, MirrorError> {
        let sub = self.substitution();
        let mut out = Vec::new();
        for b in &graph.boxes {
            out.push(b.polynomial().substitute(&sub)?);
        }
        for r in &graph.roofs {
            out.push(r.polynomial().substitute(&sub)?);
        }
        Ok(out)
    }

    /// (minimum q-exponent over all eliminated monomials, minimum total
    /// q-degree).
    pub fn q_degree_bounds(&self) -> (i32, i32) {
        let mut min_exp = i32::MAX;
        let mut min_total = i32::MAX;
        for (_, m) in &self.eliminated {
            let mut total = 0;
            for slot in 1..=self.n {
                let e = m.exponent(Symbol::q(slot));
                min_exp = min_exp.min(e);
                total += e;
            }
            min_total = min_total.min(total);
        }
        (min_exp, min_total)
    }

    pub fn report(&self) -> ChartReport {
        let form = |f: &LinearForm| f.coefficients().iter().map(format_rational).collect();
        ChartReport {
            k: self.k.clone(),
            permutation: self.permutation.clone(),
            rho: self
                .rho
                .iter()
                .map(|((i, j), f)| RhoEntry {
                    i: *i,
                    j: *j,
                    form: form(f),
                })
                .collect(),
            exponents: self
                .variables
                .iter()
                .zip(&self.exponents)
                .map(|(w, f)| ExponentEntry {
                    variable: w.to_string(),
                    form: form(f),
                })
                .collect(),
            eliminated: self
                .eliminated
                .iter()
                .map(|(e, m)| (e.to_string(), m.to_string()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoEntry {
    pub i: usize,
    pub j: i64,
    pub form: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentEntry {
    pub variable: String,
    pub form: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartReport {
    pub k: Vec<usize>,
    pub permutation: Vec<usize>,
    pub rho: Vec<RhoEntry>,
    pub exponents: Vec<ExponentEntry>,
    pub eliminated: Vec<(String, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::mirror::graph::build_graph;

    #[test]
    fn k_sequence_count() {
        assert_eq!(all_k_sequences(1).len(), 2);
        assert_eq!(all_k_sequences(2).len(), 6);
        assert_eq!(all_k_sequences(3).len(), 24);
    }

    #[test]
    fn invalid_k_rejected() {
        let g = build_graph(2).unwrap();
        assert!(make_chart(&g, &[3, 0]).is_err());
        assert!(make_chart(&g, &[1]).is_err());
    }

    #[test]
    fn cp1_chart() {
        let g = build_graph(1).unwrap();
        let c = make_chart(&g, &[1]).unwrap();
        assert_eq!(c.variables, vec![Edge::u(1, 0)]);
        let expect = Monomial::from_pairs([(Symbol::q(1), 1), (Symbol::u(1, 0), -1)]);
        assert_eq!(c.eliminated[0], (Edge::v(1, 0), expect));
        let two_l0 = LinearForm::lambda(0, 1).scale(&rat(2, 1));
        assert_eq!(c.exponents[0].constrained(), two_l0);
        assert_eq!(*c.q_log_coefficient(1), LinearForm::lambda(1, 1));
    }
}
