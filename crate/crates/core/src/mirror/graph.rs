//! The triangular mirror graph with its relations, weights and phase.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{rat, LaurentPolynomial, LinearForm, Rational, Symbol};

use super::MirrorError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    U,
    V,
}

/// An edge of the graph. `U(i,j)` runs from (i-1,j) to (i,j); `V(i,j)` from
/// (i,j) to (i-1,j+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub kind: EdgeKind,
    pub i: usize,
    pub j: usize,
}

impl Edge {
    pub fn u(i: usize, j: usize) -> Self {
        Edge { kind: EdgeKind::U, i, j }
    }

    pub fn v(i: usize, j: usize) -> Self {
        Edge { kind: EdgeKind::V, i, j }
    }

    pub fn symbol(&self) -> Symbol {
        match self.kind {
            EdgeKind::U => Symbol::u(self.i, self.j),
            EdgeKind::V => Symbol::v(self.i, self.j),
        }
    }

    pub fn from_symbol(s: Symbol) -> Option<Edge> {
        match s {
            Symbol::U(i, j) => Some(Edge::u(i as usize, j as usize)),
            Symbol::V(i, j) => Some(Edge::v(i as usize, j as usize)),
            _ => None,
        }
    }

    /// (tail, head) vertices.
    pub fn endpoints(&self) -> ((usize, usize), (usize, usize)) {
        match self.kind {
            EdgeKind::U => ((self.i - 1, self.j), (self.i, self.j)),
            EdgeKind::V => ((self.i, self.j), (self.i - 1, self.j + 1)),
        }
    }

    /// The edge variable is e^{T_head - T_tail}: +1 at the head, -1 at the
    /// tail, 0 elsewhere.
    pub fn incidence(&self, vertex: (usize, usize)) -> i32 {
        let (tail, head) = self.endpoints();
        if vertex == head {
            1
        } else if vertex == tail {
            -1
        } else {
            0
        }
    }

    /// The other edge variable attached to the same index pair.
    pub fn partner(&self) -> Edge {
        match self.kind {
            EdgeKind::U => Edge::v(self.i, self.j),
            EdgeKind::V => Edge::u(self.i, self.j),
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// `v_{i,j} u_{i,j+1} = u_{i+1,j} v_{i+1,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxRelation {
    pub lhs: [Edge; 2],
    pub rhs: [Edge; 2],
}

/// `u_{1,slot-1} v_{1,slot-1} = q_slot`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoofRelation {
    pub slot: usize,
    pub edges: [Edge; 2],
}

impl BoxRelation {
    pub fn polynomial(&self) -> LaurentPolynomial {
        let prod = |e: &[Edge; 2]| {
            &LaurentPolynomial::var(e[0].symbol()) * &LaurentPolynomial::var(e[1].symbol())
        };
        &prod(&self.lhs) - &prod(&self.rhs)
    }
}

impl RoofRelation {
    pub fn polynomial(&self) -> LaurentPolynomial {
        &(&LaurentPolynomial::var(self.edges[0].symbol())
            * &LaurentPolynomial::var(self.edges[1].symbol()))
            - &LaurentPolynomial::var(Symbol::q(self.slot))
    }
}

#[derive(Clone, Debug)]
pub struct MirrorGraph {
    pub n: usize,
    pub vertices: Vec<(usize, usize)>,
    pub edges: Vec<Edge>,
    pub boxes: Vec<BoxRelation>,
    pub roofs: Vec<RoofRelation>,
    pub weights: BTreeMap<Edge, LinearForm>,
}

impl MirrorGraph {
    /// Dimension of the torus cut out by the relations.
    pub fn dimension(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Vertices off the top row, whose coordinates are integrated over.
    pub fn interior_vertices(&self) -> Vec<(usize, usize)> {
        self.vertices.iter().copied().filter(|v| v.0 >= 1).collect()
    }

    pub fn weight(&self, e: &Edge) -> &LinearForm {
        &self.weights[e]
    }
}

pub fn build_graph(n: usize) -> Result<MirrorGraph, MirrorError> {
    if n == 0 {
        return Err(MirrorError::InvalidSize(n));
    }
    let mut vertices = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            vertices.push((i, j));
        }
    }
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in 0..=n - i {
            edges.push(Edge::u(i, j));
            edges.push(Edge::v(i, j));
        }
    }
    let mut boxes = Vec::new();
    for i in 1..n {
        for j in 0..n - i {
            boxes.push(BoxRelation {
                lhs: [Edge::v(i, j), Edge::u(i, j + 1)],
                rhs: [Edge::u(i + 1, j), Edge::v(i + 1, j)],
            });
        }
    }
    let roofs = (1..=n)
        .map(|slot| RoofRelation {
            slot,
            edges: [Edge::u(1, slot - 1), Edge::v(1, slot - 1)],
        })
        .collect();
    Ok(MirrorGraph {
        n,
        vertices,
        edges,
        boxes,
        roofs,
        weights: assign_weights(n)?,
    })
}

/// Equivariant weights: the outer edges u_{i,0} and v_{i,n-i} carry
/// ±(λ_{i-1} + ½Σ_{j<i-1}λ_j), interior edges carry ±½λ_{i-1}.
pub fn assign_weights(n: usize) -> Result<BTreeMap<Edge, LinearForm>, MirrorError> {
    if n == 0 {
        return Err(MirrorError::InvalidSize(n));
    }
    let half = rat(1, 2);
    let mut w = BTreeMap::new();
    for i in 1..=n {
        let lam = LinearForm::lambda(i - 1, n);
        let outer = if i >= 2 {
            &lam + &LinearForm::range_sum(0, i - 2, n).scale(&half)
        } else {
            lam.clone()
        };
        for j in 0..=n - i {
            let u = if j == 0 { outer.clone() } else { lam.scale(&half) };
            let v = if j == n - i {
                -&outer
            } else {
                lam.scale(&rat(-1, 2))
            };
            w.insert(Edge::u(i, j), u);
            w.insert(Edge::v(i, j), v);
        }
    }
    Ok(w)
}

/// `algebraic + Σ_s logs[s]·ln(s)`, each log coefficient a λ-linear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseExpression {
    pub n: usize,
    pub algebraic: LaurentPolynomial,
    pub logs: BTreeMap<Symbol, LinearForm>,
}

impl PhaseExpression {
    pub fn new(n: usize) -> Self {
        PhaseExpression {
            n,
            algebraic: LaurentPolynomial::zero(),
            logs: BTreeMap::new(),
        }
    }

    pub fn add_log(&mut self, s: Symbol, f: &LinearForm) {
        let slot = self
            .logs
            .entry(s)
            .or_insert_with(|| LinearForm::zero(self.n));
        *slot = &*slot + f;
        if slot.is_zero() {
            self.logs.remove(&s);
        }
    }

    pub fn log_coefficient(&self, s: Symbol) -> LinearForm {
        self.logs
            .get(&s)
            .cloned()
            .unwrap_or_else(|| LinearForm::zero(self.n))
    }

    /// Applies λ_n = -Σ_{j<n} λ_j to every log coefficient.
    pub fn constrained(&self) -> Self {
        let mut out = Self::new(self.n);
        out.algebraic = self.algebraic.clone();
        for (s, f) in &self.logs {
            out.add_log(*s, &f.constrained());
        }
        out
    }

    /// Numeric value. `log_of` supplies the branch of ln for each symbol.
    pub fn eval(
        &self,
        lambda: &[f64],
        value: impl Fn(Symbol) -> Complex64,
        log_of: impl Fn(Symbol) -> Complex64,
    ) -> Complex64 {
        let mut acc: Complex64 = self.algebraic.eval(&value);
        for (s, f) in &self.logs {
            acc += f.eval(lambda) * log_of(*s);
        }
        acc
    }

    /// Derivative along a vertex coordinate T_v in the ambient torus, where
    /// every edge symbol is e^{T_head - T_tail}. Returns the Laurent part and
    /// the λ-part separately.
    pub fn vertex_derivative(&self, vertex: (usize, usize)) -> (LaurentPolynomial, LinearForm) {
        let mut alg = LaurentPolynomial::zero();
        for (m, c) in self.algebraic.terms() {
            let mut w = 0;
            for &(s, e) in m.iter() {
                if let Some(edge) = Edge::from_symbol(s) {
                    w += e * edge.incidence(vertex);
                }
            }
            if w != 0 {
                alg.add_term(m.clone(), c * Rational::from_integer(w.into()));
            }
        }
        let mut lin = LinearForm::zero(self.n);
        for (s, f) in &self.logs {
            if let Some(edge) = Edge::from_symbol(*s) {
                let inc = edge.incidence(vertex);
                if inc != 0 {
                    lin = &lin + &f.scale(&Rational::from_integer(inc.into()));
                }
            }
        }
        (alg, lin)
    }
}

/// f_q = Σ (u + v) + Σ weight(e) ln e in edge variables.
pub fn build_phase(graph: &MirrorGraph) -> PhaseExpression {
    let mut f = PhaseExpression::new(graph.n);
    for e in &graph.edges {
        f.algebraic += LaurentPolynomial::var(e.symbol());
        f.add_log(e.symbol(), graph.weight(e));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for (n, verts, edges, boxes) in [(1, 3, 2, 0), (2, 6, 6, 1), (3, 10, 12, 3)] {
            let g = build_graph(n).unwrap();
            assert_eq!(g.vertices.len(), verts);
            assert_eq!(g.edges.len(), edges);
            assert_eq!(g.boxes.len(), boxes);
            assert_eq!(g.roofs.len(), n);
            assert_eq!(g.dimension(), n * (n + 1) / 2);
            assert_eq!(g.interior_vertices().len(), g.dimension());
        }
        let g = build_graph(2).unwrap();
        assert_eq!(
            g.boxes[0],
            BoxRelation {
                lhs: [Edge::v(1, 0), Edge::u(1, 1)],
                rhs: [Edge::u(2, 0), Edge::v(2, 0)]
            }
        );
    }

    #[test]
    fn weights_n2() {
        let w = assign_weights(2).unwrap();
        let l = |i| LinearForm::lambda(i, 2);
        let h = rat(1, 2);
        assert_eq!(w[&Edge::u(1, 0)], l(0));
        assert_eq!(w[&Edge::u(2, 0)], &l(1) + &l(0).scale(&h));
        assert_eq!(w[&Edge::v(2, 0)], -&(&l(1) + &l(0).scale(&h)));
        assert_eq!(w[&Edge::v(1, 1)], -&l(0));
        assert_eq!(w[&Edge::u(1, 1)], l(0).scale(&h));
        assert_eq!(w[&Edge::v(1, 0)], l(0).scale(&rat(-1, 2)));
    }

    #[test]
    fn vertex_derivative_matches_incidence_formula() {
        let g = build_graph(3).unwrap();
        let f = build_phase(&g);
        let (alg, _) = f.vertex_derivative((1, 1));
        let s = |e: Edge| LaurentPolynomial::var(e.symbol());
        let expect = s(Edge::u(1, 1)) - s(Edge::v(1, 1)) + s(Edge::v(2, 0)) - s(Edge::u(2, 1));
        assert_eq!(alg, expect);
        let (top, _) = f.vertex_derivative((0, 2));
        assert_eq!(top, s(Edge::v(1, 1)) - s(Edge::u(1, 2)));
    }
}
