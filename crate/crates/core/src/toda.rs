//! Quantum Toda operators as normal-ordered differential operators in
//! t_0..t_n, with coefficients in q_i = e^{t_i - t_{i-1}}, λ and ħ.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::matrix::determinant;
use crate::algebra::{binomial, rat, LaurentPolynomial, Monomial, Rational, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TodaError {
    #[error("lattice size must be at least 1, got {0}")]
    InvalidSize(usize),
    #[error("operators act on different lattices ({0} vs {1})")]
    SizeMismatch(usize, usize),
}

/// `Σ c_κ ∘ ∏ (ħ ∂/∂t_i)^{κ_i}`, coefficients on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialOperator {
    n: usize,
    terms: BTreeMap<Vec<u32>, LaurentPolynomial>,
}

/// ∂/∂t_i of a coefficient. Only the q symbols depend on t: q_j carries
/// +1 in t_j and -1 in t_{j-1}.
fn dt(c: &LaurentPolynomial, i: usize) -> LaurentPolynomial {
    let mut out = LaurentPolynomial::zero();
    for (m, a) in c.terms() {
        let up = m.exponent(Symbol::q(i));
        let down = m.exponent(Symbol::q(i + 1));
        let w = up - down;
        if w != 0 {
            out.add_term(m.clone(), a * Rational::from_integer(w.into()));
        }
    }
    out
}

impl DifferentialOperator {
    pub fn zero(n: usize) -> Self {
        DifferentialOperator {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::multiplication(n, LaurentPolynomial::one())
    }

    pub fn multiplication(n: usize, c: LaurentPolynomial) -> Self {
        let mut op = Self::zero(n);
        op.add_term(vec![0; n + 1], c);
        op
    }

    /// ħ ∂/∂t_i.
    pub fn momentum(n: usize, i: usize) -> Self {
        let mut k = vec![0; n + 1];
        k[i] = 1;
        let mut op = Self::zero(n);
        op.add_term(k, LaurentPolynomial::one());
        op
    }

    pub fn add_term(&mut self, kappa: Vec<u32>, c: LaurentPolynomial) {
        assert_eq!(kappa.len(), self.n + 1);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(kappa.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&kappa);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &LaurentPolynomial)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, kappa: &[u32]) -> LaurentPolynomial {
        self.terms.get(kappa).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.scale(r));
        }
        out
    }

    /// Normal-ordered product `self ∘ other`, using
    /// `P^α ∘ b = Σ_γ C(α,γ) ħ^{|γ|} (∂^γ b) P^{α-γ}`.
    pub fn compose(&self, other: &Self) -> Result<Self, TodaError> {
        if self.n != other.n {
            return Err(TodaError::SizeMismatch(self.n, other.n));
        }
        let mut out = Self::zero(self.n);
        let hbar = LaurentPolynomial::var(Symbol::Hbar);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                for (gamma, weight) in sub_multi_indices(ka) {
                    let mut d = cb.clone();
                    for (i, &g) in gamma.iter().enumerate() {
                        for _ in 0..g {
                            d = dt(&d, i);
                        }
                    }
                    if d.is_zero() {
                        continue;
                    }
                    let order: u32 = gamma.iter().sum();
                    let coeff = (ca * &d) * hbar.pow(order);
                    let coeff = coeff.scale(&Rational::from_integer(weight));
                    let kappa: Vec<u32> = ka
                        .iter()
                        .zip(&gamma)
                        .zip(kb)
                        .map(|((a, g), b)| a - g + b)
                        .collect();
                    out.add_term(kappa, coeff);
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, TodaError> {
        Ok(self.compose(other)?.sub(&other.compose(self)?))
    }

    /// The commutative symbol: P^κ replaced by ∏ p_i^{κ_i}.
    pub fn symbol(&self) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (k, c) in &self.terms {
            let m = Monomial::from_pairs(
                k.iter()
                    .enumerate()
                    .map(|(i, &e)| (Symbol::p(i), e as i32)),
            );
            out += c.mul_monomial(&m);
        }
        out
    }
}

/// All γ ≤ α componentwise with the multinomial weight ∏ C(α_i, γ_i).
fn sub_multi_indices(alpha: &[u32]) -> Vec<(Vec<u32>, num_bigint::BigInt)> {
    let mut out = vec![(Vec::new(), num_bigint::BigInt::from(1))];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
        for (g, w) in &out {
            for k in 0..=a {
                let mut g2 = g.clone();
                g2.push(k);
                next.push((g2, w * binomial(a as u64, k as u64)));
            }
        }
        out = next;
    }
    out
}

impl fmt::Display for DifferentialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, &e) in k.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*d{i}")?,
                    _ => write!(f, "*d{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<(), TodaError> {
    if n == 0 {
        Err(TodaError::InvalidSize(n))
    } else {
        Ok(())
    }
}

/// The (n+1)×(n+1) Toda matrix in commuting symbols: p_i on the diagonal,
/// q_{i+1} above it, -1 below it.
pub fn build_toda_matrix(n: usize) -> Result<Vec<Vec<LaurentPolynomial>>, TodaError> {
    check_size(n)?;
    let mut a = vec![vec![LaurentPolynomial::zero(); n + 1]; n + 1];
    for i in 0..=n {
        a[i][i] = LaurentPolynomial::var(Symbol::p(i));
        if i < n {
            a[i][i + 1] = LaurentPolynomial::var(Symbol::q(i + 1));
            a[i + 1][i] = LaurentPolynomial::int(-1);
        }
    }
    Ok(a)
}

/// det(A + xI) as a polynomial in x, p, q.
pub fn characteristic_polynomial(n: usize) -> Result<LaurentPolynomial, TodaError> {
    let mut a = build_toda_matrix(n)?;
    let x = LaurentPolynomial::var(Symbol::X);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += &x;
    }
    Ok(determinant(&a))
}

/// The commutative polynomials D_1(p,q), ..., D_{n+1}(p,q).
pub fn toda_polynomials(n: usize) -> Result<Vec<LaurentPolynomial>, TodaError> {
    let det = characteristic_polynomial(n)?;
    Ok((1..=n + 1)
        .map(|i| det.coefficient_in(Symbol::X, (n + 1 - i) as i32))
        .collect())
}

/// Replaces p_i by ħ∂/∂t_i with all coefficients on the left.
pub fn quantize_symbol(n: usize, poly: &LaurentPolynomial) -> DifferentialOperator {
    let mut op = DifferentialOperator::zero(n);
    for (m, c) in poly.terms() {
        let mut kappa = vec![0u32; n + 1];
        let mut rest = Vec::new();
        for &(s, e) in m.iter() {
            match s {
                Symbol::P(i) if (i as usize) <= n && e > 0 => kappa[i as usize] = e as u32,
                _ => rest.push((s, e)),
            }
        }
        op.add_term(kappa, LaurentPolynomial::term(c.clone(), Monomial::from_pairs(rest)));
    }
    op
}

pub fn toda_operators(n: usize) -> Result<Vec<DifferentialOperator>, TodaError> {
    Ok(toda_polynomials(n)?
        .iter()
        .map(|p| quantize_symbol(n, p))
        .collect())
}

/// H = ½ Σ (ħ∂_i)² - Σ q_i.
pub fn build_hamiltonian(n: usize) -> Result<DifferentialOperator, TodaError> {
    check_size(n)?;
    let mut h = DifferentialOperator::zero(n);
    for i in 0..=n {
        let mut k = vec![0; n + 1];
        k[i] = 2;
        h.add_term(k, LaurentPolynomial::constant(rat(1, 2)));
    }
    let mut pot = LaurentPolynomial::zero();
    for i in 1..=n {
        pot -= LaurentPolynomial::var(Symbol::q(i));
    }
    h.add_term(vec![0; n + 1], pot);
    Ok(h)
}

/// Pairs (i, j) of operator indices whose commutator failed to vanish.
pub fn nonvanishing_commutators(n: usize) -> Result<Vec<(String, String, usize)>, TodaError> {
    let d = toda_operators(n)?;
    let h = build_hamiltonian(n)?;
    let mut bad = Vec::new();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let c = d[i].commutator(&d[j])?;
            if !c.is_zero() {
                bad.push((format!("D{}", i + 1), format!("D{}", j + 1), c.len()));
            }
        }
        let c = h.commutator(&d[i])?;
        if !c.is_zero() {
            bad.push(("H".into(), format!("D{}", i + 1), c.len()));
        }
    }
    Ok(bad)
}

/// Continuant recurrence for det(A + xI): f_k = (p_k + x) f_{k-1} + q_k f_{k-2}.
pub fn continuant(n: usize) -> LaurentPolynomial {
    let x = LaurentPolynomial::var(Symbol::X);
    let mut prev2 = LaurentPolynomial::one();
    let mut prev = &LaurentPolynomial::var(Symbol::p(0)) + &x;
    for k in 1..=n {
        let next = &(&LaurentPolynomial::var(Symbol::p(k)) + &x) * &prev
            + &LaurentPolynomial::var(Symbol::q(k)) * &prev2;
        prev2 = prev;
        prev = next;
    }
    prev
}

pub fn is_lambda_free(op: &DifferentialOperator) -> bool {
    op.terms()
        .all(|(_, c)| c.variables().iter().all(|s| !matches!(s, Symbol::Lambda(_))))
}
