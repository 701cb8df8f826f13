//! Quadratic differential operators in the Fock coordinates q_m^α and the
//! normal-ordered Weyl algebra used to compose them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::{Serialize, Serializer};

use crate::algebra::{binomial, format_rational, LaurentPolynomial, Monomial, Rational, Symbol};

/// (m, α): the coordinate q_m^α.
pub type FockIndex = (u16, u16);

pub fn fock_symbol(i: FockIndex) -> Symbol {
    Symbol::Fock(i.0, i.1)
}

type Block = BTreeMap<(FockIndex, FockIndex), Rational>;

fn add_entry(block: &mut Block, key: (FockIndex, FockIndex), c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = block.entry(key).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        block.remove(&key);
    }
}

fn ordered(i: FockIndex, j: FockIndex) -> (FockIndex, FockIndex) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// c + Σ a_{ij} ε∂_i∂_j + Σ b_{ij} q_i∂_j + Σ c_{ij} q_iq_j/ε.
///
/// The ∂∂ and qq blocks are keyed by ordered pairs i ≤ j and hold monomial
/// coefficients, so q_0²/2ε is stored as ((0,0),(0,0)) ↦ 1/2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuadraticOperator {
    pub constant: Rational,
    pub dd: Block,
    pub qd: Block,
    pub qq: Block,
}

impl QuadraticOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.dd.is_empty() && self.qd.is_empty() && self.qq.is_empty()
    }

    pub fn add_dd(&mut self, i: FockIndex, j: FockIndex, c: Rational) {
        add_entry(&mut self.dd, ordered(i, j), c);
    }

    /// Adds c·q_i∂_j.
    pub fn add_qd(&mut self, i: FockIndex, j: FockIndex, c: Rational) {
        add_entry(&mut self.qd, (i, j), c);
    }

    pub fn add_qq(&mut self, i: FockIndex, j: FockIndex, c: Rational) {
        add_entry(&mut self.qq, ordered(i, j), c);
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let s = |b: &Block| -> Block {
            if c.is_zero() {
                Block::new()
            } else {
                b.iter().map(|(k, v)| (*k, v * c)).collect()
            }
        };
        QuadraticOperator {
            constant: &self.constant * c,
            dd: s(&self.dd),
            qd: s(&self.qd),
            qq: s(&self.qq),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (k, v) in &other.dd {
            add_entry(&mut out.dd, *k, v.clone());
        }
        for (k, v) in &other.qd {
            add_entry(&mut out.qd, *k, v.clone());
        }
        for (k, v) in &other.qq {
            add_entry(&mut out.qq, *k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Largest m among the q_m^α the operator involves.
    pub fn max_level(&self) -> Option<u16> {
        self.dd
            .keys()
            .chain(self.qd.keys())
            .chain(self.qq.keys())
            .flat_map(|(i, j)| [i.0, j.0])
            .max()
    }

    pub fn term_count(&self) -> usize {
        self.dd.len() + self.qd.len() + self.qq.len() + usize::from(!self.constant.is_zero())
    }

    /// Applies the operator to a polynomial in the q_m^α and ε.
    pub fn apply(&self, poly: &LaurentPolynomial) -> LaurentPolynomial {
        let eps = Monomial::var(Symbol::Epsilon);
        let mut out = poly.scale(&self.constant);
        for (&(i, j), c) in &self.dd {
            let d = poly.derivative(fock_symbol(i)).derivative(fock_symbol(j));
            if !d.is_zero() {
                out += d.mul_monomial(&eps).scale(c);
            }
        }
        for (&(i, j), c) in &self.qd {
            let d = poly.derivative(fock_symbol(j));
            if !d.is_zero() {
                out += d.mul_monomial(&Monomial::var(fock_symbol(i))).scale(c);
            }
        }
        let inv_eps = eps.inverse();
        for (&(i, j), c) in &self.qq {
            let m = Monomial::var(fock_symbol(i)).mul(&Monomial::var(fock_symbol(j))).mul(&inv_eps);
            out += poly.mul_monomial(&m).scale(c);
        }
        out
    }

    pub fn to_weyl(&self) -> WeylElement {
        let mut w = WeylElement::scalar(self.constant.clone());
        for (&(i, j), c) in &self.dd {
            w.add_term(WeylKey::new(1, &[], &[i, j]), c.clone());
        }
        for (&(i, j), c) in &self.qd {
            w.add_term(WeylKey::new(0, &[i], &[j]), c.clone());
        }
        for (&(i, j), c) in &self.qq {
            w.add_term(WeylKey::new(-1, &[i, j], &[]), c.clone());
        }
        w
    }

    /// The inverse of [`to_weyl`](Self::to_weyl) on elements of that shape.
    pub fn from_weyl(w: &WeylElement) -> Option<Self> {
        let mut op = QuadraticOperator::zero();
        for (key, c) in &w.terms {
            let q = key.q_indices();
            let d = key.d_indices();
            match (key.eps, q.as_slice(), d.as_slice()) {
                (0, [], []) => op.constant += c,
                (1, [], [i, j]) => op.add_dd(*i, *j, c.clone()),
                (0, [i], [j]) => op.add_qd(*i, *j, c.clone()),
                (-1, [i, j], []) => op.add_qq(*i, *j, c.clone()),
                _ => return None,
            }
        }
        Some(op)
    }

    /// [A, B] = AB - BA, normal ordered.
    pub fn commutator(&self, other: &Self) -> WeylElement {
        let a = self.to_weyl();
        let b = other.to_weyl();
        a.mul(&b).sub(&b.mul(&a))
    }
}

fn fmt_index(i: FockIndex) -> String {
    format!("{}^{}", i.0, i.1)
}

impl fmt::Display for QuadraticOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(self.constant.to_string());
        }
        for (&(i, j), c) in &self.dd {
            parts.push(format!("{c}·ε∂_{}∂_{}", fmt_index(i), fmt_index(j)));
        }
        for (&(i, j), c) in &self.qd {
            parts.push(format!("{c}·q_{}∂_{}", fmt_index(i), fmt_index(j)));
        }
        for (&(i, j), c) in &self.qq {
            parts.push(format!("{c}·q_{}q_{}/ε", fmt_index(i), fmt_index(j)));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(serde::Serialize)]
struct BlockEntry {
    i: FockIndex,
    j: FockIndex,
    coefficient: String,
}

#[derive(serde::Serialize)]
struct OperatorData {
    constant: String,
    dd: Vec<BlockEntry>,
    qd: Vec<BlockEntry>,
    qq: Vec<BlockEntry>,
}

impl Serialize for QuadraticOperator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let block = |b: &Block| {
            b.iter()
                .map(|(&(i, j), c)| BlockEntry {
                    i,
                    j,
                    coefficient: format_rational(c),
                })
                .collect()
        };
        OperatorData {
            constant: format_rational(&self.constant),
            dd: block(&self.dd),
            qd: block(&self.qd),
            qq: block(&self.qq),
        }
        .serialize(s)
    }
}

type Exponents = BTreeMap<FockIndex, u32>;

/// ε^eps q^q ∂^d with every q to the left of every ∂.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WeylKey {
    eps: i32,
    q: Exponents,
    d: Exponents,
}

impl WeylKey {
    fn new(eps: i32, q: &[FockIndex], d: &[FockIndex]) -> Self {
        let mut qe = Exponents::new();
        for i in q {
            *qe.entry(*i).or_default() += 1;
        }
        let mut de = Exponents::new();
        for i in d {
            *de.entry(*i).or_default() += 1;
        }
        WeylKey { eps, q: qe, d: de }
    }

    fn q_indices(&self) -> Vec<FockIndex> {
        self.q.iter().flat_map(|(i, e)| std::iter::repeat_n(*i, *e as usize)).collect()
    }

    fn d_indices(&self) -> Vec<FockIndex> {
        self.d.iter().flat_map(|(i, e)| std::iter::repeat_n(*i, *e as usize)).collect()
    }
}

/// Element of the Weyl algebra over ℚ[ε, ε^{-1}] in normal-ordered form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeylElement {
    terms: BTreeMap<WeylKey, Rational>,
}

fn falling(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

impl WeylElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: Rational) -> Self {
        let mut w = Self::zero();
        w.add_term(WeylKey::new(0, &[], &[]), c);
        w
    }

    fn add_term(&mut self, key: WeylKey, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the identity.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&WeylKey::new(0, &[], &[]))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Normal-ordered product using ∂^b q^c = Σ_k C(b,k) c!/(c-k)! q^{c-k} ∂^{b-k}.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let shared: Vec<(FockIndex, u32, u32)> = k1
                    .d
                    .iter()
                    .filter_map(|(i, b)| k2.q.get(i).map(|c| (*i, *b, *c)))
                    .collect();
                let mut ks = vec![0u32; shared.len()];
                loop {
                    let mut coef = Rational::from_integer(BigInt::one());
                    let mut q = k1.q.clone();
                    let mut d = k2.d.clone();
                    for (i, e) in &k2.q {
                        *q.entry(*i).or_default() += e;
                    }
                    for (i, e) in &k1.d {
                        *d.entry(*i).or_default() += e;
                    }
                    for ((i, b, c), &k) in shared.iter().zip(&ks) {
                        coef *= Rational::from_integer(binomial(*b as u64, k as u64) * falling(*c, k));
                        for map in [&mut q, &mut d] {
                            let e = map.get_mut(i).expect("shared index present");
                            *e -= k;
                            if *e == 0 {
                                map.remove(i);
                            }
                        }
                    }
                    out.add_term(
                        WeylKey {
                            eps: k1.eps + k2.eps,
                            q,
                            d,
                        },
                        coef * c1 * c2,
                    );
                    // Next multi-index k ≤ min(b, c).
                    let mut pos = 0;
                    loop {
                        if pos == ks.len() {
                            break;
                        }
                        let (_, b, c) = shared[pos];
                        if ks[pos] < b.min(c) {
                            ks[pos] += 1;
                            break;
                        }
                        ks[pos] = 0;
                        pos += 1;
                    }
                    if pos == ks.len() {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, poly: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (key, c) in &self.terms {
            let mut p = poly.clone();
            for (i, e) in &key.d {
                for _ in 0..*e {
                    p = p.derivative(fock_symbol(*i));
                }
            }
            if p.is_zero() {
                continue;
            }
            let m = Monomial::from_pairs(
                key.q
                    .iter()
                    .map(|(i, e)| (fock_symbol(*i), *e as i32))
                    .chain(std::iter::once((Symbol::Epsilon, key.eps))),
            );
            out += p.mul_monomial(&m).scale(c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    const Q0: FockIndex = (0, 0);
    const Q1: FockIndex = (1, 0);

    fn q(i: FockIndex) -> LaurentPolynomial {
        LaurentPolynomial::var(fock_symbol(i))
    }

    #[test]
    fn canonical_commutation() {
        let mut d = QuadraticOperator::zero();
        d.add_qd(Q1, Q0, rat(1, 1));
        let mut x = QuadraticOperator::zero();
        x.add_qq(Q0, Q0, rat(1, 2));
        // [q_1∂_0, q_0²/2ε] = q_0q_1/ε.
        let c = QuadraticOperator::from_weyl(&d.commutator(&x)).unwrap();
        let mut expected = QuadraticOperator::zero();
        expected.add_qq(Q0, Q1, rat(1, 1));
        assert_eq!(c, expected);
    }

    #[test]
    fn second_order_contraction() {
        // [ε∂_0²/8, q_0²/2ε] = q_0∂_0/4 + 1/8.
        let mut a = QuadraticOperator::zero();
        a.add_dd(Q0, Q0, rat(1, 8));
        let mut b = QuadraticOperator::zero();
        b.add_qq(Q0, Q0, rat(1, 2));
        let c = QuadraticOperator::from_weyl(&a.commutator(&b)).unwrap();
        assert_eq!(c.constant, rat(1, 8));
        assert_eq!(c.qd.get(&(Q0, Q0)), Some(&rat(1, 4)));
        assert_eq!(c.term_count(), 2);
    }

    #[test]
    fn weyl_apply_matches_composition() {
        let mut a = QuadraticOperator::zero();
        a.add_dd(Q0, Q1, rat(3, 4));
        a.add_qd(Q1, Q0, rat(-2, 1));
        let mut b = QuadraticOperator::zero();
        b.add_qq(Q0, Q1, rat(1, 3));
        b.add_qd(Q0, Q1, rat(5, 1));
        b.constant = rat(1, 7);
        let p = &(&q(Q0) * &q(Q0)) * &q(Q1) + q(Q1);
        let direct = a.apply(&b.apply(&p));
        let weyl = a.to_weyl().mul(&b.to_weyl()).apply(&p);
        assert_eq!(direct, weyl);
    }

    #[test]
    fn quadratic_round_trip() {
        let mut a = QuadraticOperator::zero();
        a.add_dd(Q1, Q0, rat(1, 2));
        a.add_qq(Q0, Q0, rat(-1, 2));
        a.add_qd(Q0, Q0, rat(3, 2));
        assert_eq!(QuadraticOperator::from_weyl(&a.to_weyl()), Some(a.clone()));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.max_level(), Some(1));
    }
}
