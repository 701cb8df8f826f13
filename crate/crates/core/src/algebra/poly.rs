//! Sparse multivariate Laurent polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::symbol::Symbol;
use super::{AlgebraError, Rational};

/// Exponent vector stored sparsely as `(symbol, exponent)` pairs sorted by
/// symbol, zero exponents omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (Symbol, i32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<Symbol, i32> = BTreeMap::new();
        for (s, e) in pairs {
            *map.entry(s).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, s: Symbol) -> i32 {
        match self.0.binary_search_by(|(t, _)| t.cmp(&s)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Symbol, i32)> {
        self.0.iter()
    }

    pub fn pow(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(s, e)| (s, e * k)).collect())
    }

    pub fn inverse(&self) -> Monomial {
        self.pow(-1)
    }

    /// The monomial with `s` removed.
    pub fn without(&self, s: Symbol) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(t, _)| t != s).collect())
    }

    /// The monomial with the exponent of `s` replaced by `e`.
    pub fn with_exponent(&self, s: Symbol, e: i32) -> Monomial {
        let mut v = self.without(s).0;
        if e != 0 {
            let pos = v.partition_point(|(t, _)| *t < s);
            v.insert(pos, (s, e));
        }
        Monomial(v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Lexicographic comparison of exponent vectors, variables taken in
    /// increasing symbol order.
    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&(_, eb))) => return 0.cmp(&eb),
                (Some(&(sa, ea)), Some(&(sb, eb))) => match sa.cmp(&sb) {
                    Ordering::Less => return ea.cmp(&0),
                    Ordering::Greater => return 0.cmp(&eb),
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Numeric types a polynomial can be evaluated into.
pub trait Scalar:
    Clone + Add<Output = Self> + Mul<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;
    fn powi(&self, e: i32) -> Self;
    fn scalar_zero() -> Self;
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn powi(&self, e: i32) -> Self {
        f64::powi(*self, e)
    }
    fn scalar_zero() -> Self {
        0.0
    }
}

impl Scalar for Complex64 {
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }
    fn powi(&self, e: i32) -> Self {
        Complex64::powi(self, e)
    }
    fn scalar_zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn powi(&self, e: i32) -> Self {
        num_traits::Pow::pow(self, e)
    }
    fn scalar_zero() -> Self {
        Rational::zero()
    }
}

/// Exact Laurent polynomial. Terms are kept in a map ordered by the
/// graded-lexicographic monomial order; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(s: Symbol) -> Self {
        Self::term(Rational::one(), Monomial::var(s))
    }

    /// `s^e`, negative exponents allowed.
    pub fn var_pow(s: Symbol, e: i32) -> Self {
        Self::term(Rational::one(), Monomial::from_pairs([(s, e)]))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPolynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
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

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The single term, if this polynomial is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(&Rational, &Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (c, m))
        } else {
            None
        }
    }

    pub fn variables(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|&(s, _)| s))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPolynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Integer power; negative powers need a monomial.
    pub fn pow_i32(&self, k: i32) -> Result<Self, AlgebraError> {
        if k >= 0 {
            return Ok(self.pow(k as u32));
        }
        match self.as_monomial() {
            Some((c, m)) => {
                let inv = Rational::one() / c;
                Ok(Self::term(
                    num_traits::Pow::pow(&inv, (-k) as u32),
                    m.pow(k),
                ))
            }
            None => Err(AlgebraError::NotInvertible(self.to_string())),
        }
    }

    /// Formal partial derivative in `s`.
    pub fn derivative(&self, s: Symbol) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            if e != 0 {
                out.add_term(m.with_exponent(s, e - 1), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// `s * d/ds`, which multiplies each term by its exponent in `s`.
    pub fn log_derivative(&self, s: Symbol) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            if e != 0 {
                out.add_term(m.clone(), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    pub fn max_degree_in(&self, s: Symbol) -> Option<i32> {
        self.terms.keys().map(|m| m.exponent(s)).max()
    }

    pub fn min_degree_in(&self, s: Symbol) -> Option<i32> {
        self.terms.keys().map(|m| m.exponent(s)).min()
    }

    /// Coefficient of `s^k`, as a polynomial in the remaining symbols.
    pub fn coefficient_in(&self, s: Symbol, k: i32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(s) == k)
                .map(|(m, c)| (m.without(s), c.clone())),
        )
    }

    /// Simultaneous substitution of symbols by polynomials. A symbol that
    /// appears with a negative exponent must be replaced by a monomial.
    pub fn substitute(&self, map: &BTreeMap<Symbol, LaurentPolynomial>) -> Result<Self, AlgebraError> {
        let mut cache: BTreeMap<(Symbol, i32), LaurentPolynomial> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut acc = Self::constant(c.clone());
            for &(s, e) in m.iter() {
                match map.get(&s) {
                    None => kept.push((s, e)),
                    Some(r) => {
                        let p = match cache.get(&(s, e)) {
                            Some(p) => p.clone(),
                            None => {
                                let p = r.pow_i32(e).map_err(|_| {
                                    AlgebraError::NotInvertible(format!("{s} -> {r}"))
                                })?;
                                cache.insert((s, e), p.clone());
                                p
                            }
                        };
                        acc = &acc * &p;
                    }
                }
            }
            out += acc.mul_monomial(&Monomial::from_pairs(kept));
        }
        Ok(out)
    }

    pub fn substitute_one(&self, s: Symbol, r: &LaurentPolynomial) -> Result<Self, AlgebraError> {
        let mut map = BTreeMap::new();
        map.insert(s, r.clone());
        self.substitute(&map)
    }

    /// Evaluate with every symbol mapped through `value`.
    pub fn eval<T: Scalar>(&self, value: impl Fn(Symbol) -> T) -> T {
        let mut acc = T::scalar_zero();
        for (m, c) in &self.terms {
            let mut t = T::from_rational(c);
            for &(s, e) in m.iter() {
                t = t * value(s).powi(e);
            }
            acc = acc + t;
        }
        acc
    }

    /// Apply a map to every coefficient, dropping zeros.
    pub fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Largest absolute coefficient, zero for the zero polynomial.
    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}/{}", a.numer(), a.denom())?;
            if !m.is_one() {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl From<Rational> for LaurentPolynomial {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<Symbol> for LaurentPolynomial {
    fn from(s: Symbol) -> Self {
        Self::var(s)
    }
}

impl<'a> Add<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        -&self
    }
}

impl AddAssign<&LaurentPolynomial> for LaurentPolynomial {
    fn add_assign(&mut self, rhs: &LaurentPolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&LaurentPolynomial> for LaurentPolynomial {
    fn sub_assign(&mut self, rhs: &LaurentPolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl MulAssign<&LaurentPolynomial> for LaurentPolynomial {
    fn mul_assign(&mut self, rhs: &LaurentPolynomial) {
        *self = &*self * rhs;
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr<LaurentPolynomial> for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&LaurentPolynomial> for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(rhs)
            }
        }
        impl $tr<LaurentPolynomial> for &LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                self.$method(&rhs)
            }
        }
        impl $assign_tr<LaurentPolynomial> for LaurentPolynomial {
            fn $assign(&mut self, rhs: LaurentPolynomial) {
                self.$assign(&rhs);
            }
        }
    };
}

forward_owned!(Add, add, AddAssign, add_assign);
forward_owned!(Sub, sub, SubAssign, sub_assign);
forward_owned!(Mul, mul, MulAssign, mul_assign);

impl Zero for LaurentPolynomial {
    fn zero() -> Self {
        LaurentPolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentPolynomial {
    fn one() -> Self {
        LaurentPolynomial::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn x() -> LaurentPolynomial {
        LaurentPolynomial::var(Symbol::X)
    }
    fn h() -> LaurentPolynomial {
        LaurentPolynomial::var(Symbol::Hbar)
    }

    #[test]
    fn zero_coefficients_vanish() {
        let p = &x() - &x();
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn grlex_order() {
        // total degree first
        let a = Monomial::from_pairs([(Symbol::X, 2)]);
        let b = Monomial::from_pairs([(Symbol::Hbar, 1), (Symbol::X, 1)]);
        let c = Monomial::from_pairs([(Symbol::Hbar, 1)]);
        assert!(c < a);
        // hbar precedes x in the variable order, so hbar*x > x^2
        assert!(a < b);
        assert!(Monomial::from_pairs([(Symbol::X, -1)]) < Monomial::one());
    }

    #[test]
    fn canonical_text() {
        let p = &(&x() * &x()).scale(&rat(3, 2)) - &h() + LaurentPolynomial::int(-2);
        assert_eq!(p.to_string(), "3/2*x^2 - 1/1*hbar - 2/1");
        let q = LaurentPolynomial::var_pow(Symbol::q(1), -2).scale(&rat(-1, 3));
        assert_eq!(q.to_string(), "-1/3*q1^-2");
    }

    #[test]
    fn negative_powers_and_substitution() {
        let u = Symbol::u(1, 0);
        let p = LaurentPolynomial::var(u) + LaurentPolynomial::var_pow(u, -1);
        let r = LaurentPolynomial::var(Symbol::q(1)).scale(&rat(2, 1));
        let s = p.substitute_one(u, &r).unwrap();
        let expect = r.clone() + LaurentPolynomial::var_pow(Symbol::q(1), -1).scale(&rat(1, 2));
        assert_eq!(s, expect);
        let bad = LaurentPolynomial::var(Symbol::q(1)) + LaurentPolynomial::one();
        assert!(p.substitute_one(u, &bad).is_err());
    }

    #[test]
    fn derivative_and_coefficients() {
        let p = (&x() * &x()) * h() + x().scale(&rat(5, 1));
        assert_eq!(p.derivative(Symbol::X), (&x() * &h()).scale(&rat(2, 1)) + LaurentPolynomial::int(5));
        assert_eq!(p.coefficient_in(Symbol::X, 2), h());
        assert_eq!(p.log_derivative(Symbol::Hbar), &(&x() * &x()) * &h());
    }

    #[test]
    fn evaluation() {
        let p = x().pow(3) - LaurentPolynomial::var_pow(Symbol::X, -1);
        let v: f64 = p.eval(|_| 2.0);
        assert!((v - 7.5).abs() < 1e-15);
        let r: Rational = p.eval(|_| rat(1, 2));
        assert_eq!(r, rat(1, 8) - rat(2, 1));
    }
}
