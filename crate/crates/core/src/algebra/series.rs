//! Truncated Laurent series in ħ with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::poly::LaurentPolynomial;
use super::{AlgebraError, Rational};

/// `Σ_k c_k ħ^k`, exact for every exponent `k <= order`; nothing is known
/// about higher powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HbarSeries {
    coeffs: BTreeMap<i32, LaurentPolynomial>,
    order: i32,
}

impl HbarSeries {
    pub fn zero(order: i32) -> Self {
        HbarSeries {
            coeffs: BTreeMap::new(),
            order,
        }
    }

    pub fn one(order: i32) -> Self {
        Self::monomial(LaurentPolynomial::one(), 0, order)
    }

    pub fn monomial(c: LaurentPolynomial, k: i32, order: i32) -> Self {
        let mut s = Self::zero(order);
        s.add_coefficient(k, c);
        s
    }

    pub fn from_coefficients<I: IntoIterator<Item = (i32, LaurentPolynomial)>>(it: I, order: i32) -> Self {
        let mut s = Self::zero(order);
        for (k, c) in it {
            s.add_coefficient(k, c);
        }
        s
    }

    fn add_coefficient(&mut self, k: i32, c: LaurentPolynomial) {
        if k > self.order || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn coefficient(&self, k: i32) -> LaurentPolynomial {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (i32, &LaurentPolynomial)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Lowest exponent with a nonzero coefficient, `order + 1` if none.
    pub fn valuation(&self) -> i32 {
        self.coeffs.keys().next().copied().unwrap_or(self.order + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        Self::from_coefficients(
            self.coeffs
                .iter()
                .filter(|(k, _)| **k <= order)
                .map(|(k, c)| (*k, c.clone())),
            order,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut s = self.truncate(order);
        for (k, c) in &other.coeffs {
            s.add_coefficient(*k, c.clone());
        }
        s
    }

    pub fn neg(&self) -> Self {
        Self::from_coefficients(self.coeffs.iter().map(|(k, c)| (*k, -c)), self.order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coefficients(self.coeffs.iter().map(|(k, p)| (*k, p.scale(c))), self.order)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.valuation() + other.order).min(other.valuation() + self.order);
        let mut s = Self::zero(order);
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                if ka + kb <= order {
                    s.add_coefficient(ka + kb, ca * cb);
                }
            }
        }
        s
    }

    /// `b(ħ) -> b(-ħ)`.
    pub fn reflect(&self) -> Self {
        Self::from_coefficients(
            self.coeffs
                .iter()
                .map(|(k, c)| (*k, if k % 2 == 0 { c.clone() } else { -c })),
            self.order,
        )
    }

    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if self.valuation() < 1 {
            return Err(AlgebraError::Valuation(format!(
                "exp needs positive valuation, got {}",
                self.valuation()
            )));
        }
        let order = self.order;
        let mut out = Self::one(order);
        let mut power = Self::one(order);
        let mut k = 1i64;
        while k <= order as i64 {
            power = power.mul(self).truncate(order);
            if power.is_zero() {
                break;
            }
            let inv_fact = Rational::one() / factorial(k);
            out = out.add(&power.scale(&inv_fact));
            k += 1;
        }
        Ok(out)
    }

    pub fn log(&self) -> Result<Self, AlgebraError> {
        if self.valuation() < 0 || self.coefficient(0) != LaurentPolynomial::one() {
            return Err(AlgebraError::Valuation(
                "log needs a series of the form 1 + O(hbar)".into(),
            ));
        }
        let order = self.order;
        let b = self.sub(&Self::one(order));
        let mut out = Self::zero(order);
        let mut power = Self::one(order);
        for k in 1..=order.max(0) as i64 {
            power = power.mul(&b).truncate(order);
            if power.is_zero() {
                break;
            }
            let c = Rational::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, k.into());
            out = out.add(&power.scale(&c));
        }
        Ok(out)
    }

    pub fn map_coefficients(
        &self,
        f: impl Fn(&LaurentPolynomial) -> Result<LaurentPolynomial, AlgebraError>,
    ) -> Result<Self, AlgebraError> {
        let mut s = Self::zero(self.order);
        for (k, c) in &self.coeffs {
            s.add_coefficient(*k, f(c)?);
        }
        Ok(s)
    }

    /// Equality of all coefficients through `order` (both series must be
    /// known that far).
    pub fn agrees_through(&self, other: &Self, order: i32) -> bool {
        if order > self.order || order > other.order {
            return false;
        }
        self.truncate(order).coeffs == other.truncate(order).coeffs
    }

    /// First exponent at which the two series differ, if any, within the
    /// common order.
    pub fn first_mismatch(&self, other: &Self) -> Option<i32> {
        let order = self.order.min(other.order);
        let mut keys: Vec<i32> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|k| *k <= order)
            .find(|k| self.coefficient(*k) != other.coefficient(*k))
    }
}

pub(crate) fn factorial(k: i64) -> Rational {
    let mut f = num_bigint::BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    Rational::from_integer(f)
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*hbar^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(hbar^{})", self.order + 1)
    }
}

impl Default for HbarSeries {
    fn default() -> Self {
        Self::zero(0)
    }
}

impl HbarSeries {
    pub fn is_exactly(&self, other: &Self) -> bool {
        self.order == other.order && self.coeffs == other.coeffs
    }
}
