//! Linear forms in the equivariant parameters λ_0..λ_n.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{rational_to_f64, LaurentPolynomial};
use super::symbol::Symbol;
use super::Rational;

/// `Σ c_i λ_i` for `i = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm(Vec<Rational>);

impl LinearForm {
    /// The zero form on λ_0..λ_n.
    pub fn zero(n: usize) -> Self {
        LinearForm(vec![Rational::zero(); n + 1])
    }

    pub fn lambda(i: usize, n: usize) -> Self {
        let mut f = Self::zero(n);
        f.0[i] = Rational::one();
        f
    }

    /// `λ_a + λ_{a+1} + ... + λ_b` (empty when `a > b`).
    pub fn range_sum(a: usize, b: usize, n: usize) -> Self {
        let mut f = Self::zero(n);
        for i in a..=b.min(n) {
            if a <= b {
                f.0[i] = Rational::one();
            }
        }
        f
    }

    pub fn from_coefficients(c: Vec<Rational>) -> Self {
        LinearForm(c)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LinearForm(self.0.iter().map(|x| x * c).collect())
    }

    /// Imposes λ_n = -(λ_0 + ... + λ_{n-1}).
    pub fn constrained(&self) -> Self {
        let n = self.n();
        let last = self.0[n].clone();
        let mut c: Vec<Rational> = self.0.iter().map(|x| x - &last).collect();
        c[n] = Rational::zero();
        LinearForm(c)
    }

    pub fn eval(&self, lambda: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(lambda)
            .map(|(c, l)| rational_to_f64(c) * l)
            .sum()
    }

    pub fn eval_exact(&self, lambda: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(lambda)
            .fold(Rational::zero(), |acc, (c, l)| acc + c * l)
    }

    pub fn to_poly(&self) -> LaurentPolynomial {
        let mut p = LaurentPolynomial::zero();
        for (i, c) in self.0.iter().enumerate() {
            p += LaurentPolynomial::var(Symbol::lambda(i)).scale(c);
        }
        p
    }

    /// `Some((a, b))` when the form is exactly λ_a - λ_b.
    pub fn as_difference(&self) -> Option<(usize, usize)> {
        let mut plus = None;
        let mut minus = None;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() && plus.is_none() {
                plus = Some(i);
            } else if *c == -Rational::one() && minus.is_none() {
                minus = Some(i);
            } else {
                return None;
            }
        }
        Some((plus?, minus?))
    }

    /// `Some(i)` when the form is exactly λ_i.
    pub fn as_single(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.0.len()).filter(|&i| !self.0[i].is_zero()).collect();
        match nz.as_slice() {
            [i] if self.0[*i].is_one() => Some(*i),
            _ => None,
        }
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm(self.0.iter().map(|a| -a).collect())
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: LinearForm) -> LinearForm {
        &self + &rhs
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        &self - &rhs
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}
