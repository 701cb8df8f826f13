//! Bernoulli numbers, binomials and signed elementary symmetric functions.

use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{AlgebraError, Rational};

/// `B_0 .. B_m` in the convention `x/(1 - e^{-x}) = Σ B_k x^k / k!`,
/// i.e. `B_1 = +1/2`. Akiyama–Tanigawa algorithm.
pub fn bernoulli_sequence(m: usize) -> Vec<Rational> {
    let mut a: Vec<Rational> = Vec::with_capacity(m + 1);
    let mut out = Vec::with_capacity(m + 1);
    for k in 0..=m {
        a.push(Rational::new(BigInt::one(), BigInt::from(k + 1)));
        for j in (1..=k).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = d * Rational::from_integer(BigInt::from(j));
        }
        out.push(a[0].clone());
    }
    out
}

/// `B_k` for even `k >= 2`.
pub fn bernoulli(k: i64) -> Result<Rational, AlgebraError> {
    if k < 2 || k % 2 != 0 {
        return Err(AlgebraError::BernoulliIndex(k));
    }
    Ok(bernoulli_sequence(k as usize).pop().expect("nonempty"))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Signed elementary symmetric values: `x^{n+1} + σ_1 x^n + ... + σ_{n+1}
/// = ∏ (x - λ_i)`. Works over any commutative ring.
pub fn elementary_symmetric_sigma<T>(lambda: &[T]) -> Vec<T>
where
    T: Clone + Zero + One + Neg<Output = T>,
    for<'a> &'a T: Add<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    // c[k] is the coefficient of x^{len-k} after multiplying in the roots so far
    let mut c: Vec<T> = vec![T::one()];
    for l in lambda {
        let neg = -l.clone();
        let mut next = c.clone();
        next.push(T::zero());
        for k in 1..next.len() {
            let t = &neg * &c[k - 1];
            next[k] = &next[k] + &t;
        }
        c = next;
    }
    c.into_iter().skip(1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn sigma_examples() {
        let z = elementary_symmetric_sigma(&[rat(0, 1), rat(0, 1)]);
        assert_eq!(z, vec![rat(0, 1), rat(0, 1)]);
        let a = elementary_symmetric_sigma(&[rat(1, 1), rat(-1, 1)]);
        assert_eq!(a, vec![rat(0, 1), rat(-1, 1)]);
        let b = elementary_symmetric_sigma(&[rat(1, 1), rat(2, 1), rat(-3, 1)]);
        assert_eq!(b, vec![rat(0, 1), rat(-7, 1), rat(6, 1)]);
    }

    #[test]
    fn bernoulli_rejects_bad_index() {
        assert!(bernoulli(3).is_err());
        assert!(bernoulli(0).is_err());
        assert!(bernoulli(-2).is_err());
    }

    #[test]
    fn first_bernoulli_numbers() {
        let b = bernoulli_sequence(4);
        assert_eq!(b[0], rat(1, 1));
        assert_eq!(b[1], rat(1, 2));
        assert_eq!(b[3], rat(0, 1));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }
}
