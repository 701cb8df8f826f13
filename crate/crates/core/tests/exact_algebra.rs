use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use toda_mirror::algebra::{
    bernoulli_sequence, binomial, format_rational, parse_rational, rat, HbarSeries, LaurentPolynomial, Monomial,
    Rational, Symbol,
};

fn coeff() -> impl Strategy<Value = Rational> {
    (-7i64..=7, 1i64..=4).prop_map(|(a, b)| rat(a, b))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    (-2i32..=2, -2i32..=2, 0i32..=2).prop_map(|(a, b, c)| {
        Monomial::from_pairs([(Symbol::X, a), (Symbol::q(1), b), (Symbol::Hbar, c)])
    })
}

fn poly() -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec((monomial(), coeff()), 0..5).prop_map(LaurentPolynomial::from_terms)
}

/// A series with positive valuation and rational-in-x coefficients.
fn small_series(order: i32) -> impl Strategy<Value = HbarSeries> {
    prop::collection::vec((1..=order, coeff(), -1i32..=1), 0..4).prop_map(move |v| {
        HbarSeries::from_coefficients(
            v.into_iter()
                .map(|(k, c, e)| (k, LaurentPolynomial::term(c, Monomial::from_pairs([(Symbol::X, e)])))),
            order,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPolynomial::one(), a.clone());
    }

    #[test]
    fn leibniz_rule(a in poly(), b in poly()) {
        let d = |p: &LaurentPolynomial| p.derivative(Symbol::X);
        prop_assert_eq!(d(&(&a * &b)), &(&d(&a) * &b) + &(&a * &d(&b)));
    }

    #[test]
    fn exp_log_inverse(s in small_series(5)) {
        let e = s.exp().unwrap();
        prop_assert!(e.log().unwrap().is_exactly(&s));
        // exp(s)·exp(-s) = 1
        prop_assert!(e.mul(&s.neg().exp().unwrap()).is_exactly(&HbarSeries::one(5)));
    }

    #[test]
    fn exp_is_additive(a in small_series(4), b in small_series(4)) {
        let lhs = a.add(&b).exp().unwrap();
        let rhs = a.exp().unwrap().mul(&b.exp().unwrap());
        prop_assert!(lhs.is_exactly(&rhs));
    }

    #[test]
    fn rationals_round_trip(a in -10_000i64..10_000, b in 1i64..500) {
        let r = rat(a, b);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

#[test]
fn bernoulli_recurrence_both_conventions() {
    let b = bernoulli_sequence(30);
    for m in 1..=30usize {
        // B_1 = +1/2: Σ_{j≤m} C(m+1, j) B_j = m + 1.
        let s: Rational = (0..=m)
            .map(|j| Rational::from_integer(binomial(m as u64 + 1, j as u64)) * &b[j])
            .fold(Rational::zero(), |x, y| x + y);
        assert_eq!(s, Rational::from_integer(BigInt::from(m + 1)), "m = {m}");
        // B_1 = -1/2: the same sum vanishes.
        let mut minus = b.clone();
        minus[1] = -minus[1].clone();
        let s: Rational = (0..=m)
            .map(|j| Rational::from_integer(binomial(m as u64 + 1, j as u64)) * &minus[j])
            .fold(Rational::zero(), |x, y| x + y);
        assert!(s.is_zero(), "m = {m}");
    }
    assert_eq!(b[12], rat(-691, 2730));
    assert!(b.iter().skip(3).step_by(2).all(|x| x.is_zero()));
}
