//! Fixed-point weights, the Stirling tail of ln Γ and the classical limit
//! of the R-matrix at q = 0; stationary-phase leading terms.

pub mod stationary;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{bernoulli, rat, HbarSeries, LaurentPolynomial, Monomial, Rational, Symbol};

pub use stationary::{laplace_check, psi_osc, stationary_leading, LaplaceReport, Pairing, PsiOscReport};

/// Cotangent weights λ_{σ(i)} - λ_{σ(j)}, n ≥ i > j ≥ 0, at the fixed point σ.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointData {
    pub permutation: Vec<usize>,
    /// (a, b) meaning λ_a - λ_b.
    pub weights: Vec<(usize, usize)>,
}

impl FixedPointData {
    pub fn new(permutation: &[usize]) -> Self {
        let n1 = permutation.len();
        let mut weights = Vec::new();
        for i in 0..n1 {
            for j in 0..i {
                weights.push((permutation[i], permutation[j]));
            }
        }
        FixedPointData {
            permutation: permutation.to_vec(),
            weights,
        }
    }

    /// χ^{-l} as a signed monomial in the weight symbols.
    fn inverse_power(&self, w: (usize, usize), l: i32) -> LaurentPolynomial {
        let (sym, sign) = Symbol::weight(w.0, w.1);
        let c = if sign < 0 && l % 2 != 0 { -Rational::one() } else { Rational::one() };
        LaurentPolynomial::term(c, Monomial::var(sym).pow(-l))
    }

    /// N_l = Σ_weights χ^{-l}.
    pub fn n_l(&self, l: i32) -> LaurentPolynomial {
        let mut acc = LaurentPolynomial::zero();
        for &w in &self.weights {
            acc += self.inverse_power(w, l);
        }
        acc
    }
}

pub fn all_permutations(n1: usize) -> Vec<Vec<usize>> {
    if n1 == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(n1 - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n1 - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// B_{2i}/(2i(2i-1)) for i = 1..K, the coefficients of z^{-(2i-1)} in
/// ln Γ(z) - (z - ½)ln z + z - ½ ln 2π.
pub fn gamma_stirling_tail(k: usize) -> Vec<Rational> {
    (1..=k as i64)
        .map(|i| bernoulli(2 * i).expect("even index") / Rational::from_integer((2 * i * (2 * i - 1)).into()))
        .collect()
}

/// Σ_i c_i z^{-(2i-1)} at z = χ/ħ, summed over the weights: the asymptotic
/// tail of ln ∏ Γ(χ/ħ).
pub fn stirling_side(fp: &FixedPointData, k: usize) -> HbarSeries {
    let order = 2 * k as i32 - 1;
    let tail = gamma_stirling_tail(k);
    let mut s = HbarSeries::zero(order);
    for &w in &fp.weights {
        for (i, c) in tail.iter().enumerate() {
            let p = 2 * i as i32 + 1;
            s = s.add(&HbarSeries::monomial(fp.inverse_power(w, p).scale(c), p, order));
        }
    }
    s
}

/// b_σ(ħ) = Σ_k N_{2k-1} (B_{2k}/2k) ħ^{2k-1}/(2k-1) through ħ^{2K-1}.
pub fn classical_limit_b(fp: &FixedPointData, k: usize) -> HbarSeries {
    let order = 2 * k as i32 - 1;
    HbarSeries::from_coefficients(
        (1..=k as i64).map(|kk| {
            let l = (2 * kk - 1) as i32;
            let c = bernoulli(2 * kk).expect("even index") / rat(2 * kk, 1) / rat(2 * kk - 1, 1);
            (l, fp.n_l(l).scale(&c))
        }),
        order,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalLimitReport {
    pub permutation: Vec<usize>,
    pub order: usize,
    /// Stirling side equals b_σ exactly as weight-symbol series.
    pub symbolic: bool,
    /// Same identity after substituting a rational λ.
    pub at_rational_lambda: bool,
    /// b(-ħ) = -b(ħ).
    pub odd: bool,
    /// exp(b(ħ))·exp(b(-ħ)) = 1.
    pub orthogonal: bool,
    pub first_mismatch: Option<i32>,
    pub passed: bool,
}

fn eval_at(series: &HbarSeries, lambda: &[Rational]) -> Vec<(i32, Rational)> {
    series
        .coefficients()
        .map(|(k, c)| {
            let v: Rational = c.eval(|s| match s {
                Symbol::Weight(a, b) => &lambda[a as usize] - &lambda[b as usize],
                other => panic!("unexpected symbol {other}"),
            });
            (k, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// Distinct rationals summing to zero.
fn sample_lambda(n1: usize) -> Vec<Rational> {
    let mut v: Vec<Rational> = (0..n1).map(|i| rat((i * i) as i64 + 3 * i as i64 + 1, (i + 2) as i64)).collect();
    let mean = v.iter().fold(Rational::zero(), |a, b| a + b) / rat(n1 as i64, 1);
    for x in &mut v {
        *x -= &mean;
    }
    v
}

pub fn verify_classical_limit(permutation: &[usize], k: usize) -> ClassicalLimitReport {
    let fp = FixedPointData::new(permutation);
    let lhs = stirling_side(&fp, k);
    let b = classical_limit_b(&fp, k);
    let symbolic = lhs.is_exactly(&b);
    let lam = sample_lambda(permutation.len());
    let at_rational_lambda = eval_at(&lhs, &lam) == eval_at(&b, &lam);
    let odd = b.reflect().is_exactly(&b.neg());
    let orthogonal = match (b.exp(), b.reflect().exp()) {
        (Ok(e1), Ok(e2)) => e1.mul(&e2).is_exactly(&HbarSeries::one(b.order())),
        _ => false,
    };
    ClassicalLimitReport {
        permutation: permutation.to_vec(),
        order: k,
        symbolic,
        at_rational_lambda,
        odd,
        orthogonal,
        first_mismatch: lhs.first_mismatch(&b),
        passed: symbolic && at_rational_lambda && odd && orthogonal,
    }
}

/// The check for every permutation of S_{n+1}.
pub fn verify_all(n: usize, k: usize) -> Vec<ClassicalLimitReport> {
    all_permutations(n + 1)
        .par_iter()
        .map(|p| verify_classical_limit(p, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_coefficients() {
        assert_eq!(gamma_stirling_tail(3), vec![rat(1, 12), rat(-1, 360), rat(1, 1260)]);
    }

    #[test]
    fn weights_and_n_l() {
        let fp = FixedPointData::new(&[0, 1]);
        assert_eq!(fp.weights, vec![(1, 0)]);
        // Reversed permutation: λ_0 - λ_1 = -(λ_1 - λ_0), odd powers flip sign.
        let rev = FixedPointData::new(&[1, 0]);
        assert_eq!(rev.n_l(1), -fp.n_l(1));
        assert_eq!(rev.n_l(2), fp.n_l(2));
        assert_eq!(FixedPointData::new(&[2, 0, 3, 1]).weights.len(), 6);
    }

    #[test]
    fn single_weight_b() {
        let fp = FixedPointData::new(&[0, 1]);
        let b = classical_limit_b(&fp, 2);
        let chi = Symbol::Weight(1, 0);
        assert_eq!(b.coefficient(1), LaurentPolynomial::term(rat(1, 12), Monomial::var(chi).pow(-1)));
        assert_eq!(b.coefficient(3), LaurentPolynomial::term(rat(-1, 360), Monomial::var(chi).pow(-3)));
    }

    #[test]
    fn permutation_count() {
        assert_eq!(all_permutations(4).len(), 24);
    }
}
