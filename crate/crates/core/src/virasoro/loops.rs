//! Finitely supported elements of H((ħ)), the form Ω and linear maps on them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::VirasoroError;
use crate::algebra::matrix::inverse;
use crate::algebra::{rat, Rational};

/// (k, α) ↦ coefficient of φ_α ħ^k.
pub type LoopVector = BTreeMap<(i32, usize), Rational>;

pub(crate) fn add_to(v: &mut LoopVector, key: (i32, usize), c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(key).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        v.remove(&key);
    }
}

fn basis(k: i32, alpha: usize) -> LoopVector {
    LoopVector::from([((k, alpha), Rational::one())])
}

/// The symmetric nondegenerate pairing η on H, with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopPairing {
    eta: Vec<Vec<Rational>>,
    eta_inv: Vec<Vec<Rational>>,
}

impl LoopPairing {
    pub fn new(eta: Vec<Vec<Rational>>) -> Result<Self, VirasoroError> {
        let n = eta.len();
        if n == 0 || eta.iter().any(|r| r.len() != n) {
            return Err(VirasoroError::InvalidInput("η must be a nonempty square matrix".into()));
        }
        if (0..n).any(|i| (0..n).any(|j| eta[i][j] != eta[j][i])) {
            return Err(VirasoroError::InvalidInput("η must be symmetric".into()));
        }
        let eta_inv = inverse(&eta).ok_or_else(|| VirasoroError::InvalidInput("η is degenerate".into()))?;
        Ok(LoopPairing { eta, eta_inv })
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        LoopPairing {
            eta: id.clone(),
            eta_inv: id,
        }
    }

    /// η_{α β} = δ_{α+β, N-1}.
    pub fn antidiagonal(n: usize) -> Self {
        let m: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i + j + 1 == n { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        LoopPairing::new(m).expect("antidiagonal pairing is nondegenerate")
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn eta(&self) -> &[Vec<Rational>] {
        &self.eta
    }

    pub fn eta_inv(&self) -> &[Vec<Rational>] {
        &self.eta_inv
    }
}

/// Ω(f, g) = Res_{ħ=0} (f(-ħ), g(ħ)) dħ.
pub fn omega(pairing: &LoopPairing, f: &LoopVector, g: &LoopVector) -> Rational {
    let mut acc = Rational::zero();
    for (&(a, alpha), cf) in f {
        let sign = if a.rem_euclid(2) == 0 { Rational::one() } else { -Rational::one() };
        for beta in 0..pairing.dim() {
            let eta = &pairing.eta[alpha][beta];
            if eta.is_zero() {
                continue;
            }
            if let Some(cg) = g.get(&(-1 - a, beta)) {
                acc += &sign * cf * eta * cg;
            }
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticLoopElement {
    pub pairing: LoopPairing,
    pub coefficients: LoopVector,
}

impl SymplecticLoopElement {
    pub fn new(pairing: LoopPairing, coefficients: LoopVector) -> Result<Self, VirasoroError> {
        if coefficients.keys().any(|&(_, a)| a >= pairing.dim()) {
            return Err(VirasoroError::InvalidInput("component index exceeds dim H".into()));
        }
        let coefficients = coefficients.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(SymplecticLoopElement { pairing, coefficients })
    }

    /// Builds the element with the given Darboux coordinates q_m^α, p_m^α.
    pub fn from_darboux(
        pairing: LoopPairing,
        q: &BTreeMap<(u32, usize), Rational>,
        p: &BTreeMap<(u32, usize), Rational>,
    ) -> Result<Self, VirasoroError> {
        let mut v = LoopVector::new();
        for (&(m, a), c) in q {
            add_to(&mut v, (m as i32, a), c.clone());
        }
        for (&(m, a), c) in p {
            let c = if m % 2 == 0 { -c.clone() } else { c.clone() };
            add_to(&mut v, (-1 - m as i32, a), c);
        }
        Self::new(pairing, v)
    }

    pub fn q(&self, m: u32, alpha: usize) -> Rational {
        self.coefficients.get(&(m as i32, alpha)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn p(&self, m: u32, alpha: usize) -> Rational {
        let c = self.coefficients.get(&(-1 - m as i32, alpha)).cloned().unwrap_or_else(Rational::zero);
        if m % 2 == 0 {
            -c
        } else {
            c
        }
    }

    pub fn omega(&self, other: &SymplecticLoopElement) -> Rational {
        omega(&self.pairing, &self.coefficients, &other.coefficients)
    }
}

/// A linear map of H((ħ)) given on basis vectors; the image of each basis
/// vector is finitely supported.
pub trait LoopMap: Sync {
    fn dim(&self) -> usize;
    fn apply_basis(&self, k: i32, alpha: usize) -> LoopVector;

    fn apply(&self, v: &LoopVector) -> LoopVector {
        let mut out = LoopVector::new();
        for (&(k, a), c) in v {
            for (key, d) in self.apply_basis(k, a) {
                add_to(&mut out, key, c * d);
            }
        }
        out
    }
}

pub struct ZeroMap {
    pub n: usize,
}

impl LoopMap for ZeroMap {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_basis(&self, _: i32, _: usize) -> LoopVector {
        LoopVector::new()
    }
}

/// Multiplication by ħ^power.
pub struct HbarPower {
    pub n: usize,
    pub power: i32,
}

impl LoopMap for HbarPower {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_basis(&self, k: i32, alpha: usize) -> LoopVector {
        basis(k + self.power, alpha)
    }
}

/// D_m = ħ^{-1/2} D^{m+1} ħ^{-1/2} with D = ħ (d/dħ) ħ, acting diagonally on H.
pub struct DMap {
    pub n: usize,
    pub m: i32,
}

impl DMap {
    /// ∏_{j=1}^{m+1} (k - 1/2 + j).
    pub fn eigenvalue(m: i32, k: i32) -> Rational {
        (1..=m + 1).fold(Rational::one(), |acc, j| acc * rat(2 * (k + j) as i64 - 1, 2))
    }
}

impl LoopMap for DMap {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_basis(&self, k: i32, alpha: usize) -> LoopVector {
        let c = Self::eigenvalue(self.m, k);
        let mut v = LoopVector::new();
        add_to(&mut v, (k + self.m, alpha), c);
        v
    }
}

/// L_m^{μ,ρ} = ħ^{-1/2} X^{m+1} ħ^{-1/2} with X = ħ(d/dħ)ħ - μħ + ρ.
pub struct FamilyMap {
    pub mu: Vec<Vec<Rational>>,
    pub rho: Vec<Vec<Rational>>,
    pub m: i32,
}

impl FamilyMap {
    pub fn new(mu: Vec<Vec<Rational>>, rho: Vec<Vec<Rational>>, m: i32) -> Result<Self, VirasoroError> {
        let n = mu.len();
        if n == 0 || mu.iter().chain(rho.iter()).any(|r| r.len() != n) || rho.len() != n {
            return Err(VirasoroError::InvalidInput("μ and ρ must be square of the same size".into()));
        }
        if m < -1 {
            return Err(VirasoroError::InvalidInput(format!("m must be at least -1, got {m}")));
        }
        Ok(FamilyMap { mu, rho, m })
    }
}

impl LoopMap for FamilyMap {
    fn dim(&self) -> usize {
        self.mu.len()
    }
    fn apply_basis(&self, k: i32, alpha: usize) -> LoopVector {
        family_action(&self.mu, &self.rho, self.m, &basis(k, alpha))
    }
}

/// Applies L_m^{μ,ρ} by multiplying out X^{m+1} one factor at a time.
pub fn family_action(mu: &[Vec<Rational>], rho: &[Vec<Rational>], m: i32, v: &LoopVector) -> LoopVector {
    let n = mu.len();
    // Key j stands for ħ^{j - 1/2}.
    let mut w = v.clone();
    for _ in 0..m + 1 {
        let mut next = LoopVector::new();
        for (&(j, a), c) in &w {
            add_to(&mut next, (j + 1, a), c * rat(2 * j as i64 + 1, 2));
            for b in 0..n {
                if !mu[b][a].is_zero() {
                    add_to(&mut next, (j + 1, b), -(c * &mu[b][a]));
                }
                if !rho[b][a].is_zero() {
                    add_to(&mut next, (j, b), c * &rho[b][a]);
                }
            }
        }
        w = next;
    }
    w.into_iter().map(|((j, a), c)| ((j - 1, a), c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn darboux_round_trip() {
        let q = BTreeMap::from([((0, 0), rat(2, 1)), ((3, 1), rat(-1, 3))]);
        let p = BTreeMap::from([((0, 1), rat(5, 1)), ((1, 0), rat(7, 2))]);
        let f = SymplecticLoopElement::from_darboux(LoopPairing::identity(2), &q, &p).unwrap();
        assert_eq!(f.q(3, 1), rat(-1, 3));
        assert_eq!(f.p(0, 1), rat(5, 1));
        assert_eq!(f.p(1, 0), rat(7, 2));
        // The p_0 coefficient sits at ħ^{-1} with sign -1.
        assert_eq!(f.coefficients[&(-1, 1)], rat(-5, 1));
    }

    #[test]
    fn omega_is_canonical() {
        // Ω(f, g) = Σ p(f)q(g) - q(f)p(g) for η = 1.
        let pair = LoopPairing::identity(1);
        let q = BTreeMap::from([((2, 0), rat(1, 1))]);
        let p = BTreeMap::from([((2, 0), rat(1, 1))]);
        let e_q = SymplecticLoopElement::from_darboux(pair.clone(), &q, &BTreeMap::new()).unwrap();
        let e_p = SymplecticLoopElement::from_darboux(pair, &BTreeMap::new(), &p).unwrap();
        assert_eq!(e_p.omega(&e_q), rat(1, 1));
        assert_eq!(e_q.omega(&e_p), rat(-1, 1));
    }

    #[test]
    fn d_map_values() {
        assert_eq!(DMap::eigenvalue(0, 0), rat(1, 2));
        assert_eq!(DMap::eigenvalue(1, -1), rat(-1, 4));
        assert_eq!(DMap::eigenvalue(-1, 5), rat(1, 1));
    }

    #[test]
    fn trivial_family_is_d_map() {
        let zero = vec![vec![Rational::zero()]];
        for m in -1..=2 {
            let f = FamilyMap::new(zero.clone(), zero.clone(), m).unwrap();
            let d = DMap { n: 1, m };
            for k in -4..4 {
                assert_eq!(f.apply_basis(k, 0), d.apply_basis(k, 0), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn degenerate_pairing_rejected() {
        let e = LoopPairing::new(vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]]);
        assert!(matches!(e, Err(VirasoroError::InvalidInput(_))));
    }
}
