use std::time::Instant;

use toda_mirror::algebra::LaurentPolynomial;
use toda_mirror::toda::{build_hamiltonian, nonvanishing_commutators, toda_operators};

#[test]
fn all_commutators_vanish() {
    for n in 1..=3 {
        let t = Instant::now();
        let bad = nonvanishing_commutators(n).unwrap();
        assert!(bad.is_empty(), "n={n}: {bad:?}");
        eprintln!("n={n}: {:?}", t.elapsed());
    }
}

#[test]
fn hamiltonian_commutes_n3() {
    let h = build_hamiltonian(3).unwrap();
    for d in toda_operators(3).unwrap() {
        assert!(h.commutator(&d).unwrap().is_zero());
    }
}

#[test]
fn operator_counts_and_top_terms() {
    for n in 1..=3 {
        let ops = toda_operators(n).unwrap();
        assert_eq!(ops.len(), n + 1);
        // D_{n+1} contains P_0⋯P_n (P_i = ħ∂_i) with coefficient ±1.
        let top = ops[n].coefficient(&vec![1; n + 1]);
        let one = LaurentPolynomial::one();
        assert!(top == one || top == -&one, "n={n}: {top}");
    }
}
