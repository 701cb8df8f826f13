use num_traits::Zero;
use proptest::prelude::*;

use toda_mirror::algebra::{rat, Rational};
use toda_mirror::virasoro::{
    commutation_check, family_commutation_check, family_virasoro, point_virasoro, quantize, string_operator,
    unquantized_bracket_check, DMap, HbarPower, LoopPairing, LoopVector, PointSource, QuadraticOperator,
    ResidualClass, SymplecticLoopElement, VirasoroError,
};

fn zeros(n: usize) -> Vec<Vec<Rational>> {
    vec![vec![Rational::zero(); n]; n]
}

fn diag(v: &[Rational]) -> Vec<Vec<Rational>> {
    let mut m = zeros(v.len());
    for (i, x) in v.iter().enumerate() {
        m[i][i] = x.clone();
    }
    m
}

/// μ = deg - dim/2 and ρ = c_1 ∪ on H*(P^{N-1}) with the Poincaré pairing.
fn projective_space(n: usize) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>, LoopPairing) {
    let mu = diag(&(0..n).map(|i| rat(2 * i as i64 - (n as i64 - 1), 2)).collect::<Vec<_>>());
    let mut rho = zeros(n);
    for i in 0..n - 1 {
        rho[i + 1][i] = rat(n as i64, 1);
    }
    (mu, rho, LoopPairing::antidiagonal(n))
}

#[test]
fn inverse_hbar_on_c2_is_the_string_operator() {
    let op = quantize(&HbarPower { n: 2, power: -1 }, &LoopPairing::identity(2), 4).unwrap();
    let mut expected = QuadraticOperator::zero();
    for a in 0..2u16 {
        expected.add_qq((0, a), (0, a), rat(1, 2));
        for m in 0..4u16 {
            expected.add_qd((m + 1, a), (m, a), rat(1, 1));
        }
    }
    assert_eq!(op, expected);
}

#[test]
fn quantized_d_matches_closed_forms_for_m_up_to_one() {
    for m in -1..=1 {
        for window in [3usize, 6] {
            let q = quantize(&DMap { n: 1, m }, &LoopPairing::identity(1), window).unwrap();
            assert_eq!(q, point_virasoro(m, window).unwrap(), "m = {m}, window = {window}");
        }
    }
    let l1 = point_virasoro(1, 4).unwrap();
    assert_eq!(l1.dd.get(&((0, 0), (0, 0))), Some(&rat(1, 8)));
}

#[test]
fn closed_form_l2_mixed_coefficient_is_the_only_difference() {
    let q = quantize(&DMap { n: 1, m: 2 }, &LoopPairing::identity(1), 5).unwrap();
    let shown = point_virasoro(2, 5).unwrap();
    let diff = q.sub(&shown);
    let mut expected = QuadraticOperator::zero();
    expected.add_dd((0, 0), (1, 0), rat(-3, 8));
    assert_eq!(diff, expected);
    assert_eq!(q.dd.get(&((0, 0), (1, 0))), Some(&rat(3, 8)));
}

#[test]
fn point_commutators_give_the_forced_scalars() {
    for m in -1..=2 {
        for mp in -1..=2 {
            if m + mp < -1 {
                continue;
            }
            let r = commutation_check(m, mp, 4, PointSource::Quantized).unwrap();
            assert_eq!(r.monomials, 56);
            assert!(r.passed, "{r:?}");
        }
    }
    let r = commutation_check(1, -1, 4, PointSource::Quantized).unwrap();
    assert_eq!(r.residual, ResidualClass::Scalar { value: rat(1, 8) });
    let r = commutation_check(0, 1, 4, PointSource::Quantized).unwrap();
    assert_eq!(r.residual, ResidualClass::Zero);
    let r = commutation_check(2, -1, 4, PointSource::Quantized).unwrap();
    assert_eq!(r.residual, ResidualClass::Zero);
}

#[test]
fn closed_form_l2_breaks_the_l2_l_minus_one_bracket() {
    let r = commutation_check(2, -1, 4, PointSource::ClosedForm).unwrap();
    assert!(matches!(r.residual, ResidualClass::Operator { .. }), "{r:?}");
    // Pairs avoiding the ∂_0∂_1 term are unaffected.
    assert!(commutation_check(1, -1, 4, PointSource::ClosedForm).unwrap().passed);
    assert!(commutation_check(2, 0, 4, PointSource::ClosedForm).unwrap().passed);
}

#[test]
fn invalid_pairs_rejected() {
    assert!(matches!(
        commutation_check(-1, -1, 4, PointSource::Quantized),
        Err(VirasoroError::InvalidInput(_))
    ));
    assert!(point_virasoro(3, 6).is_err());
}

#[test]
fn trivial_family_is_the_point_case() {
    let z = zeros(1);
    for m in -1..=2 {
        let f = family_virasoro(&z, &z, &LoopPairing::identity(1), m, 5).unwrap();
        let d = quantize(&DMap { n: 1, m }, &LoopPairing::identity(1), 5).unwrap();
        assert_eq!(f, d, "m = {m}");
    }
}

#[test]
fn family_string_operator_uses_eta() {
    let eta = LoopPairing::new(vec![
        vec![rat(0, 1), rat(0, 1), rat(1, 1)],
        vec![rat(0, 1), rat(2, 1), rat(0, 1)],
        vec![rat(1, 1), rat(0, 1), rat(-1, 3)],
    ])
    .unwrap();
    let mu = diag(&[rat(1, 5), rat(-2, 3), rat(7, 2)]);
    let mut rho = zeros(3);
    rho[1][0] = rat(3, 1);
    rho[2][0] = rat(-1, 2);
    rho[2][1] = rat(5, 4);
    let op = family_virasoro(&mu, &rho, &eta, -1, 4).unwrap();
    assert_eq!(op, string_operator(&eta, 4));
    // q_0^0 q_0^2 η_{02}/ε and q_0^1² η_{11}/2ε.
    assert_eq!(op.qq.get(&((0, 0), (0, 2))), Some(&rat(1, 1)));
    assert_eq!(op.qq.get(&((0, 1), (0, 1))), Some(&rat(1, 1)));
}

#[test]
fn projective_space_families_are_central_extensions() {
    for n in [2usize, 3] {
        let (mu, rho, eta) = projective_space(n);
        for m in -1..=2 {
            for mp in -1..m {
                if m + mp < -1 {
                    continue;
                }
                let r = family_commutation_check(&mu, &rho, &eta, m, mp, 3, 2).unwrap();
                assert!(r.passed, "N={n} ({m},{mp}): {r:?}");
            }
        }
    }
}

#[test]
fn non_symplectic_family_rejected() {
    // With η = 1 a nonzero diagonal μ is not skew.
    let mu = diag(&[rat(1, 2), rat(-1, 2)]);
    let e = family_virasoro(&mu, &zeros(2), &LoopPairing::identity(2), 0, 3);
    assert!(matches!(e, Err(VirasoroError::NotSymplectic { .. })), "{e:?}");
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(a, b)| rat(a, b))
}

fn family_params() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>, usize)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(small_rational(), n),
            prop::collection::vec(small_rational(), n * (n - 1) / 2),
            Just(n),
        )
    })
}

fn loop_vector(n: usize) -> impl Strategy<Value = LoopVector> {
    prop::collection::btree_map((-5i32..5, 0..n), small_rational(), 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unquantized_family_bracket((mu_d, rho_entries, n) in family_params()) {
        let mu = diag(&mu_d);
        let mut rho = zeros(n);
        let mut it = rho_entries.into_iter();
        for i in 0..n {
            for j in 0..i {
                rho[i][j] = it.next().unwrap();
            }
        }
        for m in -1..=2 {
            for mp in -1..=2 {
                if m + mp < -1 {
                    continue;
                }
                let r = unquantized_bracket_check(&mu, &rho, m, mp, 6).unwrap();
                prop_assert!(r.holds, "{:?}", r);
            }
        }
    }

    #[test]
    fn omega_antisymmetric(f in loop_vector(2), g in loop_vector(2), a in small_rational(), b in small_rational()) {
        let eta = LoopPairing::new(vec![vec![rat(2, 1), a.clone()], vec![a, b + rat(5, 1)]]);
        prop_assume!(eta.is_ok());
        let eta = eta.unwrap();
        let f = SymplecticLoopElement::new(eta.clone(), f).unwrap();
        let g = SymplecticLoopElement::new(eta, g).unwrap();
        prop_assert_eq!(f.omega(&g), -g.omega(&f));
        prop_assert!(f.omega(&f).is_zero());
    }

    #[test]
    fn darboux_coordinates_recovered(qs in prop::collection::btree_map((0u32..6, 0usize..2), small_rational(), 0..6),
                                     ps in prop::collection::btree_map((0u32..6, 0usize..2), small_rational(), 0..6)) {
        let f = SymplecticLoopElement::from_darboux(LoopPairing::identity(2), &qs, &ps).unwrap();
        for (&(m, a), c) in &qs {
            prop_assert_eq!(&f.q(m, a), c);
        }
        for (&(m, a), c) in &ps {
            prop_assert_eq!(&f.p(m, a), c);
        }
    }
}
