use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use toda_mirror::algebra::{LaurentPolynomial, Symbol};
use toda_mirror::critical::{continue_in_lambda, continue_to};
use toda_mirror::mirror::{all_charts, build_graph};
use toda_mirror::semiclassical::{
    classical_limit_b, gamma_stirling_tail, laplace_check, psi_osc, stationary_leading, verify_all,
    FixedPointData, Pairing,
};

fn f64_of(r: &toda_mirror::algebra::Rational) -> f64 {
    r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap()
}

#[test]
fn classical_limit_exact_all_permutations() {
    for n in 1..=3 {
        for rep in verify_all(n, 4) {
            assert!(rep.passed, "{rep:?}");
            assert_eq!(rep.first_mismatch, None);
        }
    }
}

#[test]
fn stirling_tail_against_ln_gamma() {
    for k in 1..=4usize {
        let tail = gamma_stirling_tail(k);
        let next = gamma_stirling_tail(k + 1)[k].clone();
        for z in [5.0f64, 10.0] {
            let base = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln();
            let partial: f64 = tail
                .iter()
                .enumerate()
                .map(|(i, c)| f64_of(c) * z.powi(-(2 * i as i32 + 1)))
                .sum();
            let err = (ln_gamma(z) - base - partial).abs();
            let bound = f64_of(&next).abs() * z.powi(-(2 * k as i32 + 1));
            assert!(err < bound + 1e-10, "K={k} z={z}: {err} vs {bound}");
        }
    }
}

#[test]
fn b_matches_log_gamma_product_numerically() {
    // σ = id with increasing λ makes every weight positive; with ħ > 0 small,
    // Σ [ln Γ(χ/ħ) - Stirling main part] is b(ħ) to O(ħ^9).
    let lam = [-0.7, -0.1, 0.3, 0.5];
    let fp = FixedPointData::new(&[0, 1, 2, 3]);
    let b = classical_limit_b(&fp, 4);
    let hbar = 0.02;
    let mut direct = 0.0;
    for &(a, c) in &fp.weights {
        let z = (lam[a] - lam[c]) / hbar;
        direct += ln_gamma(z) - ((z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln());
    }
    let mut series = 0.0;
    for (k, c) in b.coefficients() {
        let v: f64 = c.eval(|s| match s {
            Symbol::Weight(a, c) => lam[a as usize] - lam[c as usize],
            _ => unreachable!(),
        });
        series += v * hbar.powi(k);
    }
    assert!((direct - series).abs() < 1e-10, "{direct} vs {series}");
}

#[test]
fn laplace_leading_order() {
    let rep = laplace_check(1, &[0.5, -0.5], &[1.0], -0.125).unwrap();
    eprintln!("{rep:?}");
    assert!(rep.relative_error < 5e-2, "{rep:?}");
    assert_eq!(rep.k, vec![0]);
}

#[test]
fn psi_gram_constant_with_antidiagonal_pairing() {
    let amps = [LaurentPolynomial::one(), LaurentPolynomial::var(Symbol::P(0))];
    let grid = vec![vec![1.0], vec![1.1]];
    let g = Pairing::Matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    let rep = psi_osc(1, &[0.5, -0.5], &grid, &amps, g).unwrap();
    assert!(rep.gram_variation < 1e-10, "{rep:?}");
    let surrogate = psi_osc(1, &[0.5, -0.5], &grid, &amps, Pairing::Identity).unwrap();
    eprintln!("identity pairing gram variation {}", surrogate.gram_variation);
}

#[test]
fn columns_scale_with_quasi_homogeneity() {
    let g = build_graph(2).unwrap();
    let lam = [0.25, 0.125, -0.375];
    let q = [1.0, 0.5];
    for chart in all_charts(&g).unwrap() {
        let one = Complex64::new(1.0, 0.0);
        let a = stationary_leading(&continue_to(&chart, &lam, &q, &Default::default()).unwrap(), one);
        let c = 2.0;
        let l2: Vec<f64> = lam.iter().map(|x| x * c).collect();
        let q2: Vec<f64> = q.iter().map(|x| x * c * c).collect();
        let b = stationary_leading(&continue_to(&chart, &l2, &q2, &Default::default()).unwrap(), one);
        // H_w has degree -1, so 1/√det H_w has degree d/2 = 3/2.
        assert!(((b / a).norm() - c.powf(1.5)).abs() < 1e-8, "{:?}", chart.k);
    }
}

#[test]
fn nonequivariant_limit_finite() {
    let g = build_graph(2).unwrap();
    for chart in all_charts(&g).unwrap() {
        let r = continue_in_lambda(&chart, &[0.25, 0.125, -0.375], &[0.0; 3], &[1.0, 1.0], &Default::default())
            .unwrap();
        let v = stationary_leading(&r, Complex64::new(1.0, 0.0));
        assert!(v.norm().is_finite() && v.norm() > 0.0);
    }
}
