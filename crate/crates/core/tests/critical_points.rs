use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toda_mirror::critical::{
    all_critical_points, census, continue_in_lambda, continue_to, lagrangian_residuals, spectral_check,
    to_lagrangian, uv_identity_check, ContinuationOptions,
};
use toda_mirror::mirror::{all_charts, build_graph, make_chart};
use toda_mirror::toda::toda_polynomials;

/// Random rational λ with Σλ = 0 and distinct entries, plus q in (0, 1].
fn draw(n: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    loop {
        let mut lam: Vec<f64> = (0..n).map(|_| rng.random_range(-8i32..=8) as f64 / 8.0).collect();
        lam.push(-lam.iter().sum::<f64>());
        let mut s = lam.clone();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if s.windows(2).all(|w| (w[1] - w[0]).abs() > 1e-9) {
            let q = (0..n).map(|_| rng.random_range(1..=16) as f64 / 16.0).collect();
            return (lam, q);
        }
    }
}

#[test]
fn census_spectral_and_lagrangian() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = ContinuationOptions::default();
    for n in 1..=3 {
        let g = build_graph(n).unwrap();
        let polys = toda_polynomials(n).unwrap();
        for _ in 0..3 {
            let (lam, q) = draw(n, &mut rng);
            let recs = all_critical_points(&g, &lam, &q, &opts).unwrap();
            let c = census(n, &recs);
            assert!(c.passed(), "n={n} λ={lam:?} q={q:?}: {c:?}");
            for r in &recs {
                assert!(r.gradient_norm < 1e-10, "{}", r.gradient_norm);
                assert!(spectral_check(r) < 1e-8, "spectral {}", spectral_check(r));
                let res = lagrangian_residuals(&to_lagrangian(r), &lam, &polys);
                assert!(res.iter().all(|x| *x < 1e-8), "{res:?}");
            }
        }
    }
}

#[test]
fn cp1_values() {
    let g = build_graph(1).unwrap();
    let lam = [0.5, -0.5];
    for k in [0usize, 1] {
        let r = continue_to(&make_chart(&g, &[k]).unwrap(), &lam, &[1.0], &Default::default()).unwrap();
        let l = to_lagrangian(&r);
        assert!((l.p[0] + l.p[1]).norm() < 1e-12);
        assert!((l.p[0] * l.p[1] + l.q[0] + 0.25).norm() < 1e-12);
    }
}

#[test]
fn uv_identity_small_n() {
    for n in 1..=3 {
        let rep = uv_identity_check(n).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}

#[test]
fn quasi_homogeneity() {
    let lam = [0.25, 0.125, -0.375];
    let q = [1.0, 0.5];
    let g = build_graph(2).unwrap();
    for chart in all_charts(&g).unwrap() {
        let base = continue_to(&chart, &lam, &q, &Default::default()).unwrap();
        for c in [2.0, 1.0 / 3.0] {
            let l2: Vec<f64> = lam.iter().map(|x| x * c).collect();
            let q2: Vec<f64> = q.iter().map(|x| x * c * c).collect();
            let r = continue_to(&chart, &l2, &q2, &Default::default()).unwrap();
            let rel = (r.critical_value - base.critical_value * c).norm() / base.critical_value.norm();
            assert!(rel < 1e-8, "chart {:?}: {rel}", chart.k);
        }
    }
}

#[test]
fn lambda_zero_char_poly() {
    let g = build_graph(2).unwrap();
    let polys = toda_polynomials(2).unwrap();
    for chart in all_charts(&g).unwrap() {
        let r = continue_in_lambda(&chart, &[0.25, 0.125, -0.375], &[0.0, 0.0, 0.0], &[1.0, 1.0], &Default::default())
            .unwrap();
        assert!(spectral_check(&r) < 1e-8);
        let res = lagrangian_residuals(&to_lagrangian(&r), &[0.0; 3], &polys);
        assert!(res.iter().all(|x| *x < 1e-8));
        assert!(r.coordinates.iter().all(|w| w.norm() > 0.0 && w != &Complex64::new(0.0, 0.0)));
    }
}
