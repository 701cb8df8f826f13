use std::collections::BTreeSet;

use toda_mirror::algebra::{rat, LinearForm, Symbol};
use toda_mirror::mirror::{all_charts, build_graph, build_phase, make_chart, Edge};

fn l(i: usize, n: usize) -> LinearForm {
    LinearForm::lambda(i, n)
}

fn sum(idx: &[usize], n: usize) -> LinearForm {
    idx.iter().fold(LinearForm::zero(n), |acc, &i| &acc + &l(i, n))
}

#[test]
fn sample_chart_rho_values() {
    let g = build_graph(3).unwrap();
    let c = make_chart(&g, &[1, 2, 0]).unwrap();
    let expect = [
        ((4, 0), sum(&[3], 3)),
        ((3, 1), sum(&[2, 3], 3)),
        ((2, 2), sum(&[1, 2, 3], 3)),
        ((3, 0), sum(&[2], 3)),
        ((2, 0), sum(&[2], 3)),
        ((2, 1), sum(&[2, 3], 3)),
        ((1, 0), sum(&[2], 3)),
        ((1, 1), sum(&[0, 2], 3)),
        ((1, 2), sum(&[0, 2, 3], 3)),
    ];
    for ((i, j), f) in expect {
        assert_eq!(c.rho(i, j), &f, "rho_{i},{j}");
    }
    assert_eq!(c.permutation, vec![2, 0, 3, 1]);
}

#[test]
fn weight_balance() {
    for n in 1..=4 {
        let g = build_graph(n).unwrap();
        let f = build_phase(&g);
        for k in 1..=n {
            for i in 0..=n - k {
                let (_, lin) = f.vertex_derivative((k, i));
                let expect = &l(k - 1, n) - &l(k, n);
                assert_eq!(lin.constrained(), expect.constrained(), "n={n} vertex ({k},{i})");
            }
        }
    }
}

#[test]
fn top_vertex_derivative_uses_row_one() {
    let g = build_graph(3).unwrap();
    let f = build_phase(&g);
    for j in 0..=3 {
        let (alg, _) = f.vertex_derivative((0, j));
        for s in alg.variables() {
            let e = Edge::from_symbol(s).unwrap();
            assert_eq!(e.i, 1);
        }
    }
}

#[test]
fn charts_biject_onto_permutations() {
    for n in 1..=4 {
        let g = build_graph(n).unwrap();
        let charts = all_charts(&g).unwrap();
        let count: usize = (1..=n + 1).product();
        assert_eq!(charts.len(), count);
        let perms: BTreeSet<Vec<usize>> = charts.iter().map(|c| c.permutation.clone()).collect();
        assert_eq!(perms.len(), count);
    }
}

#[test]
fn chart_monomials_satisfy_relations_and_phase_routes_agree() {
    for n in 1..=4 {
        let g = build_graph(n).unwrap();
        for c in all_charts(&g).unwrap() {
            assert_eq!(c.dimension(), n * (n + 1) / 2);
            for r in c.relation_residuals(&g).unwrap() {
                assert!(r.is_zero(), "chart {:?}: {}", c.k, r);
            }
            let (min_exp, min_total) = c.q_degree_bounds();
            assert!(min_exp >= 0 && min_total >= 1, "chart {:?}", c.k);
            let formula = c.phase_in_chart().constrained();
            let direct = c.substituted_phase(&g).unwrap().constrained();
            assert_eq!(formula, direct, "chart {:?}", c.k);
        }
    }
}

#[test]
fn cp1_phase_in_chart() {
    let g = build_graph(1).unwrap();
    let c = make_chart(&g, &[1]).unwrap();
    let f = c.phase_in_chart().constrained();
    assert_eq!(f.log_coefficient(Symbol::u(1, 0)), l(0, 1).scale(&rat(2, 1)));
    assert_eq!(f.log_coefficient(Symbol::q(1)), l(0, 1).scale(&rat(-1, 1)));
    assert_eq!(f.algebraic.to_string(), "1/1*u1_0 + 1/1*q1*u1_0^-1");
}
