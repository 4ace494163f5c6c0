//! Library results against independent reference computations.

mod common;

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilgrowth::cli::catalog;
use nilgrowth::cli::run::group_of;
use nilgrowth::cone::graded_limit_check;
use nilgrowth::liealg::{bch, default_grading, BracketSpec, LieAlgebraQ};
use nilgrowth::linalg::smith::smith_diagonal;
use nilgrowth::linalg::{rref_span, Rational, RationalMatrix};
use nilgrowth::nilgroup::{
    free_abelian, growth_degree_group, heisenberg, layer, malcev_lie_algebra, unitriangular, Layer,
    MatrixGroupDescriptor,
};
use nilgrowth::wordmetric::{
    balls, conj_growth_sequence, coordinate_growth_profile, gamma_estimate, tau, Tau, DEFAULT_SEARCH_BUDGET,
};

fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank_cap: usize) -> Vec<Vec<i64>> {
    // products of thin factors give rank-deficient matrices often enough
    let k = rng.gen_range(1..=rank_cap);
    let left: Vec<Vec<i64>> = (0..rows).map(|_| (0..k).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let right: Vec<Vec<i64>> = (0..k).map(|_| (0..cols).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    (0..rows)
        .map(|i| (0..cols).map(|j| (0..k).map(|l| left[i][l] * right[l][j]).sum()).collect())
        .collect()
}

#[test]
fn rank_matches_fraction_free_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let m = random_int_matrix(&mut rng, r, c, 5);
        let rows: Vec<Vec<Rational>> =
            m.iter().map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
        assert_eq!(rref_span(&rows).unwrap().dim(), common::bareiss_rank(&m), "{m:?}");
        assert_eq!(common::rank(&rows), common::bareiss_rank(&m));
    }
}

#[test]
fn smith_matches_determinantal_divisors() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..150 {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let m = random_int_matrix(&mut rng, r, c, 4);
        let big: Vec<Vec<BigInt>> = m.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let got: Vec<BigInt> = smith_diagonal(&big, c).into_iter().map(|d| d.abs()).collect();
        assert_eq!(got, common::determinantal_invariants(&m, c), "{m:?}");
    }
}

#[test]
fn ball_sizes_match_independent_bfs() {
    let free2 = group_of(&catalog::lookup("free2").unwrap().descriptor).unwrap().unwrap();
    for (g, r) in [(heisenberg(), 12), (unitriangular(4), 6), (free2, 8)] {
        let t = balls(&g, r).unwrap();
        assert_eq!(t.sizes(), common::bfs_sizes(&common::symmetric_int_gens(&g), r), "{}", g.label);
    }
}

#[test]
fn closed_form_ball_sizes() {
    let t = balls(&free_abelian(2), 15).unwrap();
    for (n, &s) in t.sizes().iter().enumerate() {
        assert_eq!(s, 2 * n * n + 2 * n + 1);
    }
    let free2 = group_of(&catalog::lookup("free2").unwrap().descriptor).unwrap().unwrap();
    let t = balls(&free2, 9).unwrap();
    for (n, &s) in t.sizes().iter().enumerate() {
        assert_eq!(s, 1 + 2 * (3usize.pow(n as u32) - 1));
    }
}

#[test]
fn heisenberg_word_lengths_match_tuple_model() {
    let g = heisenberg();
    let t = balls(&g, 9).unwrap();
    let oracle = common::heisenberg_tau(9);
    assert_eq!(oracle.len(), t.len());
    // (x, y, z) is the matrix with x, y on the superdiagonal and z in the corner
    for (&(x, y, z), &v) in &oracle {
        let m = RationalMatrix::from_i64(&[&[1, x, z], &[0, 1, y], &[0, 0, 1]]);
        assert_eq!(tau(&m, &t), Tau::Exact(v), "({x}, {y}, {z})");
    }
    let comm = tau(&g.evaluate_word("a b a^-1 b^-1").unwrap(), &t).exact().unwrap();
    assert!((3..=4).contains(&comm));
    let c = common::h_mul(common::h_mul((1, 0, 0), (0, 1, 0)), common::h_mul(common::h_inv((1, 0, 0)), common::h_inv((0, 1, 0))));
    assert_eq!(c, (0, 0, 1));
    assert_eq!(comm, oracle[&c]);
}

#[test]
fn bch_agrees_with_matrix_logarithm() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let n = rng.gen_range(3..=6);
        let a = common::random_unitriangular(&mut rng, n, 2);
        let b = common::random_unitriangular(&mut rng, n, 2);
        let g = MatrixGroupDescriptor::with_default_labels("pair", vec![a.clone(), b.clone()]).unwrap();
        let alg = malcev_lie_algebra(&g).unwrap();
        let z = bch(&alg.lie, &alg.log_coordinates(&a).unwrap(), &alg.log_coordinates(&b).unwrap()).unwrap();
        assert_eq!(common::dense(&alg.matrix(&z)), common::series_log(&common::dense(&a.mul(&b).unwrap())));
    }
}

#[test]
fn group_side_lcs_matches_algebra() {
    for g in [heisenberg(), unitriangular(4), unitriangular(5), free_abelian(3)] {
        let dims = common::group_side_lcs_dims(&g);
        let gg = growth_degree_group(&g).unwrap();
        assert_eq!(gg.lcs_dims, dims, "{}", g.label);
        assert_eq!(gg.degree, common::degree_from_dims(&dims));
    }
    assert_eq!(growth_degree_group(&unitriangular(4)).unwrap().degree, 10);
    assert_eq!(growth_degree_group(&unitriangular(5)).unwrap().degree, 20);
}

#[test]
fn tilted_filiform_errors_are_one_over_two_n() {
    let spec = |i, j, terms: &[(usize, i64)]| BracketSpec {
        i,
        j,
        terms: terms.iter().map(|&(k, c)| (k, Rational::from_integer(c.into()))).collect(),
    };
    let l = LieAlgebraQ::from_brackets(4, &[spec(0, 1, &[(2, 1), (3, 1)]), spec(0, 2, &[(3, 1)])]).unwrap();
    let d = default_grading(&l).unwrap();
    let e = |i: usize| -> Vec<Rational> { (0..4).map(|k| Rational::from_integer(((k == i) as i64).into())).collect() };
    let ns = [1, 3, 7, 10, 25, 80];
    let r = graded_limit_check(&e(0), &e(1), &l, &d, &ns).unwrap();
    // only the projection of [e1,e2] onto the third layer survives: (1/2) e4 / n
    let expected: Vec<String> = ns.iter().map(|n| format!("1/{}", 2 * n)).collect();
    assert_eq!(r.errors_exact, expected);
}

#[test]
fn conjugacy_growth_matches_tuple_model() {
    let g = heisenberg();
    let t = balls(&g, 12).unwrap();
    let a = g.evaluate_word("a").unwrap();
    let seq = conj_growth_sequence(&a, 8, &t, DEFAULT_SEARCH_BUDGET).unwrap();
    // y a y^-1 = (1, 0, -y_2), so ‖a‖_n = max τ(1, 0, m) over |m| <= n
    let oracle = common::heisenberg_tau(14);
    for c in seq {
        let best = (-(c.n as i64)..=c.n as i64).map(|m| oracle[&(1, 0, m)]).max().unwrap();
        assert_eq!(c.value, Tau::Exact(best), "n = {}", c.n);
    }
}

#[test]
fn layers_predict_local_growth() {
    let g = heisenberg();
    let alg = malcev_lie_algebra(&g).unwrap();
    let t = balls(&g, 12).unwrap();
    for i in t.ball_range(2) {
        let x = t.matrix(i);
        let Layer::Index(l) = layer(&x, &alg).unwrap() else { continue };
        let e = gamma_estimate(&x, &t, 16, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(e.matched_j, Some(l as u32 + 1), "element {i}: {:?}", e.exponent);
    }
}

#[test]
fn fitted_exponents_do_not_depend_on_generating_set() {
    let h = heisenberg();
    let ab = h.evaluate_word("a b").unwrap();
    let bigger = MatrixGroupDescriptor::new(
        "heisenberg3",
        vec!["a".into(), "b".into(), "c".into()],
        vec![h.generators[0].clone(), h.generators[1].clone(), ab],
    )
    .unwrap();
    let fit = |g: &MatrixGroupDescriptor| {
        let alg = malcev_lie_algebra(g).unwrap();
        let p = coordinate_growth_profile(&balls(g, 10).unwrap(), &alg).unwrap();
        p.series.iter().map(|s| (s.layer, s.fitted_exponent.unwrap())).collect::<Vec<_>>()
    };
    for ((l1, e1), (l2, e2)) in fit(&h).into_iter().zip(fit(&bigger)) {
        assert_eq!(l1, l2);
        assert!((e1 - e2).abs() <= 0.2, "{e1} vs {e2}");
    }
}
