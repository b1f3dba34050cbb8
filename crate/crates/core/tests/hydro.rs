use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use pencil_core::corpus::{build, liouville, ExampleId};
use pencil_core::geodesic::{build_pencil_operator, metric_power, metric_through, PencilData};
use pencil_core::hydro::*;
use pencil_core::ratfun::{char_coeffs, Mat, RadExt, RatFun};
use pencil_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn x(i: usize, nv: usize) -> RatFun {
    RatFun::var(i, nv)
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn euclid(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn shortest_jordan() -> (Mat, Mat) {
    let e = build(ExampleId::JordanFamily(2, 1)).unwrap();
    (e.g, e.l)
}

#[test]
fn linear_density_on_flat_metric_is_casimir() {
    let h = &(&x(0, 2) * &RatFun::from_int(3, 2)) - &x(1, 2);
    let op = hamiltonian_operator(&Mat::identity(2, 2), &RatFun::zero(2), &rational_density(&h)).unwrap();
    assert!(op.is_zero());
}

#[test]
fn quadratic_density_gives_identity() {
    let n = 3;
    let h = (0..n)
        .fold(RatFun::zero(n), |acc, i| acc.add_ref(&x(i, n).pow(2)))
        .scale(&q(1, 2));
    let op = hamiltonian_operator(&Mat::identity(n, n), &RatFun::zero(n), &rational_density(&h)).unwrap();
    assert_eq!(op.rational(), Some(Mat::identity(n, n)));
    assert!(op.is_self_adjoint());
}

#[test]
fn root_determinant_is_casimir_of_quotient_metric() {
    // Shortest Jordan chain: L = [[x2, 2x1], [1, x2]], K = 0 for gL⁻¹.
    let (g, l) = shortest_jordan();
    let gbar = g.mul_ref(&l.inverse().unwrap());
    let h = RadExt::sqrt(l.det());
    let op = hamiltonian_operator(&gbar, &RatFun::zero(2), &h).unwrap();
    assert!(op.is_zero());
    assert!(op.rational().is_some());
}

#[test]
fn declared_curvature_is_checked() {
    let h = rational_density(&x(0, 2));
    assert!(matches!(
        hamiltonian_operator(&Mat::identity(2, 2), &RatFun::one(2), &h),
        Err(Error::CurvatureMismatch { .. })
    ));
}

#[test]
fn casimirs_on_shortest_jordan_chain() {
    let (g, l) = shortest_jordan();
    assert_eq!(l.det(), &x(1, 2).pow(2) - &x(0, 2).scale_int(2));
    // Common Casimirs: a0 + c·x2 (the b-direction is excluded).
    let common = &RatFun::from_int(5, 2) + &x(1, 2).scale_int(-3);
    let v = casimir_classify(&g, &l, &rational_density(&common)).unwrap();
    assert!(v.is_casimir);
    assert_eq!(v.c_h, Some(RatFun::zero(2)));
    // ρ = −∂_1√D = 1/√D, hence c_h = 1.
    let root = RadExt::sqrt(l.det());
    let v = casimir_classify(&g, &l, &root).unwrap();
    assert_eq!(v.c_h, Some(RatFun::one(2)));
    let v = casimir_classify(&g, &l, &rational_density(&x(0, 2).pow(2))).unwrap();
    assert!(!v.is_casimir);
    assert_eq!(v.witness, Some((0, 0)));
    let v = casimir_classify(&g, &l, &rational_density(&x(0, 2))).unwrap();
    assert!(!v.is_casimir);
}

#[test]
fn casimir_constant_is_linear() {
    let (g, l) = shortest_jordan();
    let d = std::sync::Arc::new(l.det());
    let common = &RatFun::from_int(2, 2) + &x(1, 2);
    for c in [-2, 3, 7] {
        let h = RadExt::new(common.clone(), RatFun::from_int(c, 2), d.clone());
        let v = casimir_classify(&g, &l, &h).unwrap();
        assert_eq!(v.c_h, Some(RatFun::from_int(c, 2)), "c = {c}");
    }
}

#[test]
fn root_determinant_families() {
    let started = Instant::now();
    assert!(sqrtdet_casimir_check(&Mat::identity(2, 2), &Mat::identity(2, 2)).unwrap().holds());
    let (g, l) = shortest_jordan();
    assert!(sqrtdet_casimir_check(&g, &l).unwrap().holds());
    for id in [ExampleId::LiouvilleLC(2), ExampleId::SinjukovChain(2)] {
        let e = build(id).unwrap();
        let r = sqrtdet_casimir_check(&e.g, &e.l).unwrap();
        assert!(r.holds(), "{id}: {r:?}");
    }
    eprintln!("sqrtdet n=2: {:?}", started.elapsed());
}

#[test]
fn root_determinant_rejects_curved_background() {
    let (g, l) = liouville(2);
    let g4 = metric_power(&g, &l, 4).unwrap();
    assert!(matches!(
        sqrtdet_casimir_check(&g4, &l),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn scalar_flow_oracle() {
    // (1 − αℓ)^{−3/2} = Σ binom(−3/2, k)(−αℓ)^k.
    let l = Mat::diagonal(vec![x(0, 1)], 1);
    let f = flow_operators(&l, 3);
    assert!(f.first_verbatim);
    assert_eq!(f.operators[0].get(0, 0), &x(0, 1).scale(&q(3, 2)));
    assert_eq!(f.operators[1].get(0, 0), &x(0, 1).pow(2).scale(&q(15, 8)));
    assert_eq!(f.operators[2].get(0, 0), &x(0, 1).pow(3).scale(&q(35, 16)));
    let dens = conservation_densities(&l, 2);
    assert_eq!(dens[1], x(0, 1).pow(2).scale(&q(-1, 8)));
}

fn random_operator(seed: u64, n: usize) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use rand::Rng;
    Mat::from_fn(n, n, n, |_, _| {
        let c: i64 = rng.gen_range(-3..=3);
        let v = rng.gen_range(0..n);
        let k: i64 = rng.gen_range(-2..=2);
        &x(v, n).scale_int(c) + &RatFun::from_int(k, n)
    })
}

#[test]
fn printed_flows_and_densities() {
    let l = random_operator(3, 3);
    let s = char_coeffs(&l);
    let f = flow_operators(&l, 3);
    assert!(f.first_verbatim);
    let c = |a, b| q(a, b);
    // The printed A_2 carries ⅜σ_1 in the Id coefficient where the series
    // has ⅜σ_1²; A_3 repeats it in the L coefficient.
    let a2 = &f.printed[0];
    assert!(!a2.matrix_equal);
    assert_eq!(a2.diffs.len(), 1);
    assert_eq!(a2.diffs[0].power, 0);
    assert_eq!(
        a2.diffs[0].series,
        s[1].scale(&c(1, 2)).add_ref(&s[0].pow(2).scale(&c(3, 8)))
    );
    let a3 = &f.printed[1];
    assert_eq!(a3.diffs.iter().map(|d| d.power).collect::<Vec<_>>(), vec![1]);
    let dens = conservation_densities(&l, 3);
    for k in 1..=3 {
        assert_eq!(Some(dens[k - 1].clone()), printed_density(k, &s, 3), "F_{k}");
    }
    assert!(density_flow_identity(&l, 5));
}

#[test]
fn printed_flow_matches_when_first_coefficient_is_idempotent() {
    // σ_1 ∈ {0, 1} makes σ_1² = σ_1; the printed forms then agree.
    let l = Mat::from_ints(&[vec![1, 2], vec![3, 0]], 1);
    let f = flow_operators(&l, 3);
    assert!(f.printed.iter().all(|p| p.diffs.is_empty() && p.matrix_equal));
}

#[test]
fn identical_flows_commute() {
    let (_, l) = liouville(2);
    let a = flow_operators(&l, 1).operators.remove(0);
    assert!(flows_commute(&a, &a));
}

#[test]
fn swapped_diagonal_flows_do_not_commute() {
    let a = Mat::diagonal(vec![x(0, 2), x(1, 2)], 2);
    let b = Mat::diagonal(vec![x(1, 2), x(0, 2)], 2);
    let r = commute_report(&a, &b);
    assert!(r.bracket_zero);
    let v = |i| x(i, 4);
    let d = &v(0) - &v(1);
    let xi = &v(2) * &v(3);
    assert_eq!(r.residual, vec![&d * &xi, (&d * &xi).neg_ref()]);
    assert!(!flows_commute(&a, &b));
}

#[test]
fn hierarchy_commutes_on_liouville() {
    for n in [2, 3] {
        let (_, l) = liouville(n);
        let f = flow_operators(&l, 3).operators;
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(flows_commute(&f[i], &f[j]), "n = {n}: A_{} vs A_{}", i + 1, j + 1);
            }
        }
    }
}

#[test]
fn background_and_quotient_are_poisson_compatible() {
    let (g, l) = shortest_jordan();
    let gbar = g.mul_ref(&l.inverse().unwrap());
    let r = poisson_report(&g, &gbar).unwrap();
    assert!(r.holds(), "{r:?}");
    assert!(poisson_compatible(&gbar, &g).unwrap());
}

#[test]
fn two_pencil_members_are_poisson_compatible() {
    let n = 2;
    let p1 = PencilData::from_ints(&euclid(n), &[vec![2, 1], vec![1, 3]], &[1, 0], 1).unwrap();
    let p2 = PencilData::from_ints(&euclid(n), &[vec![1, 0], vec![0, -1]], &[0, 2], -2).unwrap();
    let g0 = p1.g0_mat(n);
    let g1 = g0.mul_ref(&build_pencil_operator(&p1, n).operator.inverse().unwrap());
    let g2 = g0.mul_ref(&build_pencil_operator(&p2, n).operator.inverse().unwrap());
    let r = poisson_report(&g1, &g2).unwrap();
    assert_eq!(r.k1, RatFun::from_int(1, n));
    assert_eq!(r.k2, RatFun::from_int(-2, n));
    assert!(r.holds(), "{r:?}");
}

#[test]
fn sheared_euclidean_pair_fails_condition_a() {
    // Pullback of the Euclidean metric along (x, y) ↦ (x, y + x²): flat, but
    // the quotient operator has nonzero torsion.
    let n = 2;
    let g2 = Mat::from_rows(
        vec![
            vec![&RatFun::one(n) + &x(0, n).pow(2).scale_int(4), x(0, n).scale_int(2)],
            vec![x(0, n).scale_int(2), RatFun::one(n)],
        ],
        n,
    );
    let r = poisson_report(&Mat::identity(n, n), &g2).unwrap();
    assert!(!r.condition_a());
    assert!(r.pencil_verdict.is_none());
}

#[test]
fn curved_input_is_reported() {
    let (g, l) = liouville(2);
    let g4 = metric_power(&g, &l, 4).unwrap();
    match poisson_compatible(&g, &g4) {
        Err(Error::Precondition(m)) => assert!(m.contains("second")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn additivity_examples() {
    let g = Mat::identity(2, 2);
    assert!(curvature_additivity(&g, &g.scale(&RatFun::from_int(2, 2))).unwrap());
    let (g, l) = liouville(2);
    let gbar = metric_power(&g, &l, 1).unwrap();
    assert!(curvature_additivity(&g, &gbar).unwrap());
    let c = |k| RatFun::from_int(k, 2);
    let gp = metric_through(&g, &l, &[c(1), c(0), c(1)]).unwrap();
    let gq = metric_through(&g, &l, &[c(0), c(1)]).unwrap();
    assert!(curvature_additivity(&gp, &gq).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hamiltonian_operator_is_linear(
        c1 in proptest::collection::vec(-3i64..=3, 6),
        c2 in proptest::collection::vec(-3i64..=3, 6),
    ) {
        let n = 2;
        let monos = [RatFun::one(n), x(0, n), x(1, n), x(0, n).pow(2), &x(0, n) * &x(1, n), x(1, n).pow(3)];
        let poly = |c: &[i64]| monos.iter().zip(c).fold(RatFun::zero(n), |acc, (m, &k)| acc.add_ref(&m.scale_int(k)));
        let (h1, h2) = (poly(&c1), poly(&c2));
        let p = PencilData::from_ints(&euclid(n), &[vec![1, 0], vec![0, 2]], &[1, 1], 1).unwrap();
        let g = p.g0_mat(n).mul_ref(&build_pencil_operator(&p, n).operator.inverse().unwrap());
        let k = RatFun::one(n);
        let op = |h: &RatFun| hamiltonian_operator(&g, &k, &rational_density(h)).unwrap().rational().unwrap();
        let sum = op(&h1.add_ref(&h2));
        prop_assert_eq!(sum, op(&h1).add_ref(&op(&h2)));
    }

    #[test]
    fn densities_match_printed_forms(seed in 0u64..1000) {
        let l = random_operator(seed, 3);
        let s = char_coeffs(&l);
        let dens = conservation_densities(&l, 3);
        for k in 1..=3 {
            prop_assert_eq!(Some(dens[k - 1].clone()), printed_density(k, &s, 3));
        }
        prop_assert!(flow_operators(&l, 1).first_verbatim);
    }
}
