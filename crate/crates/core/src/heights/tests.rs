use std::f64::consts::LN_2;

use num_rational::BigRational;

use super::canonical::deviation_profile;
use super::*;
use crate::algebra::{AlgebraicReal, IntPolynomial};
use crate::dynamics::{iterate, Endomorphism, MultiPoly, DEFAULT_DIGIT_BUDGET};
use crate::scalar::int;
use crate::RationalMatrix;

fn space(dims: &[usize]) -> ProductSpace {
    ProductSpace::new(dims.to_vec()).unwrap()
}

fn split(a: u32, b: u32) -> Endomorphism {
    Endomorphism::power_map(space(&[1]), a).product_system(&Endomorphism::power_map(space(&[1]), b))
}

fn swap_twist() -> Endomorphism {
    Endomorphism::monomial(
        space(&[1, 1]),
        &[vec![vec![0, 0, 2, 0], vec![0, 0, 0, 2]], vec![vec![3, 0, 0, 0], vec![0, 3, 0, 0]]],
    )
    .unwrap()
}

fn pt(c: &[&[i64]]) -> ProjPoint {
    ProjPoint::from_i64(c).unwrap()
}

fn class(s: &ProductSpace, c: &[i64]) -> Class {
    Class::divisor(s, &c.iter().map(|&v| int(v)).collect::<Vec<_>>()).unwrap()
}

fn sqrt6() -> AlgebraicReal {
    AlgebraicReal::new(IntPolynomial::from_i64(&[-6, 0, 1]), int(2), int(3)).unwrap()
}

fn x(nv: usize, i: usize) -> MultiPoly<BigRational> {
    MultiPoly::var(nv, i)
}

#[test]
fn weil_heights() {
    assert_eq!(weil_height(&pt(&[&[2, 1]])), vec![LN_2]);
    assert_eq!(weil_height(&pt(&[&[0, 1]])), vec![0.0]);
    let s = space(&[1, 1]);
    let h = class_height(&class(&s, &[1, 1]), &pt(&[&[4, 1], &[27, 1]])).unwrap();
    assert!((h - (4f64.ln() + 27f64.ln())).abs() < 1e-12);
}

#[test]
fn lower_bound_reports() {
    let f = split(2, 3);
    let s = f.space().clone();
    let o = iterate(&f, &pt(&[&[1, 2], &[3, 1]]), 4, 1000).unwrap();
    let r = height_lower_bound_off_base_locus_check(&class(&s, &[1, 1]), &o).unwrap();
    assert_eq!(r.holds, Some(true));
    assert!(r.minimum >= 0.0);
    let r = height_lower_bound_off_base_locus_check(&class(&s, &[1, 0]), &o).unwrap();
    assert_eq!(r.holds, Some(true));
    let r = height_lower_bound_off_base_locus_check(&class(&s, &[1, -1]), &o).unwrap();
    assert!(!r.hypothesis);
    assert_eq!(r.holds, None);
}

#[test]
fn northcott_counts() {
    let pts = northcott_enumerate(&space(&[1]), LN_2).unwrap();
    assert_eq!(pts.len(), 8);
    for c in [[0, 1], [1, 0], [1, 1], [1, -1], [1, 2], [1, -2], [2, 1], [2, -1]] {
        assert!(pts.contains(&pt(&[&c])), "{c:?}");
    }
    assert!(pts.iter().all(|p| p.is_canonical()));
    assert_eq!(northcott_enumerate(&space(&[1]), 0.0).unwrap().len(), 4);
    assert_eq!(northcott_enumerate(&space(&[1, 1]), 0.0).unwrap().len(), 16);
    assert!(matches!(northcott_enumerate(&space(&[1]), 5.0), Err(HeightError::BoundTooLarge(_))));
    assert_eq!(northcott_enumerate(&space(&[3, 1]), 0.0), Err(HeightError::UnsupportedSpace));
}

#[test]
fn functoriality() {
    let f = Endomorphism::power_map(space(&[1]), 2);
    let s = f.space().clone();
    let o = iterate(&f, &pt(&[&[3, 2]]), 6, 1000).unwrap();
    let d = functoriality_defect(&f, &class(&s, &[1]), &o).unwrap();
    assert!(d.sup < 1e-9);

    let nv = 2;
    let g = Endomorphism::new(s.clone(), vec![vec![x(nv, 0).pow(2).add(&x(nv, 1).pow(2)), x(nv, 0).mul(&x(nv, 1))]])
        .unwrap();
    let o = iterate(&g, &pt(&[&[2, 1]]), 10, DEFAULT_DIGIT_BUDGET).unwrap();
    let d = functoriality_defect(&g, &class(&s, &[1]), &o).unwrap();
    assert_eq!(d.sequence.len(), 10);
    // |h(f(x)) - 2h(x)| = ln(1 + (y/x)^2) <= ln 2
    assert!(d.sup <= LN_2 + 1e-12);

    let id = Endomorphism::identity(&s);
    let o = iterate(&id, &pt(&[&[5, 3]]), 3, 100).unwrap();
    assert_eq!(functoriality_defect(&id, &class(&s, &[1]), &o).unwrap().sup, 0.0);
}

#[test]
fn canonical_height_examples() {
    let f = Endomorphism::power_map(space(&[1]), 2);
    let b = vec![class(f.space(), &[1])];
    let c = canonical_heights(&f, &pt(&[&[2, 1]]), &b, 10, 1e-9, DEFAULT_DIGIT_BUDGET).unwrap();
    assert!((c.values[0] - LN_2).abs() < 1e-12);
    assert!(c.converged);
    let c = canonical_heights(&f, &pt(&[&[1, 1]]), &b, 10, 1e-9, DEFAULT_DIGIT_BUDGET).unwrap();
    assert_eq!(c.values, vec![0.0]);

    let g = split(2, 3);
    let s = g.space().clone();
    let b = vec![class(&s, &[1, 0]), class(&s, &[0, 1])];
    let c = canonical_heights(&g, &pt(&[&[2, 1], &[2, 1]]), &b, 8, 1e-9, DEFAULT_DIGIT_BUDGET).unwrap();
    assert_eq!(c.lambda, RationalMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]));
    assert!((c.values[0] - LN_2).abs() < 1e-12 && (c.values[1] - LN_2).abs() < 1e-12);
}

#[test]
fn canonical_height_preconditions() {
    let g = split(2, 3);
    let s = g.space().clone();
    assert_eq!(restrict_pullback(&g, &[class(&s, &[1, 1])]), Err(HeightError::NotInvariant));
    assert_eq!(restrict_pullback(&g, &[class(&s, &[1, 1]), class(&s, &[2, 2])]), Err(HeightError::DependentBasis));
    let id = Endomorphism::identity(&s);
    let r = canonical_heights(&id, &pt(&[&[2, 1], &[2, 1]]), &[class(&s, &[1, 1])], 4, 1e-9, 100);
    assert_eq!(r, Err(HeightError::SmallEigenvalue));
}

#[test]
fn canonical_functional_equation() {
    // swap-twist is not diagonal over Q; its restriction is the full N^1
    let f = swap_twist();
    let s = f.space().clone();
    let b = vec![class(&s, &[1, 0]), class(&s, &[0, 1])];
    let lam = restrict_pullback(&f, &b).unwrap();
    let o = iterate(&f, &pt(&[&[2, 1], &[3, 1]]), 12, DEFAULT_DIGIT_BUDGET).unwrap();
    let (r, h0, _) = functional_equation_residual(&o, &b, &lam, 1e-9).unwrap();
    assert!(r < 1e-9, "residual {r}");
    let dev = deviation_profile(&h0, &o).unwrap();
    assert!(dev.iter().all(|&d| d < 1e-6));
}

#[test]
fn error_bounds_decrease_on_non_monomial_map() {
    let s = space(&[1]);
    let g = Endomorphism::new(s.clone(), vec![vec![x(2, 0).pow(2).add(&x(2, 1).pow(2)), x(2, 0).mul(&x(2, 1))]])
        .unwrap();
    let c = canonical_heights(&g, &pt(&[&[2, 1]]), &[class(&s, &[1])], 12, 1e-9, DEFAULT_DIGIT_BUDGET).unwrap();
    assert!(c.errors.windows(2).all(|w| w[1] < w[0]), "{:?}", c.errors);
}

#[test]
fn jordan_block_limit() {
    // h_(n+1) = h_n Lambda + e_n with |e_n| <= 0.1 and Lambda = [[2,1],[0,2]]
    let lam = RationalMatrix::from_i64_rows(&[&[2, 1], &[0, 2]]);
    let noise = |n: usize| [0.1 * (n as f64).sin(), 0.1 * (1.7 * n as f64).cos()];
    let mut h = vec![vec![1.0, 0.5]];
    for n in 0..40 {
        let p = &h[n];
        let e = noise(n);
        h.push(vec![2.0 * p[0] + e[0], p[0] + 2.0 * p[1] + e[1]]);
    }
    let lim = telescoping_limit(&h, &lam).unwrap();
    // v = h_0 + sum_n e_n Lambda^(-(n+1)), summed in closed form
    let mut v = [1.0, 0.5];
    for n in 0..200 {
        let e = noise(n);
        let k = (n + 1) as f64;
        let s = 0.5f64.powi(n as i32 + 1);
        // Lambda^(-k) = 2^-k [[1, -k/2], [0, 1]]
        v[0] += s * e[0];
        v[1] += s * (e[1] - k / 2.0 * e[0]);
    }
    let err = (lim.values[0] - v[0]).abs().max((lim.values[1] - v[1]).abs());
    assert!(err < 1e-6, "{err}");
    assert!(*lim.errors.last().unwrap() < 1e-6);
}

#[test]
fn estimator_examples() {
    let f = Endomorphism::power_map(space(&[1]), 2);
    let s = f.space().clone();
    let o = iterate(&f, &pt(&[&[2, 1]]), 12, DEFAULT_DIGIT_BUDGET).unwrap();
    let e = arithmetic_degree_estimate(&o, &class(&s, &[1]), 0.01).unwrap();
    assert!(e.ratio.iter().skip(1).all(|&r| (r - 2.0).abs() < 1e-12), "{:?}", e.ratio);
    assert!((e.estimate - 2.0).abs() < 1e-9);

    let id = Endomorphism::identity(&s);
    let o = iterate(&id, &pt(&[&[7, 3]]), 6, 100).unwrap();
    let e = arithmetic_degree_estimate(&o, &class(&s, &[1]), 0.01).unwrap();
    assert!(e.bounded);
    assert_eq!(e.estimate, 1.0);

    let t = swap_twist();
    let o = iterate(&t, &pt(&[&[2, 1], &[3, 1]]), 12, DEFAULT_DIGIT_BUDGET).unwrap();
    let e = arithmetic_degree_estimate(&o, &class(t.space(), &[1, 1]), 0.02).unwrap();
    let r6 = 6f64.sqrt();
    assert!((e.two_step[e.two_step.len() - 1] - r6).abs() / r6 < 0.02);
    assert!((e.estimate - r6).abs() / r6 < 0.02);

    let g = split(2, 3);
    let o = iterate(&g, &pt(&[&[2, 1], &[2, 1]]), 15, DEFAULT_DIGIT_BUDGET).unwrap();
    let e = arithmetic_degree_estimate(&o, &class(g.space(), &[1, 1]), 0.02).unwrap();
    assert!((e.estimate - 3.0).abs() < 1e-6, "{}", e.estimate);
    assert_eq!(e.method, EstimateMethod::Recurrence);
}

#[test]
fn classification_examples() {
    let three = AlgebraicReal::from_integer(3);
    let two = AlgebraicReal::from_integer(2);
    let ms = vec![three.clone(), two.clone()];
    assert_eq!(classify_alpha(2.9997, &ms, 0.01).unwrap(), AlphaClass::Multiplier(three.clone()));
    assert_eq!(classify_alpha(2.5, &ms, 0.01).unwrap(), AlphaClass::Inconclusive);
    let r = classify_alpha(2.44, &[sqrt6(), sqrt6()], 0.01).unwrap();
    assert!(matches!(r, AlphaClass::Multiplier(m) if m.algebraic_equal(&sqrt6())));
    // 2.5 sits between 2 and 3, both within 25%
    assert_eq!(classify_alpha(2.5, &ms, 0.25).unwrap(), AlphaClass::Inconclusive);
    assert_eq!(classify_alpha(3.5, &ms, 0.5).unwrap(), AlphaClass::Multiplier(three));
    let half = AlgebraicReal::from_rational(BigRational::new(1.into(), 2.into()));
    assert_eq!(classify_alpha(1.0, &[half], 0.01), Err(HeightError::EmptyMultipliers));
}

#[test]
fn growth_bounds() {
    let g = split(2, 3);
    let s = g.space().clone();
    let o = iterate(&g, &pt(&[&[2, 1], &[2, 1]]), 15, DEFAULT_DIGIT_BUDGET).unwrap();
    let p = IntPolynomial::from_i64(&[6, -5, 1]);
    assert!(growth_bound_check(&o, &class(&s, &[1, -1]), &p).unwrap().pass);
    let wrong = IntPolynomial::from_i64(&[-2, 1]);
    assert!(!growth_bound_check(&o, &class(&s, &[0, 1]), &wrong).unwrap().pass);

    let id = Endomorphism::identity(&s);
    let o = iterate(&id, &pt(&[&[2, 1], &[5, 1]]), 8, 100).unwrap();
    assert!(growth_bound_check(&o, &class(&s, &[1, 1]), &IntPolynomial::from_i64(&[-1, 1])).unwrap().pass);
}

#[test]
fn big_height_subsequences() {
    let g = split(2, 3);
    let s = g.space().clone();
    let e = x(4, 0); // X1_0, class h1
    let o = iterate(&g, &pt(&[&[2, 1], &[2, 1]]), 10, DEFAULT_DIGIT_BUDGET).unwrap();
    let r = big_height_subsequence(&g, &o, &class(&s, &[2, 1]), &e).unwrap();
    assert_eq!(r.indices.len(), o.len());
    assert_eq!(r.verdict, DensityVerdict::Consistent);
    assert!((r.roots.last().unwrap() - 3.0).abs() < 0.5);

    let o = iterate(&g, &pt(&[&[0, 1], &[2, 1]]), 6, DEFAULT_DIGIT_BUDGET).unwrap();
    let r = big_height_subsequence(&g, &o, &class(&s, &[2, 1]), &e).unwrap();
    assert_eq!(r.verdict, DensityVerdict::AllOnSupport);

    let id = Endomorphism::identity(&s);
    let o = iterate(&id, &pt(&[&[2, 1], &[2, 1]]), 6, 100).unwrap();
    let r = big_height_subsequence(&id, &o, &class(&s, &[2, 1]), &e).unwrap();
    assert_eq!(r.verdict, DensityVerdict::Inconsistent);
}
