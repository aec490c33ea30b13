use num_bigint::BigInt;
use num_rational::BigRational;

use super::*;
use crate::algebra::{AlgebraicReal, IntPolynomial};
use crate::scalar::int;

fn p1() -> ProductSpace {
    ProductSpace::new(vec![1]).unwrap()
}

fn p1p1() -> ProductSpace {
    ProductSpace::new(vec![1, 1]).unwrap()
}

fn split(a: u32, b: u32) -> Endomorphism {
    Endomorphism::power_map(p1(), a).product_system(&Endomorphism::power_map(p1(), b))
}

fn swap_twist() -> Endomorphism {
    Endomorphism::monomial(
        p1p1(),
        &[vec![vec![0, 0, 2, 0], vec![0, 0, 0, 2]], vec![vec![3, 0, 0, 0], vec![0, 3, 0, 0]]],
    )
    .unwrap()
}

fn x(nv: usize, i: usize) -> MultiPoly<BigRational> {
    MultiPoly::var(nv, i)
}

fn mat(rows: &[&[i64]]) -> RationalMatrix {
    RationalMatrix::from_i64_rows(rows)
}

fn sqrt6() -> AlgebraicReal {
    AlgebraicReal::new(IntPolynomial::from_i64(&[-6, 0, 1]), int(2), int(3)).unwrap()
}

use crate::RationalMatrix;

#[test]
fn pullback_matrices() {
    assert_eq!(pullback_on_n1(&split(2, 3)), mat(&[&[2, 0], &[0, 3]]));
    // f*h1 = 2 h2 and f*h2 = 3 h1, as columns
    assert_eq!(pullback_on_n1(&swap_twist()), mat(&[&[0, 3], &[2, 0]]));
    assert_eq!(pullback_on_n1(&Endomorphism::identity(&p1p1())), mat(&[&[1, 0], &[0, 1]]));
    assert_eq!(pullback_on_graded(&split(2, 3), 2).unwrap(), mat(&[&[6]]));
    assert_eq!(pullback_on_graded(&swap_twist(), 2).unwrap(), mat(&[&[6]]));
    assert_eq!(pullback_on_graded(&swap_twist(), 0).unwrap(), mat(&[&[1]]));
    assert!(pullback_on_graded(&swap_twist(), 3).is_err());
}

#[test]
fn degrees_and_multipliers() {
    let l = dynamical_degrees(&split(2, 3)).unwrap();
    assert_eq!(l, vec![AlgebraicReal::from_integer(1), AlgebraicReal::from_integer(3), AlgebraicReal::from_integer(6)]);
    let mu = lyapunov_multipliers(&split(2, 3)).unwrap();
    assert_eq!(mu, vec![AlgebraicReal::from_integer(3), AlgebraicReal::from_integer(2)]);

    let l = dynamical_degrees(&swap_twist()).unwrap();
    assert!(l[1].algebraic_equal(&sqrt6()));
    assert_eq!(l[2], AlgebraicReal::from_integer(6));
    let mu = lyapunov_multipliers(&swap_twist()).unwrap();
    assert!(mu.iter().all(|m| m.algebraic_equal(&sqrt6())));
    assert_eq!(mu[1].poly(), &IntPolynomial::from_i64(&[-6, 0, 1]));

    let p2 = Endomorphism::power_map(ProductSpace::new(vec![2]).unwrap(), 2);
    let l = dynamical_degrees(&p2).unwrap();
    assert_eq!(l[1], AlgebraicReal::from_integer(2));
    assert_eq!(l[2], AlgebraicReal::from_integer(4));
    assert_eq!(lyapunov_multipliers(&p2).unwrap(), vec![AlgebraicReal::from_integer(2); 2]);
}

#[test]
fn big_cone_oracle() {
    let f = split(2, 3);
    let cands = vec![
        AlgebraicReal::from_integer(3),
        AlgebraicReal::from_integer(2),
        AlgebraicReal::from_rational(BigRational::new(5.into(), 2.into())),
    ];
    let acc = multipliers_via_big_cone(&f, &cands).unwrap();
    assert_eq!(acc, cands[..2].to_vec());

    let minus = AlgebraicReal::new(IntPolynomial::from_i64(&[-6, 0, 1]), int(-3), int(-2)).unwrap();
    let acc = multipliers_via_big_cone(&swap_twist(), &[sqrt6(), minus]).unwrap();
    assert_eq!(acc.len(), 1);
    assert!(acc[0].algebraic_equal(&sqrt6()));
}

#[test]
fn evaluation_examples() {
    let f = Endomorphism::power_map(p1(), 2);
    let y = f.evaluate(&ProjPoint::from_i64(&[&[2, 1]]).unwrap()).unwrap();
    assert_eq!(y, ProjPoint::from_i64(&[&[4, 1]]).unwrap());

    let g = Endomorphism::new(p1(), vec![vec![x(2, 0).pow(2).scale(&int(2)), x(2, 1).pow(2).scale(&int(4))]]).unwrap();
    let y = g.evaluate(&ProjPoint::from_i64(&[&[1, 1]]).unwrap()).unwrap();
    assert_eq!(y.coords(), &[vec![BigInt::from(1), BigInt::from(2)]]);
    assert!(y.is_canonical());

    let blocks = vec![vec![x(2, 0).mul(&x(2, 1)), x(2, 0).pow(2)]];
    assert_eq!(Endomorphism::new(p1(), blocks.clone()), Err(DynamicsError::NotAMorphism(0)));
    let h = Endomorphism::new_rational_map(p1(), blocks).unwrap();
    let r = h.evaluate(&ProjPoint::from_i64(&[&[0, 1]]).unwrap());
    assert!(matches!(r, Err(DynamicsError::Indeterminacy { block: 0, .. })));
}

#[test]
fn points_are_canonical() {
    let p = ProjPoint::from_i64(&[&[-4, 6], &[0, -3]]).unwrap();
    assert_eq!(p.to_string(), "([2:-3],[0:1])");
    assert!(p.is_canonical());
    assert_eq!(ProjPoint::from_i64(&[&[0, 0]]), Err(DynamicsError::ZeroPoint(0)));
}

#[test]
fn orbit_examples() {
    let f = Endomorphism::power_map(p1(), 2);
    let x0 = ProjPoint::from_i64(&[&[2, 1]]).unwrap();
    let o = iterate(&f, &x0, 3, DEFAULT_DIGIT_BUDGET).unwrap();
    let firsts: Vec<BigInt> = o.points().iter().map(|p| p.factor(0)[0].clone()).collect();
    assert_eq!(firsts, [2, 4, 16, 256].map(BigInt::from));
    assert_eq!(o.stop_reason(), &StopReason::Completed);

    let o = iterate(&f, &x0, 10, 3).unwrap();
    assert_eq!(o.stop_reason(), &StopReason::Budget);
    assert_eq!(o.len(), 4);
    assert!(o.points().iter().all(|p| p.digit_size() <= 3));

    let id = Endomorphism::identity(&p1p1());
    let y = ProjPoint::from_i64(&[&[3, 5], &[1, 0]]).unwrap();
    let o = iterate(&id, &y, 5, 100).unwrap();
    assert_eq!(o.len(), 6);
    assert!(o.points().iter().all(|p| p == &y));
}

#[test]
fn indeterminacy_carries_the_step() {
    // [Y^2 : XY] sends [1:0] to [0:0]
    let f = Endomorphism::new_rational_map(p1(), vec![vec![x(2, 1).pow(2), x(2, 0).mul(&x(2, 1))]]).unwrap();
    let x0 = ProjPoint::from_i64(&[&[1, 0]]).unwrap();
    assert_eq!(iterate(&f, &x0, 4, 100), Err(DynamicsError::Indeterminacy { step: 0, block: 0 }));
    let rec = iterate_partial(&f, &x0, 4, 100).unwrap();
    assert_eq!(rec.len(), 1);
}

#[test]
fn product_and_composition() {
    let f = split(2, 3);
    assert_eq!(f.degree_matrix(), &[vec![2, 0], vec![0, 3]]);
    let ff = f.compose(&f).unwrap();
    let m = pullback_on_n1(&f);
    assert_eq!(pullback_on_n1(&ff), &m * &m);
    let sq = swap_twist().compose(&swap_twist()).unwrap();
    assert_eq!(pullback_on_n1(&sq), mat(&[&[6, 0], &[0, 6]]));
}

#[test]
fn growth_tables() {
    let t = intersection_growth_estimate(&split(2, 3), 1, 8).unwrap();
    // ((f^n)^*(h1 + h2)) . (h1 + h2) = 2^n + 3^n
    for (n, v) in t.values.iter().enumerate() {
        let n = n as u32 + 1;
        assert_eq!(v, &BigRational::from_integer(BigInt::from(2u64.pow(n) + 3u64.pow(n))));
    }
    assert!((t.trend[7] - 3.0).abs() / 3.0 < 0.05);
    let lag2 = ((2f64.powi(8) + 3f64.powi(8)) / (2f64.powi(6) + 3f64.powi(6))).sqrt();
    assert!((t.lag2[7] - lag2).abs() < 1e-12);
    assert!((t.lag2[0] - 5.0 / 2.0).abs() < 1e-12);
    let t = intersection_growth_estimate(&split(2, 3), 2, 5).unwrap();
    assert_eq!(t.values[4], BigRational::from_integer(BigInt::from(2 * 6u64.pow(5))));
    let t = intersection_growth_estimate(&Endomorphism::identity(&p1p1()), 1, 4).unwrap();
    assert!(t.values.iter().all(|v| v == &t.base));
}

#[test]
fn digest_and_description() {
    let f = swap_twist();
    assert_eq!(f.description(), "space [1, 1]\nblock 1 [X2_0^2, X2_1^2]\nblock 2 [X1_0^3, X1_1^3]\n");
    assert_eq!(f.digest().len(), 64);
    assert_ne!(f.digest(), split(2, 3).digest());
}

#[test]
fn binary_resultants() {
    let b = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
    // X^2 and Y^2 share no zero
    assert_ne!(binary_form_resultant(&b(&[0, 0, 1]), &b(&[1, 0, 0]), 2), BigInt::from(0));
    // XY and X^2 share [0:1]
    assert_eq!(binary_form_resultant(&b(&[0, 1, 0]), &b(&[0, 0, 1]), 2), BigInt::from(0));
    // X Y and Y^2 share [1:0] (both drop formal degree)
    assert_eq!(binary_form_resultant(&b(&[0, 1, 0]), &b(&[1, 0, 0]), 2), BigInt::from(0));
}
