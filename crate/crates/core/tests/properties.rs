use std::collections::BTreeSet;

use arithdeg::algebra::{real_eigenvalues, AlgebraicReal};
use arithdeg::dml::{return_set, Correspondence};
use arithdeg::dynamics::{
    dynamical_degree, iterate, lyapunov_multipliers, multipliers_via_big_cone, pullback_on_graded, pullback_on_n1,
    DynamicsError, Endomorphism, MultiPoly, ProjPoint,
};
use arithdeg::geometry::{Class, ProductSpace};
use arithdeg::heights::{arithmetic_degree_estimate, northcott_enumerate, weil_height};
use arithdeg::Rational;
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

/// Block `j` reads factor `perm[j]` (of equal dimension) with degree `deg[j]`;
/// components are `c_i X_i^d` plus an optional cross term.
#[derive(Clone, Debug)]
struct Spec {
    dims: Vec<usize>,
    perm: Vec<usize>,
    deg: Vec<u32>,
    coeffs: Vec<i64>,
    cross: bool,
}

fn spec() -> impl Strategy<Value = Spec> {
    (1usize..=2, prop::collection::vec(1usize..=2, 2), any::<bool>(), prop::collection::vec(1u32..=3, 2))
        .prop_flat_map(|(k, dims, swap, deg)| {
            let dims = dims[..k].to_vec();
            let perm = if k == 2 && swap && dims[0] == dims[1] { vec![1, 0] } else { (0..k).collect() };
            (Just(dims), Just(perm), Just(deg[..k].to_vec()), prop::collection::vec(1i64..=3, 6), any::<bool>())
        })
        .prop_map(|(dims, perm, deg, coeffs, cross)| Spec { dims, perm, deg, coeffs, cross })
}

fn build(s: &Spec) -> Endomorphism {
    let space = ProductSpace::new(s.dims.clone()).unwrap();
    let nv = space.num_vars();
    let blocks = (0..s.dims.len())
        .map(|j| {
            let src = s.perm[j];
            let off = space.var_offset(src);
            let d = s.deg[j];
            (0..=s.dims[j])
                .map(|i| {
                    let mut e = vec![0u32; nv];
                    e[off + i] = d;
                    let c = Rational::from_integer(BigInt::from(s.coeffs[(3 * j + i) % 6]));
                    let mut p = MultiPoly::from_terms(nv, [(e, c)]);
                    if s.cross && i == 0 && d >= 2 {
                        let mut e2 = vec![0u32; nv];
                        e2[off] = d - 1;
                        e2[off + 1] = 1;
                        p = p.add(&MultiPoly::from_terms(nv, [(e2, Rational::one())]));
                    }
                    p
                })
                .collect()
        })
        .collect();
    Endomorphism::new_rational_map(space, blocks).unwrap()
}

fn point(space: &ProductSpace, seed: &[i64]) -> ProjPoint {
    let coords = space
        .dims()
        .iter()
        .enumerate()
        .map(|(j, &n)| (0..=n).map(|i| BigInt::from(seed[(j * 3 + i) % seed.len()])).collect())
        .collect();
    ProjPoint::new(coords).unwrap_or_else(|_| {
        ProjPoint::new(space.dims().iter().map(|&n| vec![BigInt::one(); n + 1]).collect()).unwrap()
    })
}

fn contains_multiset(big: &[AlgebraicReal], small: &[AlgebraicReal]) -> bool {
    let mut used = vec![false; big.len()];
    small.iter().all(|m| {
        if let Some(i) = (0..big.len()).find(|&i| !used[i] && big[i].algebraic_equal(m)) {
            used[i] = true;
            true
        } else {
            false
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pullback_is_functorial(s in spec()) {
        let f = build(&s);
        let ff = f.compose(&f).unwrap();
        for i in 0..=f.space().dim() {
            let m = pullback_on_graded(&f, i).unwrap();
            prop_assert_eq!(pullback_on_graded(&ff, i).unwrap(), &m * &m);
        }
    }

    #[test]
    fn multipliers_are_log_concave(s in spec()) {
        let mu = lyapunov_multipliers(&build(&s)).unwrap();
        prop_assert!(mu.last().unwrap().signum().is_gt());
        for w in mu.windows(2) {
            prop_assert!(w[0].cmp_exact(&w[1]).is_ge());
        }
    }

    #[test]
    fn big_cone_oracle_agrees(s in spec()) {
        let f = build(&s);
        let mu = lyapunov_multipliers(&f).unwrap();
        let eig = real_eigenvalues(&pullback_on_n1(&f)).unwrap();
        let acc = multipliers_via_big_cone(&f, &eig).unwrap();
        for m in &mu {
            prop_assert!(acc.iter().any(|a| a.algebraic_equal(m)), "{m} missing from {acc:?}");
        }
        for a in &acc {
            prop_assert!(mu.iter().any(|m| m.algebraic_equal(a)), "{a} is not a multiplier");
        }
    }

    #[test]
    fn product_multipliers_contain_factors(a in spec(), b in spec()) {
        let f = build(&a);
        let g = build(&b);
        let fg = f.product_system(&g);
        let all = lyapunov_multipliers(&fg).unwrap();
        prop_assert!(contains_multiset(&all, &lyapunov_multipliers(&f).unwrap()));
        prop_assert!(contains_multiset(&all, &lyapunov_multipliers(&g).unwrap()));
    }

    #[test]
    fn evaluation_stays_canonical(s in spec(), seed in prop::collection::vec(-9i64..=9, 6)) {
        let f = build(&s);
        let x = point(f.space(), &seed);
        match iterate(&f, &x, 5, 10_000) {
            Ok(o) => prop_assert!(o.points().iter().all(|p| p.is_canonical() && p.lies_on(f.space()))),
            Err(DynamicsError::Indeterminacy { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn alpha_at_most_lambda_one(s in spec(), seed in prop::collection::vec(2i64..=9, 6)) {
        let f = build(&s);
        let x = point(f.space(), &seed);
        let Ok(o) = iterate(&f, &x, 15, 20_000) else { return Ok(()) };
        if o.len() < 4 {
            return Ok(());
        }
        let e = arithmetic_degree_estimate(&o, &Class::ample(f.space()), 0.02).unwrap();
        let l1 = dynamical_degree(&f, 1).unwrap().to_f64();
        prop_assert!(e.estimate <= l1 * 1.02, "{} > {}", e.estimate, l1);
    }

    #[test]
    fn big_cone_is_convex(a in prop::collection::vec(-3i64..=3, 3), b in prop::collection::vec(-3i64..=3, 3)) {
        let space = ProductSpace::new(vec![1, 2, 1]).unwrap();
        let c = |v: &[i64]| Class::divisor(&space, &v.iter().map(|&x| Rational::from_integer(x.into())).collect::<Vec<_>>()).unwrap();
        let (ca, cb) = (c(&a), c(&b));
        if ca.is_big().unwrap() && cb.is_big().unwrap() {
            prop_assert!(ca.add(&cb).unwrap().is_big().unwrap());
        }
    }

    #[test]
    fn return_sets_shrink_with_more_equations(e1 in 0usize..4, x0 in 1i64..4, y0 in 1i64..4) {
        let p1 = ProductSpace::new(vec![1]).unwrap();
        let f = Endomorphism::power_map(p1.clone(), 2);
        let g = Endomorphism::power_map(p1.clone(), 3);
        let v = |i| MultiPoly::<Rational>::var(4, i);
        let eqs = [
            v(0).mul(&v(3)).sub(&v(1).mul(&v(2))),
            v(0).mul(&v(2)).sub(&v(1).mul(&v(3))),
            v(1).mul(&v(3)),
            v(0).mul(&v(2)),
        ];
        let base = Correspondence::new(p1.product(&p1), vec![eqs[e1].clone()]).unwrap();
        let more = base.with_equation(eqs[(e1 + 1) % 4].clone()).unwrap();
        let x = ProjPoint::from_i64(&[&[x0, 1]]).unwrap();
        let y = ProjPoint::from_i64(&[&[y0, 1]]).unwrap();
        let r0 = return_set(&f, &g, &x, &y, &base, 6, 10_000).unwrap();
        let r1 = return_set(&f, &g, &x, &y, &more, 6, 10_000).unwrap();
        let s0: BTreeSet<usize> = r0.indices.into_iter().collect();
        prop_assert!(r1.indices.iter().all(|n| s0.contains(n)));
    }
}

#[test]
fn northcott_matches_independent_recount() {
    // count primitive pairs by scanning (a, b) with b descending
    for (bound, m) in [(0.0, 1i64), (2f64.ln(), 2), (5f64.ln(), 5), (12f64.ln(), 12)] {
        let mut recount = 0;
        for b in (-m..=m).rev() {
            for a in 0..=m {
                let lead_ok = a > 0 || b > 0;
                if lead_ok && num_integer::Integer::gcd(&a, &b) == 1 {
                    recount += 1;
                }
            }
        }
        let pts = northcott_enumerate(&ProductSpace::new(vec![1]).unwrap(), bound).unwrap();
        assert_eq!(pts.len(), recount, "bound {bound}");
        assert!(pts.iter().all(|p| weil_height(p)[0] <= bound + 1e-12));
    }
}

#[test]
fn root_and_ratio_estimators_approach_each_other() {
    let p1 = ProductSpace::new(vec![1]).unwrap();
    for (d, x) in [(2u32, [2i64, 1]), (3, [3, 2]), (2, [5, 3])] {
        let f = Endomorphism::power_map(p1.clone(), d);
        let o = iterate(&f, &ProjPoint::from_i64(&[&x]).unwrap(), 12, 1_000_000).unwrap();
        let e = arithmetic_degree_estimate(&o, &Class::ample(&p1), 0.01).unwrap();
        // root[n-1] is the n-th root, ratio[n-1] the ratio h_n / h_(n-1)
        let gaps: Vec<f64> = (2..e.root.len()).map(|n| (e.root[n] - e.ratio[n]).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{gaps:?}");
    }
}

#[test]
fn zero_height_orbit_is_bounded() {
    let p1 = ProductSpace::new(vec![1]).unwrap();
    let f = Endomorphism::power_map(p1.clone(), 2);
    let o = iterate(&f, &ProjPoint::from_i64(&[&[1, 1]]).unwrap(), 6, 100).unwrap();
    let e = arithmetic_degree_estimate(&o, &Class::ample(&p1), 0.01).unwrap();
    assert!(e.bounded && e.estimate == 1.0);
}
