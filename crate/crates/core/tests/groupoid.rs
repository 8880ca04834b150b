use std::time::Instant;

use gq_core::dynamical::{bridge, build_gutt_twistor};
use gq_core::groupoid::*;
use gq_core::rational::int;
use gq_core::{fixtures, CoeffRing, Context, HbarSeries, MultiIndex};
use proptest::prelude::*;

fn ctx(name: &str, k: u32) -> Context {
    Context::exact(fixtures::algebra(name).unwrap(), k).unwrap()
}

#[test]
fn gutt_twisted_structures() {
    for name in ["abelian1", "axb", "heisenberg", "sl2-borel", "oscillator"] {
        let t = Instant::now();
        let c = ctx(name, 2);
        let gutt = build_gutt_twistor(&c).unwrap();
        let rep = check_twisted_structures(&c, &gutt, 2).unwrap();
        assert!(rep.passed(), "{name}");
        eprintln!("{name}: {:?}", t.elapsed());
    }
}

#[test]
fn bridged_oscillator_twist_structures() {
    let c = ctx("oscillator", 2);
    let f = fixtures::twist(&c, "oscillator-exp-hz").unwrap();
    let b = bridge(&c, &f).unwrap();
    assert!(check_twistor(&c, &b).unwrap().passed());
    assert!(check_twisted_structures(&c, &b, 2).unwrap().passed());
}

#[test]
fn gutt_product_restricts_to_pbw_star() {
    for name in fixtures::valid_algebra_names() {
        let c = ctx(name, 3);
        let gutt = build_gutt_twistor(&c).unwrap();
        let monos = MultiIndex::all_up_to_degree(c.n(), 3);
        for a in &monos {
            for b in &monos {
                let pa = c.ring().monomial(a, int(1));
                let pb = c.ring().monomial(b, int(1));
                let lhs = twisted_product(
                    &gutt,
                    &HbarSeries::constant(3, pa.clone()),
                    &HbarSeries::constant(3, pb.clone()),
                )
                .unwrap();
                assert_eq!(lhs, c.pbw_star(&pa, &pb).unwrap(), "{name} {a:?} {b:?}");
            }
        }
    }
}

#[test]
fn non_unital_tensor_is_flagged() {
    let c = ctx("axb", 2);
    let gutt = build_gutt_twistor(&c).unwrap();
    let doubled = gutt.scale(&int(2));
    let rep = check_twistor(&c, &doubled).unwrap();
    assert!(!rep.sharp_invertible && !rep.passed());
}

fn random_h(c: &Context, seeds: &[u32]) -> HTensor {
    let (n, m) = (c.n(), c.m());
    let ring = CoeffRing::exact(n);
    let mut out = HTensor::zero(c, 1);
    for s in seeds.chunks(4) {
        let d = if s[1] % 2 == 1 {
            MultiIndex::unit(n, s[0] as usize % n)
        } else {
            MultiIndex::zero(n)
        };
        let u = MultiIndex::unit(m, s[2] as usize % m);
        let coeff = ring.monomial(&MultiIndex::unit(n, s[3] as usize % n), int(s[3] as i64 % 3 - 1));
        out.add_term(vec![Leg::new(d, u)], &HbarSeries::monomial(c.order(), s[1] % 2, coeff));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn h_product_is_associative(seeds in prop::collection::vec(0u32..7, 24), name in 0usize..7) {
        let c = ctx(fixtures::valid_algebra_names()[name], 2);
        let (x, y, z) = (random_h(&c, &seeds[..8]), random_h(&c, &seeds[8..16]), random_h(&c, &seeds[16..]));
        let lhs = x.mul(&c, &y).unwrap().mul(&c, &z).unwrap();
        let rhs = x.mul(&c, &y.mul(&c, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coproduct_is_multiplicative_and_coassociative(seeds in prop::collection::vec(0u32..7, 16), name in 0usize..7) {
        let c = ctx(fixtures::valid_algebra_names()[name], 2);
        let (x, y) = (random_h(&c, &seeds[..8]), random_h(&c, &seeds[8..]));
        let lhs = x.mul(&c, &y).unwrap().coproduct().unwrap();
        let rhs = x.coproduct().unwrap().mul(&c, &y.coproduct().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let d = x.coproduct().unwrap();
        prop_assert_eq!(d.coproduct_at(0), d.coproduct_at(1));
        prop_assert_eq!(d.counit_at(0), x.clone());
        prop_assert_eq!(d.counit_at(1), x);
    }
}
