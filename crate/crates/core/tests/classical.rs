use gq_core::classical::*;
use gq_core::dynamical::dyn_check;
use gq_core::rational::int;
use gq_core::{fixtures, CoeffRing, Context, LieAlgebraPair, MultiIndex, Poly};
use proptest::prelude::*;

fn gens(pair: &LieAlgebraPair) -> Vec<Gen> {
    (0..pair.dim_l())
        .map(Gen::D)
        .chain((0..pair.dim_g()).map(Gen::X))
        .collect()
}

/// Random multivector of degree `p` with coefficients of degree ≤ 1.
fn random_multivector(pair: &LieAlgebraPair, p: usize, seeds: &[i64]) -> Multivector {
    let ring = CoeffRing::exact(pair.dim_l());
    let g = gens(pair);
    let mut out = Multivector::zero(&ring);
    let mut it = seeds.iter().cycle();
    for t in 0..4 {
        let sel: Vec<Gen> = (0..p)
            .map(|k| g[(*it.next().unwrap() as usize + t + k) % g.len()])
            .collect();
        let mut c = ring.constant(int(*it.next().unwrap() - 2));
        for i in 0..pair.dim_l() {
            c.add_scaled(&ring.var(i).unwrap(), &int(*it.next().unwrap() - 2));
        }
        out.add_wedge(&sel, &c);
    }
    out
}

#[test]
fn cotangent_structure_is_poisson_for_every_pair() {
    for name in fixtures::valid_algebra_names() {
        let pair = fixtures::algebra(name).unwrap();
        let pi = assemble_pi(&pair, &Multivector::zero(&CoeffRing::exact(pair.dim_l()))).unwrap();
        let rep = schouten_jacobi(&pair, &pi).unwrap();
        assert!(rep.passed(), "{name}: {}", rep.trivector.display(&pair));
    }
}

#[test]
fn jacobiator_is_half_the_schouten_square() {
    for name in fixtures::valid_algebra_names() {
        let pair = fixtures::algebra(name).unwrap();
        let pi = assemble_pi(&pair, &random_multivector(&pair, 2, &[1, 3, 0, 4, 2, 1, 3])).unwrap();
        let sq = schouten(&pair, &pi, &pi).unwrap();
        let t = schouten_jacobi(&pair, &pi).unwrap().trivector;
        assert_eq!(sq, t.scale(&int(2)), "{name}");
    }
}

/// For constant θ on g, the X-components of the Jacobiator are the
/// classical Yang–Baxter tensor of r = Σ θ^{ab} x_a⊗x_b, computed here in U(g).
#[test]
fn constant_theta_matches_yang_baxter_tensor() {
    for name in ["sl2", "oscillator", "heisenberg", "axb"] {
        let pair = fixtures::algebra(name).unwrap();
        let c = Context::exact(fixtures::algebra(name).unwrap(), 1).unwrap();
        let m = pair.dim_g();
        let ring = CoeffRing::exact(pair.dim_l());
        let mut theta = Multivector::zero(&ring);
        let mut r = vec![vec![int(0); m]; m];
        #[allow(clippy::needless_range_loop)]
        for a in 0..m {
            for b in a + 1..m {
                let v = int(((a * 3 + b * 5) % 5) as i64 - 2);
                theta.add_wedge(&[Gen::X(a), Gen::X(b)], &ring.constant(v.clone()));
                r[a][b] = v.clone();
                r[b][a] = -v;
            }
        }
        let t = schouten_jacobi(&pair, &assemble_pi(&pair, &theta).unwrap())
            .unwrap()
            .trivector;
        let ug = c.ug();
        let comm = |u: usize, v: usize| {
            let (x, y) = (ug.generator(u), ug.generator(v));
            let mut out = vec![int(0); m];
            for (w, s) in ug.mono_mul(&x, &y).iter() {
                if w.degree() == 1 {
                    out[w.as_slice().iter().position(|&e| e == 1).unwrap()] += s;
                }
            }
            for (w, s) in ug.mono_mul(&y, &x).iter() {
                if w.degree() == 1 {
                    out[w.as_slice().iter().position(|&e| e == 1).unwrap()] -= s;
                }
            }
            out
        };
        for a in 0..m {
            for b in 0..m {
                for cc in 0..m {
                    let mut cyb = int(0);
                    for u in 0..m {
                        for v in 0..m {
                            let k = comm(u, v);
                            cyb += &r[u][b] * &r[v][cc] * &k[a];
                            cyb += &r[a][u] * &r[v][cc] * &k[b];
                            cyb += &r[a][u] * &r[b][v] * &k[cc];
                        }
                    }
                    let got = t.component(&[Gen::X(a), Gen::X(b), Gen::X(cc)]);
                    if a != b && b != cc && a != cc {
                        assert_eq!(got, ring.constant(cyb), "{name} ({a},{b},{cc})");
                    }
                }
            }
        }
    }
}

#[test]
fn classical_limits_of_bundled_cocycles_are_poisson() {
    let mut checked = 0;
    for (twist, alg, _) in fixtures::TWISTS {
        let c = Context::exact(fixtures::algebra(alg).unwrap(), 2).unwrap();
        let f = fixtures::twist(&c, twist).unwrap();
        if !dyn_check(&c, &f).unwrap().passed() {
            continue;
        }
        checked += 1;
        let theta = classical_theta(&c, &f).unwrap();
        let rep = schouten_jacobi(c.pair(), &assemble_pi(c.pair(), &theta).unwrap()).unwrap();
        assert!(rep.passed(), "{twist}");
    }
    assert_eq!(checked, 4);
}

#[test]
fn symmetric_first_order_part_has_zero_limit() {
    let c = Context::exact(fixtures::algebra("sl2-cartan").unwrap(), 2).unwrap();
    let lam = CoeffRing::exact(1).var(0).unwrap();
    let e = MultiIndex::from_slice(&[0, 1, 0]);
    let f = gq_core::dynamical::DynTwist::unit_plus(&c, &[(1, lam, e.clone(), e)]).unwrap();
    assert!(classical_theta(&c, &f).unwrap().is_zero());
}

#[test]
fn antisymmetric_higher_degree_part_is_rejected() {
    let c = Context::exact(fixtures::algebra("abelian1").unwrap(), 2).unwrap();
    let one: Poly = CoeffRing::exact(1).one();
    let f = gq_core::dynamical::DynTwist::unit_plus(
        &c,
        &[(1, one, MultiIndex::from_slice(&[2]), MultiIndex::from_slice(&[1]))],
    )
    .unwrap();
    assert!(matches!(classical_theta(&c, &f), Err(gq_core::Error::NotBivector(_))));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn schouten_is_graded_symmetric(seeds in prop::collection::vec(0i64..5, 12), name in 0usize..7) {
        let name = fixtures::valid_algebra_names()[name];
        let pair = fixtures::algebra(name).unwrap();
        let a = random_multivector(&pair, 2, &seeds);
        let b = random_multivector(&pair, 1, &seeds[3..]);
        // [A,B] = −(−1)^{(p−1)(q−1)} [B,A]
        prop_assert_eq!(schouten(&pair, &a, &b).unwrap(), schouten(&pair, &b, &a).unwrap().scale(&int(-1)));
        let c = random_multivector(&pair, 2, &seeds[5..]);
        prop_assert_eq!(schouten(&pair, &a, &c).unwrap(), schouten(&pair, &c, &a).unwrap());
    }

    #[test]
    fn schouten_obeys_leibniz(seeds in prop::collection::vec(0i64..5, 12), name in 0usize..7) {
        let name = fixtures::valid_algebra_names()[name];
        let pair = fixtures::algebra(name).unwrap();
        let p = random_multivector(&pair, 2, &seeds);
        let q = random_multivector(&pair, 1, &seeds[2..]);
        let r = random_multivector(&pair, 1, &seeds[4..]);
        // [P, Q∧R] = [P,Q]∧R + (−1)^{(p−1)q} Q∧[P,R]
        let lhs = schouten(&pair, &p, &q.wedge(&r)).unwrap();
        let rhs = schouten(&pair, &p, &q).unwrap().wedge(&r).sub(&q.wedge(&schouten(&pair, &p, &r).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }
}
