//! End-to-end acceptance run: one line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gq_cli::{run, Command, RunConfig, Source};
use gq_core::classical::{assemble_pi, classical_theta, schouten_jacobi, Gen, Multivector};
use gq_core::dynamical::{
    bridge, build_gutt_twistor, check_equivalence, dyn_check, exchange_r, random_invariant_twists, DynTwist,
};
use gq_core::groupoid::{check_twisted_structures, check_twistor, twisted_product, HTensor, Leg};
use gq_core::lie::Polarization;
use gq_core::rational::{factorial, frac, int};
use gq_core::{fixtures, CoeffRing, Context, HbarSeries, MultiIndex, Poly, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ctx(name: &str, k: u32) -> Context {
    Context::exact(fixtures::algebra(name).unwrap(), k).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mono(c: &Context, e: &[u32]) -> Poly {
    c.ring().monomial(&MultiIndex::from_slice(e), int(1))
}

fn c1_jacobi() -> Outcome {
    for name in fixtures::valid_algebra_names() {
        let rep = fixtures::algebra(name).unwrap().check_jacobi();
        ensure(rep.passed(), || format!("{name} violates Jacobi"))?;
    }
    let rep = fixtures::algebra("sl2-corrupted").unwrap().check_jacobi();
    let named = rep.violations.iter().any(|v| v.names == ["h", "e", "f"]);
    ensure(!rep.passed() && named, || "corrupted sl2 not flagged on (h,e,f)".into())?;
    Ok(format!(
        "{} algebras pass, corrupted sl2 fails on (h, e, f)",
        fixtures::valid_algebra_names().len()
    ))
}

fn c2_pbw_star() -> Outcome {
    let mut triples = 0usize;
    for name in fixtures::valid_algebra_names() {
        let c = ctx(name, 4);
        let monos: Vec<Poly> = MultiIndex::all_up_to_degree(c.n(), 3)
            .iter()
            .map(|m| c.ring().monomial(m, int(1)))
            .collect();
        let series = |p: &Poly| HbarSeries::constant(4, p.clone());
        for a in &monos {
            for b in &monos {
                let ab = c.star(&series(a), &series(b)).unwrap();
                for d in &monos {
                    let lhs = c.star(&ab, &series(d)).unwrap();
                    let rhs = c.star(&series(a), &c.star(&series(b), &series(d)).unwrap()).unwrap();
                    ensure(lhs == rhs, || format!("{name}: associativity fails"))?;
                    triples += 1;
                }
            }
        }
        for i in 0..c.n() {
            for j in 0..c.n() {
                let (li, lj) = (c.ring().var(i).unwrap(), c.ring().var(j).unwrap());
                let comm = c.star_poly(&li, &lj).unwrap().sub(&c.star_poly(&lj, &li).unwrap());
                let expected = c.hbar_monomial(1, c.bracket_coordinate(i, j));
                ensure(comm == expected, || format!("{name}: [λ{i}, λ{j}]∗ wrong"))?;
            }
        }
    }
    let c = ctx("axb", 4);
    let (l1, l2, l22) = (mono(&c, &[1, 0]), mono(&c, &[0, 1]), mono(&c, &[0, 2]));
    let mut want = c.hbar_monomial(0, mono(&c, &[1, 1]));
    want.add_assign_ref(&c.hbar_monomial(1, l2.scale(&frac(1, 2))));
    ensure(c.pbw_star(&l1, &l2).unwrap() == want, || "λ1∗λ2 closed form".into())?;
    let mut want = c.hbar_monomial(0, mono(&c, &[1, 2]));
    want.add_assign_ref(&c.hbar_monomial(1, l22.clone()));
    ensure(c.pbw_star(&l1, &l22).unwrap() == want, || "λ1∗λ2² closed form".into())?;
    Ok(format!(
        "{triples} associative triples, coordinate brackets and ax+b closed forms exact"
    ))
}

fn c3_extraction() -> Outcome {
    let mut pairs = 0usize;
    for name in fixtures::valid_algebra_names() {
        let c = ctx(name, 3);
        let theta = c.theta_pbw().unwrap();
        let monos = MultiIndex::all_up_to_degree(c.n(), 5);
        for a in &monos {
            for b in &monos {
                let (pa, pb) = (c.ring().monomial(a, int(1)), c.ring().monomial(b, int(1)));
                let got = theta
                    .apply(
                        &HbarSeries::constant(3, pa.clone()),
                        &HbarSeries::constant(3, pb.clone()),
                    )
                    .unwrap();
                ensure(got == c.pbw_star(&pa, &pb).unwrap(), || {
                    format!("{name}: Θ misses {a:?} ⊗ {b:?}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("Θ_PBW reproduces ∗PBW on {pairs} monomial pairs of degree ≤ 5"))
}

fn c4_gutt() -> Outcome {
    for name in ["abelian1", "axb", "heisenberg", "sl2-borel"] {
        let c = ctx(name, 3);
        let rep = check_twistor(&c, &build_gutt_twistor(&c).unwrap()).unwrap();
        ensure(rep.passed() && rep.sharp_invertible, || {
            format!("{name}: Gutt twistor fails")
        })?;
    }
    let c = ctx("abelian1", 3);
    let mut expected = HTensor::zero(&c, 2);
    for k in 0..=3u32 {
        let legs = vec![
            Leg::new(MultiIndex::from_slice(&[k]), MultiIndex::from_slice(&[0])),
            Leg::new(MultiIndex::from_slice(&[0]), MultiIndex::from_slice(&[k])),
        ];
        expected.add_term(legs, &c.scalar_series(k, factorial(k).recip()));
    }
    ensure(*build_gutt_twistor(&c).unwrap() == expected, || {
        "abelian Gutt twistor is not the exponential".into()
    })?;
    Ok("cocycle and counit exact at K = 3 on 4 pairs, abelian case equals Σ ℏ^k/k! ∂^k⊗x^k".into())
}

fn c5_bridge() -> Outcome {
    let (mut cases, mut passes) = (0usize, 0usize);
    for name in fixtures::valid_algebra_names() {
        let c = ctx(name, 2);
        let unit = check_equivalence(&c, &DynTwist::unit(&c)).unwrap();
        ensure(unit.dyn_pass && unit.twistor_pass, || {
            format!("{name}: unit twist fails")
        })?;
        let twists = random_invariant_twists(&c, 2024, 21, 2, 2).unwrap();
        ensure(twists.len() >= 20, || {
            format!("{name}: only {} random twists", twists.len())
        })?;
        for f in &twists {
            let rep = check_equivalence(&c, f).unwrap();
            ensure(rep.agree, || format!("{name}: disagreement on\n{}", f.display(&c)))?;
            cases += 1;
            passes += rep.dyn_pass as usize;
        }
    }
    Ok(format!(
        "{cases} random l-invariant twists agree ({passes} satisfy both, the rest fail both), unit passes"
    ))
}

fn c6_twisted_structures() -> Outcome {
    let mut pairs = 0;
    for name in fixtures::valid_algebra_names() {
        let c = ctx(name, 2);
        let gutt = build_gutt_twistor(&c).unwrap();
        ensure(check_twisted_structures(&c, &gutt, 2).unwrap().passed(), || {
            format!("{name}: Gutt twisted structures")
        })?;
        let monos = MultiIndex::all_up_to_degree(c.n(), 2);
        for a in &monos {
            for b in &monos {
                let (pa, pb) = (c.ring().monomial(a, int(1)), c.ring().monomial(b, int(1)));
                let lhs = twisted_product(
                    &gutt,
                    &HbarSeries::constant(2, pa.clone()),
                    &HbarSeries::constant(2, pb.clone()),
                )
                .unwrap();
                ensure(lhs == c.pbw_star(&pa, &pb).unwrap(), || {
                    format!("{name}: ∗Gutt ≠ ∗PBW on Pol(l*)")
                })?;
            }
        }
        pairs += 1;
    }
    let c = ctx("oscillator", 2);
    let b = bridge(&c, &fixtures::twist(&c, "oscillator-exp-hz").unwrap()).unwrap();
    ensure(check_twistor(&c, &b).unwrap().passed(), || {
        "bridged oscillator twist is not a twistor".into()
    })?;
    ensure(check_twisted_structures(&c, &b, 2).unwrap().passed(), || {
        "bridged oscillator twisted structures".into()
    })?;
    Ok(format!(
        "Gutt twistor on {pairs} pairs and the bridged oscillator twist: all identities exact at K = 2"
    ))
}

fn c7_classical() -> Outcome {
    for name in fixtures::valid_algebra_names() {
        let pair = fixtures::algebra(name).unwrap();
        let zero = Multivector::zero(&CoeffRing::exact(pair.dim_l()));
        ensure(
            schouten_jacobi(&pair, &assemble_pi(&pair, &zero).unwrap())
                .unwrap()
                .passed(),
            || format!("{name}: θ = 0 fails"),
        )?;
    }
    let pair = fixtures::algebra("sl2-cartan").unwrap();
    let ring = CoeffRing::exact(1);
    let mut theta = Multivector::zero(&ring);
    theta.add_wedge(&[Gen::X(1), Gen::X(2)], &ring.one());
    let rep = schouten_jacobi(&pair, &assemble_pi(&pair, &theta).unwrap()).unwrap();
    let mut expected = Multivector::zero(&ring);
    expected.add_wedge(&[Gen::X(0), Gen::X(1), Gen::X(2)], &ring.one());
    ensure(rep.trivector == expected, || {
        format!("e∧f trivector is {}", rep.trivector.display(&pair))
    })?;
    let mut checked = 0;
    for (twist, alg, _) in fixtures::TWISTS {
        let c = ctx(alg, 2);
        let f = fixtures::twist(&c, twist).unwrap();
        if !dyn_check(&c, &f).unwrap().passed() {
            continue;
        }
        let theta = classical_theta(&c, &f).unwrap();
        ensure(
            schouten_jacobi(c.pair(), &assemble_pi(c.pair(), &theta).unwrap())
                .unwrap()
                .passed(),
            || format!("{twist}: θ fails"),
        )?;
        checked += 1;
    }
    Ok(format!(
        "θ = 0 Poisson on all pairs, θ = e∧f gives h∧e∧f, {checked} bundled cocycles give Poisson limits"
    ))
}

fn c8_polarization() -> Outcome {
    let pair = fixtures::algebra("sl2-cartan").unwrap();
    let pol = Polarization::new(&pair, vec![1], vec![2]).unwrap();
    let ring = CoeffRing::exact(1);
    let lh = ring.var(0).unwrap();
    let omega = vec![vec![ring.zero(), lh.clone()], vec![lh.neg(), ring.zero()]];
    ensure(pol.omega_matrix() == omega, || "sl2 ω(λ) wrong".into())?;
    let nd = pol.nondegeneracy();
    ensure(nd.det == lh.checked_mul(&lh).unwrap() && nd.nondegenerate(), || {
        "sl2 D(λ) ≠ λ_h²".into()
    })?;
    ensure(nd.witness == Some(vec![int(1)]), || "sl2 witness is not λ_h = 1".into())?;
    let heis = fixtures::algebra("heisenberg").unwrap();
    let nd = heis.polarization().unwrap().nondegeneracy();
    let l3 = CoeffRing::exact(1).var(0).unwrap();
    ensure(nd.det == l3.checked_mul(&l3).unwrap() && nd.nondegenerate(), || {
        "Heisenberg D(λ) ≠ λ3²".into()
    })?;
    let r = |v: &[i64]| v.iter().map(|&x| int(x)).collect::<Vec<Rational>>();
    let expected: [(&str, Vec<Vec<Rational>>); 7] = [
        ("abelian1", vec![r(&[1])]),
        ("axb", vec![r(&[1, 0])]),
        ("heisenberg", vec![r(&[1])]),
        ("sl2", vec![]),
        ("sl2-cartan", vec![r(&[1])]),
        ("sl2-borel", vec![r(&[1, 0])]),
        ("oscillator", vec![r(&[1, 0]), r(&[0, 1])]),
    ];
    for (name, basis) in expected {
        let got = fixtures::algebra(name).unwrap().character_locus();
        ensure(got == basis, || format!("{name}: character locus {got:?}"))?;
    }
    Ok("sl2 ω = [[0, λ_h], [−λ_h, 0]], D = λ_h², witness λ_h = 1; Heisenberg D = λ3²; 7 character loci".into())
}

fn c9_exchange() -> Outcome {
    let mut cases = 0;
    for name in fixtures::valid_algebra_names() {
        let c = ctx(name, 3);
        for f in random_invariant_twists(&c, 99, 4, 2, 2).unwrap() {
            let rep = exchange_r(&c, &f).unwrap();
            ensure(rep.round_trip_residual.is_zero(), || format!("{name}: F₂₁ ∗ R ≠ F"))?;
            cases += 1;
        }
    }
    let c = ctx("sl2-cartan", 3);
    let rep = exchange_r(&c, &fixtures::twist(&c, "sl2-cartan-ef").unwrap()).unwrap();
    ensure(rep.round_trip_residual.is_zero(), || "sl2-cartan-ef round trip".into())?;
    Ok(format!("F₂₁ ∗ R = F exact at K = 3 on {} twists", cases + 1))
}

fn c10_determinism() -> Outcome {
    let mut configs = Vec::new();
    let mut cfg = |cmd: Command, alg: &str, twist: Option<&str>, random: Option<usize>| {
        let mut rc = RunConfig::new(cmd);
        rc.algebra = Some(Source::Bundled(alg.into()));
        rc.twist = twist.map(|t| Source::Bundled(t.into()));
        rc.random = random;
        rc.seed = 17;
        configs.push(rc);
    };
    cfg(Command::Equivalence, "axb", None, Some(5));
    cfg(Command::ExchangeR, "sl2-borel", None, Some(3));
    cfg(Command::GuttTwistor, "heisenberg", None, None);
    cfg(Command::CheckDynTwist, "sl2-cartan", Some("sl2-cartan-ef"), None);
    cfg(Command::Polarization, "oscillator", None, None);
    cfg(Command::ClassicalLimit, "sl2-cartan", Some("sl2-cartan-ef"), None);
    for rc in &configs {
        let (a, b) = (run(rc).json_text(), run(rc).json_text());
        ensure(a == b, || format!("{} report differs between runs", rc.command.name()))?;
    }
    Ok(format!(
        "{} commands produce byte-identical JSON across runs",
        configs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Jacobi suite", c1_jacobi, 1),
        ("PBW star product", c2_pbw_star, 30),
        ("bidifferential extraction", c3_extraction, 60),
        ("Gutt twistor", c4_gutt, 120),
        ("dynamical twist / twistor equivalence", c5_bridge, 300),
        ("twisted structures", c6_twisted_structures, 180),
        ("classical limit", c7_classical, 60),
        ("polarization", c8_polarization, 1),
        ("exchange element", c9_exchange, 60),
        ("determinism", c10_determinism, 60),
    ];
    let mut failures = 0;
    for (i, (title, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= Duration::from_secs(*limit) {
                Ok(detail)
            } else {
                Err(format!("exceeded {limit} s"))
            }
        });
        match result {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {title} ({:.2} s): {detail}",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failures += 1;
                println!(
                    "criterion {:>2} FAIL  {title} ({:.2} s): {why}",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!("{}/10 criteria pass", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
