use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wallcross::lattice::{CentralChargeConfig, Charge, WeightVector};
use wallcross::ring::{int, rat, Series, TruncatedRingSpec};
use wallcross::scattering::*;
use wallcross::torus_algebra::*;

fn positive_charges(l1: usize, l2: usize, k: i64) -> Vec<Charge> {
    let n = l1 + l2;
    let mut out = Vec::new();
    let mut c = vec![0i64; n];
    loop {
        let mut i = 0;
        while i < n && c[i] == k {
            c[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        c[i] += 1;
        out.push(Charge::from_coords(l1, &c));
    }
    out
}

/// Random Plus-side input: a few charges with `Omega` in -2..=2 and `sigma = (s,t)^a`.
fn random_input(rng: &mut ChaCha8Rng, alg: &TorusAlgebra, k: i64) -> TorusAutomorphism {
    let l = alg.lattice;
    let mut pool = positive_charges(l.l1, l.l2, k);
    pool.retain(|a| {
        let r = a.reduce();
        r.x > 0 || r.y > 0
    });
    let mut parts: Vec<(Charge, BigRational, Series<BigRational>)> = Vec::new();
    let mut used = std::collections::BTreeSet::new();
    for _ in 0..rng.gen_range(1..=4) {
        let a = pool[rng.gen_range(0..pool.len())].clone();
        let dir = a.reduce().primitive().unwrap();
        if !used.insert(dir) {
            continue;
        }
        let om = [-2, -1, 1, 2][rng.gen_range(0..4)];
        let sigma = Series::term(alg.st_monomial(&a).unwrap(), rat(1, 1));
        parts.push((a, int(om), sigma));
    }
    compose_ordered(alg, &CentralChargeConfig::plus(), &parts).unwrap()
}

#[test]
fn random_spectra_recompose_and_are_unique() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut runs = 0;
    for case in 0..60 {
        let (l1, l2, k) = if case % 3 == 0 { (2, 1, 2) } else { (1, 1, 3) };
        let kappa = 1 + (case % 2) as i64;
        let alg = TorusAlgebra::standard(TruncatedRingSpec::new(l1, l2, k as u32).unwrap(), kappa);
        let s = random_input(&mut rng, &alg, k);
        let minus = factorize(&alg, &s, &CentralChargeConfig::minus()).unwrap();
        assert_eq!(alg.extensional(&minus.to_automorphism()), alg.extensional(&s), "case {case}");
        let order: Vec<usize> = (0..alg.lattice.rank()).rev().collect();
        let other = factorize_with_order(&alg, &s, &CentralChargeConfig::minus(), &order).unwrap();
        assert_eq!(other.factors, minus.factors, "case {case}");
        // crossing back recovers the incoming rays
        let back = factorize(&alg, &minus.to_automorphism(), &CentralChargeConfig::plus()).unwrap();
        let again = factorize(&alg, &s, &CentralChargeConfig::plus()).unwrap();
        assert_eq!(back.factors, again.factors, "case {case}");
        runs += 1;
    }
    assert!(runs >= 50);
}

#[test]
fn pentagon_exact() {
    let alg = TorusAlgebra::standard(TruncatedRingSpec::new(1, 1, 2).unwrap(), 1);
    let s = incoming_product(&alg, &generator_spectrum(&alg.lattice)).unwrap();
    let res = factorize(&alg, &s, &CentralChargeConfig::minus()).unwrap();
    let l = alg.lattice;
    let ge = &l.gamma(0, 1) + &l.eta(0, 1);
    assert_eq!(res.omega.support().len(), 3);
    for a in [l.gamma(0, 1), l.eta(0, 1), ge] {
        assert_eq!(res.omega.get(&a), 1);
    }
    assert_eq!(generator_omegas(&res, &l), vec![1, 1]);
}

#[test]
fn critical_configuration_rejected() {
    let alg = TorusAlgebra::standard(TruncatedRingSpec::new(1, 1, 2).unwrap(), 1);
    let s = incoming_product(&alg, &generator_spectrum(&alg.lattice)).unwrap();
    assert!(factorize(&alg, &s, &CentralChargeConfig::critical()).is_err());
}

#[test]
fn kronecker_spectrum() {
    let alg = TorusAlgebra::standard(TruncatedRingSpec::new(1, 1, 3).unwrap(), 2);
    let s = incoming_product(&alg, &generator_spectrum(&alg.lattice)).unwrap();
    let res = factorize(&alg, &s, &CentralChargeConfig::minus()).unwrap();
    let c = |a, b| Charge::new(vec![a], vec![b]);
    assert_eq!(res.omega.get(&c(1, 1)), -2);
    assert_eq!(res.omega.get(&c(1, 2)), 1);
    assert_eq!(res.omega.get(&c(2, 1)), 1);
    assert_eq!(res.omega.get(&c(2, 2)), 0);
    assert_eq!(res.omega.get(&c(2, 3)), 1);
    assert_eq!(res.omega.get(&c(3, 2)), 1);
}

#[test]
fn deformed_counts() {
    let cases = [("1,1", 1, rat(1, 1)), ("1,2", 1, rat(1, 2)), ("1+1,1+2", 1, rat(2, 1)), ("1,1+1", 1, rat(1, 1)), ("1,1", 2, rat(2, 1))];
    for (w, kappa, v) in cases {
        let w = WeightVector::parse(w).unwrap();
        assert_eq!(gps_deformed_count(&w, kappa).unwrap(), v, "{w} kappa {kappa}");
    }
    assert!(gps_deformed_count(&WeightVector::parse("1,1").unwrap(), 0).is_err());
}

#[test]
fn theta_functions_of_pentagon() {
    let alg = TorusAlgebra::standard(TruncatedRingSpec::new(1, 1, 2).unwrap(), 1);
    let s = incoming_product(&alg, &generator_spectrum(&alg.lattice)).unwrap();
    let res = factorize(&alg, &s, &CentralChargeConfig::minus()).unwrap();
    let th = specialize_theta(&alg, &res.to_automorphism()).unwrap();
    assert_eq!(th.len(), 3);
}
