use num_rational::BigRational;
use proptest::prelude::*;
use wallcross::lattice::Charge;
use wallcross::ring::{rat, Monomial, Series, TruncatedRingSpec};
use wallcross::torus_algebra::*;

fn alg(kappa: i64) -> TorusAlgebra {
    TorusAlgebra::standard(TruncatedRingSpec::new(1, 1, 2).unwrap(), kappa)
}

fn coef() -> impl Strategy<Value = BigRational> {
    (-3i64..=3, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn series(nilpotent: bool) -> impl Strategy<Value = Series<BigRational>> {
    prop::collection::vec(((0u32..=2, 0u32..=2), coef()), 1..4).prop_map(move |ts| {
        let mut s = Series::zero();
        for ((i, j), c) in ts {
            if nilpotent && i + j == 0 {
                continue;
            }
            s.add_term(Monomial::from_exponents(&[i, j]), &c);
        }
        s
    })
}

fn charge(positive: bool) -> impl Strategy<Value = Charge> {
    let lo = if positive { 0 } else { -2 };
    (lo..=2i64, lo..=2i64)
        .prop_filter("nonzero", move |(a, b)| !positive || (*a, *b) != (0, 0))
        .prop_map(|(a, b)| Charge::new(vec![a], vec![b]))
}

fn element() -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec((charge(false), series(false)), 1..4).prop_map(|ts| {
        let mut x = Element::zero();
        for (a, c) in ts {
            x.add_term(a, &c);
        }
        x
    })
}

fn hamiltonian() -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec((charge(true), series(true)), 1..3).prop_map(|ts| {
        let mut x = Element::zero();
        for (a, c) in ts {
            x.add_term(a, &c);
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_is_associative(x in element(), y in element(), z in element(), kappa in 1i64..=3) {
        let a = alg(kappa);
        prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
    }

    #[test]
    fn bracket_satisfies_jacobi(x in element(), y in element(), z in element(), kappa in 1i64..=3) {
        let a = alg(kappa);
        let j = a.bracket(&x, &a.bracket(&y, &z))
            .add(&a.bracket(&y, &a.bracket(&z, &x)))
            .add(&a.bracket(&z, &a.bracket(&x, &y)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn hamiltonian_flow_is_an_automorphism(h in hamiltonian(), x in element(), y in element(), kappa in 1i64..=2) {
        let a = alg(kappa);
        let lhs = a.apply_hamiltonian(&h, &a.mul(&x, &y));
        let rhs = a.mul(&a.apply_hamiltonian(&h, &x), &a.apply_hamiltonian(&h, &y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dilog_factor_inverts(c in charge(true), om in -2i64..=2, x in element()) {
        let a = alg(1);
        let m = a.st_monomial(&c);
        prop_assume!(m.is_some());
        let f = Factor::dilog(&a, c, BigRational::from_integer(om.into()), Series::term(m.unwrap(), rat(1, 1))).unwrap();
        let u = TorusAutomorphism { factors: vec![f] };
        prop_assert_eq!(a.apply(&u.inverse(), &a.apply(&u, &x)), x);
    }
}

#[test]
fn twisted_product_signs() {
    let a = alg(1);
    let g = a.lattice.gamma(0, 1);
    let e = a.lattice.eta(0, 1);
    let ge = &g + &e;
    assert_eq!(a.mul(&a.e(&g), &a.e(&e)), a.e(&ge).scale(&rat(-1, 1)));
    assert_eq!(a.mul(&a.e(&e), &a.e(&g)), a.e(&ge).scale(&rat(-1, 1)));
    assert_eq!(a.bracket(&a.e(&g), &a.e(&e)), a.e(&ge).scale(&rat(-1, 1)));
}

#[test]
fn dt_omega_round_trip() {
    let a = alg(1);
    let mut sp = Spectrum::new();
    sp.set(a.lattice.gamma(0, 1), 1);
    sp.set(&a.lattice.gamma(0, 1) + &a.lattice.eta(0, 1), -2);
    let g2 = a.lattice.gamma(0, 2);
    assert_eq!(dt_from_omega(&sp, &g2).unwrap(), rat(1, 4));
    let mut dt = std::collections::BTreeMap::new();
    for c in [a.lattice.gamma(0, 1), g2, &a.lattice.gamma(0, 1) + &a.lattice.eta(0, 1)] {
        dt.insert(c.clone(), dt_from_omega(&sp, &c).unwrap());
    }
    let back = omega_from_dt(&dt).unwrap();
    assert_eq!(back.get(&a.lattice.gamma(0, 1)), 1);
    assert_eq!(back.get(&a.lattice.gamma(0, 2)), 0);
    assert_eq!(back.get(&(&a.lattice.gamma(0, 1) + &a.lattice.eta(0, 1))), -2);
}
