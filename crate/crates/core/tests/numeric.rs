use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wallcross::numeric::*;

const REL_RATE_TOL: f64 = 0.01;
const PLEMELJ_TOL: f64 = 1e-6;

#[test]
fn halving_the_step_stays_within_estimate() {
    let c = C::new(1.0, 2.0);
    for r in [1.0, 2.0, 4.0] {
        for zeta in [C::new(0.3, 0.1), C::new(-1.0, 3.0), C::new(0.0, 0.0)] {
            let coarse = ray_integral(KernelConvention::Semiflat, c, 0.0, zeta, r, &QuadratureSpec::default()).unwrap();
            let fine_spec = QuadratureSpec { initial_step: 0.0625, ..QuadratureSpec::default() };
            let fine = ray_integral(KernelConvention::Semiflat, c, 0.0, zeta, r, &fine_spec).unwrap();
            let diff = (coarse.value - fine.value).norm();
            assert!(diff <= coarse.est_error + 1e-13 * coarse.value.norm(), "R={r} zeta={zeta}: {diff:e} vs {:e}", coarse.est_error);
        }
    }
}

#[test]
fn decay_rate_is_bessel() {
    let rs: Vec<f64> = (2..=8).map(f64::from).collect();
    for c in [C::new(1.0, 0.0), C::new(1.0, 2.0), C::new(0.5, -0.3)] {
        let rep = basic_decay(c, 0.0, C::new(0.3, 0.1), &rs).unwrap();
        let expected = -2.0 * PI * c.norm();
        assert!(((rep.bessel_fit.rate - expected) / expected).abs() < REL_RATE_TOL, "{c}: {}", rep.bessel_fit.rate);
        assert!((rep.free_fit.power + 0.5).abs() < 0.1, "{c}: power {}", rep.free_fit.power);
        for (r, v) in rs.iter().zip(&rep.values) {
            let bound = rep.bound_constant * (-2.0 * PI * r * c.norm()).exp() / (2.0 * PI * r * c.norm());
            assert!(v.value.norm() <= bound * (1.0 + 1e-12));
        }
    }
}

#[test]
fn arcs_vanish_at_the_ends() {
    let c = C::new(1.0, 2.0);
    for lr in [-8.0, -4.0, 4.0, 8.0] {
        let v = arc_integral(c, C::new(0.3, 0.1), lr, 0.2, 2.0).unwrap();
        assert!(v.value.norm() < 1e-6, "log radius {lr}: {}", v.value);
    }
    let near = arc_integral(c, C::new(0.3, 0.1), -1.0, 0.2, 2.0).unwrap().value.norm();
    let far = arc_integral(c, C::new(0.3, 0.1), -2.0, 0.2, 2.0).unwrap().value.norm();
    assert!(far < near);
}

#[test]
fn plemelj_jump_random_choices() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let gp = C::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
        let alpha = C::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
        let pairing = rng.gen_range(1..=3);
        let t = rng.gen_range(0.5..2.0);
        let rep = plemelj_check(gp, alpha, pairing, 1.0, t).unwrap();
        assert!(rep.discrepancy < PLEMELJ_TOL, "{rep:?}");
    }
    let rep = plemelj_check(C::new(1.0, 2.0), C::new(2.0, 1.0), 1, 3.0, 1.0).unwrap();
    assert!(rep.discrepancy < PLEMELJ_TOL);
}

#[test]
fn no_jump_without_pairing() {
    let rep = plemelj_check(C::new(1.0, 2.0), C::new(1.0, 2.0), 0, 3.0, 1.0).unwrap();
    assert_eq!(rep.numeric_jump, C::new(0.0, 0.0));
    assert_eq!(rep.algebraic_jump, C::new(0.0, 0.0));
}

#[test]
fn residue_identity_holds() {
    let rep = residue_identity(C::new(1.0, 2.0), C::new(2.0, 1.0), C::new(3.0, 2.0), C::new(2.0, 3.0), C::new(0.3, 0.1), 0.5).unwrap();
    assert!(rep.residual < 1e-8, "{rep:?}");
    assert!(rep.int3.norm() > 10.0 * rep.int1.norm());
}

#[test]
fn one_loop_rates_by_convention() {
    let rs: Vec<f64> = (2..=8).map(f64::from).collect();
    let z = C::new(3.0, 3.0);
    let semi = one_loop_jump_asymptotics(KernelConvention::Semiflat, z, &rs).unwrap();
    assert!((semi.rate_over_z + 2.0 * PI).abs() < 0.02 * 2.0 * PI);
    let ex = one_loop_jump_asymptotics(KernelConvention::Example, z, &rs).unwrap();
    assert!((ex.rate_over_z + 4.0 * PI).abs() < 0.02 * 4.0 * PI);
    assert!((semi.free_fit.power + 0.5).abs() < 0.05);
}

#[test]
fn reflection_conjugates() {
    let z = C::new(1.0, 0.7);
    let a = one_loop_term(KernelConvention::Semiflat, z, C::new(0.2, 0.4), 1.5).unwrap().value;
    let b = one_loop_term(KernelConvention::Semiflat, z.conj(), C::new(0.2, -0.4), 1.5).unwrap().value;
    // the 1/(4 pi i) prefactor flips sign under conjugation
    assert!((a + b.conj()).norm() < 1e-12 * a.norm());
}

#[test]
fn csv_reports() {
    let rep = basic_decay(C::new(1.0, 0.0), 0.0, C::new(0.3, 0.1), &[2.0, 3.0]).unwrap();
    let csv = rep.to_csv();
    assert!(csv.starts_with("R,value_re,value_im,est_error\n"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);
}
