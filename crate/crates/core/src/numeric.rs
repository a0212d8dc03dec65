//! Floating-point checks of the ray integrals: decay of the basic integral, vanishing arcs,
//! the Plemelj jump across a ray, the one-loop residue term and the residue identity.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Result of one quadrature with the change between the last two refinements as error estimate.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct IntegralResult {
    pub value: Complex64,
    pub est_error: f64,
}

/// Trapezoid rule in the log variable `s`, refined by halving the step until two successive
/// values agree. The integrands decay like `exp(-a cosh s)`, for which this is spectrally accurate.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct QuadratureSpec {
    pub s_max: f64,
    pub initial_step: f64,
    pub max_halvings: u32,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { s_max: 8.0, initial_step: 0.25, max_halvings: 10, tol: 1e-13 }
    }
}

impl QuadratureSpec {
    pub fn integrate(&self, mut f: impl FnMut(f64) -> Complex64) -> Result<IntegralResult> {
        let mut h = self.initial_step;
        let n = (self.s_max / h).ceil() as i64;
        let mut sum: Complex64 = (-n..=n).map(|k| f(k as f64 * h)).sum();
        let mut prev = sum * h;
        let mut n = n;
        let mut err = f64::INFINITY;
        for _ in 0..self.max_halvings {
            // new nodes sit at odd multiples of h/2
            let odd: Complex64 = (-n..n).map(|k| f((k as f64 + 0.5) * h)).sum();
            sum += odd;
            h /= 2.0;
            n *= 2;
            let cur = sum * h;
            err = (cur - prev).norm();
            if !cur.re.is_finite() || !cur.im.is_finite() {
                return Err(Error::Numeric("non-finite quadrature value".into()));
            }
            if err <= self.tol * cur.norm().max(f64::MIN_POSITIVE) || err == 0.0 {
                return Ok(IntegralResult { value: cur, est_error: err });
            }
            prev = cur;
        }
        Err(Error::Numeric(format!("quadrature did not converge (last change {err:e} against {:e})", prev.norm())))
    }
}

/// Sign of the exponent: `exp(sign * k R (z^-1 c + z conj(c)))`, decaying along `-c` for the
/// semiflat convention and along `+c` for the one used in the worked example.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum KernelConvention {
    /// `exp(pi R (z^-1 Z + z conj Z))`, rays along `-Z`.
    Semiflat,
    /// `exp(-2 pi R (z^-1 Z + z conj Z))`, rays along `+Z`.
    Example,
}

impl KernelConvention {
    fn factor(self) -> f64 {
        match self {
            KernelConvention::Semiflat => PI,
            KernelConvention::Example => -2.0 * PI,
        }
    }

    /// Unit vector of the decaying ray for central charge `c`.
    fn ray(self, c: Complex64) -> Complex64 {
        match self {
            KernelConvention::Semiflat => -c / c.norm(),
            KernelConvention::Example => c / c.norm(),
        }
    }

    pub fn exponent(self, c: Complex64, r: f64, z: Complex64) -> Complex64 {
        (self.factor() * r * (c / z + z * c.conj())).exp()
    }
}

fn kernel(zp: Complex64, z: Complex64) -> Complex64 {
    (zp + z) / (zp - z)
}

fn on_ray(z: Complex64, dir: Complex64) -> bool {
    let w = z / dir;
    w.re > 0.0 && w.im.abs() <= 1e-12 * w.re
}

/// `int dz'/z' (z'+z)/(z'-z) exp(pi R (c/z' + z' conj c))` over `R_<0 e^(i psi) c`.
pub fn basic_integral(c: Complex64, psi: f64, zeta: Complex64, r: f64) -> Result<IntegralResult> {
    ray_integral(KernelConvention::Semiflat, c, psi, zeta, r, &QuadratureSpec::default())
}

/// Ray integral for either convention, with the ray rotated by `psi`.
pub fn ray_integral(
    conv: KernelConvention,
    c: Complex64,
    psi: f64,
    zeta: Complex64,
    r: f64,
    q: &QuadratureSpec,
) -> Result<IntegralResult> {
    if c.norm() == 0.0 {
        return Err(Error::ZeroCharge);
    }
    let dir = conv.ray(c) * Complex64::from_polar(1.0, psi);
    if on_ray(zeta, dir) {
        return Err(Error::Invalid("zeta lies on the integration ray".into()));
    }
    // z' = dir e^(s - log|c|) puts the saddle at s = 0
    let scale = 1.0 / c.norm();
    q.integrate(|s| {
        let zp = dir * (s.exp() * scale);
        kernel(zp, zeta) * conv.exponent(c, r, zp)
    })
}

/// `i int_{-eps}^{eps} dpsi (z'+z)/(z'-z) exp(pi R (c/z' + z' conj c))`, `z' = -e^(s + i psi) c`.
pub fn arc_integral(c: Complex64, zeta: Complex64, log_radius: f64, eps: f64, r: f64) -> Result<IntegralResult> {
    if eps == 0.0 {
        return Ok(IntegralResult { value: Complex64::new(0.0, 0.0), est_error: 0.0 });
    }
    let f = |psi: f64| {
        let zp = -Complex64::from_polar(log_radius.exp(), psi) * c;
        Complex64::i() * kernel(zp, zeta) * KernelConvention::Semiflat.exponent(c, r, zp)
    };
    gauss_legendre(f, -eps, eps)
}

/// Composite 2-point Gauss-Legendre on a doubling grid.
fn gauss_legendre(f: impl Fn(f64) -> Complex64, a: f64, b: f64) -> Result<IntegralResult> {
    let x = 1.0 / 3f64.sqrt();
    let rule = |n: usize| -> Complex64 {
        let h = (b - a) / n as f64;
        (0..n)
            .map(|k| {
                let m = a + (k as f64 + 0.5) * h;
                (f(m - x * h / 2.0) + f(m + x * h / 2.0)) * (h / 2.0)
            })
            .sum()
    };
    let mut n = 8;
    let mut prev = rule(n);
    for _ in 0..14 {
        n *= 2;
        let cur = rule(n);
        let err = (cur - prev).norm();
        if err <= 1e-12 * cur.norm() || err < 1e-300 {
            return Ok(IntegralResult { value: cur, est_error: err });
        }
        prev = cur;
    }
    Err(Error::Numeric("arc quadrature did not converge".into()))
}

/// Least-squares fit of `log|v| = a + b R` (and `+ p log R` when `with_power`).
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub power: f64,
}

pub fn fit_decay(rs: &[f64], values: &[f64], power: Option<f64>) -> DecayFit {
    let y: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    match power {
        Some(p) => {
            let y: Vec<f64> = y.iter().zip(rs).map(|(y, r)| y - p * r.ln()).collect();
            let (a, b) = linear_fit(rs, &y);
            DecayFit { rate: b, intercept: a, power: p }
        }
        None => {
            // three-parameter fit via normal equations on (1, R, log R)
            let cols: Vec<[f64; 3]> = rs.iter().map(|&r| [1.0, r, r.ln()]).collect();
            let mut m = [[0.0; 3]; 3];
            let mut v = [0.0; 3];
            for (c, yy) in cols.iter().zip(&y) {
                for i in 0..3 {
                    v[i] += c[i] * yy;
                    for j in 0..3 {
                        m[i][j] += c[i] * c[j];
                    }
                }
            }
            let s = solve3(m, v);
            DecayFit { rate: s[1], intercept: s[0], power: s[2] }
        }
    }
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> [f64; 3] {
    for c in 0..3 {
        let p = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, p);
        v.swap(c, p);
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                let pivot = m[c];
                for (x, p) in m[r].iter_mut().zip(pivot) {
                    *x -= f * p;
                }
                v[r] -= f * v[c];
            }
        }
    }
    [v[0] / m[0][0], v[1] / m[1][1], v[2] / m[2][2]]
}

/// Values of the basic integral on a grid of radii.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct DecayReport {
    pub rs: Vec<f64>,
    pub values: Vec<IntegralResult>,
    /// Fit with the Bessel prefactor `R^(-1/2)` removed.
    pub bessel_fit: DecayFit,
    /// Free fit of rate and prefactor power.
    pub free_fit: DecayFit,
    /// Smallest `C` with `|I(R)| <= C exp(-2 pi R |c|) / (2 pi R |c|)` on the grid.
    pub bound_constant: f64,
    /// `|I(R)| 2 pi R |c| exp(2 pi R |c|)` per radius.
    pub bound_ratios: Vec<f64>,
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("R,value_re,value_im,est_error\n");
        for (r, v) in self.rs.iter().zip(&self.values) {
            let _ = writeln!(s, "{r},{:e},{:e},{:e}", v.value.re, v.value.im, v.est_error);
        }
        let _ = writeln!(s, "# rate_bessel_corrected,{}", self.bessel_fit.rate);
        let _ = writeln!(s, "# rate_free,{},power_free,{}", self.free_fit.rate, self.free_fit.power);
        let _ = writeln!(s, "# bound_constant,{}", self.bound_constant);
        s
    }
}

pub fn basic_decay(c: Complex64, psi: f64, zeta: Complex64, rs: &[f64]) -> Result<DecayReport> {
    let values = rs.iter().map(|&r| basic_integral(c, psi, zeta, r)).collect::<Result<Vec<_>>>()?;
    let mags: Vec<f64> = values.iter().map(|v| v.value.norm()).collect();
    let ratios: Vec<f64> =
        rs.iter().zip(&mags).map(|(r, m)| m * 2.0 * PI * r * c.norm() * (2.0 * PI * r * c.norm()).exp()).collect();
    Ok(DecayReport {
        rs: rs.to_vec(),
        bessel_fit: fit_decay(rs, &mags, Some(-0.5)),
        free_fit: fit_decay(rs, &mags, None),
        bound_constant: ratios.iter().cloned().fold(0.0, f64::max),
        bound_ratios: ratios,
        values,
    })
}

/// First-order comparison of the jump of `Phi(psi^0)_alpha` across the ray of `gp` with the
/// algebraic factor `(1 - s psi^0_gp)^(Omega <gp, alpha>)`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct PlemeljReport {
    pub numeric_jump: Complex64,
    pub algebraic_jump: Complex64,
    pub discrepancy: f64,
}

/// `z_gp`, `z_alpha`: central charges; `pairing = Omega(gp) <gp, alpha>`; `t` positions the
/// point `zeta_0 = -t z_gp / |z_gp|` on the ray.
pub fn plemelj_check(z_gp: Complex64, z_alpha: Complex64, pairing: i64, r: f64, t: f64) -> Result<PlemeljReport> {
    let conv = KernelConvention::Semiflat;
    let zeta0 = conv.ray(z_gp) * t;
    let theta = 0.3;
    let q = QuadratureSpec::default();
    // limits from the counterclockwise (+) and clockwise (-) side: rotate the ray away from zeta_0
    let plus = ray_integral(conv, z_gp, -theta, zeta0, r, &q)?;
    let minus = ray_integral(conv, z_gp, theta, zeta0, r, &q)?;
    let rho = 1.0 / (4.0 * PI * Complex64::i());
    let semiflat_alpha = conv.exponent(z_alpha, r, zeta0);
    // degree-one part of Phi_alpha is -s * pairing * J(zeta) * psi^0_alpha
    let numeric = -(pairing as f64) * (plus.value - minus.value) * rho * semiflat_alpha;
    let algebraic = -(pairing as f64) * conv.exponent(z_gp, r, zeta0) * semiflat_alpha;
    let scale = algebraic.norm().max(numeric.norm());
    let discrepancy = if scale == 0.0 { 0.0 } else { (numeric - algebraic).norm() / scale };
    Ok(PlemeljReport { numeric_jump: numeric, algebraic_jump: algebraic, discrepancy })
}

/// The residue term of the two-vertex chain at the critical configuration,
/// `int_{ray of Z} rho dz'/z' (z'+z)/(z'-z) e(z')`, with `rho = 1/(4 pi i)`.
pub fn one_loop_term(conv: KernelConvention, z0: Complex64, zeta: Complex64, r: f64) -> Result<IntegralResult> {
    let rho = 1.0 / (4.0 * PI * Complex64::i());
    let v = ray_integral(conv, z0, 0.0, zeta, r, &QuadratureSpec::default())?;
    Ok(IntegralResult { value: v.value * rho, est_error: v.est_error * rho.norm() })
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct AsymptoticsReport {
    pub z_norm: f64,
    pub rs: Vec<f64>,
    pub values: Vec<IntegralResult>,
    pub free_fit: DecayFit,
    pub bessel_fit: DecayFit,
    /// `rate / |Z|`, to compare with `-pi`, `-2 pi`, `-4 pi`.
    pub rate_over_z: f64,
}

impl AsymptoticsReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("R,value_re,value_im,est_error\n");
        for (r, v) in self.rs.iter().zip(&self.values) {
            let _ = writeln!(s, "{r},{:e},{:e},{:e}", v.value.re, v.value.im, v.est_error);
        }
        let _ = writeln!(s, "# rate_bessel_corrected,{},rate_over_abs_z,{}", self.bessel_fit.rate, self.rate_over_z);
        let _ = writeln!(s, "# rate_free,{},power_free,{}", self.free_fit.rate, self.free_fit.power);
        s
    }
}

/// Decay of the one-loop jump `f(zeta -> 0, R)` for `Z^0(gamma + eta) = z0`.
pub fn one_loop_jump_asymptotics(conv: KernelConvention, z0: Complex64, rs: &[f64]) -> Result<AsymptoticsReport> {
    let zeta = Complex64::new(0.0, 0.0);
    let values = rs.iter().map(|&r| one_loop_term(conv, z0, zeta, r)).collect::<Result<Vec<_>>>()?;
    let mags: Vec<f64> = values.iter().map(|v| v.value.norm()).collect();
    let bessel_fit = fit_decay(rs, &mags, Some(-0.5));
    Ok(AsymptoticsReport {
        z_norm: z0.norm(),
        rs: rs.to_vec(),
        free_fit: fit_decay(rs, &mags, None),
        rate_over_z: bessel_fit.rate / z0.norm(),
        bessel_fit,
        values,
    })
}

/// The three integrals of the worked example for the chain `gamma -> eta`, all with kernel
/// `rho = 1/(4 pi i)` and exponents `exp(-2 pi R (z^-1 Z^+ + z conj Z^+))`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct ResidueIdentityReport {
    /// Both rays along `Z^+`.
    pub int1: Complex64,
    /// Both rays along `Z^-`.
    pub int2: Complex64,
    /// Single ray along `Z^-(gamma + eta)` with `Z^+(gamma + eta)` in the exponent.
    pub int3: Complex64,
    pub est_error: f64,
    /// `|int1 - int2 - int3| / |int1|`.
    pub residual: f64,
}

pub fn residue_identity(
    zp_gamma: Complex64,
    zp_eta: Complex64,
    zm_gamma: Complex64,
    zm_eta: Complex64,
    zeta: Complex64,
    r: f64,
) -> Result<ResidueIdentityReport> {
    let conv = KernelConvention::Example;
    let rho = 1.0 / (4.0 * PI * Complex64::i());
    let q = QuadratureSpec { tol: 1e-11, ..QuadratureSpec::default() };
    let chain = |dir_g: Complex64, dir_e: Complex64| -> Result<IntegralResult> {
        let ug = dir_g / dir_g.norm();
        let ue = dir_e / dir_e.norm();
        let sg = 1.0 / zp_gamma.norm();
        let se = 1.0 / zp_eta.norm();
        let mut failure = None;
        let outer = q.integrate(|s| {
            let zi = ug * (s.exp() * sg);
            let inner = q.integrate(|u| {
                let zj = ue * (u.exp() * se);
                kernel(zj, zi) * conv.exponent(zp_eta, r, zj)
            });
            match inner {
                Ok(v) => rho * kernel(zi, zeta) * conv.exponent(zp_gamma, r, zi) * rho * v.value,
                Err(e) => {
                    failure = Some(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            }
        });
        match failure {
            Some(e) => Err(e),
            None => outer,
        }
    };
    let i1 = chain(zp_gamma, zp_eta)?;
    let i2 = chain(zm_gamma, zm_eta)?;
    let zsum = zp_gamma + zp_eta;
    let dir = zm_gamma + zm_eta;
    let us = dir / dir.norm();
    let i3 = q.integrate(|s| {
        let z = us * (s.exp() / zsum.norm());
        rho * kernel(z, zeta) * conv.exponent(zsum, r, z)
    })?;
    let residual = (i1.value - i2.value - i3.value).norm() / i1.value.norm();
    Ok(ResidueIdentityReport {
        int1: i1.value,
        int2: i2.value,
        int3: i3.value,
        est_error: i1.est_error + i2.est_error + i3.est_error,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_symmetry() {
        let c = Complex64::new(1.0, 0.5);
        let z = Complex64::new(0.2, 0.9);
        let a = basic_integral(c, 0.0, z, 2.0).unwrap().value;
        let b = basic_integral(c.conj(), 0.0, z.conj(), 2.0).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn on_ray_rejected() {
        let c = Complex64::new(1.0, 0.0);
        assert!(basic_integral(c, 0.0, Complex64::new(-2.0, 0.0), 1.0).is_err());
    }
}
