//! Factorization of the incoming Stokes product into Minus-ordered rays, and the
//! nilpotent-deformation count of tropical curves.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{CentralChargeConfig, Charge, Lattice, ReducedCharge, Side, WeightVector};
use crate::ring::{int, rat, Monomial, Ring, Series};
use crate::torus_algebra::{
    omega_from_dt, AlgebraElement, Extensional, Factor, Spectrum, TorusAlgebra, TorusAutomorphism,
};

/// The Stokes data of a single ray on the Minus side.
#[derive(Clone, PartialEq, Debug)]
pub struct RayData {
    pub direction: ReducedCharge,
    pub hamiltonian: AlgebraElement,
}

#[derive(Clone, PartialEq, Debug)]
pub struct FactorizationResult {
    /// Clockwise order for the Minus configuration.
    pub factors: Vec<RayData>,
    /// Filled when coefficients are monomials `(s,t)^a`, i.e. over the standard ring.
    pub dt: BTreeMap<Charge, BigRational>,
    pub omega: Spectrum,
}

impl FactorizationResult {
    pub fn to_automorphism(&self) -> TorusAutomorphism {
        TorusAutomorphism { factors: self.factors.iter().map(|r| Factor::Ray(r.hamiltonian.clone())).collect() }
    }

    pub fn ray(&self, d: &ReducedCharge) -> Option<&RayData> {
        self.factors.iter().find(|r| r.direction == *d)
    }

    pub fn to_json(&self, ring: &Ring) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row {
            charge: Charge,
            numerator: String,
            denominator: String,
        }
        let dt: Vec<Row> = self
            .dt
            .iter()
            .map(|(a, v)| Row { charge: a.clone(), numerator: v.numer().to_string(), denominator: v.denom().to_string() })
            .collect();
        let rays: Vec<serde_json::Value> = self
            .factors
            .iter()
            .map(|r| serde_json::json!({"direction": r.direction, "hamiltonian": r.hamiltonian.to_json(ring)}))
            .collect();
        serde_json::json!({"rays": rays, "dt": dt, "omega": self.omega.omega.iter().map(|(a, v)| (a.to_string(), v)).collect::<BTreeMap<_, _>>()})
    }
}

/// Incoming product on the Plus side: gamma-factors then eta-factors, i.e. `S = (gammas) o (etas)`.
pub fn incoming_product(alg: &TorusAlgebra, spectrum: &Spectrum) -> Result<TorusAutomorphism> {
    let l = alg.lattice;
    let mut gammas = Vec::new();
    let mut etas = Vec::new();
    for a in spectrum.support() {
        let pos = if a.is_positive() { a.clone() } else { -&a };
        let om = spectrum.get(&a);
        if let Some((1, i)) = pos.as_gamma_multiple() {
            gammas.push(Factor::dilog(alg, pos.clone(), int(om), alg.ring.var(i))?);
        } else if let Some((1, j)) = pos.as_eta_multiple() {
            etas.push(Factor::dilog(alg, pos.clone(), int(om), alg.ring.var(l.l1 + j))?);
        } else {
            return Err(Error::Invalid(format!("incoming spectrum supported on {a}, not a generator")));
        }
    }
    gammas.extend(etas);
    Ok(TorusAutomorphism { factors: gammas })
}

/// Factorize with the default generator order.
pub fn factorize(alg: &TorusAlgebra, s_plus: &TorusAutomorphism, config_minus: &CentralChargeConfig) -> Result<FactorizationResult> {
    let order: Vec<usize> = (0..alg.lattice.rank()).collect();
    factorize_with_order(alg, s_plus, config_minus, &order)
}

/// Degree by degree: the lowest-degree discrepancy between the target and the current
/// ray product is additive, and each charge is read off from the first generator it pairs with
/// in `basis_order`.
pub fn factorize_with_order(
    alg: &TorusAlgebra,
    s_plus: &TorusAutomorphism,
    config_minus: &CentralChargeConfig,
    basis_order: &[usize],
) -> Result<FactorizationResult> {
    if config_minus.side == Side::Critical {
        return Err(Error::DegenerateConfig("factorization needs a non-critical configuration".into()));
    }
    let target = alg.extensional(s_plus);
    let basis = alg.lattice.basis();
    let mut rays: BTreeMap<ReducedCharge, AlgebraElement> = BTreeMap::new();
    for g in 1..=alg.ring.max_degree() {
        let p = ray_product(alg, &rays, config_minus);
        let mut done = BTreeSet::new();
        for &i in basis_order {
            let d = target.images[i].sub(&p.images[i]).homogeneous(g);
            for (a, c) in &d.terms {
                if done.contains(a) {
                    continue;
                }
                let pr = alg.lattice.pairing(a, &basis[i]);
                if pr == 0 {
                    continue;
                }
                if !a.is_positive() {
                    return Err(Error::Internal(format!("correction on non-positive charge {a}")));
                }
                done.insert(a.clone());
                let dir = a.reduce().primitive()?;
                rays.entry(dir).or_default().add_term(a.clone(), &c.scale(&rat(1, pr)));
            }
        }
    }
    rays.retain(|_, h| !h.is_zero());
    let p = ray_product(alg, &rays, config_minus);
    if p != target {
        return Err(Error::Internal("recomposed product differs from the input".into()));
    }
    let mut dirs: Vec<ReducedCharge> = rays.keys().copied().collect();
    dirs.sort_by(|a, b| config_minus.cmp_clockwise(a, b));
    let factors: Vec<RayData> =
        dirs.into_iter().map(|d| RayData { direction: d, hamiltonian: rays.remove(&d).unwrap() }).collect();
    let dt = extract_dt(alg, &factors);
    let omega = if dt.is_empty() { Spectrum::new() } else { omega_from_dt(&dt)? };
    Ok(FactorizationResult { factors, dt, omega })
}

fn ray_product(alg: &TorusAlgebra, rays: &BTreeMap<ReducedCharge, AlgebraElement>, config: &CentralChargeConfig) -> Extensional {
    let mut dirs: Vec<&ReducedCharge> = rays.keys().collect();
    dirs.sort_by(|a, b| config.cmp_clockwise(a, b));
    let mut p = alg.identity_ext();
    for d in dirs {
        p = alg.compose(&p, &alg.hamiltonian_ext(&rays[d]));
    }
    p
}

/// `DT(a) = -[coefficient of (s,t)^a in h_a]` when every coefficient is that single monomial.
fn extract_dt(alg: &TorusAlgebra, factors: &[RayData]) -> BTreeMap<Charge, BigRational> {
    let mut out = BTreeMap::new();
    if alg.ring.nvars() != alg.lattice.rank() {
        return out;
    }
    for r in factors {
        for (a, c) in &r.hamiltonian.terms {
            match alg.st_monomial(a) {
                Some(m) if c.terms.len() == 1 && c.terms.contains_key(&m) => {
                    out.insert(a.clone(), -c.coeff(&m));
                }
                _ => return BTreeMap::new(),
            }
        }
    }
    out
}

/// Pentagon-type incoming data with all `Omega(gamma_i) = Omega(eta_j) = 1`.
pub fn generator_spectrum(l: &Lattice) -> Spectrum {
    Spectrum::generators(l)
}

/// Ring and lattice for the deformation: `eps` with `eps^(l1+l2+1) = 0`, then one
/// square-zero variable per unit of each part.
pub fn deformed_algebra(w: &WeightVector, kappa: i64) -> Result<(TorusAlgebra, Vec<Vec<usize>>)> {
    let parts: Vec<u32> = w.parts().copied().collect();
    let nvars = 1 + parts.iter().sum::<u32>() as usize;
    if nvars > crate::ring::MAX_VARS {
        return Err(Error::Invalid(format!("weight vector {w} needs {nvars} variables, more than supported")));
    }
    let mut caps = vec![parts.len() as u32];
    let mut names = vec!["eps".to_string()];
    let mut families = Vec::new();
    let mut idx = 1;
    for (f, &p) in parts.iter().enumerate() {
        let (pre, k) = if f < w.w1.len() { ("u", f + 1) } else { ("v", f + 1 - w.w1.len()) };
        let vars: Vec<usize> = (idx..idx + p as usize).collect();
        for r in 0..p as usize {
            caps.push(1);
            names.push(format!("{pre}{k}_{}", r + 1));
        }
        idx += p as usize;
        families.push(vars);
    }
    let ring = Ring::new(caps, names)?;
    Ok((TorusAlgebra::new(ring, Lattice::new(w.w1.len(), w.w2.len(), kappa)), families))
}

/// The coefficient of `eps^(l1+l2) prod u prod v` in `DT_{Z^-}(sum w_1i gamma_i + sum w_2j eta_j)`,
/// with one generator family per part of `w`.
pub fn deformed_dt(w: &WeightVector, kappa: i64) -> Result<BigRational> {
    if w.w1.is_empty() || w.w2.is_empty() {
        return Ok(BigRational::zero());
    }
    let (alg, families) = deformed_algebra(w, kappa)?;
    let l = alg.lattice;
    let eps: Series<BigRational> = alg.ring.var(0);
    let mut factors = Vec::new();
    for (f, vars) in families.iter().enumerate() {
        let mut sigma = Series::zero();
        for &v in vars {
            sigma.add_assign(&alg.ring.var(v));
        }
        let charge = if f < l.l1 { l.gamma(f, 1) } else { l.eta(f - l.l1, 1) };
        factors.push(Factor::Dilog { charge, omega: eps.clone(), sigma });
    }
    let s_plus = TorusAutomorphism { factors };
    let res = factorize(&alg, &s_plus, &CentralChargeConfig::minus())?;
    let coords: Vec<i64> = w.parts().map(|&p| p as i64).collect();
    let target = Charge::from_coords(l.l1, &coords);
    let mut exps = vec![w.num_parts() as u32];
    exps.extend(std::iter::repeat_n(1, alg.ring.nvars() - 1));
    let m = Monomial::from_exponents(&exps);
    let dir = target.reduce().primitive()?;
    let h = res.ray(&dir).map(|r| r.hamiltonian.coeff(&target)).unwrap_or_default();
    let fact: BigInt = w.parts().map(|&p| (1..=p as i64).product::<i64>()).map(BigInt::from).product();
    Ok(-h.coeff(&m) / BigRational::from_integer(fact))
}

/// Sign relating the twisted deformed DT coefficient to the positive tropical side:
/// `(-1)^(kappa |w1| |w2|)` from the twist `e_a e_b = (-1)^<a,b> e_{a+b}` and
/// `(-1)^(l1+l2-1)` from the `(1 - sigma e)` inputs against `log f = -DT`.
pub fn deformed_sign(w: &WeightVector, kappa: i64) -> i64 {
    let parity = kappa * w.total1() * w.total2() + w.num_parts() as i64 - 1;
    if parity.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `kappa^(l1+l2-1) prod 1/w_ij^2 N^trop(w)`, read off from the deformed factorization.
pub fn gps_deformed_count(w: &WeightVector, kappa: i64) -> Result<BigRational> {
    if kappa < 1 {
        return Err(Error::Invalid("kappa must be positive".into()));
    }
    Ok(deformed_dt(w, kappa)? * int(deformed_sign(w, kappa)))
}

/// A function attached to a ray after `e_(a gamma + b eta) -> (-1)^(kappa a b) x^b y^a`.
#[derive(Clone, PartialEq, Debug)]
pub struct ThetaDatum {
    pub direction: ReducedCharge,
    /// Keyed by `(x exponent, y exponent)`.
    pub f: BTreeMap<(i64, i64), Series<BigRational>>,
}

fn theta_mul(ring: &Ring, a: &BTreeMap<(i64, i64), Series<BigRational>>, b: &BTreeMap<(i64, i64), Series<BigRational>>) -> BTreeMap<(i64, i64), Series<BigRational>> {
    let mut out: BTreeMap<(i64, i64), Series<BigRational>> = BTreeMap::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let c = ring.mul(ca, cb);
            if c.is_zero() {
                continue;
            }
            let k = (ka.0 + kb.0, ka.1 + kb.1);
            let slot = out.entry(k).or_default();
            slot.add_assign(&c);
            if slot.is_zero() {
                out.remove(&k);
            }
        }
    }
    out
}

/// Rewrite each factor as a commuting theta-operator datum `(d, f_d)` with
/// `log f_d = sum_a m_a h_a (-1)^(kappa a_gamma a_eta) x^(a_eta) y^(a_gamma)`, where `a = m_a d`.
pub fn specialize_theta(alg: &TorusAlgebra, u: &TorusAutomorphism) -> Result<Vec<ThetaDatum>> {
    let mut out = Vec::new();
    for f in &u.factors {
        let h = f.hamiltonian(alg);
        if h.is_zero() {
            continue;
        }
        let mut dir = None;
        let mut logf: BTreeMap<(i64, i64), Series<BigRational>> = BTreeMap::new();
        for (a, c) in &h.terms {
            if !a.is_positive() {
                return Err(Error::Invalid(format!("charge {a} outside the positive cone")));
            }
            let r = a.reduce();
            let d = r.primitive()?;
            if *dir.get_or_insert(d) != d {
                return Err(Error::Invalid("factor spans several directions".into()));
            }
            let m = r.gcd();
            let tw = if (alg.lattice.kappa * r.x * r.y).rem_euclid(2) == 1 { -m } else { m };
            let slot = logf.entry((r.x, r.y)).or_default();
            slot.add_assign(&c.scale(&int(tw)));
        }
        let mut f_d: BTreeMap<(i64, i64), Series<BigRational>> = BTreeMap::new();
        f_d.insert((0, 0), Series::one());
        let mut term = f_d.clone();
        for j in 1..=alg.ring.max_degree() as i64 {
            term = theta_mul(&alg.ring, &term, &logf);
            if term.is_empty() {
                break;
            }
            for (k, c) in &term {
                f_d.entry(*k).or_default().add_assign(c);
            }
            term = term.into_iter().map(|(k, c)| (k, c.scale(&rat(1, j + 1)))).collect();
        }
        f_d.retain(|_, c| !c.is_zero());
        out.push(ThetaDatum { direction: dir.expect("nonzero hamiltonian"), f: f_d });
    }
    Ok(out)
}

/// `Omega` of every generator after crossing; always one for the generator spectrum.
pub fn generator_omegas(res: &FactorizationResult, l: &Lattice) -> Vec<i64> {
    l.basis().iter().map(|b| res.omega.get(b)).collect()
}
