//! The twisted torus algebra over a truncated ring, dilogarithm automorphisms and DT/Omega transforms.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{slope_order, CentralChargeConfig, Charge, Lattice};
use crate::ring::{int, rat, Coef, Monomial, Ring, Series, TruncatedRingSpec};

/// Finite sum of `coefficient * e_charge`.
#[derive(Clone, PartialEq, Debug)]
pub struct Element<C> {
    pub terms: BTreeMap<Charge, Series<C>>,
}

pub type AlgebraElement = Element<BigRational>;

impl<C: Coef> Default for Element<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coef> Element<C> {
    pub fn zero() -> Self {
        Element { terms: BTreeMap::new() }
    }

    pub fn term(a: Charge, c: Series<C>) -> Self {
        let mut out = Self::zero();
        out.add_term(a, &c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &Charge) -> Series<C> {
        self.terms.get(a).cloned().unwrap_or_else(Series::zero)
    }

    pub fn add_term(&mut self, a: Charge, c: &Series<C>) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(a.clone()).or_insert_with(Series::zero);
        slot.add_assign(c);
        if slot.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (a, c) in &o.terms {
            self.add_term(a.clone(), c);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn neg(&self) -> Self {
        Element { terms: self.terms.iter().map(|(a, c)| (a.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = Self::zero();
        for (a, c) in &self.terms {
            out.add_term(a.clone(), &c.scale(r));
        }
        out
    }

    /// Keep the terms of total ring degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        let mut out = Self::zero();
        for (a, c) in &self.terms {
            out.add_term(a.clone(), &c.homogeneous(d));
        }
        out
    }

    pub fn filter_charges(&self, keep: impl Fn(&Charge) -> bool) -> Self {
        Element { terms: self.terms.iter().filter(|(a, _)| keep(a)).map(|(a, c)| (a.clone(), c.clone())).collect() }
    }

    /// Nilpotent when no coefficient has a constant term.
    pub fn is_nilpotent(&self) -> bool {
        self.terms.values().all(|c| c.constant_term().is_nil())
    }

    pub fn map_coef<D: Coef>(&self, f: impl Fn(&C) -> D) -> Element<D> {
        let mut out = Element::zero();
        for (a, c) in &self.terms {
            out.add_term(a.clone(), &c.map_coef(&f));
        }
        out
    }
}

#[derive(Serialize)]
struct TermJson {
    charge: Charge,
    exponents: Vec<u32>,
    numerator: String,
    denominator: String,
}

impl AlgebraElement {
    pub fn to_json(&self, ring: &Ring) -> serde_json::Value {
        let mut rows = Vec::new();
        for (a, c) in &self.terms {
            for (m, v) in &c.terms {
                rows.push(TermJson {
                    charge: a.clone(),
                    exponents: m.exponents(ring.nvars()),
                    numerator: v.numer().to_string(),
                    denominator: v.denom().to_string(),
                });
            }
        }
        serde_json::to_value(rows).expect("plain data serializes")
    }
}

/// Context for the classical algebra: product `e_a e_b = (-1)^<a,b> e_{a+b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusAlgebra {
    pub ring: Ring,
    pub lattice: Lattice,
}

impl TorusAlgebra {
    pub fn new(ring: Ring, lattice: Lattice) -> Self {
        TorusAlgebra { ring, lattice }
    }

    /// Algebra over `R_k` with variables `s_i`, `t_j` matching the generators.
    pub fn standard(spec: TruncatedRingSpec, kappa: i64) -> Self {
        TorusAlgebra { ring: spec.ring(), lattice: Lattice::new(spec.l1, spec.l2, kappa) }
    }

    pub fn e(&self, a: &Charge) -> AlgebraElement {
        Element::term(a.clone(), Series::one())
    }

    pub fn one(&self) -> AlgebraElement {
        self.e(&self.lattice.zero())
    }

    /// `(s,t)^a` in the standard ring, if it survives truncation.
    pub fn st_monomial(&self, a: &Charge) -> Option<Monomial> {
        let c = a.coords();
        if c.iter().any(|&x| x < 0) || c.len() != self.ring.nvars() {
            return None;
        }
        self.ring.monomial(&c.iter().map(|&x| x as u32).collect::<Vec<_>>())
    }

    fn twist(&self, a: &Charge, b: &Charge) -> bool {
        self.lattice.pairing(a, b).rem_euclid(2) == 1
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = Element::zero();
        for (a, ca) in &x.terms {
            for (b, cb) in &y.terms {
                let mut c = self.ring.mul(ca, cb);
                if c.is_zero() {
                    continue;
                }
                if self.twist(a, b) {
                    c = c.neg();
                }
                out.add_term(a + b, &c);
            }
        }
        out
    }

    /// `[e_a, e_b] = (-1)^<a,b> <a,b> e_{a+b}`.
    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = Element::zero();
        for (a, ca) in &x.terms {
            for (b, cb) in &y.terms {
                let p = self.lattice.pairing(a, b);
                if p == 0 {
                    continue;
                }
                let mut c = self.ring.mul(ca, cb).scale(&int(p));
                if p.rem_euclid(2) == 1 {
                    c = c.neg();
                }
                out.add_term(a + b, &c);
            }
        }
        out
    }

    /// Multiply every coefficient by a ring element.
    pub fn ring_mul(&self, x: &AlgebraElement, r: &Series<BigRational>) -> AlgebraElement {
        let mut out = Element::zero();
        for (a, c) in &x.terms {
            out.add_term(a.clone(), &self.ring.mul(c, r));
        }
        out
    }

    /// Exponential of a nilpotent element.
    pub fn exp(&self, x: &AlgebraElement) -> AlgebraElement {
        assert!(x.is_nilpotent(), "exp of a non-nilpotent element");
        let mut out = self.one();
        let mut term = self.one();
        for j in 1..=self.ring.max_degree() + 1 {
            term = self.mul(&term, x).scale(&rat(1, j as i64));
            if term.is_zero() {
                break;
            }
            out.add_assign(&term);
        }
        out
    }

    /// Logarithm of an element of the form `1 + nilpotent`.
    pub fn log(&self, f: &AlgebraElement) -> AlgebraElement {
        let n = f.sub(&self.one());
        assert!(n.is_nilpotent(), "log of an element not of the form 1 + nilpotent");
        let mut out = Element::zero();
        let mut term = self.one();
        for j in 1..=self.ring.max_degree() + 1 {
            term = self.mul(&term, &n);
            if term.is_zero() {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            out.add_assign(&term.scale(&rat(sign, j as i64)));
        }
        out
    }

    /// `f^n = exp(n log f)` for `f = 1 + nilpotent`.
    pub fn power(&self, f: &AlgebraElement, n: &BigRational) -> AlgebraElement {
        if n.is_zero() {
            return self.one();
        }
        if n.is_one() {
            return f.clone();
        }
        self.exp(&self.log(f).scale(n))
    }

    /// `Li_2(sigma e_a) = -sum_j sigma^j e_{ja} / j^2`, truncated.
    pub fn li2(&self, sigma: &Series<BigRational>, a: &Charge) -> Result<AlgebraElement> {
        if !sigma.constant_term().is_zero() {
            return Err(Error::NotNilpotent("dilogarithm argument".into()));
        }
        let mut out = Element::zero();
        let mut p = Series::one();
        for j in 1..=self.ring.max_degree() as i64 {
            p = self.ring.mul(&p, sigma);
            if p.is_zero() {
                break;
            }
            out.add_term(a.scale(j), &p.scale(&rat(-1, j * j)));
        }
        Ok(out)
    }

    /// Image of `x` under `Ad exp(h)`, for `h` supported on mutually orthogonal charges.
    pub fn apply_hamiltonian(&self, h: &AlgebraElement, x: &AlgebraElement) -> AlgebraElement {
        let mut out = Element::zero();
        let mut cache: HashMap<(i64, i64), AlgebraElement> = HashMap::new();
        for (b, c) in &x.terms {
            let key = (b.gamma_total(), b.eta_total());
            let factor = cache
                .entry(key)
                .or_insert_with(|| {
                    let mut l = Element::zero();
                    for (a, ha) in &h.terms {
                        let p = self.lattice.pairing(a, b);
                        if p != 0 {
                            l.add_term(a.clone(), &ha.scale(&int(p)));
                        }
                    }
                    self.exp(&l)
                })
                .clone();
            out.add_assign(&self.mul(&Element::term(b.clone(), c.clone()), &factor));
        }
        out
    }

    pub fn apply(&self, u: &TorusAutomorphism, x: &AlgebraElement) -> AlgebraElement {
        let mut out = x.clone();
        for f in u.factors.iter().rev() {
            out = self.apply_hamiltonian(&f.hamiltonian(self), &out);
        }
        out
    }

    /// `e_b -> e_b exp(sum_a <a,b> h_a e_a)` on each generator.
    pub fn hamiltonian_ext(&self, h: &AlgebraElement) -> Extensional {
        let images = self
            .lattice
            .basis()
            .iter()
            .map(|b| {
                let mut l = Element::zero();
                for (a, ha) in &h.terms {
                    let p = self.lattice.pairing(a, b);
                    if p != 0 {
                        l.add_term(a.clone(), &ha.scale(&int(p)));
                    }
                }
                self.exp(&l)
            })
            .collect();
        Extensional { images }
    }

    pub fn identity_ext(&self) -> Extensional {
        Extensional { images: vec![self.one(); self.lattice.rank()] }
    }

    pub fn extensional(&self, u: &TorusAutomorphism) -> Extensional {
        let mut p = self.identity_ext();
        for f in &u.factors {
            p = self.compose(&p, &self.hamiltonian_ext(&f.hamiltonian(self)));
        }
        p
    }

    /// Action of an automorphism given by generator images.
    pub fn act(&self, u: &Extensional, x: &AlgebraElement) -> AlgebraElement {
        let mut cache: HashMap<(usize, i64), AlgebraElement> = HashMap::new();
        let mut out = Element::zero();
        for (b, c) in &x.terms {
            let mut im = Element::term(b.clone(), c.clone());
            for (i, &n) in b.coords().iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let f = cache
                    .entry((i, n))
                    .or_insert_with(|| self.power(&u.images[i], &int(n)))
                    .clone();
                im = self.mul(&im, &f);
            }
            out.add_assign(&im);
        }
        out
    }

    /// `u o v`.
    pub fn compose(&self, u: &Extensional, v: &Extensional) -> Extensional {
        let images = u.images.iter().zip(&v.images).map(|(hu, hv)| self.mul(hu, &self.act(u, hv))).collect();
        Extensional { images }
    }
}

/// Automorphism stored through the images `e_b -> e_b H_b` of the generators.
#[derive(Clone, PartialEq, Debug)]
pub struct Extensional {
    pub images: Vec<AlgebraElement>,
}

/// One Stokes factor.
#[derive(Clone, PartialEq, Debug)]
pub enum Factor {
    /// `Ad exp(omega Li_2(sigma e_charge))`; `omega` may carry ring parameters.
    Dilog { charge: Charge, omega: Series<BigRational>, sigma: Series<BigRational> },
    /// `Ad exp(h)` with `h` supported on one ray.
    Ray(AlgebraElement),
}

impl Factor {
    pub fn dilog(alg: &TorusAlgebra, charge: Charge, omega: BigRational, sigma: Series<BigRational>) -> Result<Self> {
        alg.lattice.check(&charge)?;
        if !sigma.constant_term().is_zero() {
            return Err(Error::NotNilpotent(format!("sigma for {charge}")));
        }
        Ok(Factor::Dilog { charge, omega: Series::constant(omega), sigma })
    }

    pub fn hamiltonian(&self, alg: &TorusAlgebra) -> AlgebraElement {
        match self {
            Factor::Dilog { charge, omega, sigma } => {
                let l = alg.li2(sigma, charge).expect("sigma validated at construction");
                alg.ring_mul(&l, omega)
            }
            Factor::Ray(h) => h.clone(),
        }
    }

    pub fn inverse(&self) -> Factor {
        match self {
            Factor::Dilog { charge, omega, sigma } => {
                Factor::Dilog { charge: charge.clone(), omega: omega.neg(), sigma: sigma.clone() }
            }
            Factor::Ray(h) => Factor::Ray(h.neg()),
        }
    }
}

/// Ordered product of Stokes factors. The list is in clockwise order and denotes the
/// composite `factors[0] o factors[1] o ...`, so the last factor acts first.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct TorusAutomorphism {
    pub factors: Vec<Factor>,
}

impl TorusAutomorphism {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn inverse(&self) -> Self {
        TorusAutomorphism { factors: self.factors.iter().rev().map(Factor::inverse).collect() }
    }

    pub fn then(&self, o: &TorusAutomorphism) -> TorusAutomorphism {
        let mut factors = self.factors.clone();
        factors.extend(o.factors.iter().cloned());
        TorusAutomorphism { factors }
    }
}

/// Sort `(charge, omega, sigma)` triples clockwise for the configuration.
pub fn compose_ordered(
    alg: &TorusAlgebra,
    config: &CentralChargeConfig,
    parts: &[(Charge, BigRational, Series<BigRational>)],
) -> Result<TorusAutomorphism> {
    let charges: Vec<Charge> = parts.iter().map(|p| p.0.clone()).collect();
    slope_order(config, &charges)?;
    let mut idx: Vec<usize> = (0..parts.len()).collect();
    idx.sort_by(|&i, &j| config.cmp_clockwise(&parts[i].0.reduce(), &parts[j].0.reduce()));
    let factors = idx
        .into_iter()
        .map(|i| Factor::dilog(alg, parts[i].0.clone(), parts[i].1.clone(), parts[i].2.clone()))
        .collect::<Result<_>>()?;
    Ok(TorusAutomorphism { factors })
}

/// Integer BPS spectrum, symmetric under negation.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct Spectrum {
    pub omega: BTreeMap<Charge, i64>,
}

impl Spectrum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, a: &Charge) -> i64 {
        if a.is_zero() {
            return 0;
        }
        self.omega.get(a).or_else(|| self.omega.get(&-a)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, a: Charge, v: i64) {
        if a.is_zero() {
            return;
        }
        self.omega.remove(&-&a);
        if v == 0 {
            self.omega.remove(&a);
        } else {
            self.omega.insert(a, v);
        }
    }

    /// `Omega(gamma_i) = Omega(eta_j) = 1` for all generators.
    pub fn generators(l: &Lattice) -> Self {
        let mut s = Spectrum::new();
        for b in l.basis() {
            s.set(b, 1);
        }
        s
    }

    /// Charges with nonzero value, one representative per sign pair.
    pub fn support(&self) -> Vec<Charge> {
        self.omega.keys().cloned().collect()
    }
}

/// `DT(a) = sum_{p | a} Omega(a/p) / p^2`.
pub fn dt_from_omega(spec: &Spectrum, gp: &Charge) -> Result<BigRational> {
    if gp.is_zero() {
        return Err(Error::ZeroCharge);
    }
    let n = gp.content().abs();
    let mut out = BigRational::zero();
    for p in 1..=n {
        if n % p == 0 {
            let base = Charge::from_coords(gp.l1(), &gp.coords().iter().map(|c| c / p).collect::<Vec<_>>());
            out += rat(spec.get(&base), p * p);
        }
    }
    Ok(out)
}

fn mobius(n: i64) -> i64 {
    let mut n = n;
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            out = -out;
        }
        p += 1;
    }
    if n > 1 {
        out = -out;
    }
    out
}

/// Inverse of `dt_from_omega` by Moebius inversion; missing divisors count as zero.
pub fn omega_from_dt(dt: &BTreeMap<Charge, BigRational>) -> Result<Spectrum> {
    let mut out = Spectrum::new();
    for a in dt.keys() {
        if a.is_zero() {
            return Err(Error::ZeroCharge);
        }
        let n = a.content().abs();
        let mut v = BigRational::zero();
        for p in 1..=n {
            if n % p != 0 {
                continue;
            }
            let mu = mobius(p);
            if mu == 0 {
                continue;
            }
            let base = Charge::from_coords(a.l1(), &a.coords().iter().map(|c| c / p).collect::<Vec<_>>());
            if let Some(d) = dt.get(&base) {
                v += d * rat(mu, p * p);
            }
        }
        if !v.is_integer() {
            return Err(Error::NonIntegral(format!("Omega({a}) = {v}")));
        }
        let iv: BigInt = v.to_integer();
        let iv: i64 = iv.try_into().map_err(|_| Error::NonIntegral(format!("Omega({a}) overflows")))?;
        out.set(a.clone(), iv);
    }
    Ok(out)
}

/// `gcd` helper shared with other modules.
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}
