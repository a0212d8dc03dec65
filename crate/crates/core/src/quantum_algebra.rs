//! Quantum torus over Laurent polynomials in `q^(1/2)`, quantum dilogarithms,
//! the adjoint operators `U`, and refined factorization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{CentralChargeConfig, Charge, Lattice, ReducedCharge, Side};
use crate::ring::{int, rat, Coef, Monomial, Ring, Series, TruncatedRingSpec};
use crate::torus_algebra::Element;

/// Laurent polynomial in `q^(1/2)`, keyed by the exponent of `q^(1/2)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QScalar {
    pub terms: BTreeMap<i64, BigRational>,
}

impl QScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::mono(0, BigRational::one())
    }

    /// `c q^(e/2)`.
    pub fn mono(e: i64, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        QScalar { terms }
    }

    /// `q^(e/2)`.
    pub fn half_pow(e: i64) -> Self {
        Self::mono(e, BigRational::one())
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::mono(0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::mono(0, int(n))
    }

    /// Symmetric quantum integer `[k]_q = (q^(k/2) - q^(-k/2)) / (q^(1/2) - q^(-1/2))`.
    pub fn quantum_int(k: i64) -> Self {
        if k < 0 {
            return Self::quantum_int(-k).neg();
        }
        let mut out = Self::zero();
        for j in 0..k {
            out.add_mono(k - 1 - 2 * j, &BigRational::one());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigRational {
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_mono(&mut self, e: i64, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(e).or_insert_with(BigRational::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_mono(*e, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        QScalar { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_mono(a + b, &(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        QScalar { terms: self.terms.iter().map(|(e, c)| (*e, c * r)).collect() }
    }

    /// Multiply by `q^(e/2)`.
    pub fn shift(&self, e: i64) -> Self {
        QScalar { terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect() }
    }

    /// Classical limit `q^(1/2) -> -1`.
    pub fn at_minus_one(&self) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (e, c)| if e.rem_euclid(2) == 0 { acc + c } else { acc - c })
    }

    /// Value at `q = 1`.
    pub fn at_one(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn eval(&self, sqrt_q: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * sqrt_q.powi(*e as i32)).sum()
    }

    /// `q^(1/2) -> q^(-1/2)`.
    pub fn bar(&self) -> Self {
        QScalar { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.bar()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Drop all exponents above `n`.
    pub fn truncate_above(&self, n: i64) -> Self {
        QScalar { terms: self.terms.range(..=n).map(|(e, c)| (*e, c.clone())).collect() }
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dmax = d.max_exp()?;
        let lead = d.terms[&dmax].clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let dmin = d.min_exp().unwrap();
        while let Some(rmax) = rem.max_exp() {
            if rmax - dmax < rem.min_exp().unwrap() - dmin {
                return None;
            }
            let c = &rem.terms[&rmax] / &lead;
            let e = rmax - dmax;
            quot.add_mono(e, &c);
            rem = rem.sub(&d.shift(e).scale(&c));
        }
        Some(quot)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match *e {
                0 => c.to_string(),
                e if e % 2 == 0 => format!("{c}*q^{}", e / 2),
                e => format!("{c}*q^({e}/2)"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for QScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = self.terms.iter().map(|(e, c)| (e.to_string(), c.to_string())).collect();
        m.serialize(s)
    }
}

impl Coef for QScalar {
    fn nil() -> Self {
        QScalar::zero()
    }
    fn unit() -> Self {
        QScalar::one()
    }
    fn is_nil(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        QScalar::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        QScalar::mul(self, o)
    }
    fn neg(&self) -> Self {
        QScalar::neg(self)
    }
    fn from_rational(r: &BigRational) -> Self {
        QScalar::from_rational(r.clone())
    }
    fn scale(&self, r: &BigRational) -> Self {
        QScalar::scale(self, r)
    }
}

pub type QAlgebraElement = Element<QScalar>;

/// `lambda^m_h = -(-1)^h / h * sum_{l=-m}^{-1} q^((l+1/2) h)`.
pub fn lambda_coeff(m: i64, h: i64) -> QScalar {
    assert!(m >= 1 && h >= 1, "lambda needs positive indices");
    let mut out = QScalar::zero();
    let sign = if h % 2 == 0 { -1 } else { 1 };
    for l in -m..=-1 {
        out.add_mono((2 * l + 1) * h, &rat(sign, h));
    }
    out
}

/// `mu^n_h = (-1)^h / h * sum_{l=0}^{n-1} q^((l+1/2) h)`.
pub fn mu_coeff(n: i64, h: i64) -> QScalar {
    assert!(n >= 1 && h >= 1, "mu needs positive indices");
    let mut out = QScalar::zero();
    let sign = if h % 2 == 0 { 1 } else { -1 };
    for l in 0..n {
        out.add_mono((2 * l + 1) * h, &rat(sign, h));
    }
    out
}

/// `U^exponent((-q^(1/2))^shift sigma e_charge)`.
#[derive(Clone, PartialEq, Debug)]
pub struct QFactor {
    pub charge: Charge,
    pub exponent: i64,
    pub shift: i64,
    pub sigma: Series<QScalar>,
}

/// Ordered product; same convention as the classical automorphisms (last factor acts first).
#[derive(Clone, PartialEq, Debug, Default)]
pub struct QAutomorphism {
    pub factors: Vec<QFactor>,
}

/// Exponent of `E(sigma e_a)` as a list of `numerator / denominator` terms,
/// `-sigma^j e_(ja) / (j((-q^(1/2))^j - (-q^(1/2))^(-j)))`.
#[derive(Clone, PartialEq, Debug)]
pub struct QDilogExponent {
    pub terms: Vec<(Charge, Series<QScalar>, QScalar)>,
}

impl QDilogExponent {
    /// Expand each `1/denominator` as a power series in `q^(1/2)` around `q = 0`, keeping
    /// exponents up to `order`.
    pub fn expand(&self, order: i64) -> Result<QAlgebraElement> {
        let mut out = Element::zero();
        for (a, num, den) in &self.terms {
            let inv = series_inverse(den, order)?;
            out.add_term(a.clone(), &num.map_coef(|c| c.mul(&inv).truncate_above(order)));
        }
        Ok(out)
    }
}

/// Power series inverse in `q^(1/2)`, exponents up to `order`.
fn series_inverse(d: &QScalar, order: i64) -> Result<QScalar> {
    let lo = d.min_exp().ok_or_else(|| Error::Invalid("inverse of zero".into()))?;
    let lead = d.terms[&lo].clone();
    let norm = d.shift(-lo).scale(&(BigRational::one() / &lead));
    // norm = 1 + higher terms
    let mut inv = QScalar::one();
    let span = order + lo;
    let mut cur = QScalar::one();
    let rest = norm.sub(&QScalar::one());
    for _ in 0..=span.max(0) {
        cur = cur.mul(&rest.neg()).truncate_above(span);
        if cur.is_zero() {
            break;
        }
        inv = inv.add(&cur);
    }
    Ok(inv.shift(-lo).scale(&(BigRational::one() / lead)).truncate_above(order))
}

/// Quantum torus `e_a e_b = q^(<a,b>/2) e_(a+b)` over `Q[q^(+-1/2)] (x) ring`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTorus {
    pub ring: Ring,
    pub lattice: Lattice,
}

impl QTorus {
    pub fn new(ring: Ring, lattice: Lattice) -> Self {
        QTorus { ring, lattice }
    }

    pub fn standard(spec: TruncatedRingSpec, kappa: i64) -> Self {
        QTorus { ring: spec.ring(), lattice: Lattice::new(spec.l1, spec.l2, kappa) }
    }

    pub fn e(&self, a: &Charge) -> QAlgebraElement {
        Element::term(a.clone(), Series::one())
    }

    pub fn one(&self) -> QAlgebraElement {
        self.e(&self.lattice.zero())
    }

    /// `(s,t)^a` as a coefficient series.
    pub fn st(&self, a: &Charge) -> Option<Series<QScalar>> {
        let c = a.coords();
        if c.iter().any(|&x| x < 0) || c.len() != self.ring.nvars() {
            return None;
        }
        let m = self.ring.monomial(&c.iter().map(|&x| x as u32).collect::<Vec<_>>())?;
        Some(Series::term(m, QScalar::one()))
    }

    pub fn q_mul(&self, x: &QAlgebraElement, y: &QAlgebraElement) -> QAlgebraElement {
        let mut out = Element::zero();
        for (a, ca) in &x.terms {
            for (b, cb) in &y.terms {
                let c = self.ring.mul(ca, cb);
                if c.is_zero() {
                    continue;
                }
                let p = self.lattice.pairing(a, b);
                out.add_term(a + b, &c.scale_coef(&QScalar::half_pow(p)));
            }
        }
        out
    }

    /// `[e_a, e_b] = (q^(<a,b>/2) - q^(-<a,b>/2)) e_(a+b)`.
    pub fn q_bracket(&self, x: &QAlgebraElement, y: &QAlgebraElement) -> QAlgebraElement {
        self.q_mul(x, y).sub(&self.q_mul(y, x))
    }

    fn nilpotent_inverse(&self, f: &QAlgebraElement) -> QAlgebraElement {
        let n = f.sub(&self.one());
        let mut out = self.one();
        let mut term = self.one();
        for _ in 0..=self.ring.max_degree() {
            term = self.q_mul(&term, &n.neg());
            if term.is_zero() {
                break;
            }
            out.add_assign(&term);
        }
        out
    }

    fn int_pow(&self, f: &QAlgebraElement, n: i64) -> QAlgebraElement {
        let base = if n < 0 { self.nilpotent_inverse(f) } else { f.clone() };
        let mut out = self.one();
        for _ in 0..n.abs() {
            out = self.q_mul(&out, &base);
        }
        out
    }

    pub fn exp(&self, x: &QAlgebraElement) -> QAlgebraElement {
        let mut out = self.one();
        let mut term = self.one();
        for j in 1..=self.ring.max_degree() as i64 + 1 {
            term = self.q_mul(&term, x).scale(&rat(1, j));
            if term.is_zero() {
                break;
            }
            out.add_assign(&term);
        }
        out
    }

    /// Exponent form of the quantum dilogarithm `E(sigma e_a)`.
    pub fn q_dilog(&self, sigma: &Series<QScalar>, a: &Charge) -> Result<QDilogExponent> {
        if !sigma.constant_term().is_zero() {
            return Err(Error::NotNilpotent("quantum dilogarithm argument".into()));
        }
        let mut terms = Vec::new();
        let mut p = Series::one();
        for j in 1..=self.ring.max_degree() as i64 {
            p = self.ring.mul(&p, sigma);
            if p.is_zero() {
                break;
            }
            let s = if j % 2 == 0 { 1 } else { -1 };
            let den = QScalar::mono(j, int(s * j)).add(&QScalar::mono(-j, int(-s * j)));
            terms.push((a.scale(j), p.neg(), den));
        }
        Ok(QDilogExponent { terms })
    }

    /// `prod_{k >= 0} (1 + q^(k+1/2) sigma e_a)^(-1)`, keeping `q^(1/2)` exponents up to `order`.
    pub fn q_dilog_product(&self, sigma: &Series<QScalar>, a: &Charge, order: i64) -> QAlgebraElement {
        let mut out = self.one();
        let x = Element::term(a.clone(), sigma.clone());
        let mut k = 0;
        while 2 * k < order {
            let f = self.one().add(&x.map_coef(|c| c.shift(2 * k + 1)));
            out = truncate_q(&self.q_mul(&out, &self.nilpotent_inverse(&f)), order);
            k += 1;
        }
        out
    }

    /// Image of `x` under a single `U` factor.
    pub fn u_apply(&self, f: &QFactor, x: &QAlgebraElement) -> QAlgebraElement {
        let mut out = Element::zero();
        let xa = Element::term(f.charge.clone(), f.sigma.clone());
        for (b, c) in &x.terms {
            let p = self.lattice.pairing(&f.charge, b);
            let mut g = self.one();
            let lin = |j: i64| {
                let s = if f.shift.rem_euclid(2) == 0 { 1 } else { -1 };
                self.one().add(&xa.map_coef(|c| c.shift(2 * j + f.shift + 1).scale(&int(s))))
            };
            if p > 0 {
                for j in 0..p {
                    g = self.q_mul(&g, &lin(j));
                }
            } else {
                for j in p..0 {
                    g = self.q_mul(&g, &self.nilpotent_inverse(&lin(j)));
                }
            }
            let g = self.int_pow(&g, f.exponent);
            out.add_assign(&self.q_mul(&Element::term(b.clone(), c.clone()), &g));
        }
        out
    }

    pub fn apply(&self, u: &QAutomorphism, x: &QAlgebraElement) -> QAlgebraElement {
        let mut out = x.clone();
        for f in u.factors.iter().rev() {
            out = self.u_apply(f, &out);
        }
        out
    }

    /// Incoming product with `Omega_0 = 1` on every generator, gamma-factors first.
    pub fn incoming(&self) -> QAutomorphism {
        let factors = self
            .lattice
            .basis()
            .into_iter()
            .map(|b| {
                let sigma = self.st(&b).expect("generators survive truncation");
                QFactor { charge: b, exponent: 1, shift: 0, sigma }
            })
            .collect();
        QAutomorphism { factors }
    }
}

fn truncate_q(x: &QAlgebraElement, order: i64) -> QAlgebraElement {
    x.map_coef(|c| c.truncate_above(order))
}

#[derive(Clone, PartialEq, Debug)]
pub struct RefinedResult {
    /// `Omega_n(a)` keyed by charge then `n`.
    pub omega: BTreeMap<Charge, BTreeMap<i64, i64>>,
    pub factors: QAutomorphism,
}

impl RefinedResult {
    /// `Omega(a; q) = sum_n Omega_n(a) q^(n/2)`.
    pub fn omega_q(&self, a: &Charge) -> QScalar {
        let mut out = QScalar::zero();
        if let Some(m) = self.omega.get(a) {
            for (n, v) in m {
                out.add_mono(*n, &int(*v));
            }
        }
        out
    }

    /// `sum_n (-1)^n Omega_n(a)`.
    pub fn classical_omega(&self, a: &Charge) -> i64 {
        self.omega_q(a).at_minus_one().to_integer().to_i64().expect("integral by construction")
    }
}

/// First-order coefficient of `U(q^(n/2) sigma e_a)` on `e_b`, with `p = <a,b>`, divided by `q^(n/2)`.
fn first_order(p: i64) -> QScalar {
    let mut d = QScalar::zero();
    if p > 0 {
        for j in 0..p {
            d.add_mono(2 * j + 1, &BigRational::one());
        }
    } else {
        for j in p..0 {
            d.add_mono(2 * j + 1, &int(-1));
        }
    }
    d
}

/// Degree-graded factorization in the quantum torus; each new charge's `Omega(a; q)` is read
/// from the first-order discrepancy on the first generator it pairs with.
pub fn refined_factorize(alg: &QTorus, s_plus: &QAutomorphism, config_minus: &CentralChargeConfig) -> Result<RefinedResult> {
    if config_minus.side == Side::Critical {
        return Err(Error::DegenerateConfig("factorization needs a non-critical configuration".into()));
    }
    let basis = alg.lattice.basis();
    let targets: Vec<QAlgebraElement> = basis.iter().map(|b| alg.apply(s_plus, &alg.e(b))).collect();
    let mut rays: BTreeMap<ReducedCharge, Vec<QFactor>> = BTreeMap::new();
    let mut omega: BTreeMap<Charge, BTreeMap<i64, i64>> = BTreeMap::new();
    let order = |rays: &BTreeMap<ReducedCharge, Vec<QFactor>>| {
        let mut dirs: Vec<&ReducedCharge> = rays.keys().collect();
        dirs.sort_by(|a, b| config_minus.cmp_clockwise(a, b));
        QAutomorphism { factors: dirs.into_iter().flat_map(|d| rays[d].iter().cloned()).collect() }
    };
    for g in 1..=alg.ring.max_degree() {
        let p_auto = order(&rays);
        let mut done = BTreeSet::new();
        for (i, b) in basis.iter().enumerate() {
            let d = targets[i].sub(&alg.apply(&p_auto, &alg.e(b))).homogeneous(g);
            for (key, c) in &d.terms {
                let a = key - b;
                if done.contains(&a) {
                    continue;
                }
                let p = alg.lattice.pairing(&a, b);
                if p == 0 {
                    continue;
                }
                let st = alg.st(&a).ok_or_else(|| Error::Internal(format!("discrepancy at {a} outside the ring")))?;
                let m: Monomial = *st.terms.keys().next().unwrap();
                if c.terms.len() != 1 || !c.terms.contains_key(&m) {
                    return Err(Error::Internal(format!("coefficient of {a} is not a multiple of (s,t)^a")));
                }
                done.insert(a.clone());
                let r = c.coeff(&m).shift(p);
                let om = r
                    .div_exact(&first_order(p))
                    .filter(QScalar::is_integral)
                    .ok_or_else(|| Error::NonIntegral(format!("refined Omega at {a}: {r}")))?;
                let dir = a.reduce().primitive()?;
                let slot = rays.entry(dir).or_default();
                let entry = omega.entry(a.clone()).or_default();
                for (n, v) in &om.terms {
                    let v = v.to_integer().to_i64().ok_or_else(|| Error::NonIntegral(format!("{v}")))?;
                    let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
                    slot.push(QFactor { charge: a.clone(), exponent: sign * v, shift: *n, sigma: st.clone() });
                    entry.insert(*n, v);
                }
            }
        }
    }
    let factors = order(&rays);
    for (i, b) in basis.iter().enumerate() {
        if alg.apply(&factors, &alg.e(b)) != targets[i] {
            return Err(Error::Internal("refined recomposition differs from the input".into()));
        }
    }
    omega.retain(|_, m| !m.is_empty());
    Ok(RefinedResult { omega, factors })
}

/// `prod_ij w_ij [w_ij]_q`, the denominator of the refined tropical side.
pub fn refined_denominator(parts: &[u32]) -> QScalar {
    parts.iter().fold(QScalar::one(), |acc, &p| acc.mul(&QScalar::quantum_int(p as i64).scale(&int(p as i64))))
}
