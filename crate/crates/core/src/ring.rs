//! Truncated multivariate power series with per-variable nilpotency orders.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 16;

/// Exponent vector; unused slots stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(pub [u8; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut e = [0; MAX_VARS];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = x as u8;
        }
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&x| x as u32).sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i] as u32
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn exponents(&self, n: usize) -> Vec<u32> {
        self.0[..n].iter().map(|&x| x as u32).collect()
    }
}

/// Coefficient domain of a series.
pub trait Coef: Clone + PartialEq + fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn scale(&self, r: &BigRational) -> Self;
}

impl Coef for BigRational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn scale(&self, r: &BigRational) -> Self {
        self * r
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Debug)]
pub struct Series<C> {
    pub terms: BTreeMap<Monomial, C>,
}

impl<C: Coef> Default for Series<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coef> Series<C> {
    pub fn zero() -> Self {
        Series { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(C::unit())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_nil() {
            terms.insert(m, c);
        }
        Series { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::nil)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_nil() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add(c);
                if v.is_nil() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(*m, c);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn neg(&self) -> Self {
        Series { terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Series { terms: self.terms.iter().map(|(m, c)| (*m, c.scale(r))).collect() }
    }

    pub fn scale_coef(&self, k: &C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, &c.mul(k));
        }
        out
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        Series { terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn map_coef<D: Coef>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut out = Series::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, &f(c));
        }
        out
    }
}

/// Ring of series in named variables `x_i` with `x_i^(cap_i + 1) = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ring {
    caps: Vec<u8>,
    names: Vec<String>,
}

/// `R_k = Q[[s_1..s_l1, t_1..t_l2]] / (s_i^(k+1), t_j^(k+1))`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TruncatedRingSpec {
    pub l1: usize,
    pub l2: usize,
    pub k: u32,
}

impl TruncatedRingSpec {
    pub fn new(l1: usize, l2: usize, k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::Invalid("truncation order must be at least 1".into()));
        }
        if l1 + l2 > MAX_VARS {
            return Err(Error::Invalid(format!("at most {MAX_VARS} ring variables")));
        }
        Ok(TruncatedRingSpec { l1, l2, k })
    }

    pub fn ring(&self) -> Ring {
        let names = (1..=self.l1)
            .map(|i| if self.l1 == 1 { "s".to_string() } else { format!("s{i}") })
            .chain((1..=self.l2).map(|j| if self.l2 == 1 { "t".to_string() } else { format!("t{j}") }))
            .collect();
        Ring::new(vec![self.k; self.l1 + self.l2], names).expect("checked in new")
    }
}

impl Ring {
    pub fn new(caps: Vec<u32>, names: Vec<String>) -> Result<Self> {
        if caps.len() > MAX_VARS || caps.len() != names.len() {
            return Err(Error::Invalid("ring needs one name per variable and at most 16 variables".into()));
        }
        if caps.iter().any(|&c| c == 0 || c > 100) {
            return Err(Error::Invalid("nilpotency caps must lie in 1..=100".into()));
        }
        Ok(Ring { caps: caps.into_iter().map(|c| c as u8).collect(), names })
    }

    pub fn nvars(&self) -> usize {
        self.caps.len()
    }

    pub fn cap(&self, i: usize) -> u32 {
        self.caps[i] as u32
    }

    /// Largest total degree of a nonzero monomial.
    pub fn max_degree(&self) -> u32 {
        self.caps.iter().map(|&c| c as u32).sum()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var<C: Coef>(&self, i: usize) -> Series<C> {
        Series::term(Monomial::var(i), C::unit())
    }

    pub fn mono_mul(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        let mut e = [0u8; MAX_VARS];
        for (i, &cap) in self.caps.iter().enumerate() {
            let s = a.0[i] + b.0[i];
            if s > cap {
                return None;
            }
            e[i] = s;
        }
        Some(Monomial(e))
    }

    /// Whether the monomial survives truncation.
    pub fn admits(&self, m: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| if i < self.caps.len() { m.0[i] <= self.caps[i] } else { m.0[i] == 0 })
    }

    pub fn mul<C: Coef>(&self, a: &Series<C>, b: &Series<C>) -> Series<C> {
        let mut out = Series::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some(m) = self.mono_mul(ma, mb) {
                    out.add_term(m, &ca.mul(cb));
                }
            }
        }
        out
    }

    pub fn pow<C: Coef>(&self, a: &Series<C>, n: u32) -> Series<C> {
        let mut out = Series::one();
        for _ in 0..n {
            out = self.mul(&out, a);
        }
        out
    }

    /// Monomial `prod x_i^{e_i}` or `None` if it truncates to zero.
    pub fn monomial(&self, exps: &[u32]) -> Option<Monomial> {
        let m = Monomial::from_exponents(exps);
        if exps.len() > self.nvars() || !self.admits(&m) {
            return None;
        }
        Some(m)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for i in 0..self.nvars() {
            match m.get(i) {
                0 => {}
                1 => parts.push(self.names[i].clone()),
                e => parts.push(format!("{}^{}", self.names[i], e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn format_series(&self, a: &Series<BigRational>) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    c.to_string()
                } else {
                    format!("{}*{}", c, self.format_monomial(m))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_kills_high_powers() {
        let r = TruncatedRingSpec::new(1, 1, 2).unwrap().ring();
        let s: Series<BigRational> = r.var(0);
        assert!(!r.pow(&s, 2).is_zero());
        assert!(r.pow(&s, 3).is_zero());
    }

    #[test]
    fn mul_is_commutative() {
        let r = TruncatedRingSpec::new(1, 1, 3).unwrap().ring();
        let s: Series<BigRational> = r.var(0);
        let t: Series<BigRational> = r.var(1);
        let a = s.add(&t.scale(&rat(1, 2)));
        let b = r.mul(&s, &t).add(&Series::one());
        assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
    }
}
