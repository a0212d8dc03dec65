//! Charges, the skew pairing, central charges and weight vectors.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of the lattice generated by `gamma_1..gamma_l1` and `eta_1..eta_l2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Charge {
    pub gamma: Vec<i64>,
    pub eta: Vec<i64>,
}

impl Charge {
    pub fn zero(l1: usize, l2: usize) -> Self {
        Charge { gamma: vec![0; l1], eta: vec![0; l2] }
    }

    pub fn new(gamma: Vec<i64>, eta: Vec<i64>) -> Self {
        Charge { gamma, eta }
    }

    /// `m * gamma_i`
    pub fn gamma(l1: usize, l2: usize, i: usize, m: i64) -> Self {
        let mut c = Self::zero(l1, l2);
        c.gamma[i] = m;
        c
    }

    /// `n * eta_j`
    pub fn eta(l1: usize, l2: usize, j: usize, n: i64) -> Self {
        let mut c = Self::zero(l1, l2);
        c.eta[j] = n;
        c
    }

    pub fn l1(&self) -> usize {
        self.gamma.len()
    }

    pub fn l2(&self) -> usize {
        self.eta.len()
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().chain(&self.eta).all(|&c| c == 0)
    }

    pub fn gamma_total(&self) -> i64 {
        self.gamma.iter().sum()
    }

    pub fn eta_total(&self) -> i64 {
        self.eta.iter().sum()
    }

    /// Coefficients as one vector, gammas first.
    pub fn coords(&self) -> Vec<i64> {
        self.gamma.iter().chain(&self.eta).copied().collect()
    }

    pub fn from_coords(l1: usize, coords: &[i64]) -> Self {
        Charge { gamma: coords[..l1].to_vec(), eta: coords[l1..].to_vec() }
    }

    pub fn scale(&self, m: i64) -> Self {
        Charge {
            gamma: self.gamma.iter().map(|c| c * m).collect(),
            eta: self.eta.iter().map(|c| c * m).collect(),
        }
    }

    /// Largest `p` dividing every coefficient.
    pub fn content(&self) -> i64 {
        self.gamma.iter().chain(&self.eta).fold(0i64, |g, &c| g.gcd(&c))
    }

    /// True when all coefficients are nonnegative and at least one is positive.
    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.gamma.iter().chain(&self.eta).all(|&c| c >= 0)
    }

    /// Returns `(m, i)` when the charge is `m * gamma_i` with `m > 0`.
    pub fn as_gamma_multiple(&self) -> Option<(i64, usize)> {
        if self.eta.iter().any(|&c| c != 0) {
            return None;
        }
        let nz: Vec<_> = self.gamma.iter().enumerate().filter(|(_, &c)| c != 0).collect();
        match nz.as_slice() {
            [(i, &m)] if m > 0 => Some((m, *i)),
            _ => None,
        }
    }

    pub fn as_eta_multiple(&self) -> Option<(i64, usize)> {
        if self.gamma.iter().any(|&c| c != 0) {
            return None;
        }
        let nz: Vec<_> = self.eta.iter().enumerate().filter(|(_, &c)| c != 0).collect();
        match nz.as_slice() {
            [(j, &n)] if n > 0 => Some((n, *j)),
            _ => None,
        }
    }

    /// Image under the projection `gamma_i -> (0,1)`, `eta_j -> (1,0)`.
    pub fn reduce(&self) -> ReducedCharge {
        ReducedCharge { x: self.eta_total(), y: self.gamma_total() }
    }
}

impl Add for &Charge {
    type Output = Charge;
    fn add(self, o: &Charge) -> Charge {
        Charge {
            gamma: self.gamma.iter().zip(&o.gamma).map(|(a, b)| a + b).collect(),
            eta: self.eta.iter().zip(&o.eta).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for Charge {
    type Output = Charge;
    fn add(self, o: Charge) -> Charge {
        &self + &o
    }
}

impl Sub for &Charge {
    type Output = Charge;
    fn sub(self, o: &Charge) -> Charge {
        self + &(-o)
    }
}

impl Neg for &Charge {
    type Output = Charge;
    fn neg(self) -> Charge {
        self.scale(-1)
    }
}

impl Neg for Charge {
    type Output = Charge;
    fn neg(self) -> Charge {
        self.scale(-1)
    }
}

impl Mul<&Charge> for i64 {
    type Output = Charge;
    fn mul(self, c: &Charge) -> Charge {
        c.scale(self)
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let single = self.l1() == 1 && self.l2() == 1;
        for (name, coeffs) in [("g", &self.gamma), ("e", &self.eta)] {
            for (i, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let sym = if single { name.to_string() } else { format!("{}{}", name, i + 1) };
                parts.push(match c {
                    1 => sym,
                    -1 => format!("-{sym}"),
                    _ => format!("{c}{sym}"),
                });
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+").replace("+-", "-"))
        }
    }
}

impl Serialize for Charge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.gamma, &self.eta).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Charge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (gamma, eta) = <(Vec<i64>, Vec<i64>)>::deserialize(d)?;
        Ok(Charge { gamma, eta })
    }
}

/// Pairing table `<gamma_i, eta_j> = kappa`, all others zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub l1: usize,
    pub l2: usize,
    pub kappa: i64,
}

impl Lattice {
    pub fn new(l1: usize, l2: usize, kappa: i64) -> Self {
        Lattice { l1, l2, kappa }
    }

    pub fn rank(&self) -> usize {
        self.l1 + self.l2
    }

    /// Skew pairing. Depends only on the reduced charges.
    pub fn pairing(&self, a: &Charge, b: &Charge) -> i64 {
        self.kappa * (a.gamma_total() * b.eta_total() - a.eta_total() * b.gamma_total())
    }

    pub fn zero(&self) -> Charge {
        Charge::zero(self.l1, self.l2)
    }

    pub fn gamma(&self, i: usize, m: i64) -> Charge {
        Charge::gamma(self.l1, self.l2, i, m)
    }

    pub fn eta(&self, j: usize, n: i64) -> Charge {
        Charge::eta(self.l1, self.l2, j, n)
    }

    /// The generators `gamma_1..gamma_l1, eta_1..eta_l2`.
    pub fn basis(&self) -> Vec<Charge> {
        (0..self.l1)
            .map(|i| self.gamma(i, 1))
            .chain((0..self.l2).map(|j| self.eta(j, 1)))
            .collect()
    }

    pub fn check(&self, c: &Charge) -> Result<()> {
        if c.l1() != self.l1 || c.l2() != self.l2 {
            return Err(Error::Mismatch(format!("charge {c} not in lattice ({}, {})", self.l1, self.l2)));
        }
        Ok(())
    }
}

/// Pairing with `kappa = 1`.
pub fn pairing(a: &Charge, b: &Charge) -> i64 {
    a.gamma_total() * b.eta_total() - a.eta_total() * b.gamma_total()
}

pub fn reduce(a: &Charge) -> ReducedCharge {
    a.reduce()
}

/// `(x, y)` with `x` the eta-total and `y` the gamma-total.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ReducedCharge {
    pub x: i64,
    pub y: i64,
}

impl ReducedCharge {
    pub fn new(x: i64, y: i64) -> Self {
        ReducedCharge { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn gcd(&self) -> i64 {
        self.x.gcd(&self.y)
    }

    pub fn primitive(&self) -> Result<ReducedCharge> {
        if self.is_zero() {
            return Err(Error::ZeroCharge);
        }
        let g = self.gcd();
        Ok(ReducedCharge { x: self.x / g, y: self.y / g })
    }

    pub fn det(&self, o: &ReducedCharge) -> i64 {
        self.x * o.y - self.y * o.x
    }

    pub fn is_parallel(&self, o: &ReducedCharge) -> bool {
        self.det(o) == 0
    }
}

impl Add for ReducedCharge {
    type Output = ReducedCharge;
    fn add(self, o: ReducedCharge) -> ReducedCharge {
        ReducedCharge { x: self.x + o.x, y: self.y + o.y }
    }
}

impl Neg for ReducedCharge {
    type Output = ReducedCharge;
    fn neg(self) -> ReducedCharge {
        ReducedCharge { x: -self.x, y: -self.y }
    }
}

impl fmt::Display for ReducedCharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

pub fn is_primitive(r: &ReducedCharge) -> Result<bool> {
    if r.is_zero() {
        return Err(Error::ZeroCharge);
    }
    Ok(r.gcd() == 1)
}

/// Exact complex rational.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl QComplex {
    pub fn from_ints(re: i64, im: i64) -> Self {
        QComplex { re: BigRational::from_integer(re.into()), im: BigRational::from_integer(im.into()) }
    }

    pub fn scale(&self, k: i64) -> QComplex {
        let k = BigRational::from_integer(BigInt::from(k));
        QComplex { re: &self.re * &k, im: &self.im * &k }
    }

    pub fn add(&self, o: &QComplex) -> QComplex {
        QComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    /// `Im(conj(self) * o)`; positive when `o` is counterclockwise of `self`.
    pub fn cross(&self, o: &QComplex) -> BigRational {
        &self.re * &o.im - &self.im * &o.re
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
    Critical,
}

/// Central charge with `Z(gamma_i) = z_gamma` and `Z(eta_j) = z_eta` for all `i, j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CentralChargeConfig {
    pub side: Side,
    pub z_gamma: QComplex,
    pub z_eta: QComplex,
}

impl CentralChargeConfig {
    /// Validates the ordering convention for the side.
    pub fn new(side: Side, z_gamma: QComplex, z_eta: QComplex) -> Result<Self> {
        let first_quadrant = |z: &QComplex| z.re.is_positive() && z.im.is_positive();
        if !first_quadrant(&z_gamma) || !first_quadrant(&z_eta) {
            return Err(Error::DegenerateConfig("central charges must lie in the open first quadrant".into()));
        }
        let c = z_eta.cross(&z_gamma);
        let ok = match side {
            Side::Plus => c.is_positive(),
            Side::Minus => c.is_negative(),
            Side::Critical => c.is_zero(),
        };
        if !ok {
            return Err(Error::DegenerateConfig(format!("arguments of Z(gamma), Z(eta) inconsistent with side {side:?}")));
        }
        Ok(CentralChargeConfig { side, z_gamma, z_eta })
    }

    pub fn plus() -> Self {
        Self::new(Side::Plus, QComplex::from_ints(1, 2), QComplex::from_ints(2, 1)).unwrap()
    }

    /// Plus configuration with the two values swapped.
    pub fn minus() -> Self {
        Self::new(Side::Minus, QComplex::from_ints(2, 1), QComplex::from_ints(1, 2)).unwrap()
    }

    /// Minus configuration whose rays lie strictly inside the cone spanned by the plus rays.
    pub fn minus_contained() -> Self {
        Self::new(Side::Minus, QComplex::from_ints(3, 2), QComplex::from_ints(2, 3)).unwrap()
    }

    pub fn critical() -> Self {
        Self::new(Side::Critical, QComplex::from_ints(1, 1), QComplex::from_ints(2, 2)).unwrap()
    }

    pub fn z_reduced(&self, r: &ReducedCharge) -> QComplex {
        self.z_gamma.scale(r.y).add(&self.z_eta.scale(r.x))
    }

    pub fn z(&self, a: &Charge) -> QComplex {
        self.z_reduced(&a.reduce())
    }

    /// Counterclockwise angular comparison of `Z` for two positive reduced charges.
    pub fn cmp_angle(&self, a: &ReducedCharge, b: &ReducedCharge) -> Ordering {
        let c = self.z_reduced(a).cross(&self.z_reduced(b));
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }

    /// Clockwise order: `Less` means `a` comes first (larger argument).
    pub fn cmp_clockwise(&self, a: &ReducedCharge, b: &ReducedCharge) -> Ordering {
        self.cmp_angle(b, a)
    }
}

/// Sort positive charges clockwise by `Z`; equal slopes stay adjacent in input order.
pub fn slope_order(config: &CentralChargeConfig, charges: &[Charge]) -> Result<Vec<Charge>> {
    if config.side == Side::Critical {
        return Err(Error::DegenerateConfig("all slopes coincide on the critical side".into()));
    }
    for c in charges {
        if !c.is_positive() {
            return Err(Error::Invalid(format!("charge {c} outside the positive cone")));
        }
    }
    let mut out = charges.to_vec();
    out.sort_by(|a, b| config.cmp_clockwise(&a.reduce(), &b.reduce()));
    Ok(out)
}

/// Weight vector `w = (w1, w2)` with nondecreasing parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct WeightVector {
    pub w1: Vec<u32>,
    pub w2: Vec<u32>,
}

impl WeightVector {
    pub fn new(mut w1: Vec<u32>, mut w2: Vec<u32>) -> Result<Self> {
        if w1.iter().chain(&w2).any(|&p| p == 0) {
            return Err(Error::Invalid("weight vector parts must be positive".into()));
        }
        w1.sort_unstable();
        w2.sort_unstable();
        Ok(WeightVector { w1, w2 })
    }

    /// Parses `"1+1,1+2"`; an empty side is written as nothing, e.g. `"1,"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Invalid(format!("weight vector '{s}' needs a comma")))?;
        let parts = |t: &str| -> Result<Vec<u32>> {
            let t = t.trim();
            if t.is_empty() {
                return Ok(vec![]);
            }
            t.split('+')
                .map(|p| p.trim().parse::<u32>().map_err(|e| Error::Invalid(format!("bad part '{p}': {e}"))))
                .collect()
        };
        Self::new(parts(a)?, parts(b)?)
    }

    pub fn total1(&self) -> i64 {
        self.w1.iter().map(|&p| p as i64).sum()
    }

    pub fn total2(&self) -> i64 {
        self.w2.iter().map(|&p| p as i64).sum()
    }

    /// Direction of the outgoing end, `(|w2|, |w1|)`.
    pub fn out_direction(&self) -> ReducedCharge {
        ReducedCharge::new(self.total2(), self.total1())
    }

    pub fn num_parts(&self) -> usize {
        self.w1.len() + self.w2.len()
    }

    /// `w'`: drop the first part of `w1`.
    pub fn drop_first(&self) -> WeightVector {
        WeightVector { w1: self.w1.iter().skip(1).copied().collect(), w2: self.w2.clone() }
    }

    pub fn parts(&self) -> impl Iterator<Item = &u32> {
        self.w1.iter().chain(&self.w2)
    }

    /// Product of all parts squared.
    pub fn prod_sq(&self) -> BigInt {
        self.parts().fold(BigInt::from(1), |acc, &p| acc * BigInt::from(p) * BigInt::from(p))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &Vec<u32>| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("+");
        write!(f, "{},{}", j(&self.w1), j(&self.w2))
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, k| a * BigInt::from(k))
}

/// Order of the group permuting equal parts within each side.
pub fn aut_weight_vector(w: &WeightVector) -> BigInt {
    let mut out = BigInt::from(1);
    for side in [&w.w1, &w.w2] {
        let mut i = 0;
        while i < side.len() {
            let mut j = i;
            while j < side.len() && side[j] == side[i] {
                j += 1;
            }
            out *= factorial((j - i) as u64);
            i = j;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Charge {
        Charge::gamma(1, 1, 0, 1)
    }
    fn e() -> Charge {
        Charge::eta(1, 1, 0, 1)
    }

    #[test]
    fn pairing_table() {
        assert_eq!(pairing(&g(), &e()), 1);
        assert_eq!(pairing(&g(), &g()), 0);
        let a = &g().scale(2) + &e();
        assert_eq!(pairing(&a, &g()), -1);
    }

    #[test]
    fn reduce_examples() {
        let c = Charge::new(vec![2, 0], vec![0, 3]);
        assert_eq!(c.reduce(), ReducedCharge::new(3, 2));
        assert_eq!(g().reduce(), ReducedCharge::new(0, 1));
        assert!(Charge::zero(2, 2).reduce().is_zero());
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&ReducedCharge::new(1, 1)).unwrap());
        assert!(is_primitive(&ReducedCharge::new(2, 3)).unwrap());
        assert!(!is_primitive(&ReducedCharge::new(2, 4)).unwrap());
        assert_eq!(is_primitive(&ReducedCharge::new(0, 0)), Err(Error::ZeroCharge));
    }

    #[test]
    fn aut_examples() {
        assert_eq!(aut_weight_vector(&WeightVector::parse("1,1+2").unwrap()), 1.into());
        assert_eq!(aut_weight_vector(&WeightVector::parse(",").unwrap()), 1.into());
        assert_eq!(aut_weight_vector(&WeightVector::parse("1+1,2+2+3").unwrap()), 4.into());
    }

    #[test]
    fn slope_orders() {
        let gs = vec![g(), e(), &g() + &e()];
        let plus = slope_order(&CentralChargeConfig::plus(), &gs).unwrap();
        assert_eq!(plus, vec![g(), &g() + &e(), e()]);
        let minus = slope_order(&CentralChargeConfig::minus(), &gs).unwrap();
        assert_eq!(minus, vec![e(), &g() + &e(), g()]);
        assert!(slope_order(&CentralChargeConfig::critical(), &gs).is_err());
    }

    #[test]
    fn weight_vector_parse() {
        let w = WeightVector::parse("1+1,2+1").unwrap();
        assert_eq!(w.w2, vec![1, 2]);
        assert_eq!(w.out_direction(), ReducedCharge::new(3, 2));
        assert_eq!(w.drop_first(), WeightVector::parse("1,1+2").unwrap());
        assert!(WeightVector::parse("0,1").is_err());
    }
}
