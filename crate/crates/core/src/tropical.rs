//! Rational tropical curves in the plane with prescribed weighted ends: combinatorial
//! types as binary merge trees, exact placement, Mikhalkin and Block-Goettsche counts.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::WeightVector;
use crate::quantum_algebra::QScalar;

/// Incoming end: `w1` parts are vertical (direction `(0, w)`), `w2` parts horizontal.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct End {
    pub index: usize,
    /// Weighted direction `(x, y)`.
    pub dir: (i64, i64),
}

pub fn ends_of(w: &WeightVector) -> Vec<End> {
    let mut out = Vec::new();
    for &p in &w.w1 {
        out.push(End { index: out.len(), dir: (0, p as i64) });
    }
    for &p in &w.w2 {
        out.push(End { index: out.len(), dir: (p as i64, 0) });
    }
    out
}

/// Binary merge structure; each internal node is a trivalent vertex whose outgoing edge
/// carries the sum of its inputs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum TropicalType {
    End(End),
    Merge(Box<TropicalType>, Box<TropicalType>),
}

fn det(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

impl TropicalType {
    pub fn merge(a: TropicalType, b: TropicalType) -> Self {
        if a <= b {
            TropicalType::Merge(Box::new(a), Box::new(b))
        } else {
            TropicalType::Merge(Box::new(b), Box::new(a))
        }
    }

    /// Weighted direction of the outgoing edge.
    pub fn dir(&self) -> (i64, i64) {
        match self {
            TropicalType::End(e) => e.dir,
            TropicalType::Merge(a, b) => {
                let (x, y) = (a.dir(), b.dir());
                (x.0 + y.0, x.1 + y.1)
            }
        }
    }

    pub fn ends(&self) -> Vec<End> {
        match self {
            TropicalType::End(e) => vec![*e],
            TropicalType::Merge(a, b) => {
                let mut v = a.ends();
                v.extend(b.ends());
                v
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        match self {
            TropicalType::End(_) => 0,
            TropicalType::Merge(a, b) => 1 + a.num_vertices() + b.num_vertices(),
        }
    }

    /// `|det|` of the two incoming weighted directions at each vertex, in postorder.
    pub fn vertex_dets(&self) -> Vec<i64> {
        match self {
            TropicalType::End(_) => vec![],
            TropicalType::Merge(a, b) => {
                let mut v = a.vertex_dets();
                v.extend(b.vertex_dets());
                v.push(det(a.dir(), b.dir()).abs());
                v
            }
        }
    }

    /// Balancing holds by construction; this checks the non-parallel condition at every vertex.
    pub fn is_valid(&self) -> bool {
        self.vertex_dets().iter().all(|&d| d != 0)
    }

    /// Mikhalkin multiplicity.
    pub fn multiplicity(&self) -> i64 {
        self.vertex_dets().iter().product()
    }

    /// Block-Goettsche multiplicity `prod [det]_q`.
    pub fn q_multiplicity(&self) -> QScalar {
        self.vertex_dets().iter().fold(QScalar::one(), |acc, &d| acc.mul(&QScalar::quantum_int(d)))
    }

    /// The same type with end identities forgotten (only weighted directions kept).
    pub fn shape(&self) -> TropicalType {
        match self {
            TropicalType::End(e) => TropicalType::End(End { index: 0, dir: e.dir }),
            TropicalType::Merge(a, b) => TropicalType::merge(a.shape(), b.shape()),
        }
    }

    /// Per-vertex data `{w1 m1, w2 m2, -(w1 m1 + w2 m2)}` with inputs pointing into the vertex
    /// negated, as in the balancing condition.
    pub fn vertex_data(&self) -> Vec<[(i64, i64); 3]> {
        match self {
            TropicalType::End(_) => vec![],
            TropicalType::Merge(a, b) => {
                let mut v = a.vertex_data();
                v.extend(b.vertex_data());
                let (x, y) = (a.dir(), b.dir());
                v.push([(-x.0, -x.1), (-y.0, -y.1), (x.0 + y.0, x.1 + y.1)]);
                v
            }
        }
    }
}

impl fmt::Display for TropicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropicalType::End(e) => write!(f, "({},{})", e.dir.0, e.dir.1),
            TropicalType::Merge(a, b) => write!(f, "[{a} {b}]"),
        }
    }
}

/// All valid types on the given ends.
pub fn enumerate_types_on(ends: &[End]) -> Vec<TropicalType> {
    fn rec(items: Vec<TropicalType>, out: &mut BTreeSet<TropicalType>) {
        if items.len() == 1 {
            out.insert(items[0].clone());
            return;
        }
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                if det(items[i].dir(), items[j].dir()) == 0 {
                    continue;
                }
                let mut next: Vec<TropicalType> =
                    items.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, t)| t.clone()).collect();
                next.push(TropicalType::merge(items[i].clone(), items[j].clone()));
                rec(next, out);
            }
        }
    }
    if ends.len() < 2 {
        return vec![];
    }
    let mut out = BTreeSet::new();
    rec(ends.iter().map(|e| TropicalType::End(*e)).collect(), &mut out);
    out.into_iter().collect()
}

pub fn enumerate_types(w: &WeightVector) -> Vec<TropicalType> {
    enumerate_types_on(&ends_of(w))
}

/// Offsets of the incoming lines: `x = offsets[i]` for vertical ends, `y = offsets[i]` for horizontal ones.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EndConfiguration {
    #[serde(serialize_with = "ser_rats")]
    pub offsets: Vec<BigRational>,
}

fn ser_rats<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl EndConfiguration {
    /// Distinct random rationals with large denominators.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        let mut offsets = Vec::new();
        while offsets.len() < n {
            let den: i64 = rng.gen_range(10_007..1_000_003);
            let num: i64 = rng.gen_range(-1_000_000_000..1_000_000_000);
            let r = BigRational::new(BigInt::from(num), BigInt::from(den));
            if seen.insert(r.clone()) {
                offsets.push(r);
            }
        }
        EndConfiguration { offsets }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        EndConfiguration { offsets: v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect() }
    }
}

type Point = (BigRational, BigRational);

#[derive(Clone, PartialEq, Debug)]
pub struct PlacedCurve {
    pub ty: TropicalType,
    /// Vertex positions in postorder, matching `vertex_dets`.
    pub vertices: Vec<Point>,
    pub ends: EndConfiguration,
}

/// Outcome of solving one type against an end configuration.
#[derive(Clone, PartialEq, Debug)]
pub enum Placement {
    Feasible(PlacedCurve),
    Infeasible,
}

/// Where an edge starts: on an incoming line (no constraint) or at a vertex.
enum Source {
    Line(Point),
    Vertex(Point),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Solve bottom-up; the merge point must lie strictly ahead of every bounded input edge.
pub fn place(ty: &TropicalType, ends: &EndConfiguration) -> Result<Placement> {
    fn go(t: &TropicalType, ends: &EndConfiguration, verts: &mut Vec<Point>) -> Result<Option<Source>> {
        match t {
            TropicalType::End(e) => {
                let c = ends
                    .offsets
                    .get(e.index)
                    .ok_or_else(|| Error::Invalid(format!("no offset for end {}", e.index)))?
                    .clone();
                Ok(Some(Source::Line(if e.dir.0 == 0 { (c, BigRational::zero()) } else { (BigRational::zero(), c) })))
            }
            TropicalType::Merge(a, b) => {
                let (Some(sa), Some(sb)) = (go(a, ends, verts)?, go(b, ends, verts)?) else {
                    return Ok(None);
                };
                let (da, db) = (a.dir(), b.dir());
                let d = det(da, db);
                if d == 0 {
                    return Err(Error::Invalid("parallel inputs".into()));
                }
                let (pa, pb) = match (&sa, &sb) {
                    (Source::Line(p) | Source::Vertex(p), Source::Line(q) | Source::Vertex(q)) => (p, q),
                };
                // pa + ta da = pb + tb db
                let rx = &pb.0 - &pa.0;
                let ry = &pb.1 - &pa.1;
                let dd = rat(d);
                let ta = (&rx * rat(db.1) - &ry * rat(db.0)) / &dd;
                let tb = (&rx * rat(da.1) - &ry * rat(da.0)) / &dd;
                let p = (&pa.0 + &ta * rat(da.0), &pa.1 + &ta * rat(da.1));
                for (s, tt) in [(&sa, &ta), (&sb, &tb)] {
                    if let Source::Vertex(_) = s {
                        if tt.is_zero() {
                            return Err(Error::NonGeneric("zero-length bounded edge".into()));
                        }
                        if tt.is_negative() {
                            return Ok(None);
                        }
                    }
                }
                verts.push(p.clone());
                Ok(Some(Source::Vertex(p)))
            }
        }
    }
    let mut verts = Vec::new();
    match go(ty, ends, &mut verts)? {
        Some(_) => Ok(Placement::Feasible(PlacedCurve { ty: ty.clone(), vertices: verts, ends: ends.clone() })),
        None => Ok(Placement::Infeasible),
    }
}

impl PlacedCurve {
    /// Balancing and incidence recheck on the solved positions.
    pub fn verify(&self) -> bool {
        self.ty.vertex_data().iter().all(|v| v.iter().fold((0, 0), |a, d| (a.0 + d.0, a.1 + d.1)) == (0, 0))
            && self.vertices.len() == self.ty.num_vertices()
    }

    /// Edge segments for plotting; unbounded edges are cut at length `reach`.
    pub fn segments(&self, reach: f64) -> Vec<[f64; 4]> {
        fn f(r: &BigRational) -> f64 {
            r.to_f64().unwrap_or(f64::NAN)
        }
        fn go(t: &TropicalType, c: &PlacedCurve, next: &mut usize, reach: f64, out: &mut Vec<[f64; 4]>) -> Option<(f64, f64)> {
            match t {
                TropicalType::End(_) => None,
                TropicalType::Merge(a, b) => {
                    let sa = go(a, c, next, reach, out);
                    let sb = go(b, c, next, reach, out);
                    let p = &c.vertices[*next];
                    *next += 1;
                    let p = (f(&p.0), f(&p.1));
                    for (s, child) in [(sa, a), (sb, b)] {
                        let q = match (s, child.as_ref()) {
                            (Some(q), _) => q,
                            (None, TropicalType::End(e)) => {
                                let n = ((e.dir.0 * e.dir.0 + e.dir.1 * e.dir.1) as f64).sqrt();
                                (p.0 - reach * e.dir.0 as f64 / n, p.1 - reach * e.dir.1 as f64 / n)
                            }
                            (None, _) => unreachable!("merge nodes always return their vertex"),
                        };
                        out.push([q.0, q.1, p.0, p.1]);
                    }
                    Some(p)
                }
            }
        }
        let mut out = Vec::new();
        let mut next = 0;
        if let Some(p) = go(&self.ty, self, &mut next, reach, &mut out) {
            let d = self.ty.dir();
            let n = ((d.0 * d.0 + d.1 * d.1) as f64).sqrt();
            out.push([p.0, p.1, p.0 + reach * d.0 as f64 / n, p.1 + reach * d.1 as f64 / n]);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.ty.to_string(),
            "multiplicity": self.ty.multiplicity(),
            "vertices": self.vertices.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect::<Vec<_>>(),
            "ends": self.ends,
        })
    }
}

/// Feasible curves for one end configuration; fails if the configuration is not generic.
pub fn placed_curves(w: &WeightVector, ends: &EndConfiguration) -> Result<Vec<PlacedCurve>> {
    let mut out = Vec::new();
    for t in enumerate_types(w) {
        if let Placement::Feasible(c) = place(&t, ends)? {
            if !c.verify() {
                return Err(Error::Internal(format!("placed curve of type {t} fails balancing")));
            }
            out.push(c);
        }
    }
    Ok(out)
}

const MAX_RESEEDS: u64 = 16;

/// Curves for the first generic configuration derived from `seed`.
pub fn generic_curves(w: &WeightVector, seed: u64) -> Result<Vec<PlacedCurve>> {
    let n = w.num_parts();
    for k in 0..MAX_RESEEDS {
        let ends = EndConfiguration::random(n, seed.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        match placed_curves(w, &ends) {
            Err(Error::NonGeneric(_)) => continue,
            r => return r,
        }
    }
    Err(Error::NonGeneric(format!("no generic configuration after {MAX_RESEEDS} draws")))
}

/// `N^trop(w)`.
pub fn ntrop(w: &WeightVector, seed: u64) -> Result<i64> {
    Ok(generic_curves(w, seed)?.iter().map(|c| c.ty.multiplicity()).sum())
}

/// `N^trop(w)` refined by Block-Goettsche multiplicities.
pub fn ntrop_q(w: &WeightVector, seed: u64) -> Result<QScalar> {
    Ok(generic_curves(w, seed)?.iter().fold(QScalar::zero(), |acc, c| acc.add(&c.ty.q_multiplicity())))
}
