//! Expansion of the jump of a tree integral across the wall: integration rays move from
//! their Plus positions to their Minus positions, and every crossing of an adjacent ray
//! spawns a residue that contracts the corresponding edge.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{CentralChargeConfig, Charge, Lattice, QComplex, ReducedCharge, Side};
use crate::trees::{DecoratedTree, FlatTree, Labelling};
use crate::tropical::{place, End, EndConfiguration, Placement, TropicalType};

/// An integration ray: the ray of `Z^side(charge)`, perturbed infinitesimally by `nudge`
/// (compared lexicographically, missing entries read as 0, positive is counterclockwise).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RaySymbol {
    pub side: Side,
    pub charge: ReducedCharge,
    pub nudge: Vec<i8>,
}

impl RaySymbol {
    pub fn plus(charge: ReducedCharge) -> Self {
        RaySymbol { side: Side::Plus, charge, nudge: vec![] }
    }

    pub fn minus(charge: ReducedCharge) -> Self {
        RaySymbol { side: Side::Minus, charge, nudge: vec![] }
    }

    pub fn nudged(mut self, nudge: Vec<i8>) -> Self {
        self.nudge = nudge;
        self
    }

    fn label(&self) -> String {
        let s = match self.side {
            Side::Plus => "+",
            Side::Minus => "-",
            Side::Critical => "0",
        };
        if self.nudge.is_empty() {
            format!("l{s}{}", self.charge)
        } else {
            format!("l{s}{}{:?}", self.charge, self.nudge)
        }
    }
}

fn cmp_nudge(a: &[i8], b: &[i8]) -> Ordering {
    let n = a.len().max(b.len());
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// The two configurations on either side of the wall.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EngineConfigs {
    pub plus: CentralChargeConfig,
    pub minus: CentralChargeConfig,
}

impl Default for EngineConfigs {
    fn default() -> Self {
        EngineConfigs { plus: CentralChargeConfig::plus(), minus: CentralChargeConfig::minus_contained() }
    }
}

impl EngineConfigs {
    /// Requires every Minus ray to lie strictly inside the sector of the Plus generator rays,
    /// so a moving ray never sweeps over an unmoved Plus ray.
    pub fn new(plus: CentralChargeConfig, minus: CentralChargeConfig) -> Result<Self> {
        if plus.side != Side::Plus || minus.side != Side::Minus {
            return Err(Error::DegenerateConfig("expected a Plus and a Minus configuration".into()));
        }
        let c = EngineConfigs { plus, minus };
        for z in [&c.minus.z_gamma, &c.minus.z_eta] {
            let inside = c.plus.z_eta.cross(z) > num_traits::Zero::zero() && z.cross(&c.plus.z_gamma) > num_traits::Zero::zero();
            if !inside {
                return Err(Error::DegenerateConfig("Minus rays must lie strictly inside the Plus sector".into()));
            }
        }
        Ok(c)
    }

    fn z(&self, r: &RaySymbol) -> QComplex {
        match r.side {
            Side::Plus => self.plus.z_reduced(&r.charge),
            _ => self.minus.z_reduced(&r.charge),
        }
    }

    /// Counterclockwise order of ray positions.
    pub fn cmp(&self, a: &RaySymbol, b: &RaySymbol) -> Ordering {
        match self.cmp_angle(a, b) {
            Ordering::Equal => cmp_nudge(&a.nudge, &b.nudge),
            o => o,
        }
    }

    fn cmp_angle(&self, a: &RaySymbol, b: &RaySymbol) -> Ordering {
        let c = self.z(a).cross(&self.z(b));
        let zero = num_traits::Zero::zero();
        if c > zero {
            Ordering::Less
        } else if c < zero {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }

    fn in_sector(&self, r: &RaySymbol) -> bool {
        let z = self.z(r);
        let zero = num_traits::Zero::zero();
        self.plus.z_eta.cross(&z) >= zero && z.cross(&self.plus.z_gamma) >= zero
    }
}

/// Whether `l` lies strictly between `a` and `b` inside the sector of the Plus generator rays.
pub fn separates(l: &RaySymbol, a: &RaySymbol, b: &RaySymbol, configs: &EngineConfigs) -> Result<bool> {
    for r in [l, a, b] {
        if !configs.in_sector(r) {
            return Err(Error::Invalid(format!("ray {} outside the working sector", r.label())));
        }
    }
    let (lo, hi) = if configs.cmp(a, b) == Ordering::Greater { (b, a) } else { (a, b) };
    Ok(configs.cmp(lo, l) == Ordering::Less && configs.cmp(l, hi) == Ordering::Less)
}

/// A vertex of a contracted tree.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct VertexState {
    pub charge: Charge,
    pub ray: RaySymbol,
    /// Induced label: smallest rank among the merged original vertices.
    pub rank: usize,
    pub parent: Option<usize>,
    /// Original vertices merged into this one.
    pub members: Vec<usize>,
    #[serde(skip)]
    pub history: TropicalType,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub enum Event {
    Start,
    /// Ray of vertex `vertex` moved to its Minus position.
    RayMove { vertex: usize, from: String, to: String },
    /// Residue at the pole of the parent `at` of the moving vertex.
    ResidueAtParent { vertex: usize, at: usize, crossing: i64 },
    /// Residue at the pole of a child `at` of the moving vertex.
    ResidueAtChild { vertex: usize, at: usize, crossing: i64 },
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct ContractionNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: usize,
    pub event: Event,
    /// Product of crossing signs and `(-1)^<a,a'>` over residues.
    pub sign: i64,
    /// Exponent of `q^(1/2)` from `q^(<a_parent, a_child>/2)` over residues.
    pub q_exp: i64,
    pub crossing_sign: i64,
    /// Vertices keyed by stable id (the id of the stationary partner survives a merge).
    pub vertices: BTreeMap<usize, VertexState>,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct ExpansionTree {
    pub tree: String,
    pub labelling: Labelling,
    pub nodes: Vec<ContractionNode>,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct SignedTropicalType {
    #[serde(serialize_with = "ser_type")]
    pub ty: TropicalType,
    pub sign: i64,
    /// Exponent of `q^(1/2)` in the q-monomial; the refined sign is `crossing * q^(q_exp/2)`.
    pub q_exp: i64,
    pub crossing_sign: i64,
}

fn ser_type<S: serde::Serializer>(t: &TropicalType, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

const MAX_NODES: usize = 200_000;

fn check_tree(t: &DecoratedTree) -> Result<FlatTree> {
    let flat = t.flatten();
    for a in &flat.labels {
        if a.as_gamma_multiple().is_none() && a.as_eta_multiple().is_none() {
            return Err(Error::Invalid(format!("decoration {a} is not a positive multiple of a generator")));
        }
    }
    let r = t.total_charge().reduce();
    if r.gcd() != 1 {
        return Err(Error::NotPrimitive(r.x, r.y));
    }
    Ok(flat)
}

fn ranks_of(nu: &Labelling, n: usize) -> Result<Vec<usize>> {
    let mut seen = vec![false; n];
    if nu.order.len() != n {
        return Err(Error::Invalid(format!("labelling has {} entries for {} vertices", nu.order.len(), n)));
    }
    for &v in &nu.order {
        if v >= n || seen[v] {
            return Err(Error::Invalid("labelling is not a permutation".into()));
        }
        seen[v] = true;
    }
    Ok(nu.ranks())
}

fn own_dir(a: &Charge) -> Result<ReducedCharge> {
    a.reduce().primitive()
}

pub fn build_expansion(t: &DecoratedTree, nu: &Labelling, configs: &EngineConfigs, lattice: &Lattice) -> Result<ExpansionTree> {
    let flat = check_tree(t)?;
    let ranks = ranks_of(nu, flat.len())?;
    let mut vertices = BTreeMap::new();
    for (i, a) in flat.labels.iter().enumerate() {
        let r = a.reduce();
        vertices.insert(
            i,
            VertexState {
                charge: a.clone(),
                ray: RaySymbol::plus(own_dir(a)?),
                rank: ranks[i],
                parent: flat.parent[i],
                members: vec![i],
                history: TropicalType::End(End { index: i, dir: (r.x, r.y) }),
            },
        );
    }
    let root = ContractionNode {
        parent: None,
        children: vec![],
        depth: 0,
        event: Event::Start,
        sign: 1,
        q_exp: 0,
        crossing_sign: 1,
        vertices,
    };
    let mut nodes = vec![root];
    let mut next = 0;
    while next < nodes.len() {
        if nodes.len() > MAX_NODES {
            return Err(Error::Internal("expansion tree exceeds the node limit".into()));
        }
        let kids = expand(&nodes[next], next, configs, lattice)?;
        for k in kids {
            let id = nodes.len();
            nodes[next].children.push(id);
            nodes.push(k);
        }
        next += 1;
    }
    Ok(ExpansionTree { tree: t.to_string(), labelling: nu.clone(), nodes })
}

fn needs_move(v: &VertexState) -> Result<bool> {
    Ok(match v.ray.side {
        Side::Plus => true,
        _ => v.ray.charge != own_dir(&v.charge)?,
    })
}

fn expand(node: &ContractionNode, id: usize, configs: &EngineConfigs, lattice: &Lattice) -> Result<Vec<ContractionNode>> {
    let mut pick: Option<(usize, usize)> = None;
    for (&k, v) in &node.vertices {
        if needs_move(v)? && pick.is_none_or(|(r, _)| v.rank < r) {
            pick = Some((v.rank, k));
        }
    }
    let Some((_, vid)) = pick else { return Ok(vec![]) };
    let v = &node.vertices[&vid];
    let start = v.ray.clone();
    let mut target = RaySymbol::minus(own_dir(&v.charge)?);
    let ccw = configs.cmp(&start, &target) == Ordering::Less;
    let adjacent: Vec<usize> = node
        .vertices
        .iter()
        .filter(|(&k, u)| k != vid && (u.parent == Some(vid) || v.parent == Some(k)))
        .map(|(&k, _)| k)
        .collect();
    let same: Vec<&RaySymbol> = adjacent
        .iter()
        .map(|k| &node.vertices[k].ray)
        .filter(|r| configs.cmp_angle(r, &target) == Ordering::Equal)
        .collect();
    if !same.is_empty() {
        let firsts = same.iter().map(|r| r.nudge.first().copied().unwrap_or(0));
        let n = if ccw { firsts.min().unwrap() - 1 } else { firsts.max().unwrap() + 1 };
        target.nudge = vec![n];
    }
    let between = |r: &RaySymbol| {
        let (lo, hi) = if ccw { (&start, &target) } else { (&target, &start) };
        configs.cmp(lo, r) == Ordering::Less && configs.cmp(r, hi) == Ordering::Less
    };
    let mut out = Vec::new();
    let mut moved = node.clone();
    moved.parent = Some(id);
    moved.children = vec![];
    moved.depth = node.depth + 1;
    moved.event = Event::RayMove { vertex: vid, from: start.label(), to: target.label() };
    moved.vertices.get_mut(&vid).unwrap().ray = target.clone();
    out.push(moved);
    for &uid in &adjacent {
        let u = &node.vertices[&uid];
        if !between(&u.ray) {
            continue;
        }
        let u_is_parent = v.parent == Some(uid);
        let crossing = match (u_is_parent, ccw) {
            (true, true) | (false, false) => 1,
            _ => -1,
        };
        let pairing = lattice.pairing(&v.charge, &u.charge);
        if pairing == 0 {
            return Err(Error::Internal(format!("residue between parallel charges {} and {}", v.charge, u.charge)));
        }
        let (pa, ch) = if u_is_parent { (u, v) } else { (v, u) };
        let q = lattice.pairing(&pa.charge, &ch.charge);
        let twist = if pairing.rem_euclid(2) == 1 { -1 } else { 1 };
        let mut vs = node.vertices.clone();
        let vv = vs.remove(&vid).unwrap();
        let uu = vs.remove(&uid).unwrap();
        let mut members = uu.members.clone();
        members.extend(&vv.members);
        members.sort_unstable();
        let merged = VertexState {
            charge: &vv.charge + &uu.charge,
            ray: uu.ray.clone(),
            rank: vv.rank.min(uu.rank),
            parent: if u_is_parent { uu.parent } else { vv.parent },
            members,
            history: TropicalType::merge(vv.history.clone(), uu.history.clone()),
        };
        for w in vs.values_mut() {
            if w.parent == Some(vid) {
                w.parent = Some(uid);
            }
        }
        vs.insert(uid, merged);
        let event = if u_is_parent {
            Event::ResidueAtParent { vertex: vid, at: uid, crossing }
        } else {
            Event::ResidueAtChild { vertex: vid, at: uid, crossing }
        };
        out.push(ContractionNode {
            parent: Some(id),
            children: vec![],
            depth: node.depth + 1,
            event,
            sign: node.sign * crossing * twist,
            q_exp: node.q_exp + q,
            crossing_sign: node.crossing_sign * crossing,
            vertices: vs,
        });
    }
    Ok(out)
}

impl ExpansionTree {
    pub fn leaves(&self) -> impl Iterator<Item = &ContractionNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    /// Leaves in which every edge has been contracted.
    pub fn full_contractions(&self) -> impl Iterator<Item = &ContractionNode> {
        self.leaves().filter(|n| n.vertices.len() == 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    /// Indented event log, one line per node.
    pub fn trace(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tree {} labelling {:?}", self.tree, self.labelling.order);
        fn go(t: &ExpansionTree, i: usize, s: &mut String) {
            let n = &t.nodes[i];
            let pad = "  ".repeat(n.depth);
            let ev = match &n.event {
                Event::Start => "start".to_string(),
                Event::RayMove { vertex, from, to } => format!("move v{vertex}: {from} -> {to}"),
                Event::ResidueAtParent { vertex, at, crossing } => {
                    format!("residue v{vertex} at parent v{at}, crossing {crossing:+}")
                }
                Event::ResidueAtChild { vertex, at, crossing } => {
                    format!("residue v{vertex} at child v{at}, crossing {crossing:+}")
                }
            };
            let verts: Vec<String> = n.vertices.values().map(|v| format!("{}@{}", v.charge, v.ray.label())).collect();
            let _ = write!(s, "{pad}[{i}] {ev} | sign {:+} q^({}/2) | {}", n.sign, n.q_exp, verts.join(" "));
            if n.children.is_empty() {
                if n.vertices.len() == 1 {
                    let v = n.vertices.values().next().unwrap();
                    let _ = write!(s, " | type {}", v.history);
                } else {
                    let _ = write!(s, " | no jump");
                }
            }
            s.push('\n');
            for &c in &n.children {
                go(t, c, s);
            }
        }
        go(self, 0, &mut s);
        s
    }
}

/// Signed tropical types from the fully contracted leaves.
pub fn signed_types(t: &DecoratedTree, nu: &Labelling, configs: &EngineConfigs, lattice: &Lattice) -> Result<Vec<SignedTropicalType>> {
    let exp = build_expansion(t, nu, configs, lattice)?;
    let out_dir = t.total_charge().reduce();
    let mut out = Vec::new();
    for leaf in exp.full_contractions() {
        let v = leaf.vertices.values().next().unwrap();
        let ty = v.history.clone();
        if t.size() == 1 {
            break;
        }
        if !ty.is_valid() || ty.dir() != (out_dir.x, out_dir.y) {
            return Err(Error::Internal(format!("type {ty} violates balancing or conservation")));
        }
        out.push(SignedTropicalType { ty, sign: leaf.sign, q_exp: leaf.q_exp, crossing_sign: leaf.crossing_sign });
    }
    Ok(out)
}

/// `sum of signs` over the signed types.
pub fn signed_total(types: &[SignedTropicalType]) -> i64 {
    types.iter().map(|s| s.sign).sum()
}

/// `sum crossing * q^(q_exp/2)` over the signed types.
pub fn q_total(types: &[SignedTropicalType]) -> crate::quantum_algebra::QScalar {
    let mut out = crate::quantum_algebra::QScalar::zero();
    for s in types {
        out.add_mono(s.q_exp, &crate::ring::int(s.crossing_sign));
    }
    out
}

/// End configuration in which end `order[k]` sits at offset `k` plus a small generic shift.
pub fn induced_ends(order: &[usize]) -> EndConfiguration {
    let mut offsets = vec![num_rational::BigRational::from_integer(0.into()); order.len()];
    for (k, &v) in order.iter().enumerate() {
        let shift = num_rational::BigRational::new(1.into(), (1009 + 7 * v as i64 * v as i64 + 13 * v as i64).into());
        offsets[v] = num_rational::BigRational::from_integer((k as i64 * 64).into()) + shift;
    }
    EndConfiguration { offsets }
}

/// First labelling (lexicographic, orientation-compatible ones first) whose types are all
/// realised by the end configuration induced by `order`.
pub fn suitable_labelling(t: &DecoratedTree, order: &[usize], configs: &EngineConfigs, lattice: &Lattice) -> Result<Labelling> {
    let flat = check_tree(t)?;
    let n = flat.len();
    if n > 7 {
        return Err(Error::Invalid("labelling search is limited to 7 vertices".into()));
    }
    let ends = induced_ends(order);
    let mut all = Labelling::all(n);
    all.sort_by_key(|l| !l.is_orientation_compatible(&flat));
    for nu in all {
        let types = signed_types(t, &nu, configs, lattice)?;
        let mut ok = true;
        for s in &types {
            if place(&s.ty, &ends)? == Placement::Infeasible {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(nu);
        }
    }
    Err(Error::Invalid(format!("no suitable labelling found for {t}")))
}
