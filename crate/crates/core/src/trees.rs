//! Decorated rooted trees, their automorphisms, and the weights `W_T` and `W^_T`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Charge, Lattice, WeightVector};
use crate::quantum_algebra::{lambda_coeff, mu_coeff, QScalar};
use crate::ring::int;
use crate::torus_algebra::{dt_from_omega, Spectrum};

/// Rooted tree with a charge on every node. Children are kept sorted, so derived
/// equality is isomorphism of decorated rooted trees.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct DecoratedTree {
    #[serde(rename = "decoration")]
    pub label: Charge,
    pub children: Vec<DecoratedTree>,
}

/// Preorder flattening: node 0 is the root and parents precede children.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlatTree {
    pub labels: Vec<Charge>,
    pub parent: Vec<Option<usize>>,
}

impl FlatTree {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&w| self.parent[w] == Some(v)).collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter_map(|w| self.parent[w].map(|v| (v, w))).collect()
    }
}

impl DecoratedTree {
    pub fn leaf(label: Charge) -> Self {
        DecoratedTree { label, children: vec![] }
    }

    pub fn new(label: Charge, mut children: Vec<DecoratedTree>) -> Self {
        children.sort();
        DecoratedTree { label, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    /// `|T^[1]|`.
    pub fn num_edges(&self) -> usize {
        self.size() - 1
    }

    /// `c(T)`, the sum of all decorations.
    pub fn total_charge(&self) -> Charge {
        self.children.iter().fold(self.label.clone(), |acc, c| &acc + &c.total_charge())
    }

    pub fn labels(&self) -> Vec<Charge> {
        self.flatten().labels
    }

    pub fn flatten(&self) -> FlatTree {
        let mut labels = Vec::new();
        let mut parent = Vec::new();
        fn go(t: &DecoratedTree, p: Option<usize>, labels: &mut Vec<Charge>, parent: &mut Vec<Option<usize>>) {
            let me = labels.len();
            labels.push(t.label.clone());
            parent.push(p);
            for c in &t.children {
                go(c, Some(me), labels, parent);
            }
        }
        go(self, None, &mut labels, &mut parent);
        FlatTree { labels, parent }
    }

    /// Rebuild the canonical tree hanging from `root`.
    pub fn from_flat(labels: &[Charge], parent: &[Option<usize>], root: usize) -> Self {
        let children = (0..labels.len())
            .filter(|&w| parent[w] == Some(root))
            .map(|w| Self::from_flat(labels, parent, w))
            .collect();
        Self::new(labels[root].clone(), children)
    }

    /// Order of the decoration-preserving automorphism group.
    pub fn aut(&self) -> BigInt {
        let mut out = BigInt::one();
        let mut i = 0;
        while i < self.children.len() {
            let mut j = i;
            while j < self.children.len() && self.children[j] == self.children[i] {
                j += 1;
            }
            for k in 1..=(j - i) {
                out *= BigInt::from(k);
            }
            out *= self.children[i].aut().pow((j - i) as u32);
            i = j;
        }
        out
    }

    /// `W_T = (-1)^|T^[1]| DT(gamma_T)/|Aut T| prod_(v->w) <a(v), DT(a(w)) a(w)>`.
    pub fn weight(&self, spectrum: &Spectrum, lattice: &Lattice) -> Result<BigRational> {
        let flat = self.flatten();
        let mut w = dt_from_omega(spectrum, &self.label)? / BigRational::from_integer(self.aut());
        if flat.edges().len() % 2 == 1 {
            w = -w;
        }
        for (v, c) in flat.edges() {
            let dt = dt_from_omega(spectrum, &flat.labels[c])?;
            w *= dt * int(lattice.pairing(&flat.labels[v], &flat.labels[c]));
        }
        Ok(w)
    }

    /// `prod_edges lambda(E) mu(E) / |Aut T|`: an edge from `m gamma` to `h eta` gives
    /// `lambda^m_h`, an edge from `n eta` to `h gamma` gives `mu^n_h`.
    pub fn q_weight(&self) -> Result<QScalar> {
        let flat = self.flatten();
        let mut out = QScalar::one().scale(&BigRational::new(BigInt::one(), self.aut()));
        for (v, c) in flat.edges() {
            let (p, ch) = (&flat.labels[v], &flat.labels[c]);
            let f = match (p.as_gamma_multiple(), ch.as_eta_multiple(), p.as_eta_multiple(), ch.as_gamma_multiple()) {
                (Some((m, _)), Some((h, _)), _, _) => lambda_coeff(m, h),
                (_, _, Some((n, _)), Some((h, _))) => mu_coeff(n, h),
                _ => return Err(Error::Invalid(format!("edge {p} -> {ch} does not alternate gamma and eta"))),
            };
            out = out.mul(&f);
        }
        Ok(out)
    }
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        match self.children.as_slice() {
            [] => Ok(()),
            [c] => write!(f, ">{c}"),
            cs => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, ">({})", parts.join(","))
            }
        }
    }
}

/// Parses the tree-spec grammar: `g`, `2e`, `g2` (second gamma generator), `>` for
/// parent to child, parentheses for branching, e.g. `g>(e,2e)` or `g>e>g>2e`.
pub fn parse_tree(s: &str) -> Result<DecoratedTree> {
    #[derive(Debug)]
    struct Raw {
        mult: i64,
        kind: char,
        idx: usize,
        children: Vec<Raw>,
    }
    struct P<'a> {
        s: &'a [u8],
        i: usize,
    }
    impl P<'_> {
        fn peek(&self) -> Option<u8> {
            self.s.get(self.i).copied()
        }
        fn num(&mut self) -> Option<i64> {
            let st = self.i;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.i += 1;
            }
            std::str::from_utf8(&self.s[st..self.i]).ok()?.parse().ok()
        }
        fn err(&self, what: &str) -> Error {
            Error::Invalid(format!("tree spec: {what} at position {}", self.i))
        }
        fn node(&mut self) -> Result<Raw> {
            let mult = self.num().unwrap_or(1);
            if mult < 1 {
                return Err(self.err("multiplicity must be positive"));
            }
            let kind = match self.peek() {
                Some(b'g') => 'g',
                Some(b'e') => 'e',
                _ => return Err(self.err("expected 'g' or 'e'")),
            };
            self.i += 1;
            let idx = self.num().unwrap_or(1);
            if idx < 1 {
                return Err(self.err("generator index starts at 1"));
            }
            let mut children = vec![];
            if self.peek() == Some(b'>') {
                self.i += 1;
                if self.peek() == Some(b'(') {
                    self.i += 1;
                    loop {
                        children.push(self.node()?);
                        match self.peek() {
                            Some(b',') => self.i += 1,
                            Some(b')') => {
                                self.i += 1;
                                break;
                            }
                            _ => return Err(self.err("expected ',' or ')'")),
                        }
                    }
                } else {
                    children.push(self.node()?);
                }
            }
            Ok(Raw { mult, kind, idx: idx as usize, children })
        }
    }
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = P { s: cleaned.as_bytes(), i: 0 };
    let raw = p.node()?;
    if p.i != cleaned.len() {
        return Err(p.err("trailing input"));
    }
    fn dims(r: &Raw, l: &mut (usize, usize)) {
        if r.kind == 'g' {
            l.0 = l.0.max(r.idx);
        } else {
            l.1 = l.1.max(r.idx);
        }
        r.children.iter().for_each(|c| dims(c, l));
    }
    let mut l = (1, 1);
    dims(&raw, &mut l);
    fn build(r: &Raw, l: (usize, usize)) -> DecoratedTree {
        let label = if r.kind == 'g' {
            Charge::gamma(l.0, l.1, r.idx - 1, r.mult)
        } else {
            Charge::eta(l.0, l.1, r.idx - 1, r.mult)
        };
        DecoratedTree::new(label, r.children.iter().map(|c| build(c, l)).collect())
    }
    Ok(build(&raw, l))
}

/// All decorated rooted trees, up to isomorphism, with root `root` and the remaining
/// decorations `others`.
pub fn enumerate_trees_with(root: &Charge, others: &[Charge]) -> Vec<DecoratedTree> {
    let n = others.len() + 1;
    let mut labels = vec![root.clone()];
    labels.extend(others.iter().cloned());
    let mut out = BTreeSet::new();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    fn reaches_root(parent: &[Option<usize>], v: usize) -> bool {
        let mut cur = v;
        for _ in 0..parent.len() {
            match parent[cur] {
                None => return cur == 0,
                Some(p) => cur = p,
            }
        }
        false
    }
    fn rec(k: usize, n: usize, labels: &[Charge], parent: &mut Vec<Option<usize>>, out: &mut BTreeSet<DecoratedTree>) {
        if k == n {
            if (1..n).all(|v| reaches_root(parent, v)) {
                out.insert(DecoratedTree::from_flat(labels, parent, 0));
            }
            return;
        }
        for p in 0..n {
            if p != k {
                parent[k] = Some(p);
                rec(k + 1, n, labels, parent, out);
            }
        }
        parent[k] = None;
    }
    rec(1, n, &labels, &mut parent, &mut out);
    out.into_iter().collect()
}

/// Trees on the two-charge lattice decorated by the parts of `w`, `w1` parts as multiples
/// of `gamma` and `w2` parts as multiples of `eta`, with root `w1[root_part_index] gamma`.
pub fn enumerate_trees(w: &WeightVector, root_part_index: usize) -> Result<Vec<DecoratedTree>> {
    if root_part_index >= w.w1.len() {
        return Err(Error::Invalid(format!("weight vector {w} has no gamma part {root_part_index}")));
    }
    let l = Lattice::new(1, 1, 1);
    let root = l.gamma(0, w.w1[root_part_index] as i64);
    let mut others = Vec::new();
    for (i, &p) in w.w1.iter().enumerate() {
        if i != root_part_index {
            others.push(l.gamma(0, p as i64));
        }
    }
    others.extend(w.w2.iter().map(|&p| l.eta(0, p as i64)));
    Ok(enumerate_trees_with(&root, &others))
}

/// Total order on the nodes of a flattened tree: `order[k]` is the node labelled `k + 1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Labelling {
    pub order: Vec<usize>,
}

impl Labelling {
    /// Preorder labelling, compatible with the orientation away from the root.
    pub fn preorder(n: usize) -> Self {
        Labelling { order: (0..n).collect() }
    }

    /// Rank of each node (0-based).
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.order.len()];
        for (k, &v) in self.order.iter().enumerate() {
            r[v] = k;
        }
        r
    }

    pub fn is_orientation_compatible(&self, t: &FlatTree) -> bool {
        let r = self.ranks();
        t.edges().iter().all(|&(v, w)| r[v] < r[w])
    }

    /// Every labelling of `n` nodes, in lexicographic order.
    pub fn all(n: usize) -> Vec<Labelling> {
        let mut out = Vec::new();
        fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Labelling>) {
            if cur.len() == used.len() {
                out.push(Labelling { order: cur.clone() });
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    rec(cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }
}
