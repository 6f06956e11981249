//! Two-colored trees indexing the strata of the Swiss-Cheese spaces, their
//! dimensions, and E¹ dimension tables counted two independent ways.

use crate::cobar::{self, Color, Signature, Which};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

pub const MAX_TREE_BOUND: usize = cobar::MAX_ARITY;
pub const DEFAULT_TREE_BOUND: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Child {
    /// 1-based leaf label.
    Leaf(u32, Color),
    Vertex(Vertex),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    /// Color of the outgoing edge.
    pub color: Color,
    pub children: Vec<Child>,
}

impl Child {
    pub fn color(&self) -> Color {
        match self {
            Child::Leaf(_, c) => *c,
            Child::Vertex(v) => v.color,
        }
    }
    fn min_leaf(&self) -> u32 {
        match self {
            Child::Leaf(l, _) => *l,
            Child::Vertex(v) => v.children.iter().map(|c| c.min_leaf()).min().unwrap_or(u32::MAX),
        }
    }
    fn sort_key(&self) -> (Color, u32) {
        (self.color(), self.min_leaf())
    }
}

impl Vertex {
    pub fn new(color: Color, mut children: Vec<Child>) -> Self {
        children.sort_by_key(|c| c.sort_key());
        Vertex { color, children }
    }

    /// (k_v, n_v): incoming c- and o-edges.
    pub fn arity(&self) -> (usize, usize) {
        let k = self.children.iter().filter(|c| c.color() == Color::C).count();
        (k, self.children.len() - k)
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a Vertex>) {
        out.push(self);
        for c in &self.children {
            if let Child::Vertex(v) = c {
                v.walk(out);
            }
        }
    }

    fn leaves(&self, out: &mut Vec<(u32, Color)>) {
        for c in &self.children {
            match c {
                Child::Leaf(l, col) => out.push((*l, *col)),
                Child::Vertex(v) => v.leaves(out),
            }
        }
    }

    fn dump(&self) -> String {
        let part = |col: Color| -> Vec<String> {
            self.children
                .iter()
                .filter(|c| c.color() == col)
                .map(|c| match c {
                    Child::Leaf(l, col) => format!("{}({})", col.letter(), l),
                    Child::Vertex(v) => v.dump(),
                })
                .collect()
        };
        let cs = part(Color::C).join(",");
        let os = part(Color::O);
        if os.is_empty() {
            format!("{}[{}]", self.color.letter(), cs)
        } else {
            format!("{}[{};{}]", self.color.letter(), cs, os.join(","))
        }
    }
}

/// A stratum label: leaves 1..=k are closed, k+1..=k+n open. Children are
/// kept sorted by (color, minimal leaf), which picks one planar
/// representative per re-planarization class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoColoredTree {
    pub k: usize,
    pub n: usize,
    pub root: Vertex,
}

impl TwoColoredTree {
    /// Checks the leaf bijection and that no o-edge enters a c-vertex.
    pub fn new(k: usize, n: usize, root: Vertex) -> Result<Self> {
        let mut ls = Vec::new();
        root.leaves(&mut ls);
        ls.sort_unstable();
        let want: Vec<(u32, Color)> = (1..=(k + n) as u32).map(|l| (l, if (l as usize) <= k { Color::C } else { Color::O })).collect();
        if ls != want {
            return Err(Error::input(format!("leaves {:?} are not c(1..{k}), o({}..{})", ls, k + 1, k + n)));
        }
        let mut vs = Vec::new();
        root.walk(&mut vs);
        for v in vs {
            if v.color == Color::C && v.children.iter().any(|c| c.color() == Color::O) {
                return Err(Error::input(format!("o-edge into the c-vertex {}", v.dump())));
            }
        }
        Ok(TwoColoredTree { k, n, root: canonicalize(&root) })
    }

    pub fn vertices(&self) -> Vec<&Vertex> {
        let mut v = Vec::new();
        self.root.walk(&mut v);
        v
    }

    pub fn dump(&self) -> String {
        self.root.dump()
    }

    /// Parses the bracketed syntax `o[c(1),c[c(2),c(3)];o(4)]`.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let root = match parse_item(&chars, &mut pos)? {
            Child::Vertex(v) => v,
            Child::Leaf(..) => return Err(Error::input("a tree needs a root vertex")),
        };
        if pos != chars.len() {
            return Err(Error::input(format!("trailing input at {pos}")));
        }
        let mut ls = Vec::new();
        root.leaves(&mut ls);
        let k = ls.iter().filter(|l| l.1 == Color::C).count();
        TwoColoredTree::new(k, ls.len() - k, root)
    }

    /// Relabel leaves by a colour-preserving permutation (1-based, `perm[l-1]`).
    pub fn relabel(&self, perm: &[u32]) -> Result<Self> {
        fn go(v: &Vertex, perm: &[u32]) -> Vertex {
            Vertex::new(
                v.color,
                v.children
                    .iter()
                    .map(|c| match c {
                        Child::Leaf(l, col) => Child::Leaf(perm[*l as usize - 1], *col),
                        Child::Vertex(w) => Child::Vertex(go(w, perm)),
                    })
                    .collect(),
            )
        }
        TwoColoredTree::new(self.k, self.n, go(&self.root, perm))
    }
}

fn canonicalize(v: &Vertex) -> Vertex {
    Vertex::new(
        v.color,
        v.children
            .iter()
            .map(|c| match c {
                Child::Vertex(w) => Child::Vertex(canonicalize(w)),
                l => l.clone(),
            })
            .collect(),
    )
}

fn parse_item(s: &[char], pos: &mut usize) -> Result<Child> {
    let color = match s.get(*pos) {
        Some('c') => Color::C,
        Some('o') => Color::O,
        other => return Err(Error::input(format!("expected c or o at {}, found {:?}", pos, other))),
    };
    *pos += 1;
    match s.get(*pos) {
        Some('(') => {
            *pos += 1;
            let start = *pos;
            while s.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let l: u32 = s[start..*pos].iter().collect::<String>().parse().map_err(|_| Error::input(format!("bad leaf label at {start}")))?;
            if s.get(*pos) != Some(&')') {
                return Err(Error::input(format!("expected ) at {}", pos)));
            }
            *pos += 1;
            Ok(Child::Leaf(l, color))
        }
        Some('[') => {
            *pos += 1;
            let mut children = Vec::new();
            let mut side = Color::C;
            loop {
                match s.get(*pos) {
                    Some(']') => {
                        *pos += 1;
                        break;
                    }
                    Some(',') => *pos += 1,
                    Some(';') => {
                        side = Color::O;
                        *pos += 1;
                    }
                    Some(_) => {
                        let c = parse_item(s, pos)?;
                        if c.color() != side {
                            return Err(Error::input(format!("{}-colored child on the {} side", c.color().letter(), side.letter())));
                        }
                        children.push(c);
                    }
                    None => return Err(Error::input("unterminated vertex")),
                }
            }
            Ok(Child::Vertex(Vertex::new(color, children)))
        }
        other => Err(Error::input(format!("expected ( or [ at {}, found {:?}", pos, other))),
    }
}

/// c-vertices need k ≥ 2 and no o-inputs; o-vertices need 2k + n ≥ 2.
fn vertex_ok(color: Color, k: usize, n: usize) -> bool {
    match color {
        Color::C => n == 0 && k >= 2,
        Color::O => 2 * k + n >= 2,
    }
}

fn set_partitions<T: Clone>(xs: &[T]) -> Vec<Vec<Vec<T>>> {
    if xs.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in set_partitions(&xs[1..]) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, xs[0].clone());
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![xs[0].clone()]);
        out.push(q);
    }
    out
}

type Memo = BTreeMap<(Vec<(u32, Color)>, Color), Vec<Vertex>>;

fn trees_on(leaves: &[(u32, Color)], out: Color, memo: &mut Memo) -> Vec<Vertex> {
    let key = (leaves.to_vec(), out);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut res = BTreeSet::new();
    for part in set_partitions(leaves) {
        res.extend(trees_with_root_blocks(&part, out, memo));
    }
    let v: Vec<Vertex> = res.into_iter().collect();
    memo.insert(key, v.clone());
    v
}

/// Trees whose root has exactly the given blocks of leaves below its inputs.
fn trees_with_root_blocks(part: &[Vec<(u32, Color)>], out: Color, memo: &mut Memo) -> Vec<Vertex> {
    // per block: the colour its edge may carry, and whether it is a bare leaf
    let options: Vec<Vec<(Color, bool)>> = part
        .iter()
        .map(|b| {
            let mut opts = Vec::new();
            if b.len() == 1 {
                opts.push((b[0].1, true));
            }
            if b.iter().all(|l| l.1 == Color::C) {
                opts.push((Color::C, false));
            }
            if out == Color::O {
                opts.push((Color::O, false));
            }
            opts
        })
        .collect();
    let mut res = Vec::new();
    let mut choice = vec![0usize; part.len()];
    'outer: loop {
        let cols: Vec<(Color, bool)> = choice.iter().zip(&options).map(|(i, o)| o[*i]).collect();
        let k = cols.iter().filter(|c| c.0 == Color::C).count();
        // validity first: it rules out the only self-referential choices
        if vertex_ok(out, k, cols.len() - k) {
            let mut acc: Vec<Vec<Child>> = vec![vec![]];
            for (b, (col, bare)) in part.iter().zip(&cols) {
                let alts: Vec<Child> = if *bare {
                    vec![Child::Leaf(b[0].0, b[0].1)]
                } else {
                    trees_on(b, *col, memo).into_iter().map(Child::Vertex).collect()
                };
                acc = acc
                    .iter()
                    .flat_map(|a| {
                        alts.iter().map(move |c| {
                            let mut x = a.clone();
                            x.push(c.clone());
                            x
                        })
                    })
                    .collect();
            }
            res.extend(acc.into_iter().map(|cs| Vertex::new(out, cs)));
        }
        for i in 0..choice.len() {
            choice[i] += 1;
            if choice[i] < options[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }
    res
}

fn check_bound(k: usize, n: usize, bound: usize) -> Result<()> {
    if k + n == 0 {
        return Err(Error::input("need k + n ≥ 1"));
    }
    if bound > MAX_TREE_BOUND || k + n > bound {
        return Err(Error::Cutoff(format!("k + n = {} exceeds the tree bound {} (maximum {})", k + n, bound.min(MAX_TREE_BOUND), MAX_TREE_BOUND)));
    }
    Ok(())
}

/// All strata trees of signature (c^k, o^n → out), one per isomorphism class.
pub fn enumerate_trees(k: usize, n: usize, out: Color, bound: usize) -> Result<Vec<TwoColoredTree>> {
    check_bound(k, n, bound)?;
    if out == Color::C && n > 0 {
        return Ok(vec![]);
    }
    let leaves: Vec<(u32, Color)> = (1..=(k + n) as u32).map(|l| (l, if (l as usize) <= k { Color::C } else { Color::O })).collect();
    // parallel over the root's block structure; one memo per worker
    let found: BTreeSet<Vertex> = set_partitions(&leaves)
        .par_iter()
        .flat_map_iter(|p| trees_with_root_blocks(p, out, &mut Memo::new()))
        .collect();
    found.into_iter().map(|v| TwoColoredTree::new(k, n, v)).collect()
}

/// dim C_T: Σ_c (2k−3) + Σ_o (2k+n−2).
pub fn stratum_dimension(t: &TwoColoredTree) -> Result<i64> {
    let mut d = 0i64;
    for v in t.vertices() {
        let (k, n) = v.arity();
        if !vertex_ok(v.color, k, n) {
            return Err(Error::input(format!("degenerate vertex {} with (k, n) = ({k}, {n})", v.dump())));
        }
        d += match v.color {
            Color::C => 2 * k as i64 - 3,
            Color::O => 2 * k as i64 + n as i64 - 2,
        };
    }
    Ok(d)
}

/// Total degree p + q with p = −dim C_T.
pub fn e1_degree(t: &TwoColoredTree, q: i64) -> Result<i64> {
    Ok(q - stratum_dimension(t)?)
}

/// The same degree, summed vertex by vertex as in the cobar grading.
pub fn e1_degree_by_vertices(t: &TwoColoredTree, q: i64) -> i64 {
    q + t
        .vertices()
        .iter()
        .map(|v| {
            let (k, n) = v.arity();
            let (k, n) = (k as i64, n as i64);
            1 + match v.color {
                Color::C => 2 - 2 * k,
                Color::O => 1 - 2 * k - n,
            }
        })
        .sum::<i64>()
}

/// Poincaré polynomial of H•(C_{k,n}) (o) or H•(C_k) (c): n!·Π_{j<k}(1 + j t).
pub fn vertex_poincare(color: Color, k: usize, n: usize) -> Vec<u64> {
    let mut p = vec![1u64];
    for j in 1..k.max(1) as u64 {
        let mut q = vec![0u64; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            q[i] += c;
            q[i + 1] += c * j;
        }
        p = q;
    }
    if color == Color::O {
        let f: u64 = (1..=n as u64).product();
        p.iter_mut().for_each(|c| *c *= f);
    }
    p
}

fn tree_poincare(t: &TwoColoredTree) -> Vec<u64> {
    let mut p = vec![1u64];
    for v in t.vertices() {
        let (k, n) = v.arity();
        let f = vertex_poincare(v.color, k, n);
        let mut q = vec![0u64; p.len() + f.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                q[i + j] += a * b;
            }
        }
        p = q;
    }
    p
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct E1Row {
    pub degree: i64,
    pub route_trees: u64,
    pub route_cobar: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct E1Table {
    pub k: usize,
    pub n: usize,
    pub output: char,
    pub trees: usize,
    pub rows: Vec<E1Row>,
}

impl E1Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,n,output,degree,route_trees,route_cobar\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{},{}\n", self.k, self.n, self.output, r.degree, r.route_trees, r.route_cobar));
        }
        s
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.rows.iter().map(|r| if r.degree % 2 == 0 { r.route_cobar as i64 } else { -(r.route_cobar as i64) }).sum()
    }
}

/// Dimensions of Cobar(sc) in signature (c^k, o^n → out) per degree in
/// [lo, hi]: (i) from strata trees and vertex cohomology, (ii) from the
/// cobar basis. A disagreement is an error.
pub fn e1_dimension_table(k: usize, n: usize, out: Color, lo: i64, hi: i64, bound: usize) -> Result<E1Table> {
    let trees = enumerate_trees(k, n, out, bound)?;
    let mut by_trees: BTreeMap<i64, u64> = BTreeMap::new();
    for t in &trees {
        for (q, c) in tree_poincare(t).into_iter().enumerate() {
            *by_trees.entry(e1_degree(t, q as i64)?).or_default() += c;
        }
    }
    let table = cobar::build_cooperad_tables(Which::Sc, (k + n).max(1))?;
    let sig = Signature::kn(k, n, out);
    let by_cobar: BTreeMap<i64, u64> = if out == Color::C && n > 0 {
        BTreeMap::new()
    } else {
        cobar::basis(&table, &sig)?.into_iter().map(|(d, v)| (d, v.len() as u64)).collect()
    };
    let mut rows = Vec::new();
    for d in lo..=hi {
        let a = by_trees.get(&d).copied().unwrap_or(0);
        let b = by_cobar.get(&d).copied().unwrap_or(0);
        if a != b {
            return Err(Error::Math(format!("routes disagree for (k, n) = ({k}, {n}) in degree {d}: trees {a}, cobar {b}")));
        }
        rows.push(E1Row { degree: d, route_trees: a, route_cobar: b });
    }
    Ok(E1Table { k, n, output: out.letter(), trees: trees.len(), rows })
}

/// Alternating sum Σ_T (−1)^{dim C_T} P_T(−1), the tree-side Euler characteristic.
pub fn tree_euler_characteristic(k: usize, n: usize, out: Color, bound: usize) -> Result<i64> {
    let mut chi = 0i64;
    for t in enumerate_trees(k, n, out, bound)? {
        let pm: i64 = tree_poincare(&t).iter().enumerate().map(|(q, c)| if q % 2 == 0 { *c as i64 } else { -(*c as i64) }).sum();
        chi += if stratum_dimension(&t)? % 2 == 0 { pm } else { -pm };
    }
    Ok(chi)
}

/// The shape of a cobar tree as a stratum label.
pub fn from_cobar(t: &cobar::Tree, sig: &Signature) -> Result<TwoColoredTree> {
    fn go(t: &cobar::Tree, i: usize, sig: &Signature) -> Vertex {
        let children = t
            .children(i, &sig.leaves)
            .into_iter()
            .map(|(l, c, j)| match j {
                Some(j) => Child::Vertex(go(t, j, sig)),
                None => Child::Leaf(l + 1, c),
            })
            .collect();
        Vertex::new(t.nodes[i].out, children)
    }
    let r = t.nodes.iter().position(|n| n == t.root()).ok_or_else(|| Error::Internal("empty tree".into()))?;
    let k = sig.leaves.iter().filter(|c| **c == Color::C).count();
    TwoColoredTree::new(k, sig.leaves.len() - k, go(t, r, sig))
}

/// Every term of ∂ on every sc cobar basis tree of the signature has stratum
/// dimension one less than its source. Returns the violations.
pub fn d1_dimension_defects(k: usize, n: usize, out: Color, bound: usize) -> Result<Vec<String>> {
    check_bound(k, n, bound)?;
    let table = cobar::build_cooperad_tables(Which::Sc, k + n)?;
    let sig = Signature::kn(k, n, out);
    let mut bad = Vec::new();
    for trees in cobar::basis(&table, &sig)?.values() {
        for t in trees {
            let d0 = stratum_dimension(&from_cobar(t, &sig)?)?;
            for u in cobar::differential_tree(&table, &sig, t).keys() {
                let d1 = stratum_dimension(&from_cobar(u, &sig)?)?;
                if d1 != d0 - 1 {
                    bad.push(format!("{} (dim {d0}) → {} (dim {d1})", t.dump(&sig), u.dump(&sig)));
                }
            }
        }
    }
    Ok(bad)
}
