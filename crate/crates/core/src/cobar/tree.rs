//! Decorated 2-colored trees and the cobar differential.
//!
//! A tree is stored species-style: each vertex is keyed by (leaf set, output
//! color), which is unique because the only unary vertices are ρ (c → o).
//! An input edge of a vertex is labelled by the minimal leaf below it. The
//! element is the tensor ⊗_v s·x_v taken in the sorted order of the keys.

use super::table::{Color, CoElem, CooperadTable, Inputs};
use crate::error::{Error, Result};
use crate::exactlinalg::Q;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub cluster: Vec<u32>,
    pub out: Color,
    pub elem: CoElem,
}

impl Node {
    fn key(&self) -> (&[u32], Color) {
        (&self.cluster, self.out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub leaves: Vec<Color>,
    pub out: Color,
}

impl Signature {
    /// k c-leaves followed by n o-leaves.
    pub fn kn(k: usize, n: usize, out: Color) -> Self {
        let mut leaves = vec![Color::C; k];
        leaves.extend(vec![Color::O; n]);
        Signature { leaves, out }
    }
    pub fn label(&self) -> String {
        let ins: Vec<String> = self.leaves.iter().map(|c| c.letter().to_string()).collect();
        format!("({} → {})", ins.join(","), self.out.letter())
    }
}

pub type Element = BTreeMap<Tree, Q>;

fn below(a: (&[u32], Color), b: (&[u32], Color)) -> bool {
    // a strictly below b
    if a.0.len() < b.0.len() {
        a.0.iter().all(|x| b.0.contains(x))
    } else {
        a.0 == b.0 && a.1 == Color::C && b.1 == Color::O
    }
}

impl Tree {
    pub fn root(&self) -> &Node {
        self.nodes.iter().find(|n| self.nodes.iter().all(|m| m == *n || below(m.key(), n.key()))).expect("nonempty tree")
    }

    /// Children of node i: (label, color, node index or None for a leaf).
    pub fn children(&self, i: usize, leaves: &[Color]) -> Vec<(u32, Color, Option<usize>)> {
        let me = self.nodes[i].key();
        let subs: Vec<usize> = (0..self.nodes.len()).filter(|j| below(self.nodes[*j].key(), me)).collect();
        let maximal: Vec<usize> = subs.iter().filter(|j| !subs.iter().any(|o| below(self.nodes[**j].key(), self.nodes[*o].key()))).cloned().collect();
        let mut v: Vec<(u32, Color, Option<usize>)> = maximal.iter().map(|j| (self.nodes[*j].cluster[0], self.nodes[*j].out, Some(*j))).collect();
        for &l in &self.nodes[i].cluster {
            if !maximal.iter().any(|j| self.nodes[*j].cluster.contains(&l)) {
                v.push((l, leaves[l as usize], None));
            }
        }
        v.sort();
        v
    }

    pub fn inputs(&self, i: usize, leaves: &[Color]) -> Inputs {
        self.children(i, leaves).into_iter().map(|(l, c, _)| (l, c)).collect()
    }

    pub fn degree(&self, sig: &Signature) -> i64 {
        (0..self.nodes.len()).map(|i| CooperadTable::degree(&self.inputs(i, &sig.leaves), self.nodes[i].out, &self.nodes[i].elem) + 1).sum()
    }

    /// Bracketed dump, e.g. o{1}[c1, o{0}[c2]] (decorations in braces).
    pub fn dump(&self, sig: &Signature) -> String {
        let r = self.nodes.iter().position(|n| n == self.root()).unwrap();
        self.dump_at(r, sig)
    }

    fn dump_at(&self, i: usize, sig: &Signature) -> String {
        let n = &self.nodes[i];
        let parts: Vec<String> = self
            .children(i, &sig.leaves)
            .into_iter()
            .map(|(l, c, j)| match j {
                Some(j) => self.dump_at(j, sig),
                None => format!("{}{}", c.letter(), l + 1),
            })
            .collect();
        let mut deco = String::new();
        if !n.elem.order.is_empty() {
            deco.push_str(&n.elem.order.iter().map(|l| (l + 1).to_string()).collect::<Vec<_>>().join(""));
        }
        for (a, b) in &n.elem.omega {
            deco.push_str(&format!("ω{}{}", a + 1, b + 1));
        }
        format!("{}{{{}}}[{}]", n.out.letter(), deco, parts.join(","))
    }
}

/// Sorts a tensor of nodes into key order; returns the Koszul sign of the
/// reordering for the given parities.
pub(crate) fn canonical(nodes: Vec<(Node, bool)>) -> (Tree, bool) {
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    idx.sort_by(|a, b| nodes[*a].0.key().cmp(&nodes[*b].0.key()));
    let mut odd = false;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] > idx[j] && nodes[idx[i]].1 && nodes[idx[j]].1 {
                odd = !odd;
            }
        }
    }
    let sorted = idx.iter().map(|i| nodes[*i].0.clone()).collect();
    (Tree { nodes: sorted }, odd)
}

/// Cobar conventions. ∂(s x) = GLOBAL · Σ (−1)^{|x'|·SHIFT} s x' ⊗ s x'',
/// extended as a derivation over the tensor of vertices.
const GLOBAL: i64 = -1;
const SHIFT: bool = true;

/// One way of splitting node i: the table coefficient, the new tensor of
/// (node, degree) with outer and inner in place of node i, and |x'|.
pub(crate) struct NodeSplit {
    pub coeff: Q,
    pub tensor: Vec<(Node, i64)>,
    pub d_outer: i64,
}

pub(crate) fn splits_at(table: &CooperadTable, leaves: &[Color], t: &Tree, i: usize) -> Vec<NodeSplit> {
    let ins = t.inputs(i, leaves);
    let node = &t.nodes[i];
    let degs: Vec<i64> = (0..t.nodes.len()).map(|j| CooperadTable::degree(&t.inputs(j, leaves), t.nodes[j].out, &t.nodes[j].elem)).collect();
    let mut res = Vec::new();
    for s in table.decompose(&ins, node.out, &node.elem) {
        let d_outer = CooperadTable::degree(&s.outer_inputs(&ins), node.out, &s.outer);
        let d_inner = CooperadTable::degree(&s.inner_inputs(&ins), s.inner_out, &s.inner);
        debug_assert_eq!(d_outer + d_inner, degs[i]);
        let mut cluster: Vec<u32> = Vec::new();
        for &l in &s.inner_labels {
            cluster.extend(sub_cluster(t, i, l, leaves));
        }
        cluster.sort_unstable();
        let mut tensor = Vec::with_capacity(t.nodes.len() + 1);
        for (j, m) in t.nodes.iter().enumerate() {
            if j == i {
                tensor.push((Node { cluster: node.cluster.clone(), out: node.out, elem: s.outer.clone() }, d_outer));
                tensor.push((Node { cluster: cluster.clone(), out: s.inner_out, elem: s.inner.clone() }, d_inner));
            } else {
                tensor.push((m.clone(), degs[j]));
            }
        }
        res.push(NodeSplit { coeff: s.coeff, tensor, d_outer });
    }
    res
}

pub fn differential_tree(table: &CooperadTable, sig: &Signature, t: &Tree) -> Element {
    let mut out = Element::new();
    let mut prefix_odd = false;
    for i in 0..t.nodes.len() {
        for sp in splits_at(table, &sig.leaves, t, i) {
            let (tree, odd) = canonical(sp.tensor.into_iter().map(|(n, d)| (n, (d + 1) % 2 != 0)).collect());
            let mut c = sp.coeff * Q::from_integer(GLOBAL.into());
            if odd ^ prefix_odd ^ (SHIFT && sp.d_outer % 2 != 0) {
                c = -c;
            }
            *out.entry(tree).or_insert_with(Q::zero) += c;
        }
        let n = &t.nodes[i];
        prefix_odd ^= (CooperadTable::degree(&t.inputs(i, &sig.leaves), n.out, &n.elem) + 1) % 2 != 0;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Leaves below the input labelled `l` of node i.
fn sub_cluster(t: &Tree, i: usize, l: u32, leaves: &[Color]) -> Vec<u32> {
    match t.children(i, leaves).into_iter().find(|x| x.0 == l) {
        Some((_, _, Some(j))) => t.nodes[j].cluster.clone(),
        _ => vec![l],
    }
}

pub fn differential(table: &CooperadTable, sig: &Signature, x: &Element) -> Element {
    let parts: Vec<Element> = x
        .par_iter()
        .map(|(t, c)| {
            let mut d = differential_tree(table, sig, t);
            for v in d.values_mut() {
                *v *= c;
            }
            d
        })
        .collect();
    let mut out = Element::new();
    for p in parts {
        for (t, c) in p {
            *out.entry(t).or_insert_with(Q::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn single(t: Tree) -> Element {
    [(t, Q::one())].into_iter().collect()
}

/// All decorated trees of the signature, grouped by degree.
pub fn basis(table: &CooperadTable, sig: &Signature) -> Result<BTreeMap<i64, Vec<Tree>>> {
    if sig.leaves.is_empty() {
        return Err(Error::input("empty signature"));
    }
    if sig.leaves.len() > table.max_arity {
        return Err(Error::Cutoff(format!("arity {} exceeds the table cutoff {}", sig.leaves.len(), table.max_arity)));
    }
    let all: Vec<u32> = (0..sig.leaves.len() as u32).collect();
    let mut out: BTreeMap<i64, Vec<Tree>> = BTreeMap::new();
    for nodes in subtrees(table, &sig.leaves, &all, sig.out) {
        let (t, _) = canonical(nodes.into_iter().map(|n| (n, false)).collect());
        let d = t.degree(sig);
        out.entry(d).or_default().push(t);
    }
    for v in out.values_mut() {
        v.sort();
        v.dedup();
    }
    Ok(out)
}

/// Node lists of all trees with leaf set `k` and root color `out`.
fn subtrees(table: &CooperadTable, leaves: &[Color], k: &[u32], out: Color) -> Vec<Vec<Node>> {
    let mut res = Vec::new();
    for part in crate::scoalgebra::set_partitions(k.len()) {
        let blocks: Vec<Vec<u32>> = part.iter().map(|b| b.iter().map(|i| k[*i]).collect()).collect();
        // per block: (input color, node list) choices
        let mut choices: Vec<Vec<(Color, Vec<Node>)>> = Vec::new();
        for b in &blocks {
            let mut ch = Vec::new();
            if b.len() == 1 {
                ch.push((leaves[b[0] as usize], vec![]));
            }
            for col in [Color::C, Color::O] {
                if b.len() == k.len() && !(col == Color::C && out == Color::O) {
                    continue;
                }
                if b.len() == 1 && col == leaves[b[0] as usize] {
                    continue;
                }
                for t in subtrees(table, leaves, b, col) {
                    ch.push((col, t));
                }
            }
            choices.push(ch);
        }
        let mut combos: Vec<(Inputs, Vec<Node>)> = vec![(vec![], vec![])];
        for (b, ch) in blocks.iter().zip(&choices) {
            let mut next = Vec::new();
            for (ins, ns) in &combos {
                for (col, t) in ch {
                    let mut i2 = ins.clone();
                    i2.push((b[0], *col));
                    let mut n2 = ns.clone();
                    n2.extend(t.iter().cloned());
                    next.push((i2, n2));
                }
            }
            combos = next;
        }
        for (mut ins, ns) in combos {
            ins.sort();
            for x in table.basis(&ins, out) {
                let mut n2 = ns.clone();
                n2.push(Node { cluster: k.to_vec(), out, elem: x });
                res.push(n2);
            }
        }
    }
    res
}
