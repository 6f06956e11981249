//! The cofree S-coalgebra S(V, A) in its desuspended form, coderivations,
//! Q̂² checks, L∞ extraction, homotopies and morphisms.
//!
//! o-monomials (v_1..v_k; a_1..a_n) are stored shifted: each v has parity |v|
//! and each a has parity |a|+1, so every printed sign is a plain Koszul sign.

mod coder;
mod homotopy;
mod json;
mod linf;
mod morphism;
mod spaces;

#[cfg(test)]
pub(crate) mod tests;

pub use coder::*;
pub use homotopy::*;
pub use json::*;
pub use linf::*;
pub use morphism::*;
pub use spaces::*;

use crate::exactlinalg::Q;
use crate::graded::{odd, reorder_parity, sgn, shuffles, GradedSpace};
use crate::{Error, Result};
use num_traits::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Self-describing key of a basis vector of V (see [`VSpace`]).
pub type VKey = Vec<u32>;
pub type VVec = BTreeMap<VKey, Q>;
pub type AVec = BTreeMap<u32, Q>;

pub fn acc<K: Ord>(m: &mut BTreeMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    match m.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub fn acc_all<K: Ord + Clone>(m: &mut BTreeMap<K, Q>, other: &BTreeMap<K, Q>, c: &Q) {
    for (k, x) in other {
        acc(m, k.clone(), x * c);
    }
}

/// Graded vector space V with self-describing basis keys.
pub trait VSpace: Send + Sync + std::fmt::Debug {
    fn degree(&self, v: &VKey) -> i64;
    fn label(&self, v: &VKey) -> String;
    fn parse(&self, s: &str) -> Result<VKey>;
    /// Basis vectors of size ≤ `size` (arity, polynomial degree, …).
    fn basis(&self, size: usize) -> Vec<VKey>;
    /// The size used by [`VSpace::basis`].
    fn size(&self, v: &VKey) -> usize;
    /// Keys are cochains `[out, ins...]` over the A of the pair.
    fn is_cochains(&self) -> bool {
        false
    }
}

/// The pair (V, A) on which S(V, A) is built.
#[derive(Clone, Debug)]
pub struct Pair {
    pub v: Arc<dyn VSpace>,
    pub a: GradedSpace,
    /// Optional filtration: per-a weights and a bound on Σ wt(a) + Σ size(v).
    /// Used for truncated polynomial algebras so that no check ever touches
    /// the truncation boundary.
    pub window: Option<(Vec<usize>, usize)>,
}

impl Pair {
    pub fn new(v: Arc<dyn VSpace>, a: GradedSpace) -> Self {
        Pair { v, a, window: None }
    }
    pub fn in_window(&self, vs: &[VKey], a: &[u32]) -> bool {
        match &self.window {
            None => true,
            Some((w, max)) => {
                vs.iter().map(|x| self.v.size(x)).sum::<usize>() + a.iter().map(|i| w[*i as usize]).sum::<usize>() <= *max
            }
        }
    }
    pub fn vpar(&self, v: &VKey) -> bool {
        odd(self.v.degree(v))
    }
    /// Parity of s^{-1}a.
    pub fn apar(&self, a: u32) -> bool {
        odd(self.a.degree(a as usize) + 1)
    }
    pub fn adeg(&self, a: u32) -> i64 {
        self.a.degree(a as usize)
    }
}

/// o-colored monomial. `v` is sorted (graded-symmetric part), `a` ordered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OMono {
    pub v: Vec<VKey>,
    pub a: Vec<u32>,
}

impl Ord for OMono {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.v.len(), self.a.len(), &self.v, &self.a).cmp(&(o.v.len(), o.a.len(), &o.v, &o.a))
    }
}

impl PartialOrd for OMono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub type OSum = BTreeMap<OMono, Q>;

/// Symmetric monomial v_1⋯v_k in S(s^{-2}V): the singleton part of Ger∨(V).
pub type SymMono = Vec<VKey>;

/// Weight of the Λ²cocomm cooperation of arity k: k − 1 copies of Δ_c.
pub fn sym_weight(k: usize) -> usize {
    2 * k.saturating_sub(1)
}

impl OMono {
    pub fn pure_a(a: Vec<u32>) -> Self {
        OMono { v: vec![], a }
    }
    pub fn k(&self) -> usize {
        self.v.len()
    }
    pub fn n(&self) -> usize {
        self.a.len()
    }
    pub fn is_valid(&self) -> bool {
        !(self.v.is_empty() && self.a.is_empty())
    }
    pub fn label(&self, p: &Pair) -> String {
        let v: Vec<String> = self.v.iter().map(|x| p.v.label(x)).collect();
        let a: Vec<&str> = self.a.iter().map(|x| p.a.label(*x as usize)).collect();
        format!("({};{})", v.join(","), a.join(","))
    }
    /// Weight of the cooperation: k ρ's and k + n − 1 Δ_o's.
    pub fn weight(&self) -> usize {
        (2 * self.k() + self.n()).saturating_sub(1)
    }
    /// Shifted degree Σ(|v|−2) + Σ(|a|−1).
    pub fn degree(&self, p: &Pair) -> i64 {
        self.v.iter().map(|x| p.v.degree(x) - 2).sum::<i64>() + self.a.iter().map(|x| p.adeg(*x) - 1).sum::<i64>()
    }
}

/// Sort v's into canonical order; returns the Koszul sign, or None when an
/// odd vector repeats.
pub fn sort_sym(p: &Pair, vs: &mut Vec<VKey>) -> Option<i64> {
    let mut order: Vec<usize> = (0..vs.len()).collect();
    order.sort_by(|i, j| vs[*i].cmp(&vs[*j]));
    let par: Vec<bool> = vs.iter().map(|x| p.vpar(x)).collect();
    let s = sgn(reorder_parity(&par, &order));
    let sorted: Vec<VKey> = order.iter().map(|i| vs[*i].clone()).collect();
    for w in sorted.windows(2) {
        if w[0] == w[1] && p.vpar(&w[0]) {
            return None;
        }
    }
    *vs = sorted;
    Some(s)
}

/// Canonical monomial from an arbitrary ordering of the v's.
pub fn canon(p: &Pair, mut v: Vec<VKey>, a: Vec<u32>) -> Option<(OMono, i64)> {
    let s = sort_sym(p, &mut v)?;
    Some((OMono { v, a }, s))
}

/// Iterate over (p, k−p)-shuffles with their Koszul sign ε_λ.
pub fn shuffles_signed(p: &Pair, vs: &[VKey], first: usize) -> Vec<(Vec<usize>, bool)> {
    let par: Vec<bool> = vs.iter().map(|x| p.vpar(x)).collect();
    shuffles(first, vs.len()).into_iter().map(|l| { let e = reorder_parity(&par, &l); (l, e) }).collect()
}

/// Δ_o on a monomial, exactly as the double sum over E_{k,n} and shuffles.
pub fn coproduct_o(p: &Pair, m: &OMono) -> Result<BTreeMap<(OMono, OMono), Q>> {
    if !m.is_valid() {
        return Err(Error::input("empty monomial"));
    }
    let (k, n) = (m.k(), m.n());
    let mut out = BTreeMap::new();
    for pp in 0..=k {
        let sh = shuffles_signed(p, &m.v, pp);
        for t in 0..=n {
            if (pp, t) == (0, 0) || (pp, t) == (k, n) {
                continue;
            }
            let apass = m.a[..t].iter().filter(|x| p.apar(**x)).count();
            for (l, e) in &sh {
                let rest_odd = l[pp..].iter().filter(|i| p.vpar(&m.v[**i])).count();
                let s = sgn(*e ^ odd((rest_odd * apass) as i64));
                let left = OMono { v: pick(&m.v, &l[..pp]), a: m.a[..t].to_vec() };
                let right = OMono { v: pick(&m.v, &l[pp..]), a: m.a[t..].to_vec() };
                acc(&mut out, (left, right), Q::from_integer(s.into()));
            }
        }
    }
    Ok(out)
}

/// Cocommutative coproduct on S(s^{-2}V): Σ_{0<p<k} Σ_λ (−1)^{ε_λ} first ⊗ rest.
pub fn coproduct_sym(p: &Pair, vs: &[VKey]) -> BTreeMap<(SymMono, SymMono), Q> {
    let mut out = BTreeMap::new();
    for pp in 1..vs.len() {
        for (l, e) in shuffles_signed(p, vs, pp) {
            acc(&mut out, (pick(vs, &l[..pp]), pick(vs, &l[pp..])), Q::from_integer(sgn(e).into()));
        }
    }
    out
}

/// ρ on the cofree coalgebra: (v_1..v_k;) ↦ v_1⋯v_k, zero when a's are present.
pub fn rho(m: &OMono) -> Option<SymMono> {
    (m.a.is_empty() && !m.v.is_empty()).then(|| m.v.clone())
}

/// μ_l = (ρ ⊗ id)∘Δ_o.
pub fn mu_left(p: &Pair, m: &OMono) -> Result<BTreeMap<(SymMono, OMono), Q>> {
    let mut out = BTreeMap::new();
    for ((l, r), c) in coproduct_o(p, m)? {
        if let Some(s) = rho(&l) {
            acc(&mut out, (s, r), c);
        }
    }
    Ok(out)
}

/// μ_r = (id ⊗ ρ)∘Δ_o.
pub fn mu_right(p: &Pair, m: &OMono) -> Result<BTreeMap<(OMono, SymMono), Q>> {
    let mut out = BTreeMap::new();
    for ((l, r), c) in coproduct_o(p, m)? {
        if let Some(s) = rho(&r) {
            acc(&mut out, (l, s), c);
        }
    }
    Ok(out)
}

/// All canonical o-monomials with k + n ≤ `total`, each v of size ≤ `vsize`,
/// optionally filtered by a predicate (e.g. a degree window).
pub fn o_monomials(p: &Pair, total: usize, vsize: usize, keep: impl Fn(&OMono) -> bool) -> Vec<OMono> {
    let vb = p.v.basis(vsize);
    let mut out = Vec::new();
    for k in 0..=total {
        let sym = multisets(p, &vb, k);
        for n in 0..=total - k {
            if k == 0 && n == 0 {
                continue;
            }
            let tuples = crate::hochschild::all_tuples(p.a.dim() as u32, n);
            for s in &sym {
                for t in &tuples {
                    let m = OMono { v: s.clone(), a: t.clone() };
                    if p.in_window(&m.v, &m.a) && keep(&m) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Sorted k-multisets of basis keys that are nonzero in S(s^{-2}V).
pub fn multisets(p: &Pair, basis: &[VKey], k: usize) -> Vec<SymMono> {
    fn rec(p: &Pair, b: &[VKey], start: usize, k: usize, cur: &mut Vec<VKey>, out: &mut Vec<SymMono>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..b.len() {
            let next = if p.vpar(&b[i]) { i + 1 } else { i };
            cur.push(b[i].clone());
            rec(p, b, next, k, cur, out);
            cur.pop();
        }
    }
    let mut sorted = basis.to_vec();
    sorted.sort();
    let mut out = Vec::new();
    rec(p, &sorted, 0, k, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Ger∨ monomials

/// Basis element of Ger∨(k) ⊗ V^{⊗k}: a set partition of the inputs with a
/// left-normed co-Lie word per block (first letter = block minimum).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GerCoMonomial {
    pub v: Vec<VKey>,
    /// Blocks as words over 0-based positions into `v`, sorted by first letter.
    pub words: Vec<Vec<usize>>,
}

impl GerCoMonomial {
    pub fn singletons(v: Vec<VKey>) -> Self {
        let words = (0..v.len()).map(|i| vec![i]).collect();
        GerCoMonomial { v, words }
    }
    pub fn is_singleton(&self) -> bool {
        self.words.iter().all(|w| w.len() == 1)
    }
    /// Degree Σ|v| + 2 − 2k + (k − b).
    pub fn degree(&self, p: &Pair) -> i64 {
        let k = self.v.len() as i64;
        self.v.iter().map(|x| p.v.degree(x)).sum::<i64>() + 2 - 2 * k + (k - self.words.len() as i64)
    }
    pub fn label(&self, p: &Pair) -> String {
        let blocks: Vec<String> = self
            .words
            .iter()
            .map(|w| {
                let inner: Vec<String> = w.iter().map(|i| p.v.label(&self.v[*i])).collect();
                if w.len() == 1 { inner[0].clone() } else { format!("[{}]", inner.join(",")) }
            })
            .collect();
        blocks.join("·")
    }
}

/// Shapes of Ger∨(k): set partitions × left-normed words. There are k! of them.
pub fn ger_covee_shapes(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for part in set_partitions(k) {
        let per_block: Vec<Vec<Vec<usize>>> = part
            .iter()
            .map(|b| permutations_of(&b[1..]).into_iter().map(|t| { let mut w = vec![b[0]]; w.extend(t); w }).collect())
            .collect();
        let mut acc_words: Vec<Vec<Vec<usize>>> = vec![vec![]];
        for choices in per_block {
            let mut next = Vec::new();
            for prefix in &acc_words {
                for c in &choices {
                    let mut x = prefix.clone();
                    x.push(c.clone());
                    next.push(x);
                }
            }
            acc_words = next;
        }
        out.extend(acc_words);
    }
    out
}

/// Set partitions of 0..k, blocks sorted by minimum.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for i in 0..k {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

pub fn permutations_of(xs: &[usize]) -> Vec<Vec<usize>> {
    if xs.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut t in permutations_of(&rest) {
            t.insert(0, x);
            out.push(t);
        }
    }
    out
}
