//! Cooperads as species: C(I → out) for a finite set I of colored labels.
//!
//! Everything is cut out of H•(SC), the cohomology of the Swiss-Cheese
//! configuration spaces: H•(C_k) is the Arnold algebra on ω_ij, and
//! H•(C_{k,n}) = ⊕_σ e_σ·Arnold(k) with σ running over orders of the boundary
//! points. Cocomposition is restriction to a boundary face, hence a ring map;
//! the generators go to
//!
//! * closed face (J collides in the interior, new c-label e):
//!   ω_ab ↦ 1⊗ω_ab (a, b ∈ J), ω_eb⊗1 (a ∈ J only), ω_ab⊗1 (neither);
//!   e_σ ↦ e_σ⊗1.
//! * open face (J collides on the boundary, new o-label e):
//!   ω_ab ↦ 1⊗ω_ab (a, b ∈ J), 0 (a ∈ J only), ω_ab⊗1 (neither);
//!   e_σ ↦ Σ e_σ'⊗e_σ'' over the (σ', σ'') composing to σ.
//!
//! The degree shifts sc^c(k) = s^{2−2k}H•, sc^o(k,n) = s^{1−n−2k} sgn_n ⊗ H•
//! are realised by an orientation line s⊗s^{-1}_{o_1}⋯s^{-1}_{o_n} on o-output
//! elements (the c-shifts are even and carry no signs).

use crate::error::{Error, Result};
use crate::exactlinalg::Q;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    C,
    O,
}

impl Color {
    pub fn letter(self) -> char {
        match self {
            Color::C => 'c',
            Color::O => 'o',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Which {
    GerVee,
    S,
    OCVee,
    Sc,
}

impl Which {
    pub fn parse(s: &str) -> Result<Which> {
        match s.to_ascii_lowercase().as_str() {
            "gervee" | "ger" | "ger_vee" => Ok(Which::GerVee),
            "s" => Ok(Which::S),
            "ocvee" | "oc" | "oc_vee" => Ok(Which::OCVee),
            "sc" => Ok(Which::Sc),
            _ => Err(Error::input(format!("unknown cooperad {s:?} (GerVee, S, OCVee, sc)"))),
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Which::GerVee => "GerVee",
            Which::S => "S",
            Which::OCVee => "OCVee",
            Which::Sc => "sc",
        }
    }
}

pub type Edge = (u32, u32);

/// Basis vector of C(I → out): an order of the o-labels and a normal-form
/// Arnold monomial on the c-labels (at most one edge into each label, edges
/// sorted by their larger end).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoElem {
    pub order: Vec<u32>,
    pub omega: Vec<Edge>,
}

impl CoElem {
    pub fn unit(order: Vec<u32>) -> Self {
        CoElem { order, omega: vec![] }
    }
}

/// Colored input labels, sorted by label.
pub type Inputs = Vec<(u32, Color)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Drops the ρ⊗δ_c term from every cocomposition (injected-fault tests).
    KillRhoDeltaC,
}

pub const MAX_ARITY: usize = 6;
pub const DEFAULT_ARITY: usize = 4;

fn edge(a: u32, b: u32) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn inversions(xs: &[u32]) -> usize {
    let mut n = 0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[i] > xs[j] {
                n += 1;
            }
        }
    }
    n
}

fn sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

/// Product ω_{f_0}⋯ω_{f_r} in normal form.
pub fn arnold_reduce(f: Vec<Edge>) -> BTreeMap<Vec<Edge>, Q> {
    let mut out = BTreeMap::new();
    reduce_into(f, Q::one(), &mut out);
    out.retain(|_, c| !c.is_zero());
    out
}

fn reduce_into(mut f: Vec<Edge>, mut c: Q, out: &mut BTreeMap<Vec<Edge>, Q>) {
    // sort by (larger end, smaller end); each ω is odd
    let mut swapped = true;
    while swapped {
        swapped = false;
        for i in 1..f.len() {
            let key = |e: &Edge| (e.1, e.0);
            if key(&f[i - 1]) > key(&f[i]) {
                f.swap(i - 1, i);
                c = -c;
                swapped = true;
            } else if f[i - 1] == f[i] {
                return;
            }
        }
    }
    for i in 1..f.len() {
        if f[i - 1] == f[i] {
            return;
        }
        if f[i - 1].1 == f[i].1 {
            // ω_ac ω_bc = ω_ab ω_bc + ω_ac ω_ab  (a < b < c)
            let (a, cc) = f[i - 1];
            let b = f[i].0;
            let mut g1 = f.clone();
            g1[i - 1] = (a, b);
            reduce_into(g1, c.clone(), out);
            let mut g2 = f.clone();
            g2[i] = (a, b);
            reduce_into(g2, c, out);
            let _ = cc;
            return;
        }
    }
    *out.entry(f).or_insert_with(Q::zero) += c;
}

/// Normal-form Arnold monomials on the given labels (Π_{j≥1}(1 + j) of them).
pub fn arnold_basis(labels: &[u32]) -> Vec<Vec<Edge>> {
    let mut ls = labels.to_vec();
    ls.sort_unstable();
    let mut out: Vec<Vec<Edge>> = vec![vec![]];
    for j in 1..ls.len() {
        let mut next = Vec::new();
        for m in &out {
            next.push(m.clone());
            for i in 0..j {
                let mut x = m.clone();
                x.push((ls[i], ls[j]));
                next.push(x);
            }
        }
        out = next;
    }
    out
}

fn perms(xs: &[u32]) -> Vec<Vec<u32>> {
    if xs.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut t in perms(&rest) {
            t.insert(0, x);
            out.push(t);
        }
    }
    out
}

/// One term of a reduced infinitesimal cocomposition: x ↦ c·outer ⊗ inner,
/// where the labels `inner_labels` are grafted onto a new vertex whose
/// output (color `inner_out`) enters the outer vertex as label min(J).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub inner_labels: Vec<u32>,
    pub inner_out: Color,
    pub coeff: Q,
    pub outer: CoElem,
    pub inner: CoElem,
}

impl Split {
    pub fn outer_inputs(&self, inputs: &Inputs) -> Inputs {
        let e = self.inner_labels[0];
        let mut v: Inputs = inputs.iter().filter(|(l, _)| !self.inner_labels.contains(l)).cloned().collect();
        v.push((e, self.inner_out));
        v.sort();
        v
    }
    pub fn inner_inputs(&self, inputs: &Inputs) -> Inputs {
        inputs.iter().filter(|(l, _)| self.inner_labels.contains(l)).cloned().collect()
    }
}

#[derive(Clone, Debug)]
pub struct CooperadTable {
    pub which: Which,
    pub max_arity: usize,
    pub fault: Option<Fault>,
}

fn counts(inputs: &Inputs) -> (usize, usize) {
    let k = inputs.iter().filter(|x| x.1 == Color::C).count();
    (k, inputs.len() - k)
}

impl CooperadTable {
    pub fn new(which: Which, max_arity: usize) -> Result<Self> {
        if max_arity > MAX_ARITY {
            return Err(Error::Cutoff(format!("arity cutoff {max_arity} exceeds the maximum {MAX_ARITY}")));
        }
        Ok(CooperadTable { which, max_arity, fault: None })
    }
    pub fn with_fault(mut self, f: Fault) -> Self {
        self.fault = Some(f);
        self
    }

    /// Arity constraints of the coaugmentation coideal (identities excluded,
    /// c-output vertices take only c-inputs).
    pub fn valid_vertex(&self, inputs: &Inputs, out: Color) -> bool {
        let (k, n) = counts(inputs);
        if inputs.is_empty() || inputs.len() > self.max_arity {
            return false;
        }
        let ok = match out {
            Color::C => n == 0 && k >= 2,
            Color::O => !(k == 0 && n == 1),
        };
        ok && match self.which {
            Which::GerVee => out == Color::C,
            _ => true,
        }
    }

    pub fn admits(&self, out: Color, x: &CoElem) -> bool {
        match self.which {
            Which::Sc => true,
            Which::GerVee => out == Color::C,
            Which::S => out == Color::C || x.omega.is_empty(),
            Which::OCVee => x.omega.is_empty(),
        }
    }

    pub fn basis(&self, inputs: &Inputs, out: Color) -> Vec<CoElem> {
        if !self.valid_vertex(inputs, out) {
            return vec![];
        }
        let cs: Vec<u32> = inputs.iter().filter(|x| x.1 == Color::C).map(|x| x.0).collect();
        let os: Vec<u32> = inputs.iter().filter(|x| x.1 == Color::O).map(|x| x.0).collect();
        let mut out_v = Vec::new();
        for order in perms(&os) {
            for omega in arnold_basis(&cs) {
                let x = CoElem { order: order.clone(), omega };
                if self.admits(out, &x) {
                    out_v.push(x);
                }
            }
        }
        out_v
    }

    pub fn degree(inputs: &Inputs, out: Color, x: &CoElem) -> i64 {
        let (k, n) = counts(inputs);
        let (k, n) = (k as i64, n as i64);
        x.omega.len() as i64
            + match out {
                Color::C => 2 - 2 * k,
                Color::O => 1 - n - 2 * k,
            }
    }

    /// Parity of the orientation line.
    fn line_odd(inputs: &Inputs, out: Color) -> bool {
        out == Color::O && counts(inputs).1 % 2 == 0
    }

    /// Reduced infinitesimal cocomposition of x, restricted to the table.
    pub fn decompose(&self, inputs: &Inputs, out: Color, x: &CoElem) -> Vec<Split> {
        let all = self.decompose_unfiltered(inputs, out, x);
        all.into_iter()
            .filter(|s| self.admits(out, &s.outer) && self.admits(s.inner_out, &s.inner))
            .filter(|s| !self.faulted(inputs, out, s))
            .collect()
    }

    fn faulted(&self, inputs: &Inputs, out: Color, s: &Split) -> bool {
        match self.fault {
            Some(Fault::KillRhoDeltaC) => {
                let outer = s.outer_inputs(inputs);
                out == Color::O
                    && outer.len() == 1
                    && outer[0].1 == Color::C
                    && s.inner_labels.len() == 2
                    && !s.inner.omega.is_empty()
            }
            None => false,
        }
    }

    /// Cocomposition computed in sc, with no membership filter (used for the
    /// sub-cooperad checks).
    pub fn decompose_unfiltered(&self, inputs: &Inputs, out: Color, x: &CoElem) -> Vec<Split> {
        let m = inputs.len();
        let mut res = Vec::new();
        for mask in 1u32..(1u32 << m) {
            let j: Inputs = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| inputs[i]).collect();
            for ic in [Color::C, Color::O] {
                if !self.split_allowed(inputs, out, &j, ic) {
                    continue;
                }
                split_terms(inputs, out, x, &j, ic, &mut res);
            }
        }
        res
    }

    fn split_allowed(&self, inputs: &Inputs, out: Color, j: &Inputs, ic: Color) -> bool {
        let (jk, jn) = counts(j);
        let whole = j.len() == inputs.len();
        match ic {
            Color::C => jn == 0 && jk >= 2 && !(whole && out == Color::C),
            Color::O => out == Color::O && !whole && !(jk == 0 && jn == 1),
        }
    }
}

fn split_terms(inputs: &Inputs, out: Color, x: &CoElem, j: &Inputs, ic: Color, res: &mut Vec<Split>) {
    let jl: Vec<u32> = j.iter().map(|t| t.0).collect();
    let e = jl[0];
    let inj = |a: u32| jl.contains(&a);
    // H-part: product of the images of the ω's
    let mut outer_f = Vec::new();
    let mut inner_f = Vec::new();
    let mut odd = false;
    for &(a, b) in &x.omega {
        match (inj(a), inj(b)) {
            (true, true) => inner_f.push((a, b)),
            (false, false) => {
                odd ^= inner_f.len() % 2 == 1;
                outer_f.push((a, b));
            }
            (true, false) | (false, true) => {
                if ic == Color::O {
                    return;
                }
                let other = if inj(a) { b } else { a };
                odd ^= inner_f.len() % 2 == 1;
                outer_f.push(edge(e, other));
            }
        }
    }
    let outer_h = arnold_reduce(outer_f);
    let inner_h = arnold_reduce(inner_f);
    if outer_h.is_empty() || inner_h.is_empty() {
        return;
    }
    // order part
    let mut orders: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    match ic {
        Color::C => orders.push((x.order.clone(), vec![])),
        Color::O => {
            let pos: Vec<usize> = x.order.iter().enumerate().filter(|(_, l)| inj(**l)).map(|(i, _)| i).collect();
            if pos.is_empty() {
                for p in 0..=x.order.len() {
                    let mut o = x.order.clone();
                    o.insert(p, e);
                    orders.push((o, vec![]));
                }
            } else {
                if pos[pos.len() - 1] - pos[0] + 1 != pos.len() {
                    return;
                }
                let inner: Vec<u32> = x.order[pos[0]..=pos[pos.len() - 1]].to_vec();
                let mut o = x.order[..pos[0]].to_vec();
                o.push(e);
                o.extend_from_slice(&x.order[pos[pos.len() - 1] + 1..]);
                orders.push((o, inner));
            }
        }
    }
    // orientation line
    let split = Split { inner_labels: jl.clone(), inner_out: ic, coeff: Q::zero(), outer: CoElem::unit(vec![]), inner: CoElem::unit(vec![]) };
    let outer_inputs = split.outer_inputs(inputs);
    let mut line_odd = false;
    if ic == Color::O {
        let oo: Vec<u32> = outer_inputs.iter().filter(|t| t.1 == Color::O).map(|t| t.0).collect();
        let jo: Vec<u32> = j.iter().filter(|t| t.1 == Color::O).map(|t| t.0).collect();
        let p = oo.iter().position(|l| *l == e).unwrap();
        let (mm, r) = (oo.len(), jo.len());
        line_odd ^= (1 + r) % 2 == 1 && (mm - p - 1) % 2 == 1;
        let mut seq = oo[..p].to_vec();
        seq.extend_from_slice(&jo);
        seq.extend_from_slice(&oo[p + 1..]);
        line_odd ^= inversions(&seq) % 2 == 1;
    }
    let outer_line_odd = CooperadTable::line_odd(&outer_inputs, out);
    for (oh, oc) in &outer_h {
        for (ih, icf) in &inner_h {
            let kz = outer_line_odd && ih.len() % 2 == 1;
            let c = sign(odd ^ line_odd ^ kz) * oc * icf;
            for (oo, io) in &orders {
                res.push(Split {
                    inner_labels: jl.clone(),
                    inner_out: ic,
                    coeff: c.clone(),
                    outer: CoElem { order: oo.clone(), omega: oh.clone() },
                    inner: CoElem { order: io.clone(), omega: ih.clone() },
                });
            }
        }
    }
}

/// Relabels x along `map` (old label → new label, colors preserved) and
/// re-expands in the normal-form basis.
pub fn relabel(inputs: &Inputs, out: Color, x: &CoElem, map: &BTreeMap<u32, u32>) -> Vec<(Q, CoElem)> {
    let f: Vec<Edge> = x.omega.iter().map(|(a, b)| edge(map[a], map[b])).collect();
    let order: Vec<u32> = x.order.iter().map(|l| map[l]).collect();
    // orientation: s^{-1} factors were in sorted old-label order
    let mut line = 0usize;
    if out == Color::O {
        let os: Vec<u32> = inputs.iter().filter(|t| t.1 == Color::O).map(|t| map[&t.0]).collect();
        line = inversions(&os);
    }
    arnold_reduce(f)
        .into_iter()
        .map(|(omega, c)| (sign(line % 2 == 1) * c, CoElem { order: order.clone(), omega }))
        .collect()
}
