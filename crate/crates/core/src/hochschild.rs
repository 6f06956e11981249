//! Hochschild cochains of a finite graded algebra, the Gerstenhaber bracket,
//! A∞ structures and their cohomology. Polynomial algebras and polyvector
//! fields live in [`poly`].

pub mod poly;

use crate::exactlinalg::{cohomology_representatives, fmt_q, parse_q, SparseMatrix, Q};
use crate::graded::{odd, sgn, GradedSpace};
use crate::{Error, Result};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Basis index into a [`GradedSpace`].
pub type Ix = u32;

/// Output vector: basis index → coefficient.
pub type Vector = BTreeMap<Ix, Q>;

pub fn vec_add(v: &mut Vector, i: Ix, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(i).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        v.remove(&i);
    }
}

/// Element of ⊕_k s^k Hom(A^⊗k, A), stored extensionally:
/// input basis tuple → output vector. Mixed arities are allowed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cochain {
    pub table: BTreeMap<Vec<Ix>, Vector>,
}

impl Cochain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn elementary(inputs: Vec<Ix>, out: Ix, c: Q) -> Self {
        let mut s = Self::zero();
        s.add(inputs, out, c);
        s
    }

    pub fn add(&mut self, inputs: Vec<Ix>, out: Ix, c: Q) {
        if c.is_zero() {
            return;
        }
        let v = self.table.entry(inputs.clone()).or_default();
        vec_add(v, out, c);
        if v.is_empty() {
            self.table.remove(&inputs);
        }
    }

    pub fn add_scaled(&mut self, other: &Cochain, c: &Q) {
        for (ins, v) in &other.table {
            for (o, x) in v {
                self.add(ins.clone(), *o, x * c);
            }
        }
    }

    pub fn scaled(&self, c: &Q) -> Cochain {
        let mut r = Cochain::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        let mut r = self.clone();
        r.add_scaled(other, &-Q::one());
        r
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Ix>, Ix, &Q)> {
        self.table.iter().flat_map(|(i, v)| v.iter().map(move |(o, c)| (i, *o, c)))
    }

    /// Arity, when all terms share one.
    pub fn arity(&self) -> Option<usize> {
        let mut it = self.table.keys().map(|k| k.len());
        let a = it.next()?;
        it.all(|b| b == a).then_some(a)
    }

    pub fn arity_part(&self, k: usize) -> Cochain {
        Cochain { table: self.table.iter().filter(|(i, _)| i.len() == k).map(|(i, v)| (i.clone(), v.clone())).collect() }
    }

    pub fn eval(&self, inputs: &[Ix]) -> Vector {
        self.table.get(inputs).cloned().unwrap_or_default()
    }

    /// Total degree when homogeneous.
    pub fn degree(&self, sp: &GradedSpace) -> Option<i64> {
        let mut it = self.terms().map(|(i, o, _)| elem_degree(sp, i, o));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Splits into homogeneous components by total degree.
    pub fn by_degree(&self, sp: &GradedSpace) -> BTreeMap<i64, Cochain> {
        let mut out: BTreeMap<i64, Cochain> = BTreeMap::new();
        for (i, o, c) in self.terms() {
            out.entry(elem_degree(sp, i, o)).or_default().add(i.clone(), o, c.clone());
        }
        out
    }
}

/// Total degree k + |out| − Σ|in| of an elementary cochain.
pub fn elem_degree(sp: &GradedSpace, inputs: &[Ix], out: Ix) -> i64 {
    inputs.len() as i64 + sp.degree(out as usize) - inputs.iter().map(|i| sp.degree(*i as usize)).sum::<i64>()
}

/// Σ_i (−1)^{ε_{i,k2}} Q1(a_1..Q2(a_i..)..), term by term.
fn insert_into(sp: &GradedSpace, q1: &Cochain, q2: &Cochain, sign_scale: impl Fn(i64, i64) -> i64, out: &mut Cochain) {
    let mut by_out: HashMap<Ix, Vec<(&Vec<Ix>, &Q, i64)>> = HashMap::new();
    for (i2, o2, c2) in q2.terms() {
        by_out.entry(o2).or_default().push((i2, c2, elem_degree(sp, i2, o2)));
    }
    for (i1, o1, c1) in q1.terms() {
        let k1 = elem_degree(sp, i1, o1);
        let mut prefix = 0i64;
        for (pos, a) in i1.iter().enumerate() {
            if let Some(list) = by_out.get(a) {
                for (i2, c2, k2) in list {
                    let eps = (k2 + 1) * (prefix + pos as i64);
                    let mut ins = Vec::with_capacity(i1.len() + i2.len() - 1);
                    ins.extend_from_slice(&i1[..pos]);
                    ins.extend_from_slice(i2);
                    ins.extend_from_slice(&i1[pos + 1..]);
                    let s = sgn(odd(eps)) * sign_scale(k1, *k2);
                    let c = (c1 * *c2) * Q::from_integer(s.into());
                    out.add(ins, o1, c);
                }
            }
            prefix += sp.degree(*a as usize);
        }
    }
}

/// Gerstenhaber bracket [Q1, Q2]_G.
pub fn gerstenhaber_bracket(sp: &GradedSpace, q1: &Cochain, q2: &Cochain) -> Cochain {
    let mut out = Cochain::zero();
    insert_into(sp, q1, q2, |_, _| 1, &mut out);
    // − (−1)^{(k1+1)(k2+1)} (1 ↔ 2); here the roles are swapped so the
    // outer degree is k2 and the inner k1
    insert_into(sp, q2, q1, |outer, inner| -sgn(odd((outer + 1) * (inner + 1))), &mut out);
    out
}

/// Cup product (P ∪ R)(a, b) = (−1)^{|R|·|a|} m2(P(a), R(b)), internal degrees.
pub fn cup_product(sp: &GradedSpace, m2: &Cochain, p: &Cochain, r: &Cochain) -> Cochain {
    let mut out = Cochain::zero();
    for (ip, op, cp) in p.terms() {
        for (ir, or, cr) in r.terms() {
            let v = m2.eval(&[op, or]);
            if v.is_empty() {
                continue;
            }
            let rint = elem_degree(sp, ir, or) - ir.len() as i64;
            let pa: i64 = ip.iter().map(|i| sp.degree(*i as usize)).sum();
            let s = Q::from_integer(sgn(odd(rint * pa)).into());
            let mut ins = ip.clone();
            ins.extend_from_slice(ir);
            for (o, c) in v {
                out.add(ins.clone(), o, cp * cr * &c * &s);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// JSON algebra format

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonBasis {
    pub label: String,
    pub degree: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonTerm {
    pub label: String,
    pub coeff_num: String,
    #[serde(default = "one_str")]
    pub coeff_den: String,
}

fn one_str() -> String {
    "1".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonEntry {
    pub inputs: Vec<String>,
    pub output: Vec<JsonTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonAlgebra {
    pub basis: Vec<JsonBasis>,
    #[serde(default)]
    pub m: BTreeMap<String, Vec<JsonEntry>>,
}

pub fn json_coeff(t: &JsonTerm) -> Result<Q> {
    parse_q(&format!("{}/{}", t.coeff_num.trim(), t.coeff_den.trim()))
}

pub fn coeff_to_json(label: &str, c: &Q) -> JsonTerm {
    JsonTerm { label: label.into(), coeff_num: c.numer().to_string(), coeff_den: c.denom().to_string() }
}

/// A∞ structure m = Σ_k m_k on a finite graded space, known up to arity `cutoff`.
#[derive(Clone, Debug)]
pub struct AInfinityStructure {
    pub space: GradedSpace,
    pub m: Cochain,
    pub cutoff: usize,
}

impl AInfinityStructure {
    /// Every term of m must have total degree 2 (the degree for which
    /// [m,m]_G = 0 is not automatic).
    pub fn new(space: GradedSpace, m: Cochain, cutoff: usize) -> Result<Self> {
        for (i, o, _) in m.terms() {
            if i.is_empty() {
                return Err(Error::input("m has no arity-0 component"));
            }
            if i.len() > cutoff {
                return Err(Error::input(format!("m_{} exceeds arity cutoff {cutoff}", i.len())));
            }
            let d = elem_degree(&space, i, o);
            if d != 2 {
                return Err(Error::input(format!(
                    "m_{} term {:?}->{} has total degree {d}, expected 2",
                    i.len(),
                    i,
                    o
                )));
            }
        }
        Ok(AInfinityStructure { space, m, cutoff })
    }

    pub fn from_json(j: &JsonAlgebra, cutoff: usize) -> Result<Self> {
        let space = GradedSpace::new("A", j.basis.iter().map(|b| (b.label.clone(), b.degree)).collect())?;
        let mut m = Cochain::zero();
        for (k, entries) in &j.m {
            let k: usize = k.trim().parse().map_err(|_| Error::input(format!("bad arity key '{k}'")))?;
            for e in entries {
                if e.inputs.len() != k {
                    return Err(Error::input(format!("entry under m[{k}] has {} inputs", e.inputs.len())));
                }
                let ins = e.inputs.iter().map(|l| space.index_of(l).map(|i| i as Ix)).collect::<Result<Vec<_>>>()?;
                for t in &e.output {
                    m.add(ins.clone(), space.index_of(&t.label)? as Ix, json_coeff(t)?);
                }
            }
        }
        let cutoff = cutoff.max(m.table.keys().map(|k| k.len()).max().unwrap_or(0));
        Self::new(space, m, cutoff)
    }

    pub fn to_json(&self) -> JsonAlgebra {
        cochain_to_json(&self.space, &self.m)
    }

    pub fn m_k(&self, k: usize) -> Cochain {
        self.m.arity_part(k)
    }
}

pub fn cochain_to_json(sp: &GradedSpace, c: &Cochain) -> JsonAlgebra {
    let mut m: BTreeMap<String, Vec<JsonEntry>> = BTreeMap::new();
    for (ins, v) in &c.table {
        m.entry(ins.len().to_string()).or_default().push(JsonEntry {
            inputs: ins.iter().map(|i| sp.label(*i as usize).to_string()).collect(),
            output: v.iter().map(|(o, x)| coeff_to_json(sp.label(*o as usize), x)).collect(),
        });
    }
    JsonAlgebra { basis: sp.basis.iter().map(|b| JsonBasis { label: b.label.clone(), degree: b.degree }).collect(), m }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McViolation {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub defect: Vec<(String, String)>,
}

/// Lists every nonzero entry of [m,m]_G of arity ≤ cutoff.
pub fn maurer_cartan_check(a: &AInfinityStructure) -> Vec<McViolation> {
    let mm = gerstenhaber_bracket(&a.space, &a.m, &a.m);
    mm.table
        .iter()
        .filter(|(ins, _)| ins.len() <= a.cutoff)
        .map(|(ins, v)| McViolation {
            arity: ins.len(),
            inputs: ins.iter().map(|i| a.space.label(*i as usize).to_string()).collect(),
            defect: v.iter().map(|(o, c)| (a.space.label(*o as usize).to_string(), fmt_q(c))).collect(),
        })
        .collect()
}

pub fn hochschild_differential(a: &AInfinityStructure, p: &Cochain) -> Cochain {
    gerstenhaber_bracket(&a.space, &a.m, p)
}

/// All elementary cochains (inputs, out) of total degree `deg` and arity ≤ `max_arity`.
pub fn elementary_basis(sp: &GradedSpace, deg: i64, max_arity: usize) -> Vec<(Vec<Ix>, Ix)> {
    let n = sp.dim() as Ix;
    let mut out = Vec::new();
    for k in 0..=max_arity {
        for tuple in all_tuples(n, k) {
            for o in 0..n {
                if elem_degree(sp, &tuple, o) == deg {
                    out.push((tuple.clone(), o));
                }
            }
        }
    }
    out
}

/// All k-tuples over 0..n, lexicographic.
pub fn all_tuples(n: Ix, k: usize) -> Vec<Vec<Ix>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut t2 = t.clone();
                    t2.push(x);
                    t2
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug)]
pub struct HhResult {
    pub degree: i64,
    pub dim: usize,
    pub representatives: Vec<Cochain>,
}

/// H^n of the arity-truncated Hochschild complex (a quotient complex,
/// since [m, −]_G never lowers arity).
pub fn hochschild_cohomology(a: &AInfinityStructure, n: i64, arity_cutoff: usize) -> Result<HhResult> {
    if n < 0 {
        return Err(Error::input("negative degree"));
    }
    if (arity_cutoff as i64) < n + 1 {
        return Err(Error::Cutoff(format!("arity cutoff {arity_cutoff} cannot close the complex at degree {n}")));
    }
    let sp = &a.space;
    let b_prev = elementary_basis(sp, n - 1, arity_cutoff);
    let b_mid = elementary_basis(sp, n, arity_cutoff);
    let b_next = elementary_basis(sp, n + 1, arity_cutoff);
    let mid_ix: HashMap<(Vec<Ix>, Ix), usize> = b_mid.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let next_ix: HashMap<(Vec<Ix>, Ix), usize> = b_next.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let build = |src: &[(Vec<Ix>, Ix)], tix: &HashMap<(Vec<Ix>, Ix), usize>, rows: usize| {
        let mut mat = SparseMatrix::new(rows, src.len());
        for (j, (ins, o)) in src.iter().enumerate() {
            let img = hochschild_differential(a, &Cochain::elementary(ins.clone(), *o, Q::one()));
            for (i2, o2, c) in img.terms() {
                if i2.len() > arity_cutoff {
                    continue;
                }
                let r = tix[&(i2.clone(), o2)];
                mat.add(r, j, c.clone());
            }
        }
        mat
    };
    let d_in = build(&b_prev, &mid_ix, b_mid.len());
    let d_out = build(&b_mid, &next_ix, b_next.len());
    let reps = cohomology_representatives(&d_in, &d_out)?;
    let representatives = reps
        .iter()
        .map(|v| {
            let mut c = Cochain::zero();
            for (i, x) in v {
                let (ins, o) = &b_mid[*i];
                c.add(ins.clone(), *o, x.clone());
            }
            c
        })
        .collect::<Vec<_>>();
    Ok(HhResult { degree: n, dim: representatives.len(), representatives })
}

#[cfg(test)]
mod tests;
