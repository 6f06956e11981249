//! Colored cooperads Ger∨, S, OC∨, sc at bounded arity, their cobar
//! complexes, arity-local cohomology and the non-formality certificate.

mod table;
mod tree;
mod witness;

pub use table::{arnold_basis, arnold_reduce, relabel, CoElem, Color, CooperadTable, Edge, Fault, Inputs, Split, Which, DEFAULT_ARITY, MAX_ARITY};
pub use tree::{basis, differential, differential_tree, single, Element, Node, Signature, Tree};
pub use witness::{nonformality_witness, nonformality_witness_with, Certificate, CheckResult};

use crate::error::{Error, Result};
use crate::exactlinalg::{cohomology_dimension, cohomology_representatives, SparseMatrix, SparseVec, Q};
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

pub fn build_cooperad_tables(which: Which, arity: usize) -> Result<CooperadTable> {
    CooperadTable::new(which, arity)
}

/// All colorings of `m` inputs labelled 0..m, paired with admissible outputs.
pub fn arities(table: &CooperadTable, m: usize) -> Vec<(Inputs, Color)> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let ins: Inputs = (0..m as u32).map(|i| (i, if mask >> i & 1 == 1 { Color::O } else { Color::C })).collect();
        for oc in [Color::C, Color::O] {
            if table.valid_vertex(&ins, oc) {
                out.push((ins.clone(), oc));
            }
        }
    }
    out
}

/// Counts basis elements per (k, n, output, degree).
#[derive(Clone, Debug, Serialize)]
pub struct TableSummary {
    pub operad: String,
    pub entries: Vec<SummaryEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryEntry {
    pub k: usize,
    pub n: usize,
    pub output: char,
    pub degree: i64,
    pub dim: usize,
}

pub fn summarize(table: &CooperadTable) -> TableSummary {
    let mut entries = Vec::new();
    for m in 1..=table.max_arity {
        for k in (0..=m).rev() {
            let n = m - k;
            let mut ins: Inputs = (0..k as u32).map(|i| (i, Color::C)).collect();
            ins.extend((k as u32..m as u32).map(|i| (i, Color::O)));
            for oc in [Color::C, Color::O] {
                let mut by_deg: BTreeMap<i64, usize> = BTreeMap::new();
                for x in table.basis(&ins, oc) {
                    *by_deg.entry(CooperadTable::degree(&ins, oc, &x)).or_default() += 1;
                }
                for (degree, dim) in by_deg {
                    entries.push(SummaryEntry { k, n, output: oc.letter(), degree, dim });
                }
            }
        }
    }
    TableSummary { operad: table.which.name().into(), entries }
}

fn parity_tensor(t: Vec<(Node, i64)>) -> (Tree, bool) {
    tree::canonical(t.into_iter().map(|(n, d)| (n, d % 2 != 0)).collect())
}

/// Coassociativity: every three-vertex tree receives the same coefficient
/// from both orders of splitting its two edges. Returns the failures.
pub fn coassociativity_defects(table: &CooperadTable) -> Vec<String> {
    let mut bad = Vec::new();
    for m in 1..=table.max_arity {
        for (ins, oc) in arities(table, m) {
            let leaves: Vec<Color> = ins.iter().map(|x| x.1).collect();
            for x in table.basis(&ins, oc) {
                let t0 = Tree { nodes: vec![Node { cluster: (0..m as u32).collect(), out: oc, elem: x.clone() }] };
                // tree -> (first inner key -> coefficient)
                let mut got: BTreeMap<Tree, BTreeMap<(Vec<u32>, Color), Q>> = BTreeMap::new();
                for s1 in tree::splits_at(table, &leaves, &t0, 0) {
                    let first = (s1.tensor[1].0.cluster.clone(), s1.tensor[1].0.out);
                    let (t1, odd1) = parity_tensor(s1.tensor);
                    for i in 0..2 {
                        for s2 in tree::splits_at(table, &leaves, &t1, i) {
                            let (t2, odd2) = parity_tensor(s2.tensor);
                            let mut c = s1.coeff.clone() * &s2.coeff;
                            if odd1 ^ odd2 {
                                c = -c;
                            }
                            *got.entry(t2).or_default().entry(first.clone()).or_insert_with(Q::zero) += c;
                        }
                    }
                }
                let sig = Signature { leaves: leaves.clone(), out: oc };
                for (t, per) in got {
                    let vals: Vec<&Q> = per.values().collect();
                    let two_edges = 2;
                    let consistent = if per.len() == two_edges { vals[0] == vals[1] } else { vals.iter().all(|v| v.is_zero()) };
                    if !consistent {
                        bad.push(format!("{} on {}: {:?}", t0.dump(&sig), t.dump(&sig), vals.iter().map(|v| v.to_string()).collect::<Vec<_>>()));
                    }
                }
            }
        }
    }
    bad
}

/// Sub-cooperad check: cocompositions of every element of `sub`, computed
/// in sc, stay inside `sub`.
pub fn embedding_defects(sub: &CooperadTable) -> Vec<String> {
    let mut bad = Vec::new();
    for m in 1..=sub.max_arity {
        for (ins, oc) in arities(sub, m) {
            for x in sub.basis(&ins, oc) {
                for s in sub.decompose_unfiltered(&ins, oc, &x) {
                    let oi = s.outer_inputs(&ins);
                    let ii = s.inner_inputs(&ins);
                    let inside = sub.valid_vertex(&oi, oc) && sub.admits(oc, &s.outer) && sub.valid_vertex(&ii, s.inner_out) && sub.admits(s.inner_out, &s.inner);
                    if !inside {
                        bad.push(format!("{:?} on {:?} → {:?} ⊗ {:?}", x, ins, s.outer, s.inner));
                    }
                }
            }
        }
    }
    bad
}

fn split_key(s: &Split) -> (Vec<u32>, Color, CoElem, CoElem) {
    (s.inner_labels.clone(), s.inner_out, s.outer.clone(), s.inner.clone())
}

fn expand(inputs: &Inputs, out: Color, x: &CoElem, map: &BTreeMap<u32, u32>) -> BTreeMap<CoElem, Q> {
    let mut v = BTreeMap::new();
    for (c, y) in relabel(inputs, out, x, map) {
        *v.entry(y).or_insert_with(Q::zero) += c;
    }
    v
}

/// Equivariance: Δ(π·x) = (π ⊗ π)·Δ(x) for every color-preserving
/// relabelling π of every basis element up to arity `m_max`.
pub fn equivariance_defects(table: &CooperadTable, m_max: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for m in 1..=m_max.min(table.max_arity) {
        for (ins, oc) in arities(table, m) {
            let idx: Vec<usize> = (0..m).collect();
            for perm in crate::scoalgebra::permutations_of(&idx) {
                if (0..m).any(|i| ins[i].1 != ins[perm[i]].1) {
                    continue;
                }
                let map: BTreeMap<u32, u32> = (0..m).map(|i| (i as u32, perm[i] as u32)).collect();
                for x in table.basis(&ins, oc) {
                    // left: decompose π·x
                    let mut left: BTreeMap<(Vec<u32>, Color, CoElem, CoElem), Q> = BTreeMap::new();
                    for (y, c) in expand(&ins, oc, &x, &map) {
                        for s in table.decompose(&ins, oc, &y) {
                            *left.entry(split_key(&s)).or_insert_with(Q::zero) += &c * &s.coeff;
                        }
                    }
                    // right: relabel each term of Δx
                    let mut right: BTreeMap<(Vec<u32>, Color, CoElem, CoElem), Q> = BTreeMap::new();
                    for s in table.decompose(&ins, oc, &x) {
                        let oi = s.outer_inputs(&ins);
                        let ii = s.inner_inputs(&ins);
                        let mut jl: Vec<u32> = s.inner_labels.iter().map(|l| map[l]).collect();
                        jl.sort_unstable();
                        let e_old = s.inner_labels[0];
                        let e_new = jl[0];
                        let mut omap = map.clone();
                        omap.insert(e_old, e_new);
                        for (l, _) in &oi {
                            if *l != e_old {
                                omap.insert(*l, map[l]);
                            }
                        }
                        for (yo, co) in expand(&oi, oc, &s.outer, &omap) {
                            for (yi, ci) in expand(&ii, s.inner_out, &s.inner, &map) {
                                let k = (jl.clone(), s.inner_out, yo.clone(), yi);
                                *right.entry(k).or_insert_with(Q::zero) += &s.coeff * &co * ci;
                            }
                        }
                    }
                    left.retain(|_, c| !c.is_zero());
                    right.retain(|_, c| !c.is_zero());
                    if left != right {
                        bad.push(format!("{:?} on {:?} under {:?}", x, ins, perm));
                    }
                }
            }
        }
    }
    bad
}

/// ∂² on every basis tree of every signature up to arity `m_max`.
pub fn d_squared_defects(table: &CooperadTable, m_max: usize) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for m in 1..=m_max.min(table.max_arity) {
        for (ins, oc) in arities(table, m) {
            let sig = Signature { leaves: ins.iter().map(|x| x.1).collect(), out: oc };
            for trees in basis(table, &sig)?.values() {
                for t in trees {
                    let d2 = differential(table, &sig, &differential_tree(table, &sig, t));
                    if !d2.is_empty() {
                        bad.push(format!("{} {}: ∂² has {} terms", sig.label(), t.dump(&sig), d2.len()));
                    }
                }
            }
        }
    }
    Ok(bad)
}

/// Matrix of ∂ from degree d to degree d+1 in the given bases.
pub fn differential_matrix(table: &CooperadTable, sig: &Signature, src: &[Tree], tgt: &[Tree]) -> Result<SparseMatrix> {
    let index: BTreeMap<&Tree, usize> = tgt.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut m = SparseMatrix::new(tgt.len(), src.len());
    for (j, t) in src.iter().enumerate() {
        for (u, c) in differential_tree(table, sig, t) {
            let i = *index.get(&u).ok_or_else(|| Error::Internal(format!("∂ left the basis: {}", u.dump(sig))))?;
            m.add(i, j, c);
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct ArityCohomology {
    pub signature: String,
    pub degree: i64,
    pub ambient_dim: usize,
    pub cohomology_dim: usize,
    pub representatives: Vec<Vec<(String, String)>>,
}

pub fn arity_cohomology(table: &CooperadTable, sig: &Signature, degree: i64) -> Result<ArityCohomology> {
    let b = basis(table, sig)?;
    let empty = Vec::new();
    let prev = b.get(&(degree - 1)).unwrap_or(&empty);
    let cur = b.get(&degree).unwrap_or(&empty);
    let next = b.get(&(degree + 1)).unwrap_or(&empty);
    let d_in = differential_matrix(table, sig, prev, cur)?;
    let d_out = differential_matrix(table, sig, cur, next)?;
    let dim = cohomology_dimension(&d_in, &d_out)?;
    let reps: Vec<SparseVec> = cohomology_representatives(&d_in, &d_out)?;
    Ok(ArityCohomology {
        signature: sig.label(),
        degree,
        ambient_dim: cur.len(),
        cohomology_dim: dim,
        representatives: reps.iter().map(|v| v.iter().map(|(i, c)| (cur[*i].dump(sig), c.to_string())).collect()).collect(),
    })
}
