//! Polynomial algebras ℚ[x_1..x_d], polyvector fields with the
//! Schouten–Nijenhuis bracket, the HKR map and truncated Hochschild cohomology.
//!
//! Polyvectors are treated as superfunctions in even x_i and odd ξ_i = ∂_i.
//! Polynomial cochains are normalized (vanish when an input is constant) and
//! split by weight w = deg(output) − Σ deg(inputs).

use crate::exactlinalg::{q, Echelon, SparseMatrix, Q};
use crate::graded::{sgn, GradedSpace};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

use super::{Cochain, Ix};

/// Exponent vector.
pub type Mono = Vec<u32>;

pub fn mono_deg(m: &Mono) -> u32 {
    m.iter().sum()
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// All monomials in d variables of exactly degree g, lexicographic.
pub fn monos_of_degree(d: usize, g: u32) -> Vec<Mono> {
    if d == 0 {
        return if g == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=g).rev() {
        for rest in monos_of_degree(d - 1, g - first) {
            let mut m = vec![first];
            m.extend(rest);
            out.push(m);
        }
    }
    out
}

pub fn monos_up_to(d: usize, max: u32) -> Vec<Mono> {
    (0..=max).flat_map(|g| monos_of_degree(d, g)).collect()
}

/// Factorizations a = b·c with both factors of positive degree.
fn positive_splits(a: &Mono) -> Vec<(Mono, Mono)> {
    let mut out = Vec::new();
    let total = mono_deg(a);
    for b in monos_up_to(a.len(), total) {
        if mono_deg(&b) == 0 || mono_deg(&b) == total || b.iter().zip(a).any(|(x, y)| x > y) {
            continue;
        }
        let c: Mono = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        out.push((b, c));
    }
    out
}

// ---------------------------------------------------------------------------
// polyvectors

/// Term key: (exponents, bitmask of ξ's).
pub type PvKey = (Mono, u32);

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polyvector {
    pub terms: BTreeMap<PvKey, Q>,
}

/// ℚ[x_1..x_d] ⊗ Λ(ξ_1..ξ_d), coefficient degree ≤ cutoff.
#[derive(Clone, Debug)]
pub struct PolyvectorAlgebra {
    pub d: usize,
    pub cutoff: u32,
}

impl Polyvector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(m: Mono, mask: u32, c: Q) -> Self {
        let mut p = Self::zero();
        p.add(m, mask, c);
        p
    }

    pub fn add(&mut self, m: Mono, mask: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let k = (m, mask);
        let e = self.terms.entry(k.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_scaled(&mut self, o: &Polyvector, c: &Q) {
        for ((m, mask), x) in &o.terms {
            self.add(m.clone(), *mask, x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut r = Self::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of ξ's when homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|(_, m)| m.count_ones());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

fn merge_sign(a: u32, b: u32) -> i64 {
    // ξ_A ξ_B → sorted: count pairs i ∈ A, j ∈ B with i > j
    let mut n = 0;
    for i in 0..32 {
        if a >> i & 1 == 1 {
            n += (b & ((1u32 << i) - 1)).count_ones();
        }
    }
    sgn(n % 2 == 1)
}

impl PolyvectorAlgebra {
    pub fn new(d: usize, cutoff: u32) -> Result<Self> {
        if d == 0 || d > 16 {
            return Err(Error::input("variable count must be in 1..=16"));
        }
        Ok(PolyvectorAlgebra { d, cutoff })
    }

    fn check(&self, m: &Mono) -> Result<()> {
        if mono_deg(m) > self.cutoff {
            return Err(Error::Cutoff(format!("polynomial degree {} exceeds cutoff {}", mono_deg(m), self.cutoff)));
        }
        Ok(())
    }

    pub fn var(&self, i: usize) -> Polyvector {
        let mut m = vec![0; self.d];
        m[i] = 1;
        Polyvector::term(m, 0, Q::one())
    }

    pub fn partial(&self, i: usize) -> Polyvector {
        Polyvector::term(vec![0; self.d], 1 << i, Q::one())
    }

    pub fn wedge(&self, a: &Polyvector, b: &Polyvector) -> Result<Polyvector> {
        let mut out = Polyvector::zero();
        for ((ma, ka), ca) in &a.terms {
            for ((mb, kb), cb) in &b.terms {
                if ka & kb != 0 {
                    continue;
                }
                let m = mono_mul(ma, mb);
                self.check(&m)?;
                out.add(m, ka | kb, ca * cb * q(merge_sign(*ka, *kb)));
            }
        }
        Ok(out)
    }

    fn dx(&self, p: &Polyvector, i: usize) -> Polyvector {
        let mut out = Polyvector::zero();
        for ((m, k), c) in &p.terms {
            if m[i] > 0 {
                let mut m2 = m.clone();
                m2[i] -= 1;
                out.add(m2, *k, c * q(m[i] as i64));
            }
        }
        out
    }

    /// ∂/∂ξ_i acting from the left (`right = false`) or the right.
    fn dxi(&self, p: &Polyvector, i: usize, right: bool) -> Polyvector {
        let mut out = Polyvector::zero();
        for ((m, k), c) in &p.terms {
            if k >> i & 1 == 1 {
                let before = (k & ((1u32 << i) - 1)).count_ones();
                let after = k.count_ones() - before - 1;
                let s = sgn((if right { after } else { before }) % 2 == 1);
                out.add(m.clone(), k & !(1 << i), c * q(s));
            }
        }
        out
    }

    /// [P, Q]_SN = Σ_i (P ∂⃖_{ξ_i})(∂_{x_i} Q) − (∂_{x_i} P)(∂⃗_{ξ_i} Q).
    pub fn schouten_bracket(&self, a: &Polyvector, b: &Polyvector) -> Result<Polyvector> {
        let mut out = Polyvector::zero();
        for i in 0..self.d {
            out.add_scaled(&self.wedge(&self.dxi(a, i, true), &self.dx(b, i))?, &Q::one());
            out.add_scaled(&self.wedge(&self.dx(a, i), &self.dxi(b, i, false))?, &-Q::one());
        }
        Ok(out)
    }

    /// Basis x^α ξ_I with |α| ≤ cutoff and |I| = j.
    pub fn basis(&self, j: u32) -> Vec<PvKey> {
        let masks: Vec<u32> = (0..1u32 << self.d).filter(|m| m.count_ones() == j).collect();
        monos_up_to(self.d, self.cutoff).into_iter().flat_map(|m| masks.iter().map(move |k| (m.clone(), *k))).collect()
    }

    pub fn dimension(&self, j: u32) -> usize {
        self.basis(j).len()
    }
}

// ---------------------------------------------------------------------------
// polynomial cochains

/// Normalized cochain on tuples of positive-degree monomials.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyCochain {
    pub table: BTreeMap<Vec<Mono>, BTreeMap<Mono, Q>>,
}

impl PolyCochain {
    pub fn add(&mut self, ins: Vec<Mono>, out: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let v = self.table.entry(ins.clone()).or_default();
        let e = v.entry(out.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            v.remove(&out);
            if v.is_empty() {
                self.table.remove(&ins);
            }
        }
    }

    pub fn eval(&self, ins: &[Mono]) -> BTreeMap<Mono, Q> {
        self.table.get(ins).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }
}

/// n-tuples of positive-degree monomials with total degree ≤ s.
pub fn input_tuples(d: usize, n: usize, s: u32) -> Vec<Vec<Mono>> {
    fn rec(d: usize, n: usize, left: u32, cur: &mut Vec<Mono>, out: &mut Vec<Vec<Mono>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for g in 1..=left {
            for m in monos_of_degree(d, g) {
                cur.push(m);
                rec(d, n, left - g, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(d, n, s, &mut Vec::new(), &mut out);
    out
}

/// ∂ = [m2, −]_G for the polynomial product, restricted to input tuples of
/// total degree ≤ s. On an n-cochain:
/// P(a_1..a_n)a_{n+1} + (−1)^{n+1} a_1 P(a_2..) + (−1)^n Σ_i (−1)^{i−1} P(..a_i a_{i+1}..).
pub fn poly_differential(d: usize, p: &PolyCochain, n: usize, s: u32) -> PolyCochain {
    let mut out = PolyCochain::default();
    for t in input_tuples(d, n + 1, s) {
        for (o, c) in p.eval(&t[..n]) {
            out.add(t.clone(), mono_mul(&o, &t[n]), c);
        }
        for (o, c) in p.eval(&t[1..]) {
            out.add(t.clone(), mono_mul(&t[0], &o), c * q(sgn((n + 1) % 2 == 1)));
        }
        for i in 0..n {
            let mut tt = t[..i].to_vec();
            tt.push(mono_mul(&t[i], &t[i + 1]));
            tt.extend_from_slice(&t[i + 2..]);
            for (o, c) in p.eval(&tt) {
                out.add(t.clone(), o, c * q(sgn((n + i) % 2 == 1)));
            }
        }
    }
    out
}

fn apply_derivation(i: usize, a: &Mono) -> Option<(Mono, i64)> {
    if a[i] == 0 {
        return None;
    }
    let mut m = a.clone();
    m[i] -= 1;
    Some((m, a[i] as i64))
}

/// HKR cochain of a j-vector: (a_1..a_j) ↦ Σ_σ sgn σ · f · Π_r ∂_{i_σ(r)} a_r,
/// on all input tuples of total degree ≤ s.
pub fn hkr_cochain(pa: &PolyvectorAlgebra, g: &Polyvector, s: u32) -> Result<PolyCochain> {
    let j = g.degree().unwrap_or(0) as usize;
    for ((m, _), _) in &g.terms {
        pa.check(m)?;
    }
    let mut out = PolyCochain::default();
    if j == 0 {
        // 0-cochain: the function itself, on the empty tuple
        for ((m, _), c) in &g.terms {
            out.add(vec![], m.clone(), c.clone());
        }
        return Ok(out);
    }
    let perms = permutations(j);
    for t in input_tuples(pa.d, j, s) {
        for ((f, mask), c) in &g.terms {
            let idx: Vec<usize> = (0..pa.d).filter(|i| mask >> i & 1 == 1).collect();
            for (perm, sign) in &perms {
                let mut prod = f.clone();
                let mut coef = c * q(*sign);
                let mut ok = true;
                for r in 0..j {
                    match apply_derivation(idx[perm[r]], &t[r]) {
                        None => {
                            ok = false;
                            break;
                        }
                        Some((m, k)) => {
                            prod = mono_mul(&prod, &m);
                            coef *= q(k);
                        }
                    }
                }
                if ok {
                    out.add(t.clone(), prod, coef);
                }
            }
        }
    }
    Ok(out)
}

fn permutations(j: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        if cur.len() == used.len() {
            let mut inv = 0;
            for a in 0..cur.len() {
                for b in a + 1..cur.len() {
                    if cur[a] > cur[b] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), sgn(inv % 2 == 1)));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(&mut Vec::new(), &mut vec![false; j], &mut out);
    out
}

/// One weight-graded piece of the truncated complex.
struct WeightComplex {
    basis: Vec<(Vec<Mono>, Mono)>,
    index: HashMap<(Vec<Mono>, Mono), usize>,
}

fn weight_basis(d: usize, n: usize, s: u32, w: i64) -> WeightComplex {
    let mut basis = Vec::new();
    for t in input_tuples(d, n, s) {
        let g = t.iter().map(mono_deg).sum::<u32>() as i64 + w;
        if g < 0 {
            continue;
        }
        for o in monos_of_degree(d, g as u32) {
            basis.push((t.clone(), o));
        }
    }
    let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    WeightComplex { basis, index }
}

fn diff_matrix(d: usize, n: usize, s: u32, src: &WeightComplex, tgt: &WeightComplex) -> SparseMatrix {
    let mut m = SparseMatrix::new(tgt.basis.len(), src.basis.len());
    for (j, (t, o)) in src.basis.iter().enumerate() {
        let mut p = PolyCochain::default();
        p.add(t.clone(), o.clone(), Q::one());
        let img = poly_differential_sparse(d, &p, n, s);
        for (ins, v) in img.table {
            for (o2, c) in v {
                if let Some(&r) = tgt.index.get(&(ins.clone(), o2)) {
                    m.add(r, j, c);
                }
            }
        }
    }
    m
}

/// Same as [`poly_differential`] but enumerates only tuples the cochain touches.
pub fn poly_differential_sparse(d: usize, p: &PolyCochain, n: usize, s: u32) -> PolyCochain {
    let mut out = PolyCochain::default();
    for (t, v) in &p.table {
        let used: u32 = t.iter().map(mono_deg).sum();
        for (o, c) in v {
            for g in 1..=s.saturating_sub(used) {
                for a in monos_of_degree(d, g) {
                    let mut t1 = t.clone();
                    t1.push(a.clone());
                    out.add(t1, mono_mul(o, &a), c.clone());
                    let mut t2 = vec![a.clone()];
                    t2.extend(t.iter().cloned());
                    out.add(t2, mono_mul(&a, o), c * q(sgn((n + 1) % 2 == 1)));
                }
            }
            for i in 0..t.len() {
                for (b, cc) in positive_splits(&t[i]) {
                    let mut tt = t[..i].to_vec();
                    tt.push(b);
                    tt.push(cc);
                    tt.extend_from_slice(&t[i + 1..]);
                    out.add(tt, o.clone(), c * q(sgn((n + i) % 2 == 1)));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct PolyHh {
    pub n: usize,
    /// (weight, dim H^n_w)
    pub by_weight: Vec<(i64, usize)>,
    pub dim: usize,
    pub representatives: Vec<PolyCochain>,
}

/// HH^n of ℚ[x_1..x_d] in the trusted window: weights w ∈ [−n, D − n]
/// (coefficient degree ≤ D), inputs of total degree ≤ s.
pub fn poly_hochschild_cohomology(d: usize, n: usize, big_d: u32, s: u32) -> Result<PolyHh> {
    if s < n as u32 + 1 {
        return Err(Error::Cutoff(format!("input bound {s} cannot close the complex at degree {n}")));
    }
    let mut by_weight = Vec::new();
    let mut reps = Vec::new();
    for w in -(n as i64)..=(big_d as i64 - n as i64) {
        let mid = weight_basis(d, n, s, w);
        let next = weight_basis(d, n + 1, s, w);
        let d_out = diff_matrix(d, n, s, &mid, &next);
        let d_in = if n == 0 {
            SparseMatrix::new(mid.basis.len(), 0)
        } else {
            let prev = weight_basis(d, n - 1, s, w);
            diff_matrix(d, n - 1, s, &prev, &mid)
        };
        let r = crate::exactlinalg::cohomology_representatives(&d_in, &d_out)?;
        by_weight.push((w, r.len()));
        for v in r {
            let mut c = PolyCochain::default();
            for (i, x) in v {
                let (t, o) = &mid.basis[i];
                c.add(t.clone(), o.clone(), x);
            }
            reps.push(c);
        }
    }
    Ok(PolyHh { n, dim: reps.len(), by_weight, representatives: reps })
}

#[derive(Clone, Debug)]
pub struct HkrReport {
    pub n: usize,
    pub polyvectors: usize,
    pub hh_dim: usize,
    pub all_cocycles: bool,
    /// rank of HKR images modulo coboundaries
    pub injective_rank: usize,
}

/// Checks HKR in the window: images are cocycles, independent modulo
/// coboundaries, and their number equals dim HH^n.
pub fn hkr_check(d: usize, n: usize, big_d: u32, s: u32) -> Result<HkrReport> {
    let pa = PolyvectorAlgebra::new(d, big_d)?;
    let hh = poly_hochschild_cohomology(d, n, big_d, s)?;
    let mut all_cocycles = true;
    let mut inj = 0;
    for w in -(n as i64)..=(big_d as i64 - n as i64) {
        let mid = weight_basis(d, n, s, w);
        let mut ech = Echelon::new();
        if n > 0 {
            let prev = weight_basis(d, n - 1, s, w);
            let d_in = diff_matrix(d, n - 1, s, &prev, &mid);
            let t = d_in.transpose();
            for i in 0..t.nrows {
                ech.insert(t.row(i));
            }
        }
        for (m, mask) in pa.basis(n as u32) {
            if mono_deg(&m) as i64 - n as i64 != w {
                continue;
            }
            let g = Polyvector::term(m, mask, Q::one());
            let c = hkr_cochain(&pa, &g, s)?;
            if !poly_differential_sparse(d, &c, n, s).is_zero() {
                all_cocycles = false;
            }
            let mut v: Vec<(usize, Q)> = Vec::new();
            for (t, outv) in &c.table {
                for (o, x) in outv {
                    v.push((mid.index[&(t.clone(), o.clone())], x.clone()));
                }
            }
            v.sort_by_key(|e| e.0);
            if ech.insert(v.iter().map(|(i, x)| (*i, x))) {
                inj += 1;
            }
        }
    }
    Ok(HkrReport { n, polyvectors: pa.dimension(n as u32), hh_dim: hh.dim, all_cocycles, injective_rank: inj })
}

/// Finite model for cross-checking: monomials of degree ≤ top as a graded
/// space (all in degree 0) and the truncated product as a cochain.
pub fn truncated_product(d: usize, top: u32) -> (GradedSpace, Vec<Mono>, Cochain) {
    let monos = monos_up_to(d, top);
    let sp = GradedSpace::new("A", monos.iter().map(|m| (format!("{m:?}"), 0)).collect()).unwrap();
    let ix: HashMap<Mono, Ix> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i as Ix)).collect();
    let mut m2 = Cochain::zero();
    for a in &monos {
        for b in &monos {
            if let Some(o) = ix.get(&mono_mul(a, b)) {
                m2.add(vec![ix[a], ix[b]], *o, Q::one());
            }
        }
    }
    (sp, monos, m2)
}
