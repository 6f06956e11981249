//! Sparse exact linear algebra over ℚ.
//!
//! Elimination runs on integer rows (fraction-free, content stripped after
//! every update); rationals only appear when results are handed back.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Format as `p/q` (or `p` when the denominator is 1).
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::input(format!("bad rational '{s}'"));
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| bad())?;
        let d: BigInt = b.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Q::new(n, d))
    } else {
        Ok(Q::from_integer(s.parse().map_err(|_| bad())?))
    }
}

/// Sparse vector: sorted (index, value), no explicit zeros.
pub type SparseVec = Vec<(usize, Q)>;

/// Row-major sparse matrix with rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    rows: Vec<BTreeMap<usize, Q>>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: vec![BTreeMap::new(); nrows] }
    }

    pub fn from_dense(d: &[Vec<Q>]) -> Self {
        let nrows = d.len();
        let ncols = d.first().map_or(0, |r| r.len());
        let mut m = Self::new(nrows, ncols);
        for (i, r) in d.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.add(i, j, x.clone());
            }
        }
        m
    }

    /// Accumulates into entry (i, j).
    pub fn add(&mut self, i: usize, j: usize, x: Q) {
        assert!(i < self.nrows && j < self.ncols, "index out of range");
        if x.is_zero() {
            return;
        }
        let e = self.rows[i].entry(j).or_insert_with(Q::zero);
        *e += x;
        if e.is_zero() {
            self.rows[i].remove(&j);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.rows[i].get(&j).cloned().unwrap_or_else(Q::zero)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Q)> {
        self.rows[i].iter().map(|(j, x)| (*j, x))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.ncols, self.nrows);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, x) in r {
                t.rows[*j].insert(i, x.clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::Math(format!(
                "shape mismatch {}x{} * {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Self::new(self.nrows, other.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for (k, a) in r {
                for (j, b) in &other.rows[*k] {
                    out.add(i, *j, a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|r| r.iter().fold(Q::zero(), |acc, (j, x)| acc + x * &v[*j]))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        (0..self.nrows).map(|i| (0..self.ncols).map(|j| self.get(i, j)).collect()).collect()
    }
}

// ---------------------------------------------------------------------------
// integer rows

type IRow = Vec<(usize, BigInt)>;

fn content_strip(r: &mut IRow) {
    let mut g = BigInt::zero();
    for (_, x) in r.iter() {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if r.first().map_or(false, |(_, x)| x.is_negative()) {
        g = -g;
    }
    if !g.is_zero() && !g.is_one() {
        for (_, x) in r.iter_mut() {
            *x /= &g;
        }
    }
}

/// Clears rational denominators of a row.
fn to_irow<'a>(it: impl Iterator<Item = (usize, &'a Q)>) -> IRow {
    let v: Vec<(usize, &Q)> = it.filter(|(_, x)| !x.is_zero()).collect();
    let l = v.iter().fold(BigInt::one(), |l, (_, x)| l.lcm(x.denom()));
    let mut r: IRow = v.into_iter().map(|(j, x)| (j, x.numer() * (&l / x.denom()))).collect();
    r.sort_by_key(|e| e.0);
    content_strip(&mut r);
    r
}

/// a*r - b*p, merged.
fn combine(a: &BigInt, r: &IRow, b: &BigInt, p: &IRow) -> IRow {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j >= p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i >= r.len() || (j < p.len() && p[j].0 < r[i].0);
        if take_r {
            out.push((r[i].0, a * &r[i].1));
            i += 1;
        } else if take_p {
            out.push((p[j].0, -(b * &p[j].1)));
            j += 1;
        } else {
            let x = a * &r[i].1 - b * &p[j].1;
            if !x.is_zero() {
                out.push((r[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    content_strip(&mut out);
    out
}

fn coeff(r: &IRow, c: usize) -> Option<&BigInt> {
    r.binary_search_by_key(&c, |e| e.0).ok().map(|k| &r[k].1)
}

/// Incremental row echelon form. Pivot columns are distinct; rows keyed by
/// their leading column. Deterministic: the order of insertion fixes the result.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, IRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut r: IRow) -> IRow {
        let mut start = 0usize;
        loop {
            let c = r.iter().map(|e| e.0).find(|c| *c >= start && self.pivots.contains_key(c));
            let Some(c) = c else { return r };
            let p = &self.pivots[&c];
            let a = p[0].1.clone();
            let b = coeff(&r, c).unwrap().clone();
            r = combine(&a, &r, &b, p);
            start = c + 1;
        }
    }

    /// Inserts a row; returns true if it increased the rank.
    pub fn insert<'a>(&mut self, it: impl Iterator<Item = (usize, &'a Q)>) -> bool {
        let r = self.reduce_full_lead(to_irow(it));
        if r.is_empty() {
            return false;
        }
        self.pivots.insert(r[0].0, r);
        true
    }

    // only the leading term must be pivot-free for echelon form
    fn reduce_full_lead(&self, mut r: IRow) -> IRow {
        while let Some(&(c, _)) = r.first() {
            match self.pivots.get(&c) {
                None => break,
                Some(p) => {
                    let a = p[0].1.clone();
                    let b = r[0].1.clone();
                    r = combine(&a, &r, &b, p);
                }
            }
        }
        r
    }

    /// Whether the vector lies in the row span.
    pub fn contains<'a>(&self, it: impl Iterator<Item = (usize, &'a Q)>) -> bool {
        self.reduce(to_irow(it)).is_empty()
    }

    /// Back-substitution to reduced echelon form.
    fn rref(&self) -> BTreeMap<usize, IRow> {
        let mut piv = self.pivots.clone();
        let cols: Vec<usize> = piv.keys().rev().cloned().collect();
        for &c in &cols {
            let p = piv[&c].clone();
            let a = p[0].1.clone();
            for (_, row) in piv.range_mut(..c) {
                if let Some(b) = coeff(row, c) {
                    let b = b.clone();
                    *row = combine(&a, row, &b, &p);
                }
            }
        }
        piv
    }
}

pub fn echelon_of(m: &SparseMatrix) -> Echelon {
    let mut e = Echelon::new();
    for i in 0..m.nrows {
        e.insert(m.row(i));
    }
    e
}

pub fn rank(m: &SparseMatrix) -> usize {
    echelon_of(m).rank()
}

/// Basis of {x : m x = 0}, one vector per free column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let rr = echelon_of(m).rref();
    let mut out = Vec::new();
    for f in 0..m.ncols {
        if rr.contains_key(&f) {
            continue;
        }
        let mut v: SparseVec = vec![(f, Q::one())];
        for (&c, row) in &rr {
            if c > f {
                break;
            }
            if let Some(b) = coeff(row, f) {
                v.push((c, -Q::new(b.clone(), row[0].1.clone())));
            }
        }
        v.sort_by_key(|e| e.0);
        out.push(v);
    }
    out
}

/// Some x with m x = b (free variables set to zero), or None when inconsistent.
pub fn solve(m: &SparseMatrix, b: &[Q]) -> Result<Option<Vec<Q>>> {
    if b.len() != m.nrows {
        return Err(Error::Math(format!("dimension mismatch: {} rows, rhs {}", m.nrows, b.len())));
    }
    let n = m.ncols;
    let mut e = Echelon::new();
    for i in 0..m.nrows {
        let extra = (!b[i].is_zero()).then(|| (n, &b[i]));
        e.insert(m.row(i).chain(extra));
    }
    if e.pivots.contains_key(&n) {
        return Ok(None);
    }
    let rr = e.rref();
    let mut x = vec![Q::zero(); n];
    for (&c, row) in &rr {
        if let Some(bv) = coeff(row, n) {
            x[c] = Q::new(bv.clone(), row[0].1.clone());
        }
    }
    Ok(Some(x))
}

/// dim ker(d_out) - rank(d_in), after checking d_out ∘ d_in = 0.
/// `d_in: C^{n-1} -> C^n`, `d_out: C^n -> C^{n+1}`.
pub fn cohomology_dimension(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize> {
    check_complex(d_in, d_out)?;
    Ok(d_in.nrows - rank(d_out) - rank(d_in))
}

fn check_complex(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<()> {
    if d_in.nrows != d_out.ncols {
        return Err(Error::Math(format!(
            "not a complex: middle dimensions {} vs {}",
            d_in.nrows, d_out.ncols
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::Math("not a complex: d∘d ≠ 0".into()));
    }
    Ok(())
}

/// Cocycles independent modulo coboundaries: a basis of cohomology.
pub fn cohomology_representatives(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<Vec<SparseVec>> {
    check_complex(d_in, d_out)?;
    let mut e = echelon_of(&d_in.transpose());
    let mut reps = Vec::new();
    for z in kernel_basis(d_out) {
        if e.insert(z.iter().map(|(i, x)| (*i, x))) {
            reps.push(z);
        }
    }
    Ok(reps)
}

pub fn sparse_to_dense(v: &SparseVec, n: usize) -> Vec<Q> {
    let mut d = vec![Q::zero(); n];
    for (i, x) in v {
        d[*i] = x.clone();
    }
    d
}
