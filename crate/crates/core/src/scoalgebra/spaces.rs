use super::*;
use crate::hochschild::poly::{monos_up_to, Mono, Polyvector};
use crate::hochschild::{all_tuples, elem_degree, Cochain};

/// V = C•(A, A): key `[out, in_1, …, in_k]`, degree k + |out| − Σ|in|.
#[derive(Clone, Debug)]
pub struct CochainSpace {
    pub a: GradedSpace,
}

impl CochainSpace {
    pub fn key(inputs: &[u32], out: u32) -> VKey {
        let mut k = vec![out];
        k.extend_from_slice(inputs);
        k
    }

    pub fn to_cochain(v: &VVec) -> Cochain {
        let mut c = Cochain::zero();
        for (k, x) in v {
            c.add(k[1..].to_vec(), k[0], x.clone());
        }
        c
    }

    pub fn from_cochain(c: &Cochain) -> VVec {
        let mut v = VVec::new();
        for (ins, o, x) in c.terms() {
            acc(&mut v, Self::key(ins, o), x.clone());
        }
        v
    }
}

impl VSpace for CochainSpace {
    fn is_cochains(&self) -> bool {
        true
    }
    fn degree(&self, v: &VKey) -> i64 {
        elem_degree(&self.a, &v[1..], v[0])
    }
    fn label(&self, v: &VKey) -> String {
        let ins: Vec<&str> = v[1..].iter().map(|i| self.a.label(*i as usize)).collect();
        format!("{}({})", self.a.label(v[0] as usize), ins.join(","))
    }
    fn parse(&self, s: &str) -> Result<VKey> {
        let (o, rest) = s.split_once('(').ok_or_else(|| Error::input(format!("bad cochain label {s:?}")))?;
        let rest = rest.strip_suffix(')').ok_or_else(|| Error::input(format!("bad cochain label {s:?}")))?;
        let mut k = vec![self.a.index_of(o.trim())? as u32];
        for l in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            k.push(self.a.index_of(l)? as u32);
        }
        Ok(k)
    }
    fn basis(&self, size: usize) -> Vec<VKey> {
        let d = self.a.dim() as u32;
        let mut out = Vec::new();
        for n in 0..=size {
            for t in all_tuples(d, n) {
                for o in 0..d {
                    out.push(Self::key(&t, o));
                }
            }
        }
        out
    }
    fn size(&self, v: &VKey) -> usize {
        v.len() - 1
    }
}

/// V = polyvector fields on 𝕂^d: key `[mask, e_1, …, e_d]`, degree = #ξ.
#[derive(Clone, Debug)]
pub struct PolyvectorSpace {
    pub d: usize,
}

impl PolyvectorSpace {
    pub fn key(m: &Mono, mask: u32) -> VKey {
        let mut k = vec![mask];
        k.extend_from_slice(m);
        k
    }
    pub fn to_pv(v: &VVec) -> Polyvector {
        let mut p = Polyvector::zero();
        for (k, x) in v {
            p.add(k[1..].to_vec(), k[0], x.clone());
        }
        p
    }
    pub fn from_pv(p: &Polyvector) -> VVec {
        let mut v = VVec::new();
        for ((m, mask), x) in &p.terms {
            acc(&mut v, Self::key(m, *mask), x.clone());
        }
        v
    }
}

impl VSpace for PolyvectorSpace {
    fn degree(&self, v: &VKey) -> i64 {
        v[0].count_ones() as i64
    }
    fn label(&self, v: &VKey) -> String {
        let xi: Vec<String> = (0..self.d).filter(|i| v[0] >> i & 1 == 1).map(|i| i.to_string()).collect();
        let e: Vec<String> = v[1..].iter().map(|x| x.to_string()).collect();
        format!("x[{}]d[{}]", e.join(","), xi.join(","))
    }
    fn parse(&self, s: &str) -> Result<VKey> {
        let bad = || Error::input(format!("bad polyvector label {s:?}"));
        let s = s.trim().strip_prefix("x[").ok_or_else(bad)?;
        let (e, rest) = s.split_once("]d[").ok_or_else(bad)?;
        let xi = rest.strip_suffix(']').ok_or_else(bad)?;
        let nums = |t: &str| -> Result<Vec<u32>> {
            t.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| x.parse::<u32>().map_err(|_| bad())).collect()
        };
        let e = nums(e)?;
        if e.len() != self.d {
            return Err(bad());
        }
        let mut mask = 0u32;
        for i in nums(xi)? {
            if i as usize >= self.d || mask >> i & 1 == 1 {
                return Err(bad());
            }
            mask |= 1 << i;
        }
        Ok(Self::key(&e, mask))
    }
    fn basis(&self, size: usize) -> Vec<VKey> {
        let mut out = Vec::new();
        for m in monos_up_to(self.d, size as u32) {
            for mask in 0..1u32 << self.d {
                out.push(Self::key(&m, mask));
            }
        }
        out
    }
    fn size(&self, v: &VKey) -> usize {
        v[1..].iter().sum::<u32>() as usize
    }
}

/// Finite V given by a labelled basis: key `[i]`.
#[derive(Clone, Debug)]
pub struct TableSpace {
    pub sp: GradedSpace,
}

impl VSpace for TableSpace {
    fn degree(&self, v: &VKey) -> i64 {
        self.sp.degree(v[0] as usize)
    }
    fn label(&self, v: &VKey) -> String {
        self.sp.label(v[0] as usize).to_string()
    }
    fn parse(&self, s: &str) -> Result<VKey> {
        Ok(vec![self.sp.index_of(s.trim())? as u32])
    }
    fn basis(&self, _size: usize) -> Vec<VKey> {
        (0..self.sp.dim() as u32).map(|i| vec![i]).collect()
    }
    fn size(&self, _v: &VKey) -> usize {
        0
    }
}
