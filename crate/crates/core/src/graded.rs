//! Graded spaces and Koszul sign bookkeeping.
//!
//! Permutations are 0-based and list the *new* order: applying `perm` to
//! `(x_0, .., x_{k-1})` gives `(x_perm[0], .., x_perm[k-1])`.

use crate::exactlinalg::Q;
use crate::{Error, Result};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BasisEntry {
    pub label: String,
    pub degree: i64,
}

/// Finite graded vector space with a labelled homogeneous basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSpace {
    pub name: String,
    pub basis: Vec<BasisEntry>,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    pub fn new(name: &str, basis: Vec<(String, i64)>) -> Result<Self> {
        let mut index = HashMap::new();
        let mut b = Vec::new();
        for (i, (label, degree)) in basis.into_iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate basis label '{label}'")));
            }
            b.push(BasisEntry { label, degree });
        }
        Ok(GradedSpace { name: name.into(), basis: b, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::input(format!("unknown basis label '{label}'")))
    }
}

/// Linear combination of basis vectors of some space (indices into its basis).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradedElement {
    pub coeffs: BTreeMap<usize, Q>,
}

impl GradedElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, Q::from_integer(1.into()));
        GradedElement { coeffs }
    }

    pub fn add_term(&mut self, i: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The common degree, if homogeneous and nonzero.
    pub fn degree(&self, sp: &GradedSpace) -> Option<i64> {
        let mut it = self.coeffs.keys().map(|i| sp.degree(*i));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }
}

/// s^shift: raises degrees by `shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Suspension {
    pub shift: i64,
}

impl Suspension {
    pub fn apply(&self, degree: i64) -> i64 {
        degree + self.shift
    }
    pub fn inverse(&self) -> Suspension {
        Suspension { shift: -self.shift }
    }
}

/// +1 / -1 from a parity bit.
#[inline]
pub fn sgn(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

#[inline]
pub fn odd(d: i64) -> bool {
    d.rem_euclid(2) == 1
}

/// Parity of the Koszul sign of reordering items with the given parities.
/// Counts pairs that change relative order and are both odd.
pub fn reorder_parity(parities: &[bool], order: &[usize]) -> bool {
    let mut s = false;
    for i in 0..order.len() {
        if !parities[order[i]] {
            continue;
        }
        for j in i + 1..order.len() {
            if order[i] > order[j] && parities[order[j]] {
                s = !s;
            }
        }
    }
    s
}

fn check_perm(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::input(format!("not a permutation: {perm:?}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// (-1)^{ε_λ}, ε_λ = Σ over inversions of the product of the two degrees.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i64> {
    if perm.len() != degrees.len() {
        return Err(Error::input(format!("length mismatch: {} vs {}", perm.len(), degrees.len())));
    }
    check_perm(perm)?;
    let par: Vec<bool> = degrees.iter().map(|d| odd(*d)).collect();
    Ok(sgn(reorder_parity(&par, perm)))
}

pub fn is_shuffle(perm: &[usize], p: usize) -> bool {
    p <= perm.len()
        && check_perm(perm).is_ok()
        && perm[..p].windows(2).all(|w| w[0] < w[1])
        && perm[p..].windows(2).all(|w| w[0] < w[1])
}

/// All (p, k-p)-shuffles, lexicographic.
pub fn shuffles(p: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for first in combinations(k, p) {
        let mut v = first.clone();
        v.extend((0..k).filter(|i| !first.contains(i)));
        out.push(v);
    }
    out
}

/// p-subsets of 0..k in lexicographic order.
pub fn combinations(k: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            if k - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, k, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= k {
        rec(0, k, p, &mut Vec::new(), &mut out);
    }
    out
}

fn shuffle_checked(perm: &[usize], p: usize, v: &[i64]) -> Result<()> {
    if perm.len() != v.len() {
        return Err(Error::input("shuffle length differs from v_degrees"));
    }
    if !is_shuffle(perm, p) {
        return Err(Error::input(format!("not a ({p},{})-shuffle: {perm:?}", perm.len() - p.min(perm.len()))));
    }
    Ok(())
}

/// (-1)^η with η = Σ_inv |v||v| + Σ_{i≤t} Σ_{j>p} |v_λ(j)|(|a_i|+1).
pub fn sign_eta(perm: &[usize], p: usize, t: usize, v: &[i64], a: &[i64]) -> Result<i64> {
    shuffle_checked(perm, p, v)?;
    if t > a.len() {
        return Err(Error::input("t exceeds the number of a's"));
    }
    let mut e = if koszul_sign(perm, v)? < 0 { 1 } else { 0 };
    for ai in &a[..t] {
        for j in p..perm.len() {
            e += v[perm[j]] * (ai + 1);
        }
    }
    Ok(sgn(odd(e)))
}

/// (-1)^ε with ε = Σ_{j≤p}|v_λ(j)| + Σ_{j>p} Σ_{l<t} |v_λ(j)|(|a_l|+1) + Σ_{l<t}(|a_l|+1).
/// `t` is 1-based as in the printed formula.
pub fn sign_eps_tp(perm: &[usize], t: usize, p: usize, v: &[i64], a: &[i64]) -> Result<i64> {
    shuffle_checked(perm, p, v)?;
    if t == 0 || t > a.len() + 1 {
        return Err(Error::input("t out of range"));
    }
    let before = &a[..t - 1];
    let mut e: i64 = perm[..p].iter().map(|i| v[*i]).sum();
    for j in p..perm.len() {
        for al in before {
            e += v[perm[j]] * (al + 1);
        }
    }
    e += before.iter().map(|al| al + 1).sum::<i64>();
    Ok(sgn(odd(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Bubble the target order into place one adjacent swap at a time.
    fn oracle(perm: &[usize], deg: &[i64]) -> i64 {
        let mut cur: Vec<usize> = (0..perm.len()).collect();
        let mut s = 1;
        for (pos, want) in perm.iter().enumerate() {
            let mut at = cur.iter().position(|x| x == want).unwrap();
            while at > pos {
                if odd(deg[cur[at]]) && odd(deg[cur[at - 1]]) {
                    s = -s;
                }
                cur.swap(at, at - 1);
                at -= 1;
            }
        }
        s
    }

    /// Signs via symbol-moving: lay out v's, shuffle them, then move the
    /// second block past a_1..a_t (parity |a|+1).
    fn eta_oracle(perm: &[usize], p: usize, t: usize, v: &[i64], a: &[i64]) -> i64 {
        let k = v.len();
        let mut items: Vec<i64> = v.to_vec();
        items.extend(a.iter().map(|x| x + 1));
        // target: v_λ(1..p), a_1..a_t, v_λ(p+1..k), a_{t+1}..
        let mut order: Vec<usize> = perm[..p].to_vec();
        order.extend((0..t).map(|i| k + i));
        order.extend(perm[p..].iter().cloned());
        order.extend((t..a.len()).map(|i| k + i));
        oracle(&order, &items)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 2, 0], &[1, 2, 1]).unwrap(), oracle(&[1, 2, 0], &[1, 2, 1]));
        assert!(koszul_sign(&[0], &[1, 1]).is_err());
        assert_eq!(sign_eta(&[0, 1], 1, 0, &[3, 5], &[]).unwrap(), 1);
        assert_eq!(sign_eta(&[0], 0, 1, &[2], &[0]).unwrap(), 1);
        assert_eq!(sign_eta(&[1, 0], 1, 0, &[1, 1], &[]).unwrap(), -1);
        assert!(sign_eta(&[1, 0], 2, 0, &[1, 1], &[]).is_err());
        assert_eq!(sign_eps_tp(&[0], 1, 0, &[7], &[3]).unwrap(), 1);
        assert_eq!(sign_eps_tp(&[0], 1, 1, &[2], &[]).unwrap(), 1);
        assert_eq!(sign_eps_tp(&[0], 2, 0, &[2], &[0]).unwrap(), -1);
    }

    #[test]
    fn shuffles_enumerate() {
        assert_eq!(shuffles(1, 3), vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 0, 1]]);
        assert_eq!(shuffles(2, 4).len(), 6);
        assert!(shuffles(2, 4).iter().all(|s| is_shuffle(s, 2)));
    }

    fn perm_strategy(max: usize) -> impl Strategy<Value = (Vec<usize>, Vec<i64>)> {
        (1..=max).prop_flat_map(|n| {
            (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(-4i64..5, n))
        })
    }

    proptest! {
        #[test]
        fn koszul_matches_oracle((perm, deg) in perm_strategy(7)) {
            prop_assert_eq!(koszul_sign(&perm, &deg).unwrap(), oracle(&perm, &deg));
        }

        #[test]
        fn koszul_homomorphism((p1, _d) in perm_strategy(6), seed in any::<u64>(), d in -3i64..4) {
            let n = p1.len();
            let mut p2: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); p2.swap(i, (s >> 33) as usize % (i + 1)); }
            let deg = vec![d; n];
            let comp: Vec<usize> = p2.iter().map(|j| p1[*j]).collect();
            prop_assert_eq!(koszul_sign(&comp, &deg).unwrap(),
                koszul_sign(&p1, &deg).unwrap() * koszul_sign(&p2, &deg).unwrap());
        }

        #[test]
        fn eta_matches_oracle(k in 0usize..5, n in 0usize..4, seed in any::<u64>(),
                              v in proptest::collection::vec(-3i64..4, 5), a in proptest::collection::vec(-3i64..4, 4)) {
            let v = &v[..k]; let a = &a[..n];
            let p = (seed as usize) % (k + 1);
            let sh = shuffles(p, k);
            let lam = &sh[(seed as usize / 7) % sh.len()];
            let t = (seed as usize / 13) % (n + 1);
            prop_assert_eq!(sign_eta(lam, p, t, v, a).unwrap(), eta_oracle(lam, p, t, v, a));
        }

        #[test]
        fn eps_tp_matches_oracle(k in 0usize..5, n in 0usize..4, seed in any::<u64>(),
                              v in proptest::collection::vec(-3i64..4, 5), a in proptest::collection::vec(-3i64..4, 4)) {
            // an odd operator placed after the first block and a_1..a_{t-1}:
            // ε^λ_{t,p} is the sign of carrying it (and the second block) there.
            let v = &v[..k]; let a = &a[..n];
            let p = (seed as usize) % (k + 1);
            let sh = shuffles(p, k);
            let lam = &sh[(seed as usize / 7) % sh.len()];
            let t = 1 + (seed as usize / 13) % (n + 1);
            let mut items: Vec<i64> = vec![1];
            items.extend(v.iter().cloned());
            items.extend(a.iter().map(|x| x + 1));
            // start: Q v_λ(1..p) v_λ(p+1..k) a..  (shuffle sign excluded)
            let mut start: Vec<usize> = vec![0];
            start.extend(lam.iter().map(|i| i + 1));
            start.extend((0..n).map(|i| k + 1 + i));
            // end: v_λ(1..p) a_<t Q v_λ(p+1..) a_≥t
            let mut order: Vec<usize> = lam[..p].iter().map(|i| i + 1).collect();
            order.extend((0..t - 1).map(|i| k + 1 + i));
            order.push(0);
            order.extend(lam[p..].iter().map(|i| i + 1));
            order.extend((t - 1..n).map(|i| k + 1 + i));
            let pos: Vec<usize> = order.iter().map(|x| start.iter().position(|y| y == x).unwrap()).collect();
            let items2: Vec<i64> = start.iter().map(|i| items[*i]).collect();
            prop_assert_eq!(sign_eps_tp(lam, t, p, v, a).unwrap(), oracle(&pos, &items2));
        }
    }
}
