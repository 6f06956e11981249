use super::*;
use crate::graded::reorder_parity;
use crate::hochschild::{all_tuples, Cochain};
use num_traits::One;
use rayon::prelude::*;

/// Keeps a target c-key when comparing images of a source symmetric monomial.
pub type CFilter = Arc<dyn Fn(&[VKey], &VKey) -> bool + Send + Sync>;

/// A degree-0 morphism S(V, A) → S(V′, A′), given by its projections.
/// `tc.linf` is T^c on symmetric monomials of V (values in V′); `to` is T^o
/// with values in A′. Higher Ger∨ components of T^c are not represented.
#[derive(Clone)]
pub struct SCoalgebraMorphism {
    pub src: Pair,
    pub tgt: Pair,
    pub tc: Arc<dyn CPart>,
    pub to: Arc<dyn OPart>,
    pub cutoff: Cutoffs,
    /// Restricts c-comparisons (e.g. to a truncation window).
    pub c_filter: Option<CFilter>,
}

/// T^c(v) = v, zero on k ≥ 2.
pub struct IdentityC;
impl CPart for IdentityC {
    fn linf(&self, vs: &[VKey]) -> VVec {
        if vs.len() == 1 {
            [(vs[0].clone(), Q::one())].into_iter().collect()
        } else {
            VVec::new()
        }
    }
}

/// T^o(a) = a, zero elsewhere.
pub struct IdentityA;
impl OPart for IdentityA {
    fn eval(&self, m: &OMono) -> AVec {
        if m.v.is_empty() && m.a.len() == 1 {
            [(m.a[0], Q::one())].into_iter().collect()
        } else {
            AVec::new()
        }
    }
}

/// Nondecreasing cut points 0 = c_0 ≤ … ≤ c_q = n.
fn cuts(n: usize, q: usize) -> Vec<Vec<usize>> {
    if q == 0 {
        return if n == 0 { vec![vec![0]] } else { vec![] };
    }
    let mut out = vec![vec![0]];
    for _ in 1..q {
        out = out
            .into_iter()
            .flat_map(|c| {
                let last = *c.last().unwrap();
                (last..=n).map(move |x| {
                    let mut d = c.clone();
                    d.push(x);
                    d
                })
            })
            .collect();
    }
    for c in &mut out {
        c.push(n);
    }
    out
}

/// All products of one term from each factor.
fn expand<K: Clone>(factors: &[Vec<(K, Q)>]) -> Vec<(Vec<K>, Q)> {
    let mut out = vec![(vec![], Q::one())];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for (ks, c) in &out {
            for (k, x) in f {
                let mut ks = ks.clone();
                ks.push(k.clone());
                next.push((ks, c * x));
            }
        }
        out = next;
    }
    out
}

impl SCoalgebraMorphism {
    pub fn identity(pair: &Pair, cutoff: Cutoffs) -> Self {
        SCoalgebraMorphism {
            src: pair.clone(),
            tgt: pair.clone(),
            tc: Arc::new(IdentityC),
            to: Arc::new(IdentityA),
            cutoff,
            c_filter: None,
        }
    }

    /// T̂ on an o-monomial: every way of sending groups of v's through T^c and
    /// consecutive a-blocks (with attached v's) through T^o; the sign is the
    /// Koszul sign of the regrouping (T has degree 0).
    pub fn hat_o(&self, m: &OMono) -> OSum {
        let (k, n) = (m.k(), m.n());
        let src = &self.src;
        let par: Vec<bool> = m.v.iter().map(|v| src.vpar(v)).chain(m.a.iter().map(|a| src.apar(*a))).collect();
        let parts_cache: Vec<Vec<Vec<Vec<usize>>>> = (0..=k).map(set_partitions).collect();
        let mut out = OSum::new();
        for q in 0..=n + k {
            for cut in cuts(n, q) {
                let slots = q + 1;
                let total = slots.pow(k as u32);
                for code in 0..total {
                    let mut slot = vec![0; k];
                    let mut x = code;
                    for s in slot.iter_mut() {
                        *s = x % slots;
                        x /= slots;
                    }
                    let cset: Vec<usize> = (0..k).filter(|i| slot[*i] == q).collect();
                    let groups: Vec<Vec<usize>> = (0..q).map(|j| (0..k).filter(|i| slot[*i] == j).collect()).collect();
                    if (0..q).any(|j| groups[j].is_empty() && cut[j] == cut[j + 1]) {
                        continue;
                    }
                    // o-factors
                    let mut ofac = Vec::with_capacity(q);
                    for j in 0..q {
                        let inner = OMono { v: pick(&m.v, &groups[j]), a: m.a[cut[j]..cut[j + 1]].to_vec() };
                        ofac.push(self.to.eval(&inner).into_iter().collect::<Vec<_>>());
                    }
                    if ofac.iter().any(|f| f.is_empty()) {
                        continue;
                    }
                    let oterms = expand(&ofac);
                    for part in &parts_cache[cset.len()] {
                        let blocks: Vec<Vec<usize>> = part.iter().map(|b| b.iter().map(|i| cset[*i]).collect()).collect();
                        let mut order: Vec<usize> = blocks.iter().flatten().cloned().collect();
                        for j in 0..q {
                            order.extend(groups[j].iter().cloned());
                            order.extend((cut[j]..cut[j + 1]).map(|l| k + l));
                        }
                        let e = sgn(reorder_parity(&par, &order));
                        let cfac: Vec<Vec<(VKey, Q)>> =
                            blocks.iter().map(|b| self.tc.linf(&pick(&m.v, b)).into_iter().collect()).collect();
                        if cfac.iter().any(|f| f.is_empty()) {
                            continue;
                        }
                        for (ws, cw) in expand(&cfac) {
                            for (bs, cb) in &oterms {
                                if let Some((mm, s)) = canon(&self.tgt, ws.clone(), bs.clone()) {
                                    acc(&mut out, mm, &cw * cb * q_sign(s * e));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// T̂ on a symmetric monomial: sum over set partitions.
    pub fn hat_sym(&self, vs: &[VKey]) -> BTreeMap<SymMono, Q> {
        let par: Vec<bool> = vs.iter().map(|v| self.src.vpar(v)).collect();
        let mut out = BTreeMap::new();
        for part in set_partitions(vs.len()) {
            let order: Vec<usize> = part.iter().flatten().cloned().collect();
            let e = sgn(reorder_parity(&par, &order));
            let cfac: Vec<Vec<(VKey, Q)>> = part.iter().map(|b| self.tc.linf(&pick(vs, b)).into_iter().collect()).collect();
            for (mut ws, c) in expand(&cfac) {
                if let Some(s) = sort_sym(&self.tgt, &mut ws) {
                    acc(&mut out, ws, c * q_sign(s * e));
                }
            }
        }
        out
    }

    /// T^o on a formal sum.
    pub fn project_o(&self, sum: &OSum) -> AVec {
        let mut out = AVec::new();
        for (m, c) in sum {
            acc_all(&mut out, &self.to.eval(m), c);
        }
        out
    }
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct MorphismReport {
    pub checked: usize,
    /// Failures of Q′^o∘T̂ = T^o∘Q̂ and Q′^c∘T̂ = T^c∘Q̂ (ΛLie∞ part).
    pub violations: Vec<QsqViolation>,
    /// Named specialised equations with their failures. Informational: they
    /// presuppose T^o = 0 on mixed monomials with fewer v's.
    pub sub_checks: Vec<(String, Vec<QsqViolation>)>,
}

impl MorphismReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
    pub fn sub_check(&self, name: &str) -> Option<&[QsqViolation]> {
        self.sub_checks.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

fn fmt_a(p: &Pair, v: &AVec) -> Vec<(String, String)> {
    v.iter().map(|(b, x)| (p.a.label(*b as usize).to_string(), crate::exactlinalg::fmt_q(x))).collect()
}

/// o-defect Q′^o(T̂ m) − T^o(Q̂ m) on one monomial.
pub fn morphism_defect_o(t: &SCoalgebraMorphism, q: &Coderivation, q2: &Coderivation, m: &OMono) -> AVec {
    let mut d = q2.project_o(&t.hat_o(m));
    acc_all(&mut d, &t.project_o(&q.hat_o(m)), &q_sign(-1));
    d
}

/// c-defect Q′^c(T̂ vs) − T^c(Q̂ vs) on a symmetric monomial.
pub fn morphism_defect_c(t: &SCoalgebraMorphism, q: &Coderivation, q2: &Coderivation, vs: &[VKey]) -> VVec {
    let mut d = VVec::new();
    if let Some(c2) = &q2.c {
        for (w, x) in t.hat_sym(vs) {
            acc_all(&mut d, &c2.linf(&w), &x);
        }
    }
    if q.c.is_some() {
        for (w, x) in q.hat_sym(vs) {
            acc_all(&mut d, &t.tc.linf(&w), &(-x));
        }
    }
    if let Some(f) = &t.c_filter {
        d.retain(|key, _| f(vs, key));
    }
    d
}

/// Checks Q̂′T̂ = T̂Q̂ on every source basis monomial within T's cutoffs. When
/// the target is a cochain pair over an algebra in degree 0 (and T^o is the
/// identity on single a's), the specialised equations for each k are also
/// reported as the sub-checks "k=1" and "k>=2".
pub fn morphism_compatibility_check(t: &SCoalgebraMorphism, q: &Coderivation, q2: &Coderivation) -> MorphismReport {
    let src = &t.src;
    let cut = t.cutoff;
    let dom = o_monomials(src, cut.total, cut.vsize, |m| cut.keeps_o(m));
    let mut report = MorphismReport { checked: dom.len(), ..Default::default() };
    let bad: Vec<QsqViolation> = dom
        .par_iter()
        .filter_map(|m| {
            let d = morphism_defect_o(t, q, q2, m);
            (!d.is_empty()).then(|| QsqViolation { color: 'o', monomial: m.label(src), defect: fmt_a(&t.tgt, &d) })
        })
        .collect();
    report.violations.extend(bad);
    let cdom = Coderivation { pair: src.clone(), c: None, o: Arc::new(ZeroO), degree: 0, cutoff: t.cutoff }.c_domain();
    report.checked += cdom.len();
    let bad: Vec<QsqViolation> = cdom
        .par_iter()
        .filter_map(|vs| {
            let d = morphism_defect_c(t, q, q2, vs);
            (!d.is_empty()).then(|| QsqViolation {
                color: 'c',
                monomial: GerCoMonomial::singletons(vs.clone()).label(src),
                defect: d.iter().map(|(b, x)| (t.tgt.v.label(b), crate::exactlinalg::fmt_q(x))).collect(),
            })
        })
        .collect();
    report.violations.extend(bad);
    if let Some(sub) = specialised_checks(t, q, q2, &cdom) {
        report.sub_checks = sub;
    }
    report
}

/// Residual of the specialised equation for (γ_1..γ_k; a_1..a_n):
///   −T^o(γ; a_1..a_{n−1})a_n − (−1)^{|γ|} a_1 T^o(γ; a_2..a_n) + T^c(γ)(a)
///   − F(γ)(a) + (−1)^{|γ|} Σ_i (−1)^{i−1} T^o(γ; …, a_i a_{i+1}, …),
/// with F = mixed part of Q^o, a_1a_2 = −Q′^o(a_1, a_2) and |γ| = Σ|γ_i|.
/// Valid when the lower-k equations hold in the reduced form, i.e. T^o and
/// T^c − F vanish for fewer v's.
pub fn specialised_residual(t: &SCoalgebraMorphism, q: &Coderivation, q2: &Coderivation, vs: &[VKey], a: &[u32]) -> AVec {
    let n = a.len();
    let g: i64 = vs.iter().map(|v| t.src.v.degree(v)).sum();
    let sg = sgn(odd(g));
    let mut out = AVec::new();
    let prod = |x: u32, y: u32| scale(&q2.o.eval(&OMono::pure_a(vec![x, y])), -1);
    let to = |aa: Vec<u32>| t.to.eval(&OMono { v: vs.to_vec(), a: aa });
    if n >= 1 {
        for (b, x) in to(a[..n - 1].to_vec()) {
            acc_all(&mut out, &prod(b, a[n - 1]), &(-x));
        }
        for (b, x) in to(a[1..].to_vec()) {
            acc_all(&mut out, &prod(a[0], b), &(-x * q_sign(sg)));
        }
    }
    // T^c(γ)(a): evaluate the target cochain
    let tc = t.tc.linf(vs);
    let cochain = CochainSpace::to_cochain(&tc);
    acc_all(&mut out, &cochain.eval(a), &Q::one());
    acc_all(&mut out, &q.o.eval(&OMono { v: vs.to_vec(), a: a.to_vec() }), &q_sign(-1));
    for i in 0..n.saturating_sub(1) {
        for (b, x) in prod(a[i], a[i + 1]) {
            let mut aa = a[..i].to_vec();
            aa.push(b);
            aa.extend_from_slice(&a[i + 2..]);
            acc_all(&mut out, &to(aa), &(x * q_sign(sg * sgn(odd(i as i64)))));
        }
    }
    out
}

fn specialised_checks(
    t: &SCoalgebraMorphism,
    q: &Coderivation,
    q2: &Coderivation,
    cdom: &[SymMono],
) -> Option<Vec<(String, Vec<QsqViolation>)>> {
    let cochains = t.tgt.v.is_cochains();
    let flat = (0..t.tgt.a.dim()).all(|i| t.tgt.a.degree(i) == 0);
    if !cochains || !flat || t.tgt.a.dim() != t.src.a.dim() {
        return None;
    }
    let mut k1 = Vec::new();
    let mut kk = Vec::new();
    for vs in cdom {
        let k = vs.len() as i64;
        let g: i64 = vs.iter().map(|v| t.src.v.degree(v)).sum();
        let n = g + 2 - 2 * k;
        if n < 0 || (n as usize) + vs.len() > t.cutoff.total {
            continue;
        }
        for a in all_tuples(t.src.a.dim() as u32, n as usize) {
            if !t.src.in_window(vs, &a) {
                continue;
            }
            let r = specialised_residual(t, q, q2, vs, &a);
            if !r.is_empty() {
                let lab = OMono { v: vs.clone(), a }.label(&t.src);
                let v = QsqViolation { color: 'o', monomial: lab, defect: fmt_a(&t.tgt, &r) };
                if k == 1 { k1.push(v) } else { kk.push(v) }
            }
        }
    }
    Some(vec![("k=1".into(), k1), ("k>=2".into(), kk)])
}

/// True iff the c-part is a pure ΛLie∞ structure (no product, no other Ger∨
/// components), so that Q restricts to OC∨.
pub fn validate_ocha_substructure(q: &Coderivation) -> bool {
    q.c.as_ref().map_or(true, |c| !c.has_product() && c.other().is_empty())
}

/// T^c from an L∞-type datum on single polyvectors, as cochains over the
/// window: T^c(γ) = Σ_{a in window} F(γ)(a) ⊗ (a ↦ ·).
pub struct CochainImage {
    pub src: Pair,
    pub f: Arc<dyn OPart>,
    pub max_arity: usize,
}

impl CPart for CochainImage {
    fn linf(&self, vs: &[VKey]) -> VVec {
        let mut c = Cochain::zero();
        for n in 0..=self.max_arity {
            for a in all_tuples(self.src.a.dim() as u32, n) {
                if !self.src.in_window(vs, &a) {
                    continue;
                }
                for (b, x) in self.f.eval(&OMono { v: vs.to_vec(), a: a.clone() }) {
                    c.add(a.clone(), b, x);
                }
            }
        }
        CochainSpace::from_cochain(&c)
    }
}
