use super::*;
use crate::exactlinalg::fmt_q;
use crate::hochschild::poly::{mono_mul, monos_up_to, Mono, PolyvectorAlgebra};
use crate::hochschild::{all_tuples, gerstenhaber_bracket, maurer_cartan_check, AInfinityStructure, Cochain};
use std::collections::HashMap;

/// Normalization κ of the binary ΛLie operation: l_2(v, w) = κ(−1)^{|v|}[v, w].
/// Fixed by requiring that the tautological structure squares to zero (see
/// the tests); the printed coherence equation then carries a factor ½ on its
/// quadratic term.
pub const KAPPA: i64 = -1;

/// o-part split into the pure-a part m and a mixed part.
pub struct SplitO {
    pub m: Cochain,
    pub mixed: Arc<dyn OPart>,
}

impl OPart for SplitO {
    fn eval(&self, mo: &OMono) -> AVec {
        if mo.v.is_empty() {
            self.m.eval(&mo.a)
        } else {
            self.mixed.eval(mo)
        }
    }
}

/// Q^o(P; a_1..a_n) = P(a_1..a_n) for a single cochain P, zero for k ≥ 2.
pub struct IdentityO;

impl OPart for IdentityO {
    fn eval(&self, mo: &OMono) -> AVec {
        let mut out = AVec::new();
        if mo.v.len() == 1 && mo.v[0][1..] == mo.a[..] {
            out.insert(mo.v[0][0], q_sign(1));
        }
        out
    }
}

/// ΛLie structure of C•(A, A): l_1 = −[m, ·]_G, l_2 = κ(−1)^{|P|}[P, R]_G.
pub struct HochschildC {
    pub a: AInfinityStructure,
    pub kappa: Q,
}

impl CPart for HochschildC {
    fn linf(&self, vs: &[VKey]) -> VVec {
        let sp = &self.a.space;
        match vs.len() {
            1 => {
                let p = CochainSpace::to_cochain(&[(vs[0].clone(), q_sign(1))].into_iter().collect());
                scale(&CochainSpace::from_cochain(&gerstenhaber_bracket(sp, &self.a.m, &p)), -1)
            }
            2 => {
                let one = |v: &VKey| CochainSpace::to_cochain(&[(v.clone(), q_sign(1))].into_iter().collect());
                let b = gerstenhaber_bracket(sp, &one(&vs[0]), &one(&vs[1]));
                let s = sgn(odd(CochainSpace { a: sp.clone() }.degree(&vs[0])));
                let mut out = CochainSpace::from_cochain(&b);
                for x in out.values_mut() {
                    *x *= &self.kappa * q_sign(s);
                }
                out
            }
            _ => VVec::new(),
        }
    }
}

pub fn cochain_pair(a: &GradedSpace) -> Pair {
    Pair::new(Arc::new(CochainSpace { a: a.clone() }), a.clone())
}

pub(crate) fn tautological_with(m: &AInfinityStructure, cutoff: Cutoffs, kappa: Q) -> Coderivation {
    Coderivation {
        pair: cochain_pair(&m.space),
        c: Some(Arc::new(HochschildC { a: m.clone(), kappa })),
        o: Arc::new(SplitO { m: m.m.clone(), mixed: Arc::new(IdentityO) }),
        degree: 1,
        cutoff,
    }
}

/// The tautological OCHA structure on (C•(A, A), A).
pub fn build_tautological_ocha(m: &AInfinityStructure, cutoff: Cutoffs) -> Result<Coderivation> {
    let bad = maurer_cartan_check(m);
    if !bad.is_empty() {
        return Err(Error::Math(format!("m is not an A∞ structure: {} violations, first at arity {}", bad.len(), bad[0].arity)));
    }
    Ok(tautological_with(m, cutoff, q_sign(KAPPA)))
}

/// o-part for a plain associative algebra in degree 0: Q^o(a_1, a_2) = −a_1a_2,
/// Q^o(P; a) = P(a) when |P| = n, zero otherwise.
pub fn build_explicit_o_part(a: &AInfinityStructure) -> Result<SplitO> {
    if (0..a.space.dim()).any(|i| a.space.degree(i) != 0) {
        return Err(Error::input("algebra must be concentrated in degree 0"));
    }
    if a.m.terms().any(|(ins, _, _)| ins.len() != 2) {
        return Err(Error::input("only a binary product is allowed"));
    }
    if !maurer_cartan_check(a).is_empty() {
        return Err(Error::Math("product is not associative".into()));
    }
    Ok(SplitO { m: a.m.scaled(&q_sign(-1)), mixed: Arc::new(IdentityO) })
}

/// The OCHA part of the §4.4-type structure: the ΛLie structure of the
/// negated product together with the explicit o-part.
pub fn explicit_structure(a: &AInfinityStructure, cutoff: Cutoffs) -> Result<Coderivation> {
    let o = build_explicit_o_part(a)?;
    let neg = AInfinityStructure::new(a.space.clone(), o.m.clone(), a.cutoff)?;
    Ok(Coderivation {
        pair: cochain_pair(&a.space),
        c: Some(Arc::new(HochschildC { a: neg, kappa: q_sign(KAPPA) })),
        o: Arc::new(o),
        degree: 1,
        cutoff,
    })
}

// ---------------------------------------------------------------------------
// L∞ morphisms V → C•(A, A)

/// U(v_1..v_k)(a_1..a_n) = data(v; a), for k ≥ 1.
#[derive(Clone)]
pub struct LInfinityMorphism {
    pub pair: Pair,
    pub data: Arc<dyn OPart>,
    pub cutoff: Cutoffs,
}

impl LInfinityMorphism {
    /// U(vs) as a cochain on a-tuples of arity ≤ `max_arity` (window respected).
    pub fn component(&self, vs: &[VKey], max_arity: usize) -> Cochain {
        let mut out = Cochain::zero();
        let Some((m, s)) = canon(&self.pair, vs.to_vec(), vec![]) else { return out };
        for n in 0..=max_arity {
            for t in all_tuples(self.pair.a.dim() as u32, n) {
                if !self.pair.in_window(&m.v, &t) {
                    continue;
                }
                for (b, x) in self.data.eval(&OMono { v: m.v.clone(), a: t.clone() }) {
                    out.add(t.clone(), b, x * q_sign(s));
                }
            }
        }
        out
    }
}

pub fn extract_linf(q: &Coderivation) -> LInfinityMorphism {
    LInfinityMorphism { pair: q.pair.clone(), data: q.o.clone(), cutoff: q.cutoff }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CoherenceViolation {
    pub inputs: String,
    /// (a-tuple, output label, coefficient) entries of LHS − RHS.
    pub defect: Vec<(String, String, String)>,
}

fn restrict_window(p: &Pair, vs: &[VKey], c: &Cochain, max_arity: usize) -> Cochain {
    let mut out = Cochain::zero();
    for (ins, o, x) in c.terms() {
        if ins.len() <= max_arity && p.in_window(vs, ins) {
            out.add(ins.clone(), o, x.clone());
        }
    }
    out
}

/// LHS − RHS of the coherence equation for U on the symmetric monomial `vs`,
/// on a-tuples of arity ≤ `max_arity`. `quad` scales the quadratic term.
pub fn coherence_defect(
    u: &LInfinityMorphism,
    qc: &dyn CPart,
    m: &AInfinityStructure,
    vs: &[VKey],
    max_arity: usize,
    quad: &Q,
) -> Cochain {
    let p = &u.pair;
    let sp = &m.space;
    let k = vs.len();
    let top = max_arity + 1;
    let mut lhs = Cochain::zero();
    for pp in 1..=k {
        for (lam, e) in shuffles_signed(p, vs, pp) {
            let rest = pick(vs, &lam[pp..]);
            for (w, x) in qc.linf(&pick(vs, &lam[..pp])) {
                let mut all = vec![w];
                all.extend(rest.iter().cloned());
                lhs.add_scaled(&u.component(&all, max_arity), &(x * q_sign(sgn(e))));
            }
        }
    }
    let mut rhs = gerstenhaber_bracket(sp, &m.m, &u.component(vs, top)).scaled(&q_sign(-1));
    for pp in 1..k {
        for (lam, e) in shuffles_signed(p, vs, pp) {
            let first = pick(vs, &lam[..pp]);
            let rest = pick(vs, &lam[pp..]);
            let fo = first.iter().fold(false, |x, v| x ^ p.vpar(v));
            let br = gerstenhaber_bracket(sp, &u.component(&first, top), &u.component(&rest, top));
            rhs.add_scaled(&br, &(-quad * q_sign(sgn(e ^ fo))));
        }
    }
    restrict_window(p, vs, &lhs.sub(&rhs), max_arity)
}

/// Checks the coherence equations on all symmetric monomials with k ≤ total,
/// Σ sizes ≤ vsize, and a-arity ≤ total − k.
pub fn linf_coherence_check(u: &LInfinityMorphism, qc: &dyn CPart, m: &AInfinityStructure) -> Vec<CoherenceViolation> {
    linf_coherence_check_scaled(u, qc, m, &Q::new(1.into(), 2.into()))
}

pub fn linf_coherence_check_scaled(
    u: &LInfinityMorphism,
    qc: &dyn CPart,
    m: &AInfinityStructure,
    quad: &Q,
) -> Vec<CoherenceViolation> {
    use rayon::prelude::*;
    let p = &u.pair;
    let vb = p.v.basis(u.cutoff.vsize);
    let mut dom = Vec::new();
    for k in 1..=u.cutoff.total {
        for s in multisets(p, &vb, k) {
            if s.iter().map(|x| p.v.size(x)).sum::<usize>() <= u.cutoff.vsize {
                dom.push(s);
            }
        }
    }
    dom.par_iter()
        .filter_map(|vs| {
            let d = coherence_defect(u, qc, m, vs, u.cutoff.total - vs.len(), quad);
            (!d.is_zero()).then(|| CoherenceViolation {
                inputs: GerCoMonomial::singletons(vs.clone()).label(p),
                defect: d
                    .terms()
                    .map(|(ins, o, x)| {
                        let t: Vec<&str> = ins.iter().map(|i| p.a.label(*i as usize)).collect();
                        (t.join(","), p.a.label(o as usize).to_string(), fmt_q(x))
                    })
                    .collect(),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// polyvectors and functions

/// Standard Gerstenhaber structure of polyvector fields: l_2 = κ(−1)^{|γ|}[γ, δ]_SN,
/// product = exterior product.
pub struct PolyvectorC {
    pub pa: PolyvectorAlgebra,
    pub kappa: Q,
}

impl PolyvectorC {
    pub fn new(d: usize) -> Self {
        PolyvectorC { pa: PolyvectorAlgebra::new(d, u32::MAX / 4).unwrap(), kappa: q_sign(KAPPA) }
    }
}

impl CPart for PolyvectorC {
    fn linf(&self, vs: &[VKey]) -> VVec {
        if vs.len() != 2 {
            return VVec::new();
        }
        let one = |v: &VKey| PolyvectorSpace::to_pv(&[(v.clone(), q_sign(1))].into_iter().collect());
        let b = self.pa.schouten_bracket(&one(&vs[0]), &one(&vs[1])).expect("no cutoff");
        let s = q_sign(sgn(odd(vs[0][0].count_ones() as i64))) * &self.kappa;
        scale(&PolyvectorSpace::from_pv(&b), 1).into_iter().map(|(k, x)| (k, x * &s)).collect()
    }
    fn product(&self, a: &VKey, b: &VKey) -> VVec {
        let one = |v: &VKey| PolyvectorSpace::to_pv(&[(v.clone(), q_sign(1))].into_iter().collect());
        PolyvectorSpace::from_pv(&self.pa.wedge(&one(a), &one(b)).expect("no cutoff"))
    }
    fn has_product(&self) -> bool {
        true
    }
}

/// The function algebra ℚ[x_1..x_d] truncated at degree `top`, with product
/// −μ (the sign convention of Q^o(a_1, a_2) = −a_1a_2), and the pair
/// (polyvectors, functions) windowed at `top`.
pub struct PolyPair {
    pub pair: Pair,
    pub monos: Vec<Mono>,
    pub index: HashMap<Mono, u32>,
    pub m: AInfinityStructure,
}

impl PolyPair {
    pub fn new(d: usize, top: usize) -> Result<Self> {
        let monos = monos_up_to(d, top as u32);
        let labels: Vec<(String, i64)> = monos.iter().map(|m| (mono_label(m), 0)).collect();
        let a = GradedSpace::new("A", labels)?;
        let index: HashMap<Mono, u32> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i as u32)).collect();
        let mut mm = Cochain::zero();
        for x in &monos {
            for y in &monos {
                if let Some(o) = index.get(&mono_mul(x, y)) {
                    mm.add(vec![index[x], index[y]], *o, q_sign(-1));
                }
            }
        }
        let weights = monos.iter().map(|m| m.iter().sum::<u32>() as usize).collect();
        let mut pair = Pair::new(Arc::new(PolyvectorSpace { d }), a.clone());
        pair.window = Some((weights, top));
        Ok(PolyPair { pair, monos, index, m: AInfinityStructure::new(a, mm, 8)? })
    }
}

pub fn mono_label(m: &Mono) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(i, e)| if *e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
        .collect();
    if parts.is_empty() { "1".into() } else { parts.join("*") }
}

/// HKR on one polyvector argument: F(γ)(a_1..a_j) = Σ_σ sgn σ f Π ∂_{i_σ(r)} a_r.
pub struct HkrO {
    pub d: usize,
    pub monos: Vec<Mono>,
    pub index: HashMap<Mono, u32>,
}

impl HkrO {
    pub fn new(pp: &PolyPair) -> Self {
        HkrO { d: pp.monos.first().map_or(0, |m| m.len()), monos: pp.monos.clone(), index: pp.index.clone() }
    }
}

impl OPart for HkrO {
    fn eval(&self, mo: &OMono) -> AVec {
        let mut out = AVec::new();
        if mo.v.len() != 1 {
            return out;
        }
        let key = &mo.v[0];
        let idx: Vec<usize> = (0..self.d).filter(|i| key[0] >> i & 1 == 1).collect();
        if idx.len() != mo.a.len() {
            return out;
        }
        let f: Mono = key[1..].to_vec();
        for perm in permutations_of(&(0..idx.len()).collect::<Vec<_>>()) {
            let mut mono = f.clone();
            let mut c = q_sign(perm_sign(&perm));
            let mut ok = true;
            for (r, a) in mo.a.iter().enumerate() {
                let var = idx[perm[r]];
                let mut am = self.monos[*a as usize].clone();
                if am[var] == 0 {
                    ok = false;
                    break;
                }
                c *= q_sign(am[var] as i64);
                am[var] -= 1;
                mono = mono_mul(&mono, &am);
            }
            if ok {
                let o = *self.index.get(&mono).expect("product left the truncation window");
                acc(&mut out, o, c);
            }
        }
        out
    }
}

pub fn perm_sign(p: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Q_F on (polyvectors, functions): Property G on V, Property A on A, and
/// Q^o(γ; a) = F(γ)(a) on mixed monomials.
pub fn linf_to_gerplus(f: &LInfinityMorphism, m: &AInfinityStructure) -> Coderivation {
    let d = f.pair.v.basis(0).first().map_or(1, |k| k.len() - 1);
    Coderivation {
        pair: f.pair.clone(),
        c: Some(Arc::new(PolyvectorC::new(d))),
        o: Arc::new(SplitO { m: m.m.clone(), mixed: f.data.clone() }),
        degree: 1,
        cutoff: f.cutoff,
    }
}
