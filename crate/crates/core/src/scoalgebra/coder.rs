use super::*;
use rayon::prelude::*;

/// c-component data. Only what the checks in this crate can see is exposed:
/// the ΛLie∞ part on symmetric monomials, an optional strict binary product on
/// the co-Lie part, and raw values on other Ger∨ monomials.
pub trait CPart: Send + Sync {
    /// l_k(v_1, …, v_k) on a canonically ordered tuple.
    fn linf(&self, vs: &[VKey]) -> VVec;
    fn product(&self, _a: &VKey, _b: &VKey) -> VVec {
        VVec::new()
    }
    fn has_product(&self) -> bool {
        false
    }
    /// Nonzero values on non-singleton Ger∨ monomials other than the binary product.
    fn other(&self) -> Vec<(GerCoMonomial, VVec)> {
        vec![]
    }
}

/// o-component data, evaluated on canonical monomials; values live in s^{-1}A
/// and are written in the A basis.
pub trait OPart: Send + Sync {
    fn eval(&self, m: &OMono) -> AVec;
}

/// Zero o-part.
pub struct ZeroO;
impl OPart for ZeroO {
    fn eval(&self, _m: &OMono) -> AVec {
        AVec::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cutoffs {
    /// k + n ≤ total on o-monomials, k ≤ total on c-monomials.
    pub total: usize,
    /// Size bound per v on o-monomials, and on Σ sizes for c-monomials.
    pub vsize: usize,
    /// Optional bound on the cooperation weight of domain monomials.
    pub max_weight: Option<usize>,
}

impl Cutoffs {
    pub fn new(total: usize, vsize: usize) -> Self {
        Cutoffs { total, vsize, max_weight: None }
    }
    /// Cutoffs covering every monomial of weight ≤ w.
    pub fn weight(w: usize, vsize: usize) -> Self {
        Cutoffs { total: w + 1, vsize, max_weight: Some(w) }
    }
    pub fn keeps_o(&self, m: &OMono) -> bool {
        self.max_weight.map_or(true, |w| m.weight() <= w)
    }
    pub fn keeps_c(&self, k: usize) -> bool {
        k <= self.total && self.max_weight.map_or(true, |w| sym_weight(k) <= w)
    }
}

/// A coderivation of S(V, A) of the given degree, given by its projection.
#[derive(Clone)]
pub struct Coderivation {
    pub pair: Pair,
    pub c: Option<Arc<dyn CPart>>,
    pub o: Arc<dyn OPart>,
    pub degree: i64,
    pub cutoff: Cutoffs,
}

impl std::fmt::Debug for Coderivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Coderivation(deg {}, {:?})", self.degree, self.cutoff)
    }
}

impl Coderivation {
    /// Q^o on a monomial in arbitrary v-order.
    pub fn q_o(&self, v: Vec<VKey>, a: Vec<u32>) -> AVec {
        match canon(&self.pair, v, a) {
            Some((m, s)) => scale(&self.o.eval(&m), s),
            None => AVec::new(),
        }
    }

    /// Q̂ on an o-monomial: the three sums, signs from moving the operator
    /// (degree `self.degree`) and the remaining v's into place.
    pub fn hat_o(&self, m: &OMono) -> OSum {
        let p = &self.pair;
        let (k, n) = (m.k(), m.n());
        let d_odd = odd(self.degree);
        let mut out = OSum::new();
        // prefix parities of a's
        let mut apre = vec![false; n + 1];
        for l in 0..n {
            apre[l + 1] = apre[l] ^ p.apar(m.a[l]);
        }
        for pp in 0..=k {
            for (lam, e) in shuffles_signed(p, &m.v, pp) {
                let first = pick(&m.v, &lam[..pp]);
                let rest = pick(&m.v, &lam[pp..]);
                let first_odd = first.iter().fold(false, |x, v| x ^ p.vpar(v));
                let rest_odd = rest.iter().fold(false, |x, v| x ^ p.vpar(v));
                // first sum: X^c on the leading block
                if pp >= 1 {
                    if let Some(c) = &self.c {
                        for (w, x) in c.linf(&first) {
                            let mut vs = vec![w];
                            vs.extend(rest.iter().cloned());
                            if let Some((mm, s)) = canon(p, vs, m.a.clone()) {
                                acc(&mut out, mm, x * q_sign(s * sgn(e)));
                            }
                        }
                    }
                }
                // second and third sums: X^o(rest; a_t..a_s) inserted at t
                for t in 1..=n + 1 {
                    let before = apre[t - 1];
                    let sign = e ^ (d_odd & (first_odd ^ before)) ^ (rest_odd & before);
                    for s in t - 1..=n {
                        if rest.is_empty() && s < t {
                            continue;
                        }
                        let inner = OMono { v: rest.clone(), a: m.a[t - 1..s].to_vec() };
                        let val = self.o.eval(&inner);
                        for (b, x) in val {
                            let mut a = m.a[..t - 1].to_vec();
                            a.push(b);
                            a.extend_from_slice(&m.a[s..]);
                            acc(&mut out, OMono { v: first.clone(), a }, x * q_sign(sgn(sign)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Q̂ on a symmetric monomial of V (the ΛLie∞ part of Q̂^c).
    pub fn hat_sym(&self, vs: &[VKey]) -> BTreeMap<SymMono, Q> {
        let mut out = BTreeMap::new();
        let Some(c) = &self.c else { return out };
        for pp in 1..=vs.len() {
            for (lam, e) in shuffles_signed(&self.pair, vs, pp) {
                let rest = pick(vs, &lam[pp..]);
                for (w, x) in c.linf(&pick(vs, &lam[..pp])) {
                    let mut v = vec![w];
                    v.extend(rest.iter().cloned());
                    if let Some(s) = sort_sym(&self.pair, &mut v) {
                        acc(&mut out, v, x * q_sign(s * sgn(e)));
                    }
                }
            }
        }
        out
    }

    /// p∘Q̂ on a formal sum of o-monomials.
    pub fn project_o(&self, sum: &OSum) -> AVec {
        let mut out = AVec::new();
        for (m, c) in sum {
            acc_all(&mut out, &self.o.eval(m), c);
        }
        out
    }

    pub fn hat_o_sum(&self, sum: &OSum) -> OSum {
        let mut out = OSum::new();
        for (m, c) in sum {
            acc_all(&mut out, &self.hat_o(m), c);
        }
        out
    }

    /// (Q^o∘Q̂^o)(m).
    pub fn square_o(&self, m: &OMono) -> AVec {
        self.project_o(&self.hat_o(m))
    }

    /// (Q^c∘Q̂^c)(v) on a symmetric monomial.
    pub fn square_sym(&self, vs: &[VKey]) -> VVec {
        let mut out = VVec::new();
        let Some(c) = &self.c else { return out };
        for (w, x) in self.hat_sym(vs) {
            acc_all(&mut out, &c.linf(&w), &x);
        }
        out
    }

    pub fn o_domain(&self) -> Vec<OMono> {
        let c = self.cutoff;
        o_monomials(&self.pair, c.total, c.vsize, |m| c.keeps_o(m))
    }

    /// Symmetric monomials with 1 ≤ k ≤ total and Σ sizes ≤ vsize.
    pub fn c_domain(&self) -> Vec<SymMono> {
        let vb = self.pair.v.basis(self.cutoff.vsize);
        let mut out = Vec::new();
        for k in (1..=self.cutoff.total).filter(|k| self.cutoff.keeps_c(*k)) {
            for s in multisets(&self.pair, &vb, k) {
                if s.iter().map(|x| self.pair.v.size(x)).sum::<usize>() <= self.cutoff.vsize {
                    out.push(s);
                }
            }
        }
        out
    }
}

pub(crate) fn pick(vs: &[VKey], idx: &[usize]) -> Vec<VKey> {
    idx.iter().map(|i| vs[*i].clone()).collect()
}

pub fn q_sign(s: i64) -> Q {
    Q::from_integer(s.into())
}

pub fn scale<K: Ord + Clone>(v: &BTreeMap<K, Q>, s: i64) -> BTreeMap<K, Q> {
    v.iter().map(|(k, x)| (k.clone(), x * q_sign(s))).collect()
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct QsqViolation {
    pub color: char,
    pub monomial: String,
    /// (basis label, coefficient) of the nonzero defect.
    pub defect: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct QsqReport {
    pub checked: usize,
    pub violations: Vec<QsqViolation>,
}

impl QsqReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

fn fmt_avec(p: &Pair, v: &AVec) -> Vec<(String, String)> {
    v.iter().map(|(b, x)| (p.a.label(*b as usize).to_string(), crate::exactlinalg::fmt_q(x))).collect()
}

fn fmt_vvec(p: &Pair, v: &VVec) -> Vec<(String, String)> {
    v.iter().map(|(b, x)| (p.v.label(b), crate::exactlinalg::fmt_q(x))).collect()
}

/// Checks p∘Q̂∘Q̂ = 0 on every basis monomial within the cutoffs.
///
/// o-monomials: all with k + n ≤ total and each v of size ≤ vsize; those whose
/// degree cannot reach A are skipped. c-monomials: symmetric ones (ΛLie∞
/// relations), plus the strict Gerstenhaber identities when a product is
/// present. Other Ger∨ values are reported as unsupported.
pub fn q_square_check(q: &Coderivation) -> QsqReport {
    let p = &q.pair;
    let adegs: std::collections::BTreeSet<i64> = (0..p.a.dim()).map(|i| p.a.degree(i)).collect();
    let shift = q.degree * 2;
    let dom: Vec<OMono> =
        q.o_domain().into_iter().filter(|m| adegs.contains(&(m.degree(p) + shift + 1))).collect();
    let mut report = QsqReport { checked: dom.len(), violations: vec![] };
    let o_bad: Vec<QsqViolation> = dom
        .par_iter()
        .filter_map(|m| {
            let d = q.square_o(m);
            (!d.is_empty()).then(|| QsqViolation { color: 'o', monomial: m.label(p), defect: fmt_avec(p, &d) })
        })
        .collect();
    report.violations.extend(o_bad);
    if q.c.is_some() {
        let cd = q.c_domain();
        report.checked += cd.len();
        let c_bad: Vec<QsqViolation> = cd
            .par_iter()
            .filter_map(|vs| {
                let d = q.square_sym(vs);
                (!d.is_empty()).then(|| QsqViolation {
                    color: 'c',
                    monomial: GerCoMonomial::singletons(vs.clone()).label(p),
                    defect: fmt_vvec(p, &d),
                })
            })
            .collect();
        report.violations.extend(c_bad);
        report.violations.extend(strict_product_violations(q));
        for (g, _) in q.c.as_ref().unwrap().other() {
            report.violations.push(QsqViolation {
                color: 'c',
                monomial: g.label(p),
                defect: vec![("unsupported".into(), "higher Ger∨ component".into())],
            });
        }
    }
    report
}

/// dg Gerstenhaber identities for l_1, l_2 and a strict product μ, written so
/// that the normalization of l_2 drops out.
fn strict_product_violations(q: &Coderivation) -> Vec<QsqViolation> {
    let c = q.c.as_ref().unwrap();
    if !c.has_product() {
        return vec![];
    }
    let p = &q.pair;
    let vb: Vec<VKey> = p.v.basis(q.cutoff.vsize);
    let deg = |v: &VKey| p.v.degree(v);
    let mul = |x: &VVec, y: &VVec| -> VVec {
        let mut o = VVec::new();
        for (a, ca) in x {
            for (b, cb) in y {
                acc_all(&mut o, &c.product(a, b), &(ca * cb));
            }
        }
        o
    };
    let l2 = |x: &VVec, y: &VVec| -> VVec {
        let mut o = VVec::new();
        for (a, ca) in x {
            for (b, cb) in y {
                let mut pair = vec![a.clone(), b.clone()];
                if let Some(s) = sort_sym(p, &mut pair) {
                    acc_all(&mut o, &c.linf(&pair), &(ca * cb * q_sign(s)));
                }
            }
        }
        o
    };
    let l1 = |x: &VVec| -> VVec {
        let mut o = VVec::new();
        for (a, ca) in x {
            acc_all(&mut o, &c.linf(std::slice::from_ref(a)), ca);
        }
        o
    };
    let one = |v: &VKey| -> VVec { [(v.clone(), q_sign(1))].into_iter().collect() };
    let sub = |x: &VVec, y: &VVec| -> VVec {
        let mut o = x.clone();
        acc_all(&mut o, y, &q_sign(-1));
        o
    };
    let mut out = Vec::new();
    let mut report = |name: &str, d: VVec| {
        if !d.is_empty() {
            out.push(QsqViolation { color: 'c', monomial: name.to_string(), defect: fmt_vvec(p, &d) });
        }
    };
    for a in &vb {
        for b in &vb {
            if p.v.size(a) + p.v.size(b) > q.cutoff.vsize {
                continue;
            }
            let (ea, eb) = (one(a), one(b));
            let ab = mul(&ea, &eb);
            let ba = scale(&mul(&eb, &ea), sgn(odd(deg(a) * deg(b))));
            report(&format!("commutativity {} {}", p.v.label(a), p.v.label(b)), sub(&ab, &ba));
            let lhs = l1(&ab);
            let mut rhs = mul(&l1(&ea), &eb);
            acc_all(&mut rhs, &mul(&ea, &l1(&eb)), &q_sign(sgn(odd(deg(a)))));
            report(&format!("derivation {} {}", p.v.label(a), p.v.label(b)), sub(&lhs, &rhs));
            for cc in &vb {
                if p.v.size(a) + p.v.size(b) + p.v.size(cc) > q.cutoff.vsize {
                    continue;
                }
                let ec = one(cc);
                let name = format!("{} {} {}", p.v.label(a), p.v.label(b), p.v.label(cc));
                report(&format!("associativity {name}"), sub(&mul(&ab, &ec), &mul(&ea, &mul(&eb, &ec))));
                let lhs = l2(&ea, &mul(&eb, &ec));
                let mut rhs = mul(&l2(&ea, &eb), &ec);
                acc_all(&mut rhs, &mul(&eb, &l2(&ea, &ec)), &q_sign(sgn(odd((deg(a) - 1) * deg(b)))));
                report(&format!("Leibniz {name}"), sub(&lhs, &rhs));
            }
        }
    }
    out
}
