use super::*;
use crate::hochschild::{AInfinityStructure, Cochain};
use num_traits::One;
use std::collections::HashMap;
use std::sync::Mutex;

/// Caches an o-part.
pub struct Memo {
    inner: Arc<dyn OPart>,
    cache: Mutex<HashMap<OMono, AVec>>,
}

impl Memo {
    pub fn new(inner: Arc<dyn OPart>) -> Arc<Self> {
        Arc::new(Memo { inner, cache: Mutex::new(HashMap::new()) })
    }
}

impl OPart for Memo {
    fn eval(&self, m: &OMono) -> AVec {
        if let Some(v) = self.cache.lock().unwrap().get(m) {
            return v.clone();
        }
        let v = self.inner.eval(m);
        self.cache.lock().unwrap().insert(m.clone(), v.clone());
        v
    }
}

/// Σ c_i X_i.
pub struct LinComb(pub Vec<(Q, Arc<dyn OPart>)>);

impl OPart for LinComb {
    fn eval(&self, m: &OMono) -> AVec {
        let mut out = AVec::new();
        for (c, x) in &self.0 {
            acc_all(&mut out, &x.eval(m), c);
        }
        out
    }
}

/// Projection of the commutator [X̂, Ŷ] = X̂Ŷ − (−1)^{|X||Y|} ŶX̂ onto A.
pub struct Commutator {
    pub x: Coderivation,
    pub y: Coderivation,
}

impl OPart for Commutator {
    fn eval(&self, m: &OMono) -> AVec {
        let mut out = self.x.project_o(&self.y.hat_o(m));
        let s = -sgn(odd(self.x.degree * self.y.degree));
        acc_all(&mut out, &self.y.project_o(&self.x.hat_o(m)), &q_sign(s));
        out
    }
}

fn is_pure(m: &OMono) -> bool {
    m.v.is_empty()
}

/// Checks that ψ is a degree-0 coderivation datum vanishing on Ger∨(V) and on
/// pure a-monomials (within the cutoff domain).
pub fn validate_homotopy(psi: &Coderivation) -> Result<()> {
    if psi.degree != 0 {
        return Err(Error::input(format!("homotopy must have degree 0, got {}", psi.degree)));
    }
    if psi.c.is_some() {
        return Err(Error::input("homotopy must vanish on Ger∨(V)"));
    }
    for m in o_monomials(&psi.pair, psi.cutoff.total, psi.cutoff.vsize, is_pure) {
        if !psi.o.eval(&m).is_empty() {
            return Err(Error::Math(format!(
                "homotopy is nonzero on the pure monomial {}: exp([ψ̂, ·]) would not terminate",
                m.label(&psi.pair)
            )));
        }
    }
    Ok(())
}

/// Q'^o = p∘e^{ψ̂}Q̂e^{−ψ̂}, evaluated monomial by monomial. Each ψ̂ removes at
/// least one v, so both exponentials are finite sums.
struct Conjugated {
    q: Coderivation,
    psi: Coderivation,
}

pub(crate) fn exp_apply(psi: &Coderivation, m: &OSum, sign: i64) -> Result<OSum> {
    let mut out = m.clone();
    let mut term = m.clone();
    let mut i = 0i64;
    let bound = m.keys().map(|x| x.k()).max().unwrap_or(0) as i64 + 1;
    while !term.is_empty() {
        i += 1;
        if i > bound {
            return Err(Error::Math("exp(ψ̂) did not terminate: ψ̂ fails to lower the v-count".into()));
        }
        // term = ψ̂^i m, added with weight sign^i / i!
        term = psi.hat_o_sum(&term);
        let c = Q::new((sign.pow(i as u32)).into(), (1..=i).product::<i64>().into());
        acc_all(&mut out, &term, &c);
    }
    Ok(out)
}

impl OPart for Conjugated {
    fn eval(&self, m: &OMono) -> AVec {
        let start: OSum = [(m.clone(), Q::one())].into_iter().collect();
        let x = exp_apply(&self.psi, &start, -1).expect("validated homotopy");
        let y = self.q.hat_o_sum(&x);
        let z = exp_apply(&self.psi, &y, 1).expect("validated homotopy");
        let mut out = AVec::new();
        for (k, c) in z {
            if k.v.is_empty() && k.a.len() == 1 {
                acc(&mut out, k.a[0], c);
            }
        }
        out
    }
}

/// Q̂' = exp([ψ̂, ·])Q̂. The c-part is carried over unchanged (ψ̂ vanishes on
/// Ger∨(V)); pure a-values agree because e^{±ψ̂} fixes pure monomials.
pub fn homotopy_conjugate(q: &Coderivation, psi: &Coderivation) -> Result<Coderivation> {
    validate_homotopy(psi)?;
    let conj = Conjugated { q: q.clone(), psi: psi.clone() };
    Ok(Coderivation { pair: q.pair.clone(), c: q.c.clone(), o: Memo::new(Arc::new(conj)), degree: q.degree, cutoff: q.cutoff })
}

fn mixed_coder(pair: &Pair, data: Arc<dyn OPart>, degree: i64, cutoff: Cutoffs) -> Coderivation {
    Coderivation {
        pair: pair.clone(),
        c: None,
        o: Arc::new(crate::scoalgebra::SplitO { m: Cochain::zero(), mixed: data }),
        degree,
        cutoff,
    }
}

/// d_H θ = p[θ̂, Q̂_0] with Q_0 = (Q^c, m, no mixed part).
pub fn gauge_differential(theta: &LInfinityMorphism, qc: Option<Arc<dyn CPart>>, m: &AInfinityStructure) -> Arc<dyn OPart> {
    let th = mixed_coder(&theta.pair, theta.data.clone(), 0, theta.cutoff);
    let q0 = Coderivation {
        pair: theta.pair.clone(),
        c: qc,
        o: Arc::new(crate::scoalgebra::SplitO { m: m.m.clone(), mixed: Arc::new(ZeroO) }),
        degree: 1,
        cutoff: theta.cutoff,
    };
    Memo::new(Arc::new(MixedOnly(Arc::new(Commutator { x: th, y: q0 }))))
}

/// [θ, X]_H for degree-1 mixed data X.
pub fn gauge_bracket(theta: &LInfinityMorphism, x: Arc<dyn OPart>) -> Arc<dyn OPart> {
    let th = mixed_coder(&theta.pair, theta.data.clone(), 0, theta.cutoff);
    let xc = mixed_coder(&theta.pair, x, 1, theta.cutoff);
    Memo::new(Arc::new(MixedOnly(Arc::new(Commutator { x: th, y: xc }))))
}

/// Zero on pure monomials.
pub struct MixedOnly(pub Arc<dyn OPart>);

impl OPart for MixedOnly {
    fn eval(&self, m: &OMono) -> AVec {
        if m.v.is_empty() {
            AVec::new()
        } else {
            self.0.eval(m)
        }
    }
}

/// U' = e^{ad θ}U + ((e^{ad θ} − 1)/ad θ) d_H θ, summed until ad θ has
/// consumed every v allowed by the cutoff.
pub fn linf_gauge_action(
    u: &LInfinityMorphism,
    theta: &LInfinityMorphism,
    qc: Option<Arc<dyn CPart>>,
    m: &AInfinityStructure,
) -> Result<LInfinityMorphism> {
    let probe = mixed_coder(&theta.pair, theta.data.clone(), 0, theta.cutoff);
    validate_homotopy(&probe)?;
    let total = u.cutoff.total.max(theta.cutoff.total);
    let mut terms: Vec<(Q, Arc<dyn OPart>)> = Vec::new();
    let mut fact = Q::one();
    let mut cur: Arc<dyn OPart> = Arc::new(MixedOnly(u.data.clone()));
    let mut dcur = gauge_differential(theta, qc, m);
    // ad^j U / j!  and  ad^j d_Hθ / (j+1)!; ad^j vanishes on ≤ j v's
    for j in 0..=total {
        terms.push((Q::one() / &fact, cur.clone()));
        fact *= Q::from_integer(((j + 1) as i64).into());
        terms.push((Q::one() / &fact, dcur.clone()));
        cur = gauge_bracket(theta, cur);
        dcur = gauge_bracket(theta, dcur);
    }
    Ok(LInfinityMorphism { pair: u.pair.clone(), data: Memo::new(Arc::new(LinComb(terms))), cutoff: u.cutoff })
}

/// θ(v)(a) = ψ(v; a).
pub fn theta_from_psi(psi: &Coderivation) -> LInfinityMorphism {
    LInfinityMorphism { pair: psi.pair.clone(), data: psi.o.clone(), cutoff: psi.cutoff }
}
