//! Homotopy transfer of structures on S(V′, A′) along a contraction of A′
//! onto A, solved weight by weight; plus the planar-tree formula for the
//! A∞ color as an independent oracle.

use crate::exactlinalg::Q;
use crate::graded::GradedSpace;
use crate::hochschild::{all_tuples, coeff_to_json, json_coeff, AInfinityStructure, Cochain, JsonAlgebra, JsonBasis, JsonTerm};
use crate::scoalgebra::{
    acc, acc_all, build_tautological_ocha, sym_weight, AVec, CPart, Coderivation, Cutoffs, OMono, OPart, Pair, SCoalgebraMorphism,
    SymMono, VKey, VVec,
};
use crate::{Error, Result};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};


// ---------------------------------------------------------------------------
// weights and the minimal model condition

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    Rho,
    DeltaO,
    DeltaC,
    CobracketC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub rho: u32,
    pub delta_o: u32,
    pub delta_c: u32,
    pub cobracket_c: u32,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { rho: 1, delta_o: 1, delta_c: 2, cobracket_c: 2 }
    }
}

impl Weights {
    pub fn of(&self, g: Generator) -> u32 {
        match g {
            Generator::Rho => self.rho,
            Generator::DeltaO => self.delta_o,
            Generator::DeltaC => self.delta_c,
            Generator::CobracketC => self.cobracket_c,
        }
    }
}

/// Basis type of a cooperation of S: Ger∨(k) with `blocks` co-Lie words, or
/// the o-colored cooperation with k closed and n open inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Shape {
    C { k: usize, blocks: usize },
    O { k: usize, n: usize },
}

/// A cooperation together with every way of writing it as a composite of
/// generators (generator multisets).
#[derive(Clone, Debug, Serialize)]
pub struct WeightedCooperation {
    pub shape: Shape,
    pub expressions: Vec<BTreeMap<Generator, usize>>,
}

impl WeightedCooperation {
    /// Filtration degree: the least weight among its expressions.
    pub fn weight(&self, w: &Weights) -> u32 {
        self.expressions.iter().map(|e| e.iter().map(|(g, c)| w.of(*g) * *c as u32).sum()).min().unwrap_or(0)
    }
    pub fn uses_only(&self, gens: &[Generator]) -> bool {
        self.expressions.iter().any(|e| e.iter().all(|(g, c)| *c == 0 || gens.contains(g)))
    }
}

/// Elements of S up to an arity bound and their nontrivial partial
/// cocompositions x ↦ x′ ∘_i x″ (outer, inner).
#[derive(Clone, Debug, Serialize)]
pub struct CooperadTables {
    pub elements: BTreeMap<Shape, WeightedCooperation>,
    pub cocompositions: Vec<(Shape, Shape, Shape)>,
}

fn expr(items: &[(Generator, usize)]) -> BTreeMap<Generator, usize> {
    items.iter().filter(|(_, c)| *c > 0).cloned().collect()
}

fn is_identity(s: &Shape) -> bool {
    matches!(s, Shape::C { k: 1, .. } | Shape::O { k: 0, n: 1 })
}

/// Tables of S with total arity ≤ `max_arity`. An o-cooperation with k closed
/// inputs can group them into g clusters (each cluster entering through ρ after
/// a cocommutative product); every grouping is recorded as an expression.
pub fn s_cooperad_tables(max_arity: usize) -> CooperadTables {
    use Generator::*;
    let mut elements = BTreeMap::new();
    for k in 1..=max_arity {
        for b in 1..=k {
            let s = Shape::C { k, blocks: b };
            elements.insert(s, WeightedCooperation { shape: s, expressions: vec![expr(&[(DeltaC, b - 1), (CobracketC, k - b)])] });
        }
    }
    for k in 0..=max_arity {
        for n in 0..=max_arity - k {
            if k + n == 0 {
                continue;
            }
            let gs: Vec<usize> = if k == 0 { vec![0] } else { (1..=k).collect() };
            let expressions = gs.into_iter().map(|g| expr(&[(DeltaO, g + n - 1), (Rho, g), (DeltaC, k - g)])).collect();
            let s = Shape::O { k, n };
            elements.insert(s, WeightedCooperation { shape: s, expressions });
        }
    }
    let mut cocompositions = Vec::new();
    for s in elements.keys() {
        match *s {
            Shape::O { k, n } => {
                for k2 in 0..=k {
                    for n2 in 0..=n {
                        let inner = Shape::O { k: k2, n: n2 };
                        let outer = Shape::O { k: k - k2, n: n - n2 + 1 };
                        if k2 + n2 == 0 || is_identity(&inner) || is_identity(&outer) {
                            continue;
                        }
                        cocompositions.push((*s, outer, inner));
                    }
                }
                for j in 2..=k {
                    cocompositions.push((*s, Shape::O { k: k - j + 1, n }, Shape::C { k: j, blocks: j }));
                }
            }
            Shape::C { k, blocks } => {
                for j in 2..k {
                    for b2 in 1..=j {
                        let b1 = (blocks + 1).saturating_sub(b2);
                        if b1 >= 1 && b1 <= k - j + 1 {
                            cocompositions.push((*s, Shape::C { k: k - j + 1, blocks: b1 }, Shape::C { k: j, blocks: b2 }));
                        }
                    }
                }
            }
        }
    }
    CooperadTables { elements, cocompositions }
}

impl CooperadTables {
    /// Keeps the cooperations expressible through `gens` alone.
    pub fn restrict(&self, gens: &[Generator]) -> CooperadTables {
        let elements: BTreeMap<Shape, WeightedCooperation> = self
            .elements
            .iter()
            .filter(|(_, e)| e.uses_only(gens))
            .map(|(s, e)| {
                let mut e = e.clone();
                e.expressions.retain(|x| x.keys().all(|g| gens.contains(g)));
                (*s, e)
            })
            .collect();
        let cocompositions = self
            .cocompositions
            .iter()
            .filter(|(x, a, b)| [x, a, b].iter().all(|s| elements.contains_key(*s)))
            .cloned()
            .collect();
        CooperadTables { elements, cocompositions }
    }
}

/// Δ(F^n) ⊂ ⊕_{p+q=n} F^p ⊗ F^q for every tabulated x of weight ≤ `cut`:
/// both factors of each cocomposition have positive weight and the weights add
/// up to at most that of x.
pub fn check_minimal_model_condition(t: &CooperadTables, w: &Weights, cut: u32) -> bool {
    let wt = |s: &Shape| t.elements.get(s).map(|e| e.weight(w));
    t.cocompositions.iter().all(|(x, a, b)| match (wt(x), wt(a), wt(b)) {
        (Some(wx), Some(wa), Some(wb)) => wx > cut || (wa >= 1 && wb >= 1 && wa + wb <= wx),
        _ => false,
    })
}

// ---------------------------------------------------------------------------
// contractions

/// Linear map given by the images of basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub images: Vec<AVec>,
}

impl LinearMap {
    pub fn identity(n: usize) -> Self {
        LinearMap { images: (0..n as u32).map(|i| [(i, Q::one())].into_iter().collect()).collect() }
    }
    pub fn zero(n: usize) -> Self {
        LinearMap { images: vec![AVec::new(); n] }
    }
    pub fn apply(&self, v: &AVec) -> AVec {
        let mut out = AVec::new();
        for (b, c) in v {
            acc_all(&mut out, &self.images[*b as usize], c);
        }
        out
    }
    /// self ∘ other
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap { images: other.images.iter().map(|v| self.apply(v)).collect() }
    }
    pub fn add(&self, other: &LinearMap, c: &Q) -> LinearMap {
        LinearMap {
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(x, y)| {
                    let mut z = x.clone();
                    acc_all(&mut z, y, c);
                    z
                })
                .collect(),
        }
    }
    fn degree_ok(&self, from: &GradedSpace, to: &GradedSpace, deg: i64) -> bool {
        self.images.iter().enumerate().all(|(j, v)| v.keys().all(|i| to.degree(*i as usize) == from.degree(j) + deg))
    }
}

/// i: A → A′, p: A′ → A, h: A′ → A′ (degree −1). V is left unchanged.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub small: GradedSpace,
    pub big: GradedSpace,
    pub i: LinearMap,
    pub p: LinearMap,
    pub h: LinearMap,
}

impl Contraction {
    pub fn trivial(sp: &GradedSpace) -> Self {
        Contraction {
            small: sp.clone(),
            big: sp.clone(),
            i: LinearMap::identity(sp.dim()),
            p: LinearMap::identity(sp.dim()),
            h: LinearMap::zero(sp.dim()),
        }
    }

    /// Checks degrees, p i = 1, i p − 1 = d h + h d and the side conditions
    /// h² = 0, h i = 0, p h = 0, where d is the given differential of A′.
    pub fn validate(&self, d: &LinearMap) -> Result<()> {
        let (a, b) = (&self.small, &self.big);
        if self.i.images.len() != a.dim() || self.p.images.len() != b.dim() || self.h.images.len() != b.dim() {
            return Err(Error::input("contraction maps have the wrong size"));
        }
        if !self.i.degree_ok(a, b, 0) || !self.p.degree_ok(b, a, 0) || !self.h.degree_ok(b, b, -1) {
            return Err(Error::input("contraction maps have the wrong degrees (i, p: 0; h: −1)"));
        }
        let one_a = LinearMap::identity(a.dim());
        let one_b = LinearMap::identity(b.dim());
        let fail = |what: &str| Err(Error::input(format!("contraction fails {what}")));
        if self.p.compose(&self.i) != one_a {
            return fail("p∘i = 1");
        }
        let lhs = self.i.compose(&self.p).add(&one_b, &-Q::one());
        let rhs = d.compose(&self.h).add(&self.h.compose(d), &Q::one());
        if lhs != rhs {
            return fail("i∘p − 1 = dh + hd");
        }
        if self.h.compose(&self.h) != LinearMap::zero(b.dim()) {
            return fail("h² = 0");
        }
        if self.h.compose(&self.i) != LinearMap::zero(a.dim()) {
            return fail("h∘i = 0");
        }
        if self.p.compose(&self.h) != LinearMap::zero(b.dim()) {
            return fail("p∘h = 0");
        }
        Ok(())
    }
}

/// The linear part of Q′ on A′ (values on single a's).
pub fn linear_part(q: &Coderivation) -> LinearMap {
    LinearMap { images: (0..q.pair.a.dim() as u32).map(|i| q.o.eval(&OMono::pure_a(vec![i]))).collect() }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonMapEntry {
    pub from: String,
    pub to: Vec<JsonTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonContraction {
    /// Basis of A.
    pub small_basis: Vec<JsonBasis>,
    pub i: Vec<JsonMapEntry>,
    pub p: Vec<JsonMapEntry>,
    #[serde(default)]
    pub h: Vec<JsonMapEntry>,
}

fn map_from_json(entries: &[JsonMapEntry], from: &GradedSpace, to: &GradedSpace) -> Result<LinearMap> {
    let mut m = LinearMap::zero(from.dim());
    for e in entries {
        let j = from.index_of(&e.from)?;
        for t in &e.to {
            acc(&mut m.images[j], to.index_of(&t.label)? as u32, json_coeff(t)?);
        }
    }
    Ok(m)
}

fn map_to_json(m: &LinearMap, from: &GradedSpace, to: &GradedSpace) -> Vec<JsonMapEntry> {
    m.images
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(j, v)| JsonMapEntry {
            from: from.label(j).to_string(),
            to: v.iter().map(|(i, c)| coeff_to_json(to.label(*i as usize), c)).collect(),
        })
        .collect()
}

impl JsonContraction {
    pub fn build(&self, big: &GradedSpace) -> Result<Contraction> {
        let small = GradedSpace::new("A", self.small_basis.iter().map(|b| (b.label.clone(), b.degree)).collect())?;
        Ok(Contraction {
            i: map_from_json(&self.i, &small, big)?,
            p: map_from_json(&self.p, big, &small)?,
            h: map_from_json(&self.h, big, big)?,
            small,
            big: big.clone(),
        })
    }
    pub fn from_contraction(c: &Contraction) -> Self {
        JsonContraction {
            small_basis: (0..c.small.dim()).map(|i| JsonBasis { label: c.small.label(i).into(), degree: c.small.degree(i) }).collect(),
            i: map_to_json(&c.i, &c.small, &c.big),
            p: map_to_json(&c.p, &c.big, &c.small),
            h: map_to_json(&c.h, &c.big, &c.big),
        }
    }
}

/// Input of the `transfer` command: the tautological structure on
/// (C•(A′), A′) and a contraction of A′.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonTransferInput {
    pub algebra: JsonAlgebra,
    pub contraction: JsonContraction,
}

// ---------------------------------------------------------------------------
// the inductive solve

/// Shared state of a transfer: lazily solved, memoized components.
struct Solver {
    q2: Coderivation,
    c: Contraction,
    src: Pair,
    w: usize,
    cutoff: Cutoffs,
    psi_o: Mutex<HashMap<OMono, Arc<AVec>>>,
    psi_c: Mutex<HashMap<SymMono, Arc<VVec>>>,
    levels: Mutex<BTreeMap<usize, usize>>,
}

/// Component `which` (Q or T) of the solver restricted to weights in [lo, hi).
#[derive(Clone)]
struct Part {
    s: Arc<Solver>,
    which: Which,
    lo: usize,
    hi: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Which {
    Q,
    T,
}

impl OPart for Part {
    fn eval(&self, m: &OMono) -> AVec {
        let w = m.weight();
        if w < self.lo || w >= self.hi {
            return AVec::new();
        }
        self.s.o_value(self.which, m)
    }
}

impl CPart for Part {
    fn linf(&self, vs: &[VKey]) -> VVec {
        let w = sym_weight(vs.len());
        if w < self.lo || w >= self.hi {
            return VVec::new();
        }
        self.s.c_value(self.which, vs)
    }
}

impl Solver {
    fn part(self: &Arc<Self>, which: Which, lo: usize, hi: usize) -> Part {
        Part { s: self.clone(), which, lo, hi }
    }

    fn coder(self: &Arc<Self>, lo: usize, hi: usize) -> Coderivation {
        Coderivation {
            pair: self.src.clone(),
            c: Some(Arc::new(self.part(Which::Q, lo, hi))),
            o: Arc::new(self.part(Which::Q, lo, hi)),
            degree: 1,
            cutoff: self.cutoff,
        }
    }

    fn morphism(self: &Arc<Self>, hi: usize) -> SCoalgebraMorphism {
        SCoalgebraMorphism {
            src: self.src.clone(),
            tgt: self.q2.pair.clone(),
            tc: Arc::new(self.part(Which::T, 0, hi)),
            to: Arc::new(self.part(Which::T, 0, hi)),
            cutoff: self.cutoff,
            c_filter: None,
        }
    }

    fn o_value(self: &Arc<Self>, which: Which, m: &OMono) -> AVec {
        let w = m.weight();
        if w > self.w {
            return AVec::new();
        }
        if w == 0 {
            let ia = self.c.i.apply(&[(m.a[0], Q::one())].into_iter().collect());
            return match which {
                Which::T => ia,
                Which::Q => self.c.p.apply(&self.q2.project_o(&ia.into_iter().map(|(b, c)| (OMono::pure_a(vec![b]), c)).collect())),
            };
        }
        let psi = self.psi_o(m);
        match which {
            Which::Q => self.c.p.apply(&psi),
            Which::T => self.c.h.apply(&psi),
        }
    }

    fn c_value(self: &Arc<Self>, which: Which, vs: &[VKey]) -> VVec {
        let w = sym_weight(vs.len());
        if w > self.w {
            return VVec::new();
        }
        match (which, vs.len()) {
            // V is not contracted: T^c is the identity, h_V = 0
            (Which::T, 1) => [(vs[0].clone(), Q::one())].into_iter().collect(),
            (Which::T, _) => VVec::new(),
            (Which::Q, 1) => self.q2.c.as_ref().map_or_else(VVec::new, |c| c.linf(vs)),
            (Which::Q, _) => (*self.psi_c(vs)).clone(),
        }
    }

    /// Ψ(x) = Q′^o(T̂x) − T^o(Q̂x) without the terms of weight w(x):
    /// Q_N = pΨ, T_N = hΨ.
    fn psi_o(self: &Arc<Self>, m: &OMono) -> AVec {
        if let Some(v) = self.psi_o.lock().unwrap().get(m) {
            return (**v).clone();
        }
        let n = m.weight();
        let t_low = self.morphism(n);
        let mut out = self.q2.project_o(&t_low.hat_o(m));
        let q_low = self.coder(1, n);
        let t_all = self.morphism(usize::MAX);
        acc_all(&mut out, &t_all.project_o(&q_low.hat_o(m)), &-Q::one());
        *self.levels.lock().unwrap().entry(n).or_default() += 1;
        self.psi_o.lock().unwrap().insert(m.clone(), Arc::new(out.clone()));
        out
    }

    fn psi_c(self: &Arc<Self>, vs: &[VKey]) -> Arc<VVec> {
        if let Some(v) = self.psi_c.lock().unwrap().get(vs) {
            return v.clone();
        }
        let n = sym_weight(vs.len());
        let mut out = VVec::new();
        if let Some(c2) = &self.q2.c {
            for (u, x) in self.morphism(n).hat_sym(vs) {
                acc_all(&mut out, &c2.linf(&u), &x);
            }
        }
        let t_all = self.morphism(usize::MAX);
        for (u, x) in self.coder(1, n).hat_sym(vs) {
            acc_all(&mut out, &t_all.tc.linf(&u), &-x);
        }
        *self.levels.lock().unwrap().entry(n).or_default() += 1;
        let out = Arc::new(out);
        self.psi_c.lock().unwrap().insert(vs.to_vec(), out.clone());
        out
    }
}

/// Result of a transfer: Q on (V, A), T: S(V, A) → S(V′, A′), both exact up
/// to weight W and zero beyond.
#[derive(Clone)]
pub struct Transferred {
    pub q: Coderivation,
    pub t: SCoalgebraMorphism,
    pub weight: usize,
    solver: Arc<Solver>,
}

impl Transferred {
    /// Number of solved components per weight level so far.
    pub fn solved_per_weight(&self) -> BTreeMap<usize, usize> {
        self.solver.levels.lock().unwrap().clone()
    }
}

/// Transfers Q′ on (V′, A′) along `c` (A′ ⇝ A, V unchanged) up to weight `w`.
/// Components are solved on demand by increasing weight, each level once.
pub fn transfer_structure(q2: &Coderivation, c: &Contraction, w: usize, vsize: usize) -> Result<Transferred> {
    if q2.degree != 1 {
        return Err(Error::input("Q′ must have degree 1"));
    }
    if q2.pair.a.dim() != c.big.dim() || (0..c.big.dim()).any(|i| q2.pair.a.label(i) != c.big.label(i)) {
        return Err(Error::input("contraction does not match the open space of Q′"));
    }
    c.validate(&linear_part(q2))?;
    let mut src = Pair::new(q2.pair.v.clone(), c.small.clone());
    src.window = None;
    let cutoff = Cutoffs::weight(w, vsize);
    let solver = Arc::new(Solver {
        q2: q2.clone(),
        c: c.clone(),
        src,
        w,
        cutoff,
        psi_o: Mutex::new(HashMap::new()),
        psi_c: Mutex::new(HashMap::new()),
        levels: Mutex::new(BTreeMap::new()),
    });
    let q = solver.coder(0, usize::MAX);
    let t = solver.morphism(usize::MAX);
    Ok(Transferred { q, t, weight: w, solver })
}

/// Tautological structure on (C•(A′), A′) with the cutoffs used by transfers.
pub fn tautological_for_transfer(m: &AInfinityStructure, w: usize, vsize: usize) -> Result<Coderivation> {
    build_tautological_ocha(m, Cutoffs::weight(w, vsize))
}

// ---------------------------------------------------------------------------
// planar-tree oracle

/// m_n = p ∘ Σ_{planar trees} m′_r(β_1, …, β_r), β = i(a) on leaves and
/// h(subtree) on internal edges; m_1 = p m′_1 i.
pub fn ainf_transfer_oracle(m2: &AInfinityStructure, c: &Contraction, cutoff: usize) -> Result<AInfinityStructure> {
    if cutoff > 8 {
        return Err(Error::Cutoff(format!("tree oracle limited to arity 8, asked for {cutoff}")));
    }
    let dim = c.small.dim() as u32;
    let mut lam: HashMap<Vec<u32>, AVec> = HashMap::new();
    let mut out = Cochain::zero();
    let beta = |lam: &HashMap<Vec<u32>, AVec>, t: &[u32]| -> AVec {
        if t.len() == 1 {
            c.i.apply(&[(t[0], Q::one())].into_iter().collect())
        } else {
            c.h.apply(&lam[t])
        }
    };
    for a in 0..dim {
        let ia = c.i.apply(&[(a, Q::one())].into_iter().collect());
        let mut v = AVec::new();
        for (b, x) in &ia {
            acc_all(&mut v, &m2.m.eval(&[*b]), x);
        }
        for (o, x) in c.p.apply(&v) {
            out.add(vec![a], o, x);
        }
    }
    for n in 2..=cutoff {
        for t in all_tuples(dim, n) {
            let mut val = AVec::new();
            for cuts in compositions(n) {
                if cuts.len() < 3 {
                    continue;
                }
                let factors: Vec<AVec> = cuts.windows(2).map(|w| beta(&lam, &t[w[0]..w[1]])).collect();
                if factors.iter().any(|f| f.is_empty()) {
                    continue;
                }
                let mut partial: Vec<(Vec<u32>, Q)> = vec![(vec![], Q::one())];
                for f in &factors {
                    partial = partial
                        .into_iter()
                        .flat_map(|(ks, c0)| f.iter().map(move |(b, x)| ([ks.clone(), vec![*b]].concat(), &c0 * x)))
                        .collect();
                }
                for (ks, x) in partial {
                    acc_all(&mut val, &m2.m.eval(&ks), &x);
                }
            }
            for (o, x) in c.p.apply(&val) {
                out.add(t.clone(), o, x);
            }
            lam.insert(t, val);
        }
    }
    out.table.retain(|_, v| !v.is_empty());
    AInfinityStructure::new(c.small.clone(), out, cutoff)
}

/// Cut points 0 = c_0 < c_1 < … < c_r = n.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0..1u32 << (n - 1) {
        let mut c = vec![0];
        for j in 1..n {
            if mask >> (j - 1) & 1 == 1 {
                c.push(j);
            }
        }
        c.push(n);
        out.push(c);
    }
    out
}

/// The pure o-color of a coderivation as an A∞ structure up to arity n.
pub fn o_color(q: &Coderivation, n: usize) -> Result<AInfinityStructure> {
    let mut m = Cochain::zero();
    for k in 1..=n {
        for t in all_tuples(q.pair.a.dim() as u32, k) {
            for (o, x) in q.o.eval(&OMono::pure_a(t.clone())) {
                if !x.is_zero() {
                    m.add(t.clone(), o, x);
                }
            }
        }
    }
    AInfinityStructure::new(q.pair.a.clone(), m, n)
}
