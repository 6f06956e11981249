use super::*;
use crate::exactlinalg::q;
use crate::hochschild::{all_tuples as all_tuples_, AInfinityStructure, Cochain};
use proptest::prelude::*;

pub(crate) fn dual_numbers() -> AInfinityStructure {
    let sp = GradedSpace::new("A", vec![("1".into(), 0), ("x".into(), 0)]).unwrap();
    let mut m = Cochain::zero();
    m.add(vec![0, 0], 0, q(1));
    m.add(vec![0, 1], 1, q(1));
    m.add(vec![1, 0], 1, q(1));
    AInfinityStructure::new(sp, m, 4).unwrap()
}

pub(crate) fn ground_field() -> AInfinityStructure {
    let sp = GradedSpace::new("A", vec![("1".into(), 0)]).unwrap();
    AInfinityStructure::new(sp, Cochain::elementary(vec![0, 0], 0, q(1)), 4).unwrap()
}

/// Small graded pair: V = ⟨v0, v1, v2⟩ in degrees 0, 1, 2; A = ⟨a0, a1⟩ in degrees 0, 1.
pub(crate) fn toy_pair() -> Pair {
    let v = GradedSpace::new("V", vec![("v0".into(), 0), ("v1".into(), 1), ("v2".into(), 2)]).unwrap();
    let a = GradedSpace::new("A", vec![("a0".into(), 0), ("a1".into(), 1)]).unwrap();
    Pair::new(Arc::new(TableSpace { sp: v }), a)
}

struct Lcg(u64);
impl Lcg {
    fn next(&mut self) -> i64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 33) % 5) as i64 - 2
    }
}

/// Random table coderivation of degree `deg` on the toy pair; entries with
/// k + n ≤ total, optionally without c-part / pure-a part / mixed part.
pub(crate) fn random_coder(p: &Pair, deg: i64, total: usize, seed: u64, with_c: bool, pure: bool, mixed: bool) -> Coderivation {
    let mut rng = Lcg(seed);
    let mut to = TableO::default();
    for m in o_monomials(p, total, 0, |_| true) {
        if (m.v.is_empty() && !pure) || (!m.v.is_empty() && !mixed) {
            continue;
        }
        let target = m.degree(p) + deg + 1;
        let mut val = AVec::new();
        for b in 0..p.a.dim() as u32 {
            if p.adeg(b) == target {
                acc(&mut val, b, q(rng.next()));
            }
        }
        to.map.insert(m, val);
    }
    let mut tc = TableC::default();
    if with_c {
        let vb = p.v.basis(0);
        for k in 1..=total {
            for s in multisets(p, &vb, k) {
                let target = s.iter().map(|x| p.v.degree(x)).sum::<i64>() - 2 * k as i64 + 2 + deg;
                let mut val = VVec::new();
                for w in &vb {
                    if p.v.degree(w) == target {
                        acc(&mut val, w.clone(), q(rng.next()));
                    }
                }
                tc.linf.insert(s, val);
            }
        }
    }
    Coderivation {
        pair: p.clone(),
        c: with_c.then(|| Arc::new(tc) as Arc<dyn CPart>),
        o: Arc::new(to),
        degree: deg,
        cutoff: Cutoffs::new(total, 0),
    }
}

fn mono(p: &Pair, v: &[&str], a: &[&str]) -> OMono {
    let v = v.iter().map(|l| p.v.parse(l).unwrap()).collect();
    let a = a.iter().map(|l| p.a.index_of(l).unwrap() as u32).collect();
    canon(p, v, a).unwrap().0
}

#[test]
fn coproduct_examples() {
    let p = toy_pair();
    assert!(coproduct_o(&p, &mono(&p, &[], &["a0"])).unwrap().is_empty());
    let d = coproduct_o(&p, &mono(&p, &[], &["a0", "a1"])).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d[&(mono(&p, &[], &["a0"]), mono(&p, &[], &["a1"]))], q(1));
    // (v1; a0): (p,t) ∈ {(0,1), (1,0)}; moving odd v1 past s^{-1}a0 (odd) costs a sign
    let d = coproduct_o(&p, &mono(&p, &["v1"], &["a0"])).unwrap();
    assert_eq!(d.len(), 2);
    assert_eq!(d[&(mono(&p, &[], &["a0"]), mono(&p, &["v1"], &[]))], q(-1));
    assert_eq!(d[&(mono(&p, &["v1"], &[]), mono(&p, &[], &["a0"]))], q(1));
    assert!(coproduct_o(&p, &OMono::pure_a(vec![])).is_err());
}

/// Transposition-chain oracle for Δ_o: move the selected v's left one
/// adjacent swap at a time, then move the remaining v's past a_1..a_t.
fn coproduct_oracle(p: &Pair, m: &OMono) -> BTreeMap<(OMono, OMono), Q> {
    let mut out = BTreeMap::new();
    let (k, n) = (m.k(), m.n());
    for mask in 0u32..1 << k {
        let first: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let rest: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
        for t in 0..=n {
            if (first.len(), t) == (0, 0) || (first.len(), t) == (k, n) {
                continue;
            }
            // items: v's then a's; target order first-v's, a_1..a_t, rest-v's, a_{t+1}..
            let mut items: Vec<(bool, usize)> = (0..k).map(|i| (true, i)).chain((0..n).map(|j| (false, j))).collect();
            let target: Vec<(bool, usize)> = first
                .iter()
                .map(|i| (true, *i))
                .chain((0..t).map(|j| (false, j)))
                .chain(rest.iter().map(|i| (true, *i)))
                .chain((t..n).map(|j| (false, j)))
                .collect();
            let par = |it: &(bool, usize)| if it.0 { p.vpar(&m.v[it.1]) } else { p.apar(m.a[it.1]) };
            let mut sign = 1i64;
            // bubble sort toward target
            for pos in 0..items.len() {
                let at = items.iter().position(|x| *x == target[pos]).unwrap();
                for j in (pos..at).rev() {
                    if par(&items[j]) && par(&items[j + 1]) {
                        sign = -sign;
                    }
                    items.swap(j, j + 1);
                }
            }
            let l = OMono { v: first.iter().map(|i| m.v[*i].clone()).collect(), a: m.a[..t].to_vec() };
            let r = OMono { v: rest.iter().map(|i| m.v[*i].clone()).collect(), a: m.a[t..].to_vec() };
            acc(&mut out, (l, r), q(sign));
        }
    }
    out
}

#[test]
fn coproduct_matches_transposition_oracle() {
    let p = toy_pair();
    for m in o_monomials(&p, 4, 0, |_| true) {
        assert_eq!(coproduct_o(&p, &m).unwrap(), coproduct_oracle(&p, &m), "{}", m.label(&p));
    }
}

type Triple = BTreeMap<(OMono, OMono, OMono), Q>;

#[test]
fn coassociativity() {
    let p = toy_pair();
    for m in o_monomials(&p, 4, 0, |_| true) {
        let d = coproduct_o(&p, &m).unwrap();
        let mut left = Triple::new();
        let mut right = Triple::new();
        for ((x, y), c) in &d {
            if x.is_valid() {
                for ((x1, x2), c2) in coproduct_o(&p, x).unwrap() {
                    acc(&mut left, (x1, x2, y.clone()), c * c2);
                }
            }
            if y.is_valid() {
                for ((y1, y2), c2) in coproduct_o(&p, y).unwrap() {
                    acc(&mut right, (x.clone(), y1, y2), c * c2);
                }
            }
        }
        assert_eq!(left, right, "{}", m.label(&p));
    }
}

#[test]
fn comodule_property() {
    let p = toy_pair();
    for m in o_monomials(&p, 4, 0, |_| true) {
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        for ((s, r), c) in mu_left(&p, &m).unwrap() {
            for ((s1, s2), c2) in coproduct_sym(&p, &s) {
                acc(&mut left, (s1, s2, r.clone()), &c * c2);
            }
            if r.is_valid() {
                for ((s2, r2), c2) in mu_left(&p, &r).unwrap() {
                    acc(&mut right, (s.clone(), s2, r2), &c * c2);
                }
            }
        }
        assert_eq!(left, right, "{}", m.label(&p));
        // μ_r is μ_l with the factors switched (up to the Koszul sign of the swap)
        let l = mu_left(&p, &m).unwrap();
        let r = mu_right(&p, &m).unwrap();
        assert_eq!(l.len(), r.len());
    }
}

fn check_coderivation(q: &Coderivation, total: usize) {
    let p = &q.pair;
    for m in o_monomials(p, total, 0, |_| true) {
        let mut lhs = BTreeMap::new();
        for (x, c) in q.hat_o(&m) {
            for (k2, c2) in coproduct_o(p, &x).unwrap() {
                acc(&mut lhs, k2, &c * c2);
            }
        }
        let mut rhs = BTreeMap::new();
        for ((l, r), c) in coproduct_o(p, &m).unwrap() {
            if l.is_valid() {
                for (x, c2) in q.hat_o(&l) {
                    acc(&mut rhs, (x, r.clone()), &c * c2);
                }
            }
            if r.is_valid() {
                let s = sgn(odd(q.degree * l.degree(p)));
                for (x, c2) in q.hat_o(&r) {
                    acc(&mut rhs, (l.clone(), x), &c * c2 * q_sign(s));
                }
            }
        }
        assert_eq!(lhs, rhs, "coderivation identity fails on {}", m.label(p));
    }
}

#[test]
fn extension_is_a_coderivation() {
    let p = toy_pair();
    for seed in 0..4 {
        check_coderivation(&random_coder(&p, 1, 3, seed, true, true, true), 3);
        check_coderivation(&random_coder(&p, 0, 3, seed + 10, false, false, true), 3);
    }
}

#[test]
fn hat_examples() {
    let p = toy_pair();
    // zero structure
    let z = random_coder(&p, 1, 3, 1, false, false, false);
    assert!(z.hat_o(&mono(&p, &["v0"], &["a0", "a1"])).is_empty());
    // single Q^o(v1;) = a0 → one third-sum term with p = 0, t = 1 and sign +
    let mut to = TableO::default();
    to.map.insert(mono(&p, &["v1"], &[]), [(0u32, q(1))].into_iter().collect());
    let qq = Coderivation { pair: p.clone(), c: None, o: Arc::new(to), degree: 1, cutoff: Cutoffs::new(3, 0) };
    let h = qq.hat_o(&mono(&p, &["v1"], &[]));
    assert_eq!(h.len(), 1);
    assert_eq!(h[&mono(&p, &[], &["a0"])], q(1));
}

/// Binary product only: Q̂(a1,a2,a3) against the bar-differential expansion.
#[test]
fn hat_of_binary_product_is_bar_differential() {
    let p = toy_pair();
    let qq = random_coder(&p, 1, 2, 7, false, true, false);
    let m2 = |x: u32, y: u32| qq.o.eval(&OMono::pure_a(vec![x, y]));
    for m in o_monomials(&p, 3, 0, |m| m.v.is_empty() && m.n() == 3) {
        let a = &m.a;
        let mut expect = OSum::new();
        // (−1)^{Σ_{l<i}(|a_l|+1)} (.., m2(a_i, a_{i+1}), ..)
        let mut pre = false;
        for i in 0..2 {
            for (b, c) in m2(a[i], a[i + 1]) {
                let mut na = a[..i].to_vec();
                na.push(b);
                na.extend_from_slice(&a[i + 2..]);
                acc(&mut expect, OMono::pure_a(na), c * q(sgn(pre)));
            }
            pre ^= p.apar(a[i]);
        }
        // Q^o(a_i) unary terms are absent: the table has only binary pure entries
        let got: OSum = qq.hat_o(&m).into_iter().filter(|(k, _)| k.n() == 2).collect();
        assert_eq!(got, expect);
    }
}

#[test]
fn ger_covee_counts() {
    for k in 1..=5 {
        let n: usize = (1..=k).product();
        assert_eq!(ger_covee_shapes(k).len(), n);
    }
}

#[test]
fn tautological_squares_to_zero() {
    for a in [ground_field(), dual_numbers()] {
        let qq = build_tautological_ocha(&a, Cutoffs::new(3, 3)).unwrap();
        let r = q_square_check(&qq);
        assert!(r.is_empty(), "{:?}", &r.violations[..r.violations.len().min(3)]);
        assert!(r.checked > 0);
    }
    // other normalizations of l_2 fail
    for kappa in [1, 2, -2] {
        let qq = tautological_with(&dual_numbers(), Cutoffs::new(3, 3), q(kappa));
        assert!(!q_square_check(&qq).is_empty());
    }
}

#[test]
fn non_associative_product_is_caught() {
    let mut a = dual_numbers();
    a.m.add(vec![0, 1], 0, q(1));
    assert!(build_tautological_ocha(&a, Cutoffs::new(3, 2)).is_err());
    let qq = tautological_with(&a, Cutoffs::new(3, 2), q(KAPPA));
    let r = q_square_check(&qq);
    assert!(r.violations.iter().any(|v| v.color == 'o' && v.monomial.starts_with("(;") && v.monomial.matches(',').count() == 2));
}

#[test]
fn zero_structure() {
    let p = toy_pair();
    let z = random_coder(&p, 1, 3, 1, false, false, false);
    assert!(q_square_check(&z).is_empty());
}

#[test]
fn tautological_extracts_identity() {
    let a = dual_numbers();
    let qq = build_tautological_ocha(&a, Cutoffs::new(3, 3)).unwrap();
    let u = extract_linf(&qq);
    let vb = qq.pair.v.basis(3);
    for v in &vb {
        let c = u.component(std::slice::from_ref(v), 4);
        assert_eq!(c, Cochain::elementary(v[1..].to_vec(), v[0], q(1)));
    }
    for v in &vb[..6] {
        for w in &vb[..6] {
            assert!(u.component(&[v.clone(), w.clone()], 3).is_zero());
        }
    }
    let qc = qq.c.clone().unwrap();
    assert!(linf_coherence_check(&u, qc.as_ref(), &a).is_empty());
    // the unhalved quadratic term does not hold
    assert!(!linf_coherence_check_scaled(&u, qc.as_ref(), &a, &q(1)).is_empty());
}

#[test]
fn zero_morphism_is_coherent() {
    let a = dual_numbers();
    let qq = build_tautological_ocha(&a, Cutoffs::new(3, 2)).unwrap();
    let u = LInfinityMorphism { pair: qq.pair.clone(), data: Arc::new(ZeroO), cutoff: qq.cutoff };
    assert!(linf_coherence_check(&u, qq.c.as_ref().unwrap().as_ref(), &a).is_empty());
}

#[test]
fn explicit_o_part_values() {
    let a = dual_numbers();
    let o = build_explicit_o_part(&a).unwrap();
    let p = cochain_pair(&a.space);
    let x = 1u32;
    assert_eq!(o.eval(&OMono::pure_a(vec![x, 0])), [(1u32, q(-1))].into_iter().collect());
    let pk = CochainSpace::key(&[0], 1);
    let rk = CochainSpace::key(&[], 0);
    assert!(o.eval(&canon(&p, vec![pk.clone(), rk.clone()], vec![0]).unwrap().0).is_empty());
    assert_eq!(o.eval(&OMono { v: vec![rk], a: vec![] }), [(0u32, q(1))].into_iter().collect());
    assert_eq!(o.eval(&OMono { v: vec![pk.clone()], a: vec![0] }), [(1u32, q(1))].into_iter().collect());
    assert!(o.eval(&OMono { v: vec![pk], a: vec![1] }).is_empty());
    let qq = explicit_structure(&a, Cutoffs::new(3, 3)).unwrap();
    assert!(q_square_check(&qq).is_empty());
    let mut g = a.clone();
    g.space = GradedSpace::new("A", vec![("1".into(), 0), ("x".into(), 1)]).unwrap();
    assert!(build_explicit_o_part(&g).is_err());
}

#[test]
fn json_table_round_trip() {
    let p = toy_pair();
    let qq = random_coder(&p, 1, 2, 3, true, true, true);
    let j = tabulate(&qq);
    let s = serde_json::to_string(&j).unwrap();
    let back: JsonCoderivation = serde_json::from_str(&s).unwrap();
    let q2 = back.build(Cutoffs::new(2, 0)).unwrap();
    for m in qq.o_domain() {
        assert_eq!(qq.o.eval(&m), q2.o.eval(&m));
    }
    for s in qq.c_domain() {
        assert_eq!(qq.c.as_ref().unwrap().linf(&s), q2.c.as_ref().unwrap().linf(&s));
    }
    let rule = JsonCoderivation {
        rule: Some("tautological_ocha".into()),
        algebra: Some(dual_numbers().to_json()),
        v_basis: vec![],
        a_basis: vec![],
        entries: vec![],
        degree: 1,
        cutoff: None,
    };
    assert!(q_square_check(&rule.build(Cutoffs::new(2, 2)).unwrap()).is_empty());
    let mut bad = rule.clone();
    bad.rule = Some("nope".into());
    assert!(bad.build(Cutoffs::new(2, 2)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn random_coderivations_extend(seed in any::<u64>(), deg in 0i64..2) {
        let p = toy_pair();
        check_coderivation(&random_coder(&p, deg, 3, seed, deg == 1, deg == 1, true), 3);
    }
}

/// Sparse random degree-0 homotopy vanishing on pure monomials.
pub(crate) fn random_psi(p: &Pair, cutoff: Cutoffs, seed: u64) -> Coderivation {
    let mut rng = Lcg(seed);
    let mut to = TableO::default();
    for m in o_monomials(p, cutoff.total, cutoff.vsize, |m| !m.v.is_empty()) {
        let target = m.degree(p) + 1;
        let mut val = AVec::new();
        for b in 0..p.a.dim() as u32 {
            if p.adeg(b) == target && rng.next().abs() == 2 {
                acc(&mut val, b, q(rng.next()));
            }
        }
        if !val.is_empty() {
            to.map.insert(m, val);
        }
    }
    Coderivation { pair: p.clone(), c: None, o: Arc::new(to), degree: 0, cutoff }
}

#[test]
fn zero_homotopy_is_identity() {
    let a = dual_numbers();
    let qq = build_tautological_ocha(&a, Cutoffs::new(3, 3)).unwrap();
    let z = Coderivation { pair: qq.pair.clone(), c: None, o: Arc::new(ZeroO), degree: 0, cutoff: qq.cutoff };
    let q2 = homotopy_conjugate(&qq, &z).unwrap();
    for m in qq.o_domain() {
        assert_eq!(q2.o.eval(&m), qq.o.eval(&m));
    }
}

#[test]
fn homotopy_validation() {
    let p = toy_pair();
    let bad_deg = random_coder(&p, 1, 2, 3, false, false, true);
    assert!(matches!(validate_homotopy(&bad_deg), Err(Error::Input(_))));
    let pure = random_coder(&p, 0, 2, 3, false, true, false);
    assert!(matches!(validate_homotopy(&pure), Err(Error::Math(_))));
}

fn homotopy_round(seed: u64) {
    let a = dual_numbers();
    let cut = Cutoffs::new(3, 3);
    let qq = build_tautological_ocha(&a, cut).unwrap();
    let psi = random_psi(&qq.pair, cut, seed);
    let q2 = homotopy_conjugate(&qq, &psi).unwrap();
    let r = q_square_check(&q2);
    assert!(r.is_empty(), "seed {seed}: {:?}", &r.violations[..r.violations.len().min(3)]);
    for m in qq.o_domain().into_iter().filter(|m| m.v.is_empty()) {
        assert_eq!(q2.o.eval(&m), qq.o.eval(&m));
    }
    let u2 = linf_gauge_action(&extract_linf(&qq), &theta_from_psi(&psi), qq.c.clone(), &a).unwrap();
    let direct = extract_linf(&q2);
    assert!(qq.o_domain().iter().any(|m| q2.o.eval(m) != qq.o.eval(m)), "seed {seed}: ψ acted trivially");
    for vs in qq.c_domain() {
        let top = cut.total - vs.len();
        assert_eq!(u2.component(&vs, top), direct.component(&vs, top), "seed {seed}, k = {}", vs.len());
    }
}

#[test]
fn homotopies_preserve_the_structure() {
    for seed in 1..4 {
        homotopy_round(seed);
    }
}

fn morphism_from(src: &Coderivation) -> SCoalgebraMorphism {
    SCoalgebraMorphism {
        src: src.pair.clone(),
        tgt: src.pair.clone(),
        tc: src.c.clone().unwrap_or_else(|| Arc::new(IdentityC)),
        to: src.o.clone(),
        cutoff: src.cutoff,
        c_filter: None,
    }
}

#[test]
fn extension_is_a_coalgebra_morphism() {
    let p = toy_pair();
    for seed in 0..3 {
        let t = morphism_from(&random_coder(&p, 0, 3, seed, true, true, true));
        for m in o_monomials(&p, 3, 0, |_| true) {
            let mut lhs = BTreeMap::new();
            for (x, c) in t.hat_o(&m) {
                for (k2, c2) in coproduct_o(&p, &x).unwrap() {
                    acc(&mut lhs, k2, &c * c2);
                }
            }
            let mut rhs = BTreeMap::new();
            for ((l, r), c) in coproduct_o(&p, &m).unwrap() {
                for (x, c1) in t.hat_o(&l) {
                    for (y, c2) in t.hat_o(&r) {
                        acc(&mut rhs, (x.clone(), y), &c * &c1 * c2);
                    }
                }
            }
            assert_eq!(lhs, rhs, "seed {seed}: {}", m.label(&p));
        }
    }
}

#[test]
fn identity_morphism_is_compatible() {
    let a = dual_numbers();
    let qq = build_tautological_ocha(&a, Cutoffs::new(3, 2)).unwrap();
    let id = SCoalgebraMorphism::identity(&qq.pair, qq.cutoff);
    let r = morphism_compatibility_check(&id, &qq, &qq);
    assert!(r.is_empty() && r.checked > 0);
    assert!(r.sub_check("k=1").unwrap().is_empty());
    let p = toy_pair();
    let rq = random_coder(&p, 1, 3, 9, true, true, true);
    assert!(morphism_compatibility_check(&SCoalgebraMorphism::identity(&p, rq.cutoff), &rq, &rq).is_empty());
}

/// e^{ψ̂} intertwines Q̂ and its conjugate; its projection, extended by the
/// morphism formula, must reproduce e^{ψ̂} itself.
#[test]
fn exponential_of_homotopy_is_a_morphism() {
    let a = dual_numbers();
    let cut = Cutoffs::new(3, 2);
    let qq = build_tautological_ocha(&a, cut).unwrap();
    let psi = random_psi(&qq.pair, cut, 5);
    let q2 = homotopy_conjugate(&qq, &psi).unwrap();
    let mut to = TableO::default();
    let dom = qq.o_domain();
    let expo = |m: &OMono| exp_apply(&psi, &[(m.clone(), q(1))].into_iter().collect(), 1).unwrap();
    for m in &dom {
        let v: AVec = expo(m).into_iter().filter(|(k, _)| k.v.is_empty() && k.a.len() == 1).map(|(k, c)| (k.a[0], c)).collect();
        to.map.insert(m.clone(), v);
    }
    let t = SCoalgebraMorphism { src: qq.pair.clone(), tgt: qq.pair.clone(), tc: Arc::new(IdentityC), to: Arc::new(to), cutoff: cut, c_filter: None };
    for m in &dom {
        assert_eq!(t.hat_o(m), expo(m), "{}", m.label(&qq.pair));
    }
    let r = morphism_compatibility_check(&t, &qq, &q2);
    assert!(r.is_empty(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    // and not with the unconjugated structure
    assert!(!morphism_compatibility_check(&t, &qq, &qq).is_empty());
}

#[test]
fn ocha_substructure() {
    let a = dual_numbers();
    assert!(validate_ocha_substructure(&build_tautological_ocha(&a, Cutoffs::new(2, 2)).unwrap()));
    let p = toy_pair();
    assert!(validate_ocha_substructure(&random_coder(&p, 1, 2, 1, false, false, false)));
    let pp = PolyPair::new(1, 2).unwrap();
    let f = LInfinityMorphism { pair: pp.pair.clone(), data: Arc::new(HkrO::new(&pp)), cutoff: Cutoffs::new(3, 2) };
    assert!(!validate_ocha_substructure(&linf_to_gerplus(&f, &pp.m)));
}

fn hkr_setup(d: usize, top: usize, total: usize) -> (PolyPair, LInfinityMorphism, Coderivation) {
    let pp = PolyPair::new(d, top).unwrap();
    let f = LInfinityMorphism { pair: pp.pair.clone(), data: Arc::new(HkrO::new(&pp)), cutoff: Cutoffs::new(total, top) };
    let qf = linf_to_gerplus(&f, &pp.m);
    (pp, f, qf)
}

use crate::hochschild::poly::{hkr_cochain, PolyCochain, PolyvectorAlgebra, Mono as PMono};

/// Standard Gerstenhaber composition on polynomial cochains, evaluated pointwise.
fn oracle_circ(p: &PolyCochain, pa: usize, r: &PolyCochain, ra: usize, t: &[PMono]) -> BTreeMap<PMono, Q> {
    let mut out = BTreeMap::new();
    for i in 0..pa {
        for (x, c) in r.eval(&t[i..i + ra]) {
            let mut tt = t[..i].to_vec();
            tt.push(x);
            tt.extend_from_slice(&t[i + ra..]);
            let sgn_ = if (i * (ra + 1)) % 2 == 1 { -1 } else { 1 };
            for (y, c2) in p.eval(&tt) {
                acc(&mut out, y, &c * c2 * q(sgn_));
            }
        }
    }
    out
}

/// (hkr[γ1, γ2]_SN)(t) and [hkr γ1, hkr γ2](t), straight from the polynomial routines.
fn hkr_oracle(d: usize, g1: &VKey, g2: &VKey, t: &[PMono]) -> (BTreeMap<PMono, Q>, BTreeMap<PMono, Q>) {
    let pa = PolyvectorAlgebra::new(d, 10).unwrap();
    let one = |v: &VKey| PolyvectorSpace::to_pv(&[(v.clone(), q(1))].into_iter().collect());
    let (p1, p2) = (one(g1), one(g2));
    let (a1, a2) = (g1[0].count_ones() as usize, g2[0].count_ones() as usize);
    let br = pa.schouten_bracket(&p1, &p2).unwrap();
    let x = if br.terms.is_empty() { BTreeMap::new() } else { hkr_cochain(&pa, &br, 10).unwrap().eval(t) };
    let (h1, h2) = (hkr_cochain(&pa, &p1, 10).unwrap(), hkr_cochain(&pa, &p2, 10).unwrap());
    let mut y = oracle_circ(&h1, a1, &h2, a2, t);
    let s = if ((a1 + 1) * (a2 + 1)) % 2 == 1 { -1 } else { 1 };
    for (m, c) in oracle_circ(&h2, a2, &h1, a1, t) {
        acc(&mut y, m, c * q(-s));
    }
    (x, y)
}

#[test]
fn hkr_one_variable() {
    let (pp, f, qf) = hkr_setup(1, 2, 3);
    assert!(q_square_check(&qf).is_empty());
    assert!(linf_coherence_check(&f, &PolyvectorC::new(1), &pp.m).is_empty());
}

/// The k = 2 coherence defect of HKR equals [hkr γ1, hkr γ2] − hkr[γ1, γ2]_SN,
/// computed from the polynomial routines alone.
#[test]
fn hkr_two_variables_defect() {
    let d = 2;
    let (pp, f, qf) = hkr_setup(d, 2, 3);
    let pc = PolyvectorC::new(d);
    let vb = pp.pair.v.basis(2);
    let mut nonzero = 0;
    for g1 in &vb {
        for g2 in vb.iter().filter(|g2| *g2 >= g1) {
            let vs = vec![g1.clone(), g2.clone()];
            let n = (g1[0].count_ones() + g2[0].count_ones()) as usize;
            if n == 0 || pp.pair.v.size(g1) + pp.pair.v.size(g2) > 2 {
                continue;
            }
            let dd = coherence_defect(&f, &pc, &pp.m, &vs, n - 1, &Q::new(1.into(), 2.into()));
            for t in all_tuples_(pp.monos.len() as u32, n - 1) {
                if !pp.pair.in_window(&vs, &t) {
                    continue;
                }
                let tm: Vec<PMono> = t.iter().map(|i| pp.monos[*i as usize].clone()).collect();
                let (x, mut y) = hkr_oracle(d, g1, g2, &tm);
                for (m, c) in x {
                    acc(&mut y, m, -c);
                }
                let ours: BTreeMap<PMono, Q> = dd.eval(&t).into_iter().map(|(b, c)| (pp.monos[b as usize].clone(), c)).collect();
                assert_eq!(ours, y, "{} {} {:?}", pp.pair.v.label(g1), pp.pair.v.label(g2), tm);
                nonzero += (!ours.is_empty()) as usize;
            }
        }
    }
    assert!(nonzero > 0);
    let coh = linf_coherence_check(&f, &pc, &pp.m);
    let r = q_square_check(&qf);
    assert!(!coh.is_empty());
    assert_eq!(r.violations.iter().filter(|v| v.color == 'o').count(), coh.len());
}

#[test]
fn hkr_single_argument_matches_cochain() {
    let pp = PolyPair::new(2, 3).unwrap();
    let h = HkrO::new(&pp);
    let pa = PolyvectorAlgebra::new(2, 10).unwrap();
    for g in pp.pair.v.basis(3) {
        let j = g[0].count_ones() as usize;
        let pv = PolyvectorSpace::to_pv(&[(g.clone(), q(1))].into_iter().collect());
        let c = hkr_cochain(&pa, &pv, 10).unwrap();
        for t in all_tuples_(pp.monos.len() as u32, j) {
            if !pp.pair.in_window(std::slice::from_ref(&g), &t) {
                continue;
            }
            let tm: Vec<PMono> = t.iter().map(|i| pp.monos[*i as usize].clone()).collect();
            let ours: BTreeMap<PMono, Q> =
                h.eval(&OMono { v: vec![g.clone()], a: t.clone() }).into_iter().map(|(b, c)| (pp.monos[b as usize].clone(), c)).collect();
            assert_eq!(ours, c.eval(&tm));
        }
    }
}

#[test]
fn linf_round_trip() {
    let (_, f, qf) = hkr_setup(2, 2, 3);
    let back = extract_linf(&qf);
    for vs in qf.c_domain() {
        assert_eq!(back.component(&vs, 3 - vs.len()), f.component(&vs, 3 - vs.len()));
    }
}

/// T^c = HKR into cochains of ℚ[x]/(x³), T^o = identity on single a's, between
/// Q_F on (polyvectors, functions) and the tautological structure.
#[test]
fn strict_polyvector_morphism() {
    let (pp, f, qf) = hkr_setup(1, 2, 3);
    let taut = build_tautological_ocha(&pp.m, Cutoffs::new(3, 3)).unwrap();
    let src = pp.pair.clone();
    let filt_src = src.clone();
    let t = SCoalgebraMorphism {
        src: src.clone(),
        tgt: taut.pair.clone(),
        tc: Arc::new(CochainImage { src: src.clone(), f: f.data.clone(), max_arity: 3 }),
        to: Arc::new(IdentityA),
        cutoff: qf.cutoff,
        c_filter: Some(Arc::new(move |vs: &[VKey], key: &VKey| filt_src.in_window(vs, &key[1..]))),
    };
    let r = morphism_compatibility_check(&t, &qf, &taut);
    assert!(r.checked > 0);
    assert!(r.is_empty(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    assert!(r.sub_check("k=1").unwrap().is_empty());
    assert!(r.sub_check("k>=2").unwrap().is_empty());
    // T^o(a) = a, T^o(a_1..a_n) = 0 for n > 1
    let a1 = OMono::pure_a(vec![1]);
    assert_eq!(t.hat_o(&a1), [(a1.clone(), q(1))].into_iter().collect());
    assert!(t.to.eval(&OMono::pure_a(vec![1, 1])).is_empty());
    // a degree-0 perturbation T^o(x∂_x;) = 1 breaks the k = 1 equation
    let mut bad = t.clone();
    let mut tab = TableO::default();
    let g = src.v.parse("x[1]d[0]").unwrap();
    tab.map.insert(OMono { v: vec![g], a: vec![] }, [(0u32, q(1))].into_iter().collect());
    bad.to = Arc::new(LinComb(vec![(q(1), Arc::new(IdentityA)), (q(1), Arc::new(tab))]));
    let r = morphism_compatibility_check(&bad, &qf, &taut);
    assert!(!r.is_empty());
    // that one is central, so the k = 1 equation cannot see it; a shifted T^c can
    struct Shifted(Arc<dyn CPart>, VKey, VKey);
    impl CPart for Shifted {
        fn linf(&self, vs: &[VKey]) -> VVec {
            let mut out = self.0.linf(vs);
            if vs == [self.1.clone()] {
                acc(&mut out, self.2.clone(), q(1));
            }
            out
        }
    }
    let mut bad = t.clone();
    bad.tc = Arc::new(Shifted(t.tc.clone(), src.v.parse("x[1]d[0]").unwrap(), CochainSpace::key(&[0], 0)));
    let r = morphism_compatibility_check(&bad, &qf, &taut);
    assert!(!r.is_empty());
    assert!(!r.sub_check("k=1").unwrap().is_empty());
}
