use super::*;
use crate::hochschild::{coeff_to_json, json_coeff, AInfinityStructure, JsonAlgebra, JsonBasis, JsonTerm};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Extensional o-part: canonical monomial → value.
#[derive(Clone, Debug, Default)]
pub struct TableO {
    pub map: HashMap<OMono, AVec>,
}

impl OPart for TableO {
    fn eval(&self, m: &OMono) -> AVec {
        self.map.get(m).cloned().unwrap_or_default()
    }
}

/// Extensional c-part.
#[derive(Clone, Debug, Default)]
pub struct TableC {
    pub linf: HashMap<SymMono, VVec>,
    pub product: HashMap<(VKey, VKey), VVec>,
    pub other: Vec<(GerCoMonomial, VVec)>,
}

impl CPart for TableC {
    fn linf(&self, vs: &[VKey]) -> VVec {
        self.linf.get(vs).cloned().unwrap_or_default()
    }
    fn product(&self, a: &VKey, b: &VKey) -> VVec {
        self.product.get(&(a.clone(), b.clone())).cloned().unwrap_or_default()
    }
    fn has_product(&self) -> bool {
        !self.product.is_empty()
    }
    fn other(&self) -> Vec<(GerCoMonomial, VVec)> {
        self.other.clone()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonSEntry {
    pub v_part: Vec<String>,
    #[serde(default)]
    pub a_part: Vec<String>,
    pub value: Vec<JsonTerm>,
    /// "o" (default) or "c".
    #[serde(default)]
    pub color: Option<String>,
    /// c-entries only: the binary co-Lie (product) component instead of l_k.
    #[serde(default)]
    pub product: bool,
    /// c-entries only: explicit Ger∨ words over positions of `v_part`.
    #[serde(default)]
    pub words: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JsonCutoff {
    pub total: usize,
    pub vsize: usize,
}

/// JSON coderivation: either a registered rule over an algebra, or tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonCoderivation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<JsonAlgebra>,
    #[serde(default)]
    pub v_basis: Vec<JsonBasis>,
    #[serde(default)]
    pub a_basis: Vec<JsonBasis>,
    #[serde(default)]
    pub entries: Vec<JsonSEntry>,
    #[serde(default = "one")]
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<JsonCutoff>,
}

fn one() -> i64 {
    1
}

pub const RULES: &[&str] = &["tautological_ocha", "explicit_o_part"];

fn terms_a(sp: &GradedSpace, ts: &[JsonTerm]) -> Result<AVec> {
    let mut v = AVec::new();
    for t in ts {
        acc(&mut v, sp.index_of(&t.label)? as u32, json_coeff(t)?);
    }
    Ok(v)
}

fn terms_v(sp: &dyn VSpace, ts: &[JsonTerm]) -> Result<VVec> {
    let mut v = VVec::new();
    for t in ts {
        acc(&mut v, sp.parse(&t.label)?, json_coeff(t)?);
    }
    Ok(v)
}

impl JsonCoderivation {
    pub fn build(&self, default_cutoff: Cutoffs) -> Result<Coderivation> {
        let cutoff = self.cutoff.map_or(default_cutoff, |c| Cutoffs::new(c.total, c.vsize));
        if let Some(rule) = &self.rule {
            let alg = self.algebra.as_ref().ok_or_else(|| Error::input(format!("rule {rule:?} needs an \"algebra\"")))?;
            let a = AInfinityStructure::from_json(alg, cutoff.total.max(2))?;
            return match rule.as_str() {
                "tautological_ocha" => build_tautological_ocha(&a, cutoff),
                "explicit_o_part" => explicit_structure(&a, cutoff),
                _ => Err(Error::input(format!("unknown rule {rule:?}; known: {RULES:?}"))),
            };
        }
        let vs = GradedSpace::new("V", self.v_basis.iter().map(|b| (b.label.clone(), b.degree)).collect())?;
        let a = GradedSpace::new("A", self.a_basis.iter().map(|b| (b.label.clone(), b.degree)).collect())?;
        let pair = Pair::new(Arc::new(TableSpace { sp: vs }), a);
        let mut to = TableO::default();
        let mut tc = TableC::default();
        let mut has_c = false;
        for e in &self.entries {
            let v: Vec<VKey> = e.v_part.iter().map(|l| pair.v.parse(l)).collect::<Result<_>>()?;
            let color = e.color.as_deref().unwrap_or("o");
            match color {
                "o" => {
                    let av: Vec<u32> = e.a_part.iter().map(|l| pair.a.index_of(l).map(|i| i as u32)).collect::<Result<_>>()?;
                    if v.is_empty() && av.is_empty() {
                        return Err(Error::input("o-entry with empty monomial"));
                    }
                    let val = terms_a(&pair.a, &e.value)?;
                    if let Some((m, s)) = canon(&pair, v, av) {
                        let slot = to.map.entry(m).or_default();
                        acc_all(slot, &val, &q_sign(s));
                    }
                }
                "c" => {
                    has_c = true;
                    if !e.a_part.is_empty() || v.is_empty() {
                        return Err(Error::input("c-entry needs v's and no a's"));
                    }
                    let val = terms_v(pair.v.as_ref(), &e.value)?;
                    if e.product {
                        if v.len() != 2 {
                            return Err(Error::input("product entry must be binary"));
                        }
                        let (x, y) = (v[0].clone(), v[1].clone());
                        let s = sgn(pair.vpar(&x) && pair.vpar(&y));
                        tc.product.insert((x.clone(), y.clone()), val.clone());
                        tc.product.entry((y, x)).or_insert_with(|| scale(&val, s));
                    } else if let Some(w) = &e.words {
                        tc.other.push((GerCoMonomial { v, words: w.clone() }, val));
                    } else if let Some((m, s)) = canon(&pair, v, vec![]) {
                        let slot = tc.linf.entry(m.v).or_default();
                        acc_all(slot, &val, &q_sign(s));
                    }
                }
                other => return Err(Error::input(format!("unknown color {other:?}"))),
            }
        }
        Ok(Coderivation {
            pair,
            c: has_c.then(|| Arc::new(tc) as Arc<dyn CPart>),
            o: Arc::new(to),
            degree: self.degree,
            cutoff,
        })
    }
}

/// Tabulates a coderivation with a finite V over its cutoff domain.
pub fn tabulate(q: &Coderivation) -> JsonCoderivation {
    let p = &q.pair;
    let basis_json = |labels: Vec<(String, i64)>| labels.into_iter().map(|(label, degree)| JsonBasis { label, degree }).collect();
    let vb = p.v.basis(q.cutoff.vsize);
    let mut entries = Vec::new();
    for m in q.o_domain() {
        let val = q.o.eval(&m);
        if !val.is_empty() {
            entries.push(JsonSEntry {
                v_part: m.v.iter().map(|x| p.v.label(x)).collect(),
                a_part: m.a.iter().map(|x| p.a.label(*x as usize).to_string()).collect(),
                value: val.iter().map(|(b, x)| coeff_to_json(p.a.label(*b as usize), x)).collect(),
                color: None,
                product: false,
                words: None,
            });
        }
    }
    if let Some(c) = &q.c {
        for s in q.c_domain() {
            let val = c.linf(&s);
            if !val.is_empty() {
                entries.push(JsonSEntry {
                    v_part: s.iter().map(|x| p.v.label(x)).collect(),
                    a_part: vec![],
                    value: val.iter().map(|(b, x)| coeff_to_json(&p.v.label(b), x)).collect(),
                    color: Some("c".into()),
                    product: false,
                    words: None,
                });
            }
        }
    }
    JsonCoderivation {
        rule: None,
        algebra: None,
        v_basis: basis_json(vb.iter().map(|x| (p.v.label(x), p.v.degree(x))).collect()),
        a_basis: basis_json((0..p.a.dim()).map(|i| (p.a.label(i).to_string(), p.a.degree(i))).collect()),
        entries,
        degree: q.degree,
        cutoff: Some(JsonCutoff { total: q.cutoff.total, vsize: q.cutoff.vsize }),
    }
}
