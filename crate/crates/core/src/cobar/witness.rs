//! The non-formality certificate.
//!
//! Named elements are read through planar presentations: Δ_o with slots
//! (u, w) is the basis vector e_(u,w) with the orientation line in label
//! order; a composite cooperation such as (ρ⊗id)Δ_o is the basis element
//! whose cocomposition has coefficient +1 on that two- (or three-) vertex
//! tree; a cobar composite x ∘ y is s x ⊗ s y, outer vertex first.

use super::tree::canonical;
use super::*;
use num_traits::One;
use serde_json::json;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub witness: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub operad: String,
    pub checks: Vec<CheckResult>,
    pub conclusion: String,
}

impl Certificate {
    pub fn is_nonformal(&self) -> bool {
        self.conclusion == "nonformal"
    }
}

fn node(cluster: &[u32], out: Color, order: &[u32], omega: &[Edge]) -> Node {
    Node { cluster: cluster.to_vec(), out, elem: CoElem { order: order.to_vec(), omega: omega.to_vec() } }
}

/// Cobar composite: the tensor of shifted vertices in the given order.
fn composite(table: &CooperadTable, sig: &Signature, nodes: Vec<Node>) -> Element {
    let (t, _) = canonical(nodes.iter().map(|n| (n.clone(), false)).collect());
    let degs: BTreeMap<(Vec<u32>, Color), i64> = (0..t.nodes.len())
        .map(|i| ((t.nodes[i].cluster.clone(), t.nodes[i].out), CooperadTable::degree(&t.inputs(i, &sig.leaves), t.nodes[i].out, &t.nodes[i].elem)))
        .collect();
    let (t2, odd) = canonical(nodes.into_iter().map(|n| {
        let d = degs[&(n.cluster.clone(), n.out)];
        (n, (d + 1) % 2 != 0)
    }).collect());
    let _ = table;
    let c = if odd { -Q::one() } else { Q::one() };
    single(t2).into_iter().map(|(t, _)| (t, c.clone())).collect()
}

/// Coefficient of the unshifted vertex tensor `target` (outer first, then
/// inner vertices in slot order) in the iterated cocomposition of the
/// single-vertex tree `root`.
fn presentation_coeff(table: &CooperadTable, leaves: &[Color], root: &Node, target: Vec<Node>) -> Result<Q> {
    let t0 = Tree { nodes: vec![root.clone()] };
    // parities of target vertices (unshifted)
    let (tt, _) = canonical(target.iter().map(|n| (n.clone(), false)).collect());
    let deg_of = |n: &Node| -> i64 {
        let i = tt.nodes.iter().position(|m| m == n).unwrap();
        CooperadTable::degree(&tt.inputs(i, leaves), n.out, &n.elem)
    };
    let (tgt, tgt_odd) = canonical(target.iter().map(|n| (n.clone(), deg_of(n) % 2 != 0)).collect());
    let mut found: Option<Q> = None;
    let mut add = |t: Tree, c: Q| {
        if t == tgt {
            let c = if tgt_odd { -c } else { c };
            found = Some(found.clone().unwrap_or_else(Q::zero) + c);
        }
    };
    for s1 in tree::splits_at(table, leaves, &t0, 0) {
        let (t1, o1) = canonical(s1.tensor.iter().map(|(n, d)| (n.clone(), d % 2 != 0)).collect());
        let c1 = if o1 { -s1.coeff.clone() } else { s1.coeff.clone() };
        if target.len() == 2 {
            add(t1, c1);
            continue;
        }
        // one path only: peel the slot-1 vertex first (coassociativity makes
        // the other order agree)
        if s1.tensor[1].0 != target[1] {
            continue;
        }
        let root_i = t1.nodes.iter().position(|m| m.cluster == root.cluster && m.out == root.out).unwrap();
        for s2 in tree::splits_at(table, leaves, &t1, root_i) {
            let (t2, o2) = canonical(s2.tensor.iter().map(|(n, d)| (n.clone(), d % 2 != 0)).collect());
            let c = &c1 * &s2.coeff;
            add(t2, if o2 { -c } else { c });
        }
    }
    found.ok_or_else(|| Error::Internal("presentation not found in the cocomposition".into()))
}

fn scale(x: &Element, c: &Q) -> Element {
    x.iter().map(|(t, v)| (t.clone(), v * c)).collect()
}

fn add_into(acc: &mut Element, x: &Element, c: Q) {
    for (t, v) in x {
        *acc.entry(t.clone()).or_insert_with(Q::zero) += v * &c;
    }
    acc.retain(|_, v| !v.is_zero());
}

fn show(x: &Element, sig: &Signature) -> serde_json::Value {
    json!(x.iter().map(|(t, c)| json!({"tree": t.dump(sig), "coeff": c.to_string()})).collect::<Vec<_>>())
}

/// Coefficients of `x` against named elements (each a single tree up to sign).
fn coords(x: &Element, named: &[(&str, &Element)]) -> (Vec<(String, Q)>, Element) {
    let mut rest = x.clone();
    let mut out = Vec::new();
    for (name, e) in named {
        let (t, c) = e.iter().next().unwrap();
        let v = x.get(t).cloned().unwrap_or_else(Q::zero) / c;
        add_into(&mut rest, e, -v.clone());
        out.push((name.to_string(), v));
    }
    (out, rest)
}

pub fn nonformality_witness(which: Which) -> Result<Certificate> {
    nonformality_witness_with(build_cooperad_tables(which, 3)?)
}

pub fn nonformality_witness_with(table: CooperadTable) -> Result<Certificate> {
    if !matches!(table.which, Which::S | Which::Sc) {
        return Err(Error::input("the certificate is defined for S and sc"));
    }
    let c = Color::C;
    let o = Color::O;
    let mut checks = Vec::new();

    // (c1, o2 → o): X = s(ρ⊗id)Δ_o
    let sig_x = Signature { leaves: vec![c, o], out: o };
    let x_root = node(&[0, 1], o, &[1], &[]);
    let rho1 = node(&[0], o, &[], &[]);
    let k_left = presentation_coeff(&table, &sig_x.leaves, &x_root, vec![node(&[0, 1], o, &[0, 1], &[]), rho1.clone()])?;
    let k_right = presentation_coeff(&table, &sig_x.leaves, &x_root, vec![node(&[0, 1], o, &[1, 0], &[]), rho1.clone()])?;
    let x = scale(&composite(&table, &sig_x, vec![x_root.clone()]), &(Q::one() / &k_left));
    let x_deg = x.keys().next().unwrap().degree(&sig_x);
    let deg_m1 = basis(&table, &sig_x)?.get(&-1).cloned().unwrap_or_default();
    let coh = arity_cohomology(&table, &sig_x, -1)?;
    checks.push(CheckResult {
        name: "a: X has degree -1 and spans degree -1 of (c,o -> o)".into(),
        pass: x_deg == -1 && deg_m1.len() == 1 && coh.cohomology_dim == 0,
        witness: json!({
            "X": show(&x, &sig_x),
            "degree": x_deg,
            "ambient_dim": deg_m1.len(),
            "cohomology_dim": coh.cohomology_dim,
            "presentations_agree": k_left == k_right,
        }),
    });

    // (b) ∂X = sΔ_o ∘_1 sρ + sΔ_o ∘_2 sρ
    let dx = differential(&table, &sig_x, &x);
    let a1 = composite(&table, &sig_x, vec![node(&[0, 1], o, &[0, 1], &[]), rho1.clone()]);
    let a2 = composite(&table, &sig_x, vec![node(&[0, 1], o, &[1, 0], &[]), rho1.clone()]);
    let (cb, rest_b) = coords(&dx, &[("sΔ_o∘_1 sρ", &a1), ("sΔ_o∘_2 sρ", &a2)]);
    checks.push(CheckResult {
        name: "b: ∂X = sΔ_o∘_1 sρ + sΔ_o∘_2 sρ ≠ 0".into(),
        pass: !dx.is_empty() && rest_b.is_empty() && cb.iter().all(|(_, v)| v.is_one()),
        witness: json!({
            "dX": show(&dx, &sig_x),
            "coefficients": cb.iter().map(|(n, v)| json!({"term": n, "computed": v.to_string(), "expected": "1"})).collect::<Vec<_>>(),
        }),
    });

    // (c1, c2 → o): Z = s(ρ⊗ρ)Δ_o = sΔ_c ρ, Y = sρ ∘_1 sΔ_c
    let sig_z = Signature { leaves: vec![c, c], out: o };
    let z_root = node(&[0, 1], o, &[], &[]);
    let k_dc = presentation_coeff(&table, &sig_z.leaves, &z_root, vec![node(&[0, 1], o, &[], &[]), node(&[0, 1], c, &[], &[])])?;
    let k_rr = presentation_coeff(
        &table,
        &sig_z.leaves,
        &z_root,
        vec![node(&[0, 1], o, &[0, 1], &[]), node(&[0], o, &[], &[]), node(&[1], o, &[], &[])],
    )?;
    let z = scale(&composite(&table, &sig_z, vec![z_root.clone()]), &(Q::one() / &k_rr));
    let y = composite(&table, &sig_z, vec![node(&[0, 1], o, &[], &[]), node(&[0, 1], c, &[], &[])]);
    let xk = Q::one() / &k_left;
    let xk_r = Q::one() / &k_right;
    // X ∘_2 sρ: X(c1, ρ(c2)); X ∘_1 sρ: X = s(id⊗ρ)Δ_o with ρ(c1) in its o-slot
    let x2 = scale(&composite(&table, &sig_z, vec![node(&[0, 1], o, &[1], &[]), node(&[1], o, &[], &[])]), &xk);
    let x1 = scale(&composite(&table, &sig_z, vec![node(&[0, 1], o, &[0], &[]), node(&[0], o, &[], &[])]), &xk_r);
    let dz = differential(&table, &sig_z, &z);
    let (cz, rest_z) = coords(&dz, &[("X∘_2 sρ", &x2), ("X∘_1 sρ", &x1), ("Y", &y)]);
    let expected = [Q::one(), -Q::one(), -Q::one()];
    let exact = rest_z.is_empty() && cz.iter().zip(&expected).all(|((_, v), e)| v == e);
    checks.push(CheckResult {
        name: "c: ∂Z = X∘_2 sρ − X∘_1 sρ − Y".into(),
        pass: exact,
        witness: json!({
            "Z": show(&z, &sig_z),
            "dZ": show(&dz, &sig_z),
            "coefficients": cz.iter().zip(&expected).map(|((n, v), e)| json!({"term": n, "computed": v.to_string(), "expected": e.to_string()})).collect::<Vec<_>>(),
            "Z_presentations_agree": k_dc == k_rr,
            "remainder_terms": rest_z.len(),
        }),
    });

    // (d) Y is a cocycle and not a coboundary
    let dy = differential(&table, &sig_z, &y);
    let b = basis(&table, &sig_z)?;
    let empty = Vec::new();
    let src = b.get(&-2).unwrap_or(&empty);
    let tgt = b.get(&-1).unwrap_or(&empty);
    let m = differential_matrix(&table, &sig_z, src, tgt)?;
    let (yt, yc) = y.iter().next().unwrap();
    let mut rhs = vec![Q::zero(); tgt.len()];
    let yi = tgt.iter().position(|t| t == yt).ok_or_else(|| Error::Internal("Y outside the basis".into()))?;
    rhs[yi] = yc.clone();
    let hit = crate::exactlinalg::solve(&m, &rhs)?.is_some();
    checks.push(CheckResult {
        name: "d: Y is a cocycle and not a coboundary".into(),
        pass: dy.is_empty() && !hit,
        witness: json!({
            "Y": show(&y, &sig_z),
            "dY_terms": dy.len(),
            "degree_-2_dim": src.len(),
            "in_image": hit,
        }),
    });

    // the tables themselves: the other checks mean nothing without these
    let coassoc = coassociativity_defects(&table);
    let d2 = d_squared_defects(&table, 3)?;
    checks.push(CheckResult {
        name: "e: coassociativity and ∂² = 0 through arity 3".into(),
        pass: coassoc.is_empty() && d2.is_empty(),
        witness: json!({
            "coassociativity_defects": coassoc.len(),
            "d_squared_defects": d2.len(),
            "first": coassoc.iter().chain(d2.iter()).take(3).collect::<Vec<_>>(),
        }),
    });

    let ok = checks.iter().all(|c| c.pass);
    Ok(Certificate {
        operad: table.which.name().into(),
        checks,
        conclusion: if ok { "nonformal".into() } else { "inconsistent".into() },
    })
}
