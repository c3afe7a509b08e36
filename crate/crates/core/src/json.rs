//! JSON encodings of trees, polynomials, forms, classes and signatures.
//! Integers that may not fit in 64 bits are written as strings; both
//! numbers and strings are accepted on input.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::chow::ChowClass;
use crate::configurations::SectionForm;
use crate::error::{Error, Result};
use crate::exact_geometry::ProjPoint;
use crate::label::{Label, LabelSet};
use crate::operads::Signature;
use crate::polynomials::MultilinearPoly;
use crate::trees::{DecoratedEdge, DecoratedStableTree, M04Point, StableTree};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn bigint_to_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| parse_err(format!("not an integer: {n}"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("not an integer: {s:?}"))),
        other => Err(parse_err(format!("not an integer: {other}"))),
    }
}

fn label_from_json(v: &Value) -> Result<Label> {
    serde_json::from_value(v.clone()).map_err(|e| parse_err(e.to_string()))
}

fn labels_to_json(s: &LabelSet) -> Value {
    serde_json::to_value(s).expect("labels serialize")
}

fn labels_from_json(v: &Value) -> Result<LabelSet> {
    v.as_array()
        .ok_or_else(|| parse_err("expected an array of labels"))?
        .iter()
        .map(label_from_json)
        .collect()
}

fn point_from_json(v: &Value) -> Result<ProjPoint> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) => n.to_string().parse(),
        other => Err(parse_err(format!("not a point: {other}"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn index_from_json(v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(format!("not an index: {v}")))
}

// ---------------------------------------------------------------------------
// trees

/// A tree read from JSON: bare when no positions are given, decorated when all are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeInput {
    Bare(StableTree),
    Decorated(DecoratedStableTree),
}

impl TreeInput {
    pub fn tree(&self) -> StableTree {
        match self {
            TreeInput::Bare(t) => t.clone(),
            TreeInput::Decorated(d) => d.tree(),
        }
    }
}

pub fn tree_to_json(t: &StableTree) -> Value {
    let vertices: Vec<Value> = (0..t.num_vertices())
        .map(|v| json!({ "id": v, "marks": labels_to_json(&t.vertex_marks(v)) }))
        .collect();
    let edges: Vec<Value> = t
        .edges()
        .iter()
        .map(|(v, w)| json!({ "v": v, "w": w }))
        .collect();
    json!({ "markings": labels_to_json(&t.markings()), "vertices": vertices, "edges": edges })
}

pub fn decorated_tree_to_json(t: &DecoratedStableTree) -> Value {
    let vertices: Vec<Value> = (0..t.num_vertices())
        .map(|v| {
            let marks: Map<String, Value> = t
                .vertex_marks(v)
                .iter()
                .map(|(l, p)| (l.to_string(), json!(p.to_string())))
                .collect();
            json!({ "id": v, "marks": marks })
        })
        .collect();
    let edges: Vec<Value> = t
        .edges()
        .iter()
        .map(|(v, w, pv, pw)| json!({ "v": v, "w": w, "pos_v": pv.to_string(), "pos_w": pw.to_string() }))
        .collect();
    json!({ "markings": labels_to_json(&t.markings()), "vertices": vertices, "edges": edges })
}

pub fn tree_from_json(v: &Value) -> Result<TreeInput> {
    let raw_vertices = field(v, "vertices")?
        .as_array()
        .ok_or_else(|| parse_err("vertices must be an array"))?;
    let mut ids = BTreeMap::new();
    let mut marks: Vec<BTreeMap<Label, Option<ProjPoint>>> = Vec::new();
    for (k, vert) in raw_vertices.iter().enumerate() {
        let id = match vert.get("id") {
            Some(id) => index_from_json(id)?,
            None => k,
        };
        if ids.insert(id, k).is_some() {
            return Err(parse_err(format!("duplicate vertex id {id}")));
        }
        let m = match field(vert, "marks")? {
            Value::Array(ls) => ls
                .iter()
                .map(|l| Ok((label_from_json(l)?, None)))
                .collect::<Result<_>>()?,
            Value::Object(obj) => obj
                .iter()
                .map(|(l, p)| {
                    let pos = if p.is_null() {
                        None
                    } else {
                        Some(point_from_json(p)?)
                    };
                    Ok((l.parse()?, pos))
                })
                .collect::<Result<_>>()?,
            _ => return Err(parse_err("marks must be an array or an object")),
        };
        marks.push(m);
    }
    let vertex = |x: &Value| -> Result<usize> {
        let id = index_from_json(x)?;
        ids.get(&id)
            .copied()
            .ok_or_else(|| parse_err(format!("unknown vertex id {id}")))
    };
    let mut edges: Vec<(usize, usize, Option<ProjPoint>, Option<ProjPoint>)> = Vec::new();
    for e in field(v, "edges")?
        .as_array()
        .ok_or_else(|| parse_err("edges must be an array"))?
    {
        let pos = |key: &str| -> Result<Option<ProjPoint>> {
            match e.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(p) => point_from_json(p).map(Some),
            }
        };
        edges.push((
            vertex(field(e, "v")?)?,
            vertex(field(e, "w")?)?,
            pos("pos_v")?,
            pos("pos_w")?,
        ));
    }

    let positions = marks
        .iter()
        .flat_map(|m| m.values())
        .chain(edges.iter().flat_map(|e| [&e.2, &e.3]));
    let (given, total) = positions.fold((0, 0), |(g, t), p| (g + usize::from(p.is_some()), t + 1));

    let tree = if given == 0 {
        let vertices = marks.iter().map(|m| m.keys().copied().collect()).collect();
        TreeInput::Bare(StableTree::new(
            vertices,
            edges.iter().map(|e| (e.0, e.1)).collect(),
        )?)
    } else if given == total {
        let vertices = marks
            .into_iter()
            .map(|m| m.into_iter().map(|(l, p)| (l, p.unwrap())).collect())
            .collect();
        let edges: Vec<DecoratedEdge> = edges
            .into_iter()
            .map(|(a, b, p, q)| (a, b, p.unwrap(), q.unwrap()))
            .collect();
        TreeInput::Decorated(DecoratedStableTree::new(vertices, edges)?)
    } else {
        return Err(parse_err(
            "positions must be given for every special point or for none",
        ));
    };
    if let Some(m) = v.get("markings") {
        if labels_from_json(m)? != tree.tree().markings() {
            return Err(parse_err("markings field disagrees with the vertices"));
        }
    }
    Ok(tree)
}

// ---------------------------------------------------------------------------
// polynomials, forms, classes

pub fn poly_to_json(p: &MultilinearPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(s, c)| json!({ "subset": labels_to_json(s), "coeff": bigint_to_json(c) }))
        .collect();
    json!({ "vars": labels_to_json(p.vars()), "terms": terms })
}

pub fn poly_from_json(v: &Value) -> Result<MultilinearPoly> {
    let vars = labels_from_json(field(v, "vars")?)?;
    let terms = field(v, "terms")?
        .as_array()
        .ok_or_else(|| parse_err("terms must be an array"))?
        .iter()
        .map(|t| {
            Ok((
                labels_from_json(field(t, "subset")?)?,
                bigint_from_json(field(t, "coeff")?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(l) = terms
        .iter()
        .flat_map(|(s, _)| s)
        .find(|l| !vars.contains(l))
    {
        return Err(Error::MissingVariable(*l));
    }
    Ok(MultilinearPoly::from_terms(vars, terms))
}

/// Nonzero coefficients keyed by the 4-bit mask of `a`-factors.
pub fn form_to_json(f: &SectionForm) -> Value {
    let coeffs: Map<String, Value> = (0..16)
        .filter(|&m| f.coeff(m).bits() > 0)
        .map(|m| (m.to_string(), bigint_to_json(f.coeff(m))))
        .collect();
    json!({ "coeffs": coeffs })
}

pub fn form_from_json(v: &Value) -> Result<SectionForm> {
    let obj = field(v, "coeffs")?
        .as_object()
        .ok_or_else(|| parse_err("coeffs must be an object"))?;
    let mut coeffs: [BigInt; 16] = Default::default();
    for (k, c) in obj {
        let m: usize = k
            .parse()
            .map_err(|_| parse_err(format!("bad mask {k:?}")))?;
        if m >= 16 {
            return Err(parse_err(format!("mask {m} out of range")));
        }
        coeffs[m] = bigint_from_json(c)?;
    }
    SectionForm::new(coeffs)
}

pub fn chow_to_json(c: &ChowClass) -> Value {
    let terms: Vec<Value> = c
        .terms()
        .iter()
        .map(|(s, k)| json!({ "subset": labels_to_json(s), "coeff": k }))
        .collect();
    json!({ "vars": labels_to_json(c.vars()), "grade": c.grade(), "terms": terms })
}

pub fn chow_from_json(v: &Value) -> Result<ChowClass> {
    let vars = labels_from_json(field(v, "vars")?)?;
    let grade = index_from_json(field(v, "grade")?)?;
    let terms = field(v, "terms")?
        .as_array()
        .ok_or_else(|| parse_err("terms must be an array"))?
        .iter()
        .map(|t| {
            let k = field(t, "coeff")?
                .as_i64()
                .ok_or_else(|| parse_err("coefficient must be an integer"))?;
            Ok((labels_from_json(field(t, "subset")?)?, k))
        })
        .collect::<Result<Vec<_>>>()?;
    ChowClass::from_terms(vars, grade, terms)
}

fn subset_key(s: &LabelSet) -> String {
    s.iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// `{ "1,2,3,4": "interior 2", "1,2,3,5": "boundary 12|35", ... }`.
pub fn signature_to_json(s: &Signature) -> Value {
    let m: Map<String, Value> = s
        .values()
        .iter()
        .map(|(j, v)| (subset_key(j), json!(boundary_string(v))))
        .collect();
    Value::Object(m)
}

fn boundary_string(v: &M04Point) -> String {
    match v {
        // multi-digit labels need separators to parse back
        M04Point::Boundary([x, y])
            if [x[0], x[1], y[0], y[1]]
                .iter()
                .any(|l| l.to_string().len() > 1) =>
        {
            format!("boundary {},{}|{},{}", x[0], x[1], y[0], y[1])
        }
        _ => v.to_string(),
    }
}

pub fn signature_from_json(v: &Value) -> Result<Signature> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("signature must be an object"))?;
    let mut labels = LabelSet::new();
    let mut values = BTreeMap::new();
    for (k, val) in obj {
        let j: LabelSet = k.split(',').map(str::parse).collect::<Result<_>>()?;
        let p: M04Point = val
            .as_str()
            .ok_or_else(|| parse_err("value must be a string"))?
            .parse()?;
        labels.extend(j.iter().copied());
        values.insert(j, p);
    }
    Signature::new(labels, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::range_labels;
    use crate::operads::{random_signature, signature_of};
    use crate::sampling::rng;
    use crate::trees::enumerate_stable_trees;

    #[test]
    fn bare_tree_round_trip() {
        for t in enumerate_stable_trees(6).unwrap() {
            let back = tree_from_json(&tree_to_json(&t)).unwrap();
            assert_eq!(back, TreeInput::Bare(t));
        }
    }

    #[test]
    fn decorated_tree_round_trip() {
        let mut r = rng(2);
        for t in enumerate_stable_trees(5).unwrap() {
            let d = t.random_decoration(&mut r);
            let back = tree_from_json(&decorated_tree_to_json(&d)).unwrap();
            assert_eq!(back, TreeInput::Decorated(d));
        }
    }

    #[test]
    fn tree_from_spec_shape() {
        let v: Value = serde_json::from_str(
            r#"{"markings":[1,2,3,4,5],
                "vertices":[{"id":0,"marks":{"1":"0","2":"1"}},{"id":1,"marks":{"3":"0","4":"1","5":"2"}}],
                "edges":[{"v":0,"w":1,"pos_v":"inf","pos_w":"inf"}]}"#,
        )
        .unwrap();
        let t = tree_from_json(&v).unwrap();
        assert!(matches!(t, TreeInput::Decorated(_)));
        assert_eq!(t.tree().num_vertices(), 2);
        let partial: Value = serde_json::from_str(
            r#"{"vertices":[{"id":0,"marks":{"1":"0","2":null}},{"id":1,"marks":[3,4]}],"edges":[{"v":0,"w":1}]}"#,
        )
        .unwrap();
        assert!(matches!(tree_from_json(&partial), Err(Error::Parse(_))));
        let unstable: Value =
            serde_json::from_str(r#"{"vertices":[{"marks":[1,2]}],"edges":[]}"#).unwrap();
        assert!(matches!(
            tree_from_json(&unstable),
            Err(Error::InvalidTree(_))
        ));
    }

    #[test]
    fn poly_round_trip() {
        let p = crate::hilbert::generic_orbit_hilbert(5).unwrap();
        assert_eq!(poly_from_json(&poly_to_json(&p)).unwrap(), p);
        let big = MultilinearPoly::constant(range_labels(2), BigInt::from(10).pow(30));
        let j = poly_to_json(&big);
        assert!(j["terms"][0]["coeff"].is_string());
        assert_eq!(poly_from_json(&j).unwrap(), big);
    }

    #[test]
    fn form_and_class_round_trip() {
        let f = crate::configurations::orbit_form(&"0,1,inf,2".parse().unwrap()).unwrap();
        assert_eq!(form_from_json(&form_to_json(&f)).unwrap(), f);
        let c = crate::chow::orbit_class_of_type(&"1,2|3|4|5".parse().unwrap()).unwrap();
        assert_eq!(chow_from_json(&chow_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn signature_round_trip() {
        let mut r = rng(8);
        let s = random_signature(&range_labels(6), &mut r);
        assert_eq!(signature_from_json(&signature_to_json(&s)).unwrap(), s);
        let labels: LabelSet = [3, 7, 11, 12, 20].map(Label).into();
        let s = random_signature(&labels, &mut r);
        assert_eq!(signature_from_json(&signature_to_json(&s)).unwrap(), s);
        let t = enumerate_stable_trees(5).unwrap()[7].random_decoration(&mut r);
        let s = signature_of(&t).unwrap();
        assert_eq!(signature_from_json(&signature_to_json(&s)).unwrap(), s);
    }
}
