//! Canonical JSON interchange. Documents carry an explicit format version and
//! field tag; objects serialize with sorted keys and lowest-terms rationals so
//! equal inputs always produce byte-identical output.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::algebra::{AlgebraPresentation, DGAlgebra};
use crate::field::{Field, Scalar};
use crate::graded::{GradedComplex, GradedMap};
use crate::limits::{DirectedSystem, Factorization, Presentation};
use crate::matrix::Matrix;
use crate::module::{DGModule, ModuleMap, Side};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    /// Unreadable or structurally malformed input: exit code 2 territory.
    #[error("malformed document: {0}")]
    Malformed(String),
    /// Well-formed input describing a mathematically invalid object: exit
    /// code 1 territory.
    #[error("invalid object: {0}")]
    Math(String),
}

fn bad(msg: impl Into<String>) -> DocError {
    DocError::Malformed(msg.into())
}

/// Renders a document in canonical form: two-space pretty printing over
/// serde_json's sorted object keys, with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn wrap(field: Field, kind: &str, payload: Value) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "field": field.to_string(),
        "kind": kind,
        "payload": payload,
    })
}

/// Splits a document into its field and payload, checking version and kind.
pub fn unwrap<'a>(v: &'a Value, expect_kind: &str) -> Result<(Field, &'a Value), DocError> {
    let obj = v.as_object().ok_or_else(|| bad("document is not an object"))?;
    let version = obj
        .get("format_version")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing format_version"))?;
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format_version {version:?}")));
    }
    let tag = obj.get("field").and_then(Value::as_str).ok_or_else(|| bad("missing field tag"))?;
    let field = Field::from_tag(tag).map_err(|e| bad(format!("bad field tag {tag:?}: {e}")))?;
    let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
    if kind != expect_kind {
        return Err(bad(format!("expected a {expect_kind} document, found kind {kind:?}")));
    }
    let payload = obj.get("payload").ok_or_else(|| bad("missing payload"))?;
    Ok((field, payload))
}

pub fn document_kind(v: &Value) -> Result<&str, DocError> {
    v.as_object()
        .and_then(|o| o.get("kind"))
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing kind"))
}

// ---------- scalars, matrices, complexes ----------

fn matrix_json(field: Field, m: &Matrix) -> Value {
    let rows: Vec<Value> = (0..m.rows)
        .map(|i| {
            Value::Array((0..m.cols).map(|j| Value::String(field.render(m.get(i, j)))).collect())
        })
        .collect();
    Value::Array(rows)
}

fn matrix_from_json(field: Field, v: &Value, rows: usize, cols: usize) -> Result<Matrix, DocError> {
    let arr = v.as_array().ok_or_else(|| bad("matrix is not an array"))?;
    if arr.len() != rows {
        return Err(bad(format!("matrix has {} rows, expected {rows}", arr.len())));
    }
    let mut m = Matrix::zeros(field, rows, cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad("matrix row is not an array"))?;
        if row.len() != cols {
            return Err(bad(format!("matrix row {i} has {} entries, expected {cols}", row.len())));
        }
        for (j, entry) in row.iter().enumerate() {
            let s = entry.as_str().ok_or_else(|| bad("matrix entry is not a string"))?;
            let c = field.parse(s).map_err(|e| bad(format!("bad scalar {s:?}: {e}")))?;
            m.set(i, j, c);
        }
    }
    Ok(m)
}

fn dims_json(x: &GradedComplex) -> Value {
    let mut out = Map::new();
    for n in x.support() {
        out.insert(n.to_string(), Value::from(x.dim(n)));
    }
    Value::Object(out)
}

fn dims_from_json(v: &Value) -> Result<BTreeMap<i64, usize>, DocError> {
    let obj = v.as_object().ok_or_else(|| bad("dims is not an object"))?;
    let mut out = BTreeMap::new();
    for (k, d) in obj {
        let n: i64 = k.parse().map_err(|_| bad(format!("bad degree key {k:?}")))?;
        let d = d.as_u64().ok_or_else(|| bad("dimension is not a nonnegative integer"))? as usize;
        if d > 0 {
            out.insert(n, d);
        }
    }
    Ok(out)
}

fn complex_json(field: Field, x: &GradedComplex) -> Value {
    let mut d = Map::new();
    for n in x.support() {
        let m = x.d(n);
        if !m.is_zero() {
            d.insert(n.to_string(), matrix_json(field, &m));
        }
    }
    json!({ "dims": dims_json(x), "d": Value::Object(d) })
}

fn complex_from_json(field: Field, v: &Value) -> Result<GradedComplex, DocError> {
    let obj = v.as_object().ok_or_else(|| bad("complex is not an object"))?;
    let dims = dims_from_json(obj.get("dims").ok_or_else(|| bad("complex missing dims"))?)?;
    let dim_at = |n: i64| dims.get(&n).copied().unwrap_or(0);
    let mut diff = BTreeMap::new();
    if let Some(dv) = obj.get("d") {
        let dobj = dv.as_object().ok_or_else(|| bad("d is not an object"))?;
        for (k, mv) in dobj {
            let n: i64 = k.parse().map_err(|_| bad(format!("bad degree key {k:?}")))?;
            diff.insert(n, matrix_from_json(field, mv, dim_at(n - 1), dim_at(n))?);
        }
    }
    GradedComplex::new(field, dims, diff)
        .map_err(|e| DocError::Math(format!("differential is not square-zero or mis-shaped: {e:?}")))
}

fn comps_json(field: Field, f: &GradedMap) -> Value {
    let mut out = Map::new();
    for n in f.source.support() {
        let m = f.comp(n);
        if !m.is_zero() {
            out.insert(n.to_string(), matrix_json(field, &m));
        }
    }
    Value::Object(out)
}

fn comps_from_json(
    field: Field,
    v: &Value,
    source: &GradedComplex,
    target: &GradedComplex,
) -> Result<GradedMap, DocError> {
    let obj = v.as_object().ok_or_else(|| bad("comps is not an object"))?;
    let mut comps = BTreeMap::new();
    for (k, mv) in obj {
        let n: i64 = k.parse().map_err(|_| bad(format!("bad degree key {k:?}")))?;
        comps.insert(n, matrix_from_json(field, mv, target.dim(n), source.dim(n))?);
    }
    GradedMap::new(source.clone(), target.clone(), 0, comps)
        .map_err(|e| bad(format!("mis-shaped map component: {e:?}")))
}

// ---------- algebra ----------

pub fn algebra_payload(a: &DGAlgebra) -> Value {
    let field = a.field();
    let mut basis = Map::new();
    for (n, labels) in &a.labels {
        basis.insert(n.to_string(), json!(labels));
    }
    // read the structure constants back off the multiplication matrices
    let idx = a.index();
    let total = a.total_dim();
    let layout = crate::graded::TensorLayout::new(&a.carrier, &a.carrier);
    let mut mult = Vec::new();
    for i in 0..total {
        let (ni, pi) = idx.split(i);
        for j in 0..total {
            let (nj, pj) = idx.split(j);
            let col = layout.index(ni + nj, ni, pi, pj);
            let m = a.mult.comp(ni + nj);
            for pk in 0..m.rows {
                let c = m.get(pk, col);
                if !field.is_zero(c) {
                    let k = idx.global(ni + nj, pk);
                    mult.push(json!([i, j, k, field.render(c)]));
                }
            }
        }
    }
    let unit_col = a.unit_column();
    let mut unit = Vec::new();
    for p in 0..unit_col.rows {
        let c = unit_col.get(p, 0);
        if !field.is_zero(c) {
            unit.push(json!([idx.global(0, p), field.render(c)]));
        }
    }
    let mut diff = Vec::new();
    for n in a.carrier.support() {
        let d = a.carrier.d(n);
        for pj in 0..d.cols {
            for pi in 0..d.rows {
                let c = d.get(pi, pj);
                if !field.is_zero(c) {
                    diff.push(json!([idx.global(n - 1, pi), idx.global(n, pj), field.render(c)]));
                }
            }
        }
    }
    json!({ "basis": Value::Object(basis), "mult": mult, "unit": unit, "diff": diff })
}

pub fn algebra_to_doc(a: &DGAlgebra) -> Value {
    wrap(a.field(), "algebra", algebra_payload(a))
}

fn scalar_entry(field: Field, v: &Value) -> Result<Scalar, DocError> {
    let s = v.as_str().ok_or_else(|| bad("scalar is not a string"))?;
    field.parse(s).map_err(|e| bad(format!("bad scalar {s:?}: {e}")))
}

fn usize_entry(v: &Value) -> Result<usize, DocError> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| bad("index is not a nonnegative integer"))
}

pub fn algebra_presentation_from_payload(
    field: Field,
    v: &Value,
) -> Result<AlgebraPresentation, DocError> {
    let obj = v.as_object().ok_or_else(|| bad("algebra payload is not an object"))?;
    let basis_v = obj.get("basis").and_then(Value::as_object).ok_or_else(|| bad("missing basis"))?;
    let mut basis = BTreeMap::new();
    for (k, labels) in basis_v {
        let n: i64 = k.parse().map_err(|_| bad(format!("bad degree key {k:?}")))?;
        let labels: Vec<String> = labels
            .as_array()
            .ok_or_else(|| bad("basis bucket is not an array"))?
            .iter()
            .map(|l| l.as_str().map(str::to_string).ok_or_else(|| bad("label is not a string")))
            .collect::<Result<_, _>>()?;
        basis.insert(n, labels);
    }
    let triples = |key: &str, arity: usize| -> Result<Vec<Vec<&Value>>, DocError> {
        let arr = obj.get(key).and_then(Value::as_array).ok_or_else(|| bad(format!("missing {key}")))?;
        arr.iter()
            .map(|e| {
                let e = e.as_array().ok_or_else(|| bad(format!("{key} entry is not an array")))?;
                if e.len() != arity {
                    return Err(bad(format!("{key} entry has {} fields, expected {arity}", e.len())));
                }
                Ok(e.iter().collect())
            })
            .collect()
    };
    let mut mult = Vec::new();
    for e in triples("mult", 4)? {
        mult.push((usize_entry(e[0])?, usize_entry(e[1])?, usize_entry(e[2])?, scalar_entry(field, e[3])?));
    }
    let mut unit = Vec::new();
    for e in triples("unit", 2)? {
        unit.push((usize_entry(e[0])?, scalar_entry(field, e[1])?));
    }
    let mut diff = Vec::new();
    for e in triples("diff", 3)? {
        diff.push((usize_entry(e[0])?, usize_entry(e[1])?, scalar_entry(field, e[2])?));
    }
    Ok(AlgebraPresentation { field, basis, mult, unit, diff })
}

pub fn algebra_from_payload(field: Field, v: &Value) -> Result<Arc<DGAlgebra>, DocError> {
    let pres = algebra_presentation_from_payload(field, v)?;
    pres.build()
        .map(Arc::new)
        .map_err(|e| DocError::Math(format!("algebra axioms fail: {e}")))
}

// ---------- module ----------

fn side_str(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
        Side::Bi => "bi",
    }
}

fn side_from_str(s: &str) -> Result<Side, DocError> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        "bi" => Ok(Side::Bi),
        other => Err(bad(format!("bad side {other:?}"))),
    }
}

pub fn module_payload(m: &DGModule) -> Value {
    let field = m.field();
    let mut out = Map::new();
    out.insert("algebra".into(), algebra_payload(&m.algebra));
    out.insert("side".into(), Value::String(side_str(m.side).into()));
    out.insert("complex".into(), complex_json(field, &m.carrier));
    if let Some(l) = &m.left_action {
        out.insert("left_action".into(), comps_json(field, l));
    }
    if let Some(r) = &m.right_action {
        out.insert("right_action".into(), comps_json(field, r));
    }
    if let Some(g) = &m.free_gens {
        out.insert("free_gens".into(), json!(g));
    }
    Value::Object(out)
}

pub fn module_to_doc(m: &DGModule) -> Value {
    wrap(m.field(), "module", module_payload(m))
}

/// Rebuilds a module from a payload without running the axiom validator; the
/// caller decides whether to validate.
pub fn module_from_payload(field: Field, v: &Value) -> Result<DGModule, DocError> {
    let obj = v.as_object().ok_or_else(|| bad("module payload is not an object"))?;
    let algebra =
        algebra_from_payload(field, obj.get("algebra").ok_or_else(|| bad("missing algebra"))?)?;
    let side = side_from_str(
        obj.get("side").and_then(Value::as_str).ok_or_else(|| bad("missing side"))?,
    )?;
    let carrier =
        complex_from_json(field, obj.get("complex").ok_or_else(|| bad("missing complex"))?)?;
    let a = &algebra.carrier;
    let left_action = obj
        .get("left_action")
        .map(|c| comps_from_json(field, c, &crate::graded::tensor_base(a, &carrier), &carrier))
        .transpose()?;
    let right_action = obj
        .get("right_action")
        .map(|c| comps_from_json(field, c, &crate::graded::tensor_base(&carrier, a), &carrier))
        .transpose()?;
    let free_gens = obj
        .get("free_gens")
        .map(|g| -> Result<Vec<i64>, DocError> {
            g.as_array()
                .ok_or_else(|| bad("free_gens is not an array"))?
                .iter()
                .map(|d| d.as_i64().ok_or_else(|| bad("free generator degree is not an integer")))
                .collect()
        })
        .transpose()?;
    Ok(DGModule { algebra, side, carrier, left_action, right_action, free_gens })
}

pub fn module_from_doc(v: &Value) -> Result<DGModule, DocError> {
    let (field, payload) = unwrap(v, "module")?;
    module_from_payload(field, payload)
}

// ---------- maps ----------

pub fn map_payload(f: &ModuleMap) -> Value {
    let field = f.source.field();
    json!({
        "source": module_payload(&f.source),
        "target": module_payload(&f.target),
        "comps": comps_json(field, &f.map),
    })
}

pub fn map_to_doc(f: &ModuleMap) -> Value {
    wrap(f.source.field(), "map", map_payload(f))
}

/// Rebuilds a map from a payload without checking A-linearity.
pub fn map_from_payload(field: Field, v: &Value) -> Result<ModuleMap, DocError> {
    let obj = v.as_object().ok_or_else(|| bad("map payload is not an object"))?;
    let source =
        module_from_payload(field, obj.get("source").ok_or_else(|| bad("missing source"))?)?;
    let target =
        module_from_payload(field, obj.get("target").ok_or_else(|| bad("missing target"))?)?;
    let map = comps_from_json(
        field,
        obj.get("comps").ok_or_else(|| bad("missing comps"))?,
        &source.carrier,
        &target.carrier,
    )?;
    Ok(ModuleMap { source, target, map })
}

pub fn map_from_doc(v: &Value) -> Result<ModuleMap, DocError> {
    let (field, payload) = unwrap(v, "map")?;
    map_from_payload(field, payload)
}

// ---------- presentations, systems, batteries, factorizations ----------

pub fn presentation_to_doc(p: &Presentation) -> Value {
    wrap(
        p.f.source.field(),
        "presentation",
        json!({ "f": map_payload(&p.f), "g": map_payload(&p.g) }),
    )
}

pub fn presentation_from_doc(v: &Value) -> Result<Presentation, DocError> {
    let (field, payload) = unwrap(v, "presentation")?;
    let obj = payload.as_object().ok_or_else(|| bad("presentation payload is not an object"))?;
    Ok(Presentation {
        f: map_from_payload(field, obj.get("f").ok_or_else(|| bad("missing f"))?)?,
        g: map_from_payload(field, obj.get("g").ok_or_else(|| bad("missing g"))?)?,
    })
}

pub fn system_to_doc(d: &DirectedSystem) -> Value {
    let field = d.stages[0].field();
    let stages: Vec<Value> = d.stages.iter().map(module_payload).collect();
    let transitions: Vec<Value> = d
        .transitions
        .iter()
        .map(|(&(i, j), t)| {
            json!({ "from": i, "to": j, "comps": comps_json(field, &t.map) })
        })
        .collect();
    wrap(field, "system", json!({ "stages": stages, "transitions": transitions }))
}

pub fn system_from_doc(v: &Value) -> Result<DirectedSystem, DocError> {
    let (field, payload) = unwrap(v, "system")?;
    let obj = payload.as_object().ok_or_else(|| bad("system payload is not an object"))?;
    let stages: Vec<DGModule> = obj
        .get("stages")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing stages"))?
        .iter()
        .map(|s| module_from_payload(field, s))
        .collect::<Result<_, _>>()?;
    let mut transitions = BTreeMap::new();
    for t in obj
        .get("transitions")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing transitions"))?
    {
        let tobj = t.as_object().ok_or_else(|| bad("transition is not an object"))?;
        let i = usize_entry(tobj.get("from").ok_or_else(|| bad("transition missing from"))?)?;
        let j = usize_entry(tobj.get("to").ok_or_else(|| bad("transition missing to"))?)?;
        if i >= stages.len() || j >= stages.len() {
            return Err(bad(format!("transition ({i},{j}) out of range")));
        }
        let map = comps_from_json(
            field,
            tobj.get("comps").ok_or_else(|| bad("transition missing comps"))?,
            &stages[i].carrier,
            &stages[j].carrier,
        )?;
        transitions.insert(
            (i, j),
            ModuleMap { source: stages[i].clone(), target: stages[j].clone(), map },
        );
    }
    Ok(DirectedSystem { stages, transitions })
}

pub struct BatteryDoc {
    pub ses: Vec<crate::ext::ShortExactSequence>,
    pub acyclics: Vec<DGModule>,
}

pub fn battery_from_doc(v: &Value) -> Result<BatteryDoc, DocError> {
    let (field, payload) = unwrap(v, "battery")?;
    let obj = payload.as_object().ok_or_else(|| bad("battery payload is not an object"))?;
    let mut ses = Vec::new();
    if let Some(arr) = obj.get("ses").and_then(Value::as_array) {
        for s in arr {
            let sobj = s.as_object().ok_or_else(|| bad("battery sequence is not an object"))?;
            ses.push(crate::ext::ShortExactSequence {
                incl: map_from_payload(field, sobj.get("incl").ok_or_else(|| bad("missing incl"))?)?,
                proj: map_from_payload(field, sobj.get("proj").ok_or_else(|| bad("missing proj"))?)?,
            });
        }
    }
    let mut acyclics = Vec::new();
    if let Some(arr) = obj.get("acyclics").and_then(Value::as_array) {
        for m in arr {
            acyclics.push(module_from_payload(field, m)?);
        }
    }
    Ok(BatteryDoc { ses, acyclics })
}

pub fn battery_to_doc(field: Field, b: &BatteryDoc) -> Value {
    let ses: Vec<Value> = b
        .ses
        .iter()
        .map(|s| json!({ "incl": map_payload(&s.incl), "proj": map_payload(&s.proj) }))
        .collect();
    let acyclics: Vec<Value> = b.acyclics.iter().map(module_payload).collect();
    wrap(field, "battery", json!({ "ses": ses, "acyclics": acyclics }))
}

pub fn factorization_to_doc(fact: &Factorization, u: &ModuleMap) -> Value {
    wrap(
        u.source.field(),
        "factorization",
        json!({
            "stage": fact.stage,
            "u": map_payload(u),
            "v": map_payload(&fact.v),
            "w": map_payload(&fact.w),
        }),
    )
}

pub struct FactorizationDoc {
    pub stage: Option<usize>,
    pub u: ModuleMap,
    pub v: ModuleMap,
    pub w: ModuleMap,
}

pub fn factorization_from_doc(v: &Value) -> Result<FactorizationDoc, DocError> {
    let (field, payload) = unwrap(v, "factorization")?;
    let obj = payload.as_object().ok_or_else(|| bad("factorization payload is not an object"))?;
    let stage = match obj.get("stage") {
        None | Some(Value::Null) => None,
        Some(s) => Some(usize_entry(s)?),
    };
    Ok(FactorizationDoc {
        stage,
        u: map_from_payload(field, obj.get("u").ok_or_else(|| bad("missing u"))?)?,
        v: map_from_payload(field, obj.get("v").ok_or_else(|| bad("missing v"))?)?,
        w: map_from_payload(field, obj.get("w").ok_or_else(|| bad("missing w"))?)?,
    })
}
