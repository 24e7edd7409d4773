//! JSON documents for graphs, sheaves, polarizations and reports.
//!
//! Components are referred to by id, nodes by `[u, v]` or `[u, v, k]` where
//! `k` picks among parallel nodes. Rationals are written as `"p/q"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::curve::{DualGraph, EdgeSet, Marking, Subcurve, Vertex};
use crate::enumeration::{EnumerationResult, Genus1Report};
use crate::error::{Error, Result};
use crate::jordan_holder::{JhClass, JhFiltration};
use crate::reduction::{ClassId, TwistTrace};
use crate::sheaf::CombSheaf;
use crate::stability::{BetaTable, Polarization, StabilityReport, Witness};
use crate::Rational;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default)]
    pub genus: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkingDoc {
    pub id: String,
    pub on: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub markings: Vec<MarkingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodal: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRef {
    Indexed(String, String, usize),
    Plain(String, String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<String>>,
    #[serde(default)]
    pub nonfree: Vec<NodeRef>,
    pub multidegree: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationDoc {
    #[serde(default = "one")]
    pub rank: i64,
    pub weights: BTreeMap<String, i64>,
}

fn one() -> i64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeshadriDoc {
    pub a: BTreeMap<String, String>,
    pub chi: i64,
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed {what} document: {e}")))
}

pub fn rational_to_string(q: Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    let t = s.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => t.parse::<i64>().map(Rational::from_integer).map_err(|_| bad()),
    }
}

pub fn graph_from_doc(doc: &GraphDoc) -> Result<DualGraph> {
    if doc.nodal == Some(false) {
        return Err(Error::NonNodal);
    }
    let vertices: Vec<Vertex> = doc.vertices.iter().map(|v| Vertex { id: v.id.clone(), genus: v.genus }).collect();
    let index = |id: &str| -> Result<usize> {
        vertices.iter().position(|v| v.id == id).ok_or_else(|| Error::UnknownVertex(id.to_string()))
    };
    let edges = doc.edges.iter().map(|(a, b)| Ok((index(a)?, index(b)?))).collect::<Result<Vec<_>>>()?;
    let markings = doc
        .markings
        .iter()
        .map(|m| Ok(Marking { id: m.id.clone(), vertex: index(&m.on)? }))
        .collect::<Result<Vec<_>>>()?;
    DualGraph::new(vertices, edges, markings)
}

pub fn parse_graph(text: &str) -> Result<DualGraph> {
    graph_from_doc(&parse_json("graph", text)?)
}

pub fn graph_to_doc(g: &DualGraph) -> GraphDoc {
    GraphDoc {
        vertices: g.vertices().iter().map(|v| VertexDoc { id: v.id.clone(), genus: v.genus }).collect(),
        edges: g.edges().iter().map(|e| (g.vertex(e.a).id.clone(), g.vertex(e.b).id.clone())).collect(),
        markings: g
            .markings()
            .iter()
            .map(|m| MarkingDoc { id: m.id.clone(), on: g.vertex(m.vertex).id.clone() })
            .collect(),
        nodal: None,
    }
}

pub fn subcurve_to_value(g: &DualGraph, y: Subcurve) -> Value {
    Value::Array(y.vertices().map(|v| Value::String(g.vertex(v).id.clone())).collect())
}

pub fn subcurve_from_ids(g: &DualGraph, ids: &[String]) -> Result<Subcurve> {
    ids.iter().try_fold(Subcurve::EMPTY, |acc, id| Ok(acc.union(Subcurve::singleton(g.vertex_index(id)?))))
}

fn resolve_nodes(g: &DualGraph, nodes: &[NodeRef]) -> Result<EdgeSet> {
    let mut s = EdgeSet::EMPTY;
    for node in nodes {
        let (a, b, k) = match node {
            NodeRef::Indexed(a, b, k) => (a, b, Some(*k)),
            NodeRef::Plain(a, b) => (a, b, None),
        };
        let (x, y) = (g.vertex_index(a)?, g.vertex_index(b)?);
        let describe = || format!("no node [{a}, {b}{}]", k.map(|k| format!(", {k}")).unwrap_or_default());
        let e = match k {
            Some(k) => g.find_edge(x, y, k).ok_or_else(|| Error::InvalidSheaf(describe()))?,
            None => (0..)
                .map_while(|k| g.find_edge(x, y, k))
                .find(|e| !s.contains(*e))
                .ok_or_else(|| Error::InvalidSheaf(describe()))?,
        };
        if s.contains(e) {
            return Err(Error::InvalidSheaf(format!("node {} listed twice", g.describe_edge(e))));
        }
        s.insert(e);
    }
    Ok(s)
}

pub fn sheaf_from_doc(g: &DualGraph, doc: &SheafDoc) -> Result<CombSheaf> {
    let support = match &doc.support {
        Some(ids) => subcurve_from_ids(g, ids)?,
        None => g.full(),
    };
    let nonfree = resolve_nodes(g, &doc.nonfree)?;
    let mut degrees = vec![0i64; g.num_vertices()];
    for (id, &d) in &doc.multidegree {
        let v = g.vertex_index(id)?;
        if !support.contains(v) {
            return Err(Error::InvalidSheaf(format!("degree given for `{id}` outside the support")));
        }
        degrees[v] = d;
    }
    if let Some(v) = support.vertices().find(|&v| !doc.multidegree.contains_key(&g.vertex(v).id)) {
        return Err(Error::InvalidSheaf(format!("missing degree for `{}`", g.vertex(v).id)));
    }
    CombSheaf::new(g, support, nonfree, degrees)
}

pub fn parse_sheaf(g: &DualGraph, text: &str) -> Result<CombSheaf> {
    sheaf_from_doc(g, &parse_json("sheaf", text)?)
}

pub fn parse_parts(g: &DualGraph, text: &str) -> Result<Vec<CombSheaf>> {
    let docs: Vec<SheafDoc> = parse_json("part system", text)?;
    docs.iter()
        .map(|d| {
            if d.support.is_none() {
                return Err(Error::InvalidParts("every part needs a `support`".into()));
            }
            sheaf_from_doc(g, d)
        })
        .collect()
}

pub fn node_to_value(g: &DualGraph, e: usize) -> Value {
    let edge = g.edge(e);
    json!([g.vertex(edge.a).id, g.vertex(edge.b).id, g.parallel_index(e)])
}

pub fn sheaf_to_value(g: &DualGraph, i: &CombSheaf) -> Value {
    let degrees: serde_json::Map<String, Value> =
        i.ambient().vertices().map(|v| (g.vertex(v).id.clone(), json!(i.degree(v)))).collect();
    json!({
        "support": subcurve_to_value(g, i.ambient()),
        "nonfree": i.nonfree().edges().map(|e| node_to_value(g, e)).collect::<Vec<_>>(),
        "multidegree": degrees,
    })
}

pub fn polarization_from_doc(g: &DualGraph, doc: &PolarizationDoc) -> Result<Polarization> {
    let mut weights = vec![None; g.num_vertices()];
    for (id, &e) in &doc.weights {
        weights[g.vertex_index(id)?] = Some(e);
    }
    let weights = weights
        .into_iter()
        .enumerate()
        .map(|(v, e)| e.ok_or_else(|| Error::InvalidPolarization(format!("missing weight for `{}`", g.vertex(v).id))))
        .collect::<Result<Vec<_>>>()?;
    Polarization::new(doc.rank, weights)
}

pub fn parse_polarization(g: &DualGraph, text: &str) -> Result<Polarization> {
    polarization_from_doc(g, &parse_json("polarization", text)?)
}

pub fn polarization_to_value(g: &DualGraph, pol: &Polarization) -> Value {
    let weights: serde_json::Map<String, Value> =
        (0..g.num_vertices()).map(|v| (g.vertex(v).id.clone(), json!(pol.weights()[v]))).collect();
    let slopes: serde_json::Map<String, Value> =
        (0..g.num_vertices()).map(|v| (g.vertex(v).id.clone(), json!(rational_to_string(pol.slope(v))))).collect();
    json!({ "rank": pol.rank(), "weights": weights, "slopes": slopes })
}

/// Seshadri weights in component order, with the Euler characteristic.
pub fn parse_seshadri(g: &DualGraph, text: &str) -> Result<(Vec<Rational>, i64)> {
    let doc: SeshadriDoc = parse_json("Seshadri weights", text)?;
    let mut a = vec![None; g.num_vertices()];
    for (id, s) in &doc.a {
        a[g.vertex_index(id)?] = Some(parse_rational(s)?);
    }
    let a = a
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| Error::InvalidWeights(format!("missing weight for `{}`", g.vertex(v).id))))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, doc.chi))
}

pub fn witness_to_value(g: &DualGraph, w: &Witness) -> Value {
    json!({ "subcurve": subcurve_to_value(g, w.subcurve), "beta": rational_to_string(w.beta) })
}

pub fn report_to_value(g: &DualGraph, r: &StabilityReport) -> Value {
    json!({
        "predicate": r.predicate.label(g),
        "holds": r.holds,
        "witness": r.witness.as_ref().map(|w| witness_to_value(g, w)),
        "violations": r.violations.iter().map(|w| witness_to_value(g, w)).collect::<Vec<_>>(),
        "tight": r.tight.iter().map(|w| witness_to_value(g, w)).collect::<Vec<_>>(),
        "qualifying": r.qualifying.iter().map(|&v| g.vertex(v).id.clone()).collect::<Vec<_>>(),
    })
}

pub fn jh_class_to_value(g: &DualGraph, c: &JhClass) -> Value {
    Value::Array(c.pieces().iter().map(|p| sheaf_to_value(g, p)).collect())
}

pub fn filtration_to_value(g: &DualGraph, f: &JhFiltration) -> Value {
    let steps: Vec<Value> = f
        .steps
        .iter()
        .map(|st| {
            json!({
                "support": subcurve_to_value(g, st.support),
                "sheaf": sheaf_to_value(g, &st.sheaf),
                "peeled": subcurve_to_value(g, st.peeled),
                "piece": sheaf_to_value(g, &st.piece),
            })
        })
        .collect();
    json!({ "steps": steps, "class": jh_class_to_value(g, &f.class()) })
}

pub fn trace_to_value(g: &DualGraph, t: &TwistTrace) -> Value {
    let steps: Vec<Value> = t
        .steps
        .iter()
        .map(|st| json!({ "fired": subcurve_to_value(g, st.fired), "beta_min": rational_to_string(st.beta_min) }))
        .collect();
    json!({ "start": sheaf_to_value(g, &t.start), "steps": steps, "final": sheaf_to_value(g, &t.result) })
}

pub fn class_id_to_value(c: &ClassId) -> Value {
    json!({ "total": c.total, "residue": c.residue })
}

/// Lexicographically first subcurve of minimal beta, if the support is reducible.
pub fn beta_min_witness(g: &DualGraph, i: &CombSheaf, pol: &Polarization) -> Result<Option<Witness>> {
    let table = BetaTable::new(g, i, pol)?;
    Ok(table
        .entries()
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.lex_cmp(b.0)))
        .map(|(subcurve, beta)| Witness { subcurve, beta }))
}

pub fn enumeration_to_value(g: &DualGraph, res: &EnumerationResult) -> Result<Value> {
    let classes = res
        .classes
        .iter()
        .map(|c| {
            let mut v = sheaf_to_value(g, c);
            let w = beta_min_witness(g, c, &res.polarization)?;
            v["beta_min"] = w.map(|w| witness_to_value(g, &w)).unwrap_or(Value::Null);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let strata: serde_json::Map<String, Value> = res.strata.iter().map(|(k, n)| (k.to_string(), json!(n))).collect();
    Ok(json!({
        "predicate": res.predicate.label(g),
        "polarization": polarization_to_value(g, &res.polarization),
        "chi": res.chi,
        "count": res.len(),
        "strata": strata,
        "jh_classes": res.jh_classes,
        "classes": classes,
    }))
}

pub fn genus1_to_value(g: &DualGraph, r: &Genus1Report) -> Value {
    let per_node: Vec<Value> = r
        .per_node
        .iter()
        .enumerate()
        .map(|(e, n)| json!({ "node": node_to_value(g, e), "classes": n }))
        .collect();
    json!({
        "invertible": r.invertible,
        "singular": r.singular(),
        "deeper": r.deeper,
        "per_node": per_node,
        "matches_curve": r.matches_curve(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
