//! JSON documents and DOT output.
//!
//! Every file is a [`Document`] envelope `{kind, version, payload}`. Graph
//! payloads are `{vertices:[{id,weight}], edges:[{id,ends:[v,v]}]}`; curves
//! add `lengths`, nodal models add `widths` and `degree`, labeled stable
//! models add `labels`. Rationals are reduced `"p/q"` strings. Emission is
//! deterministic: object keys are sorted and the text ends in one newline.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::delaunay::{Cell, DelaunayDecomposition};
use crate::error::{invalid, Error, Result};
use crate::forms::QuadraticForm;
use crate::graph::WeightedGraph;
use crate::matrix::{IntMatrix, RatMatrix};
use crate::moduli::StrataPoset;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::stable::CurveModel;
use crate::tropical::{NodalModel, TropicalCurve};

pub const VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Graph,
    Curve,
    Form,
    Model,
    Delaunay,
    Poset,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub kind: Kind,
    pub version: String,
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexBody {
    id: String,
    weight: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeBody {
    id: String,
    ends: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphBody {
    vertices: Vec<VertexBody>,
    edges: Vec<EdgeBody>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lengths: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    widths: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormBody {
    dim: usize,
    gram: Vec<Vec<String>>,
}

impl Document {
    pub fn new(kind: Kind, payload: Value) -> Self {
        Document {
            kind,
            version: VERSION.to_string(),
            payload,
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Document> {
        let d: Document = serde_json::from_str(text).map_err(|e| Error::Validation(format!("malformed document: {e}")))?;
        if d.version != VERSION {
            return invalid(format!("unsupported document version {:?}", d.version));
        }
        Ok(d)
    }

    fn expect(&self, kinds: &[Kind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            invalid(format!("expected a {kinds:?} document, found {:?}", self.kind))
        }
    }
}

fn body<T: for<'de> Deserialize<'de>>(payload: &Value) -> Result<T> {
    serde_json::from_value(payload.clone()).map_err(|e| Error::Validation(format!("schema violation: {e}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("payloads always serialize")
}

/// Typed readers. In strict mode non-canonical rationals are rejected; in
/// normalizing mode they are accepted and a warning is recorded.
#[derive(Debug, Clone, Default)]
pub struct Reader {
    normalize: bool,
    pub warnings: Vec<String>,
}

impl Reader {
    pub fn strict() -> Self {
        Reader::default()
    }

    pub fn normalizing() -> Self {
        Reader {
            normalize: true,
            warnings: Vec::new(),
        }
    }

    pub fn rational(&mut self, s: &str) -> Result<Rational> {
        match parse_rational(s, true) {
            Ok(x) => Ok(x),
            Err(e) if !self.normalize => Err(e),
            Err(_) => {
                let x = parse_rational(s, false)?;
                self.warnings.push(format!("normalized {s:?} to {:?}", format_rational(&x)));
                Ok(x)
            }
        }
    }

    fn graph_body(&self, b: &GraphBody) -> Result<WeightedGraph> {
        WeightedGraph::new(
            b.vertices.iter().map(|v| (v.id.clone(), v.weight)).collect(),
            b.edges
                .iter()
                .map(|e| (e.id.clone(), e.ends[0].clone(), e.ends[1].clone()))
                .collect(),
        )
    }

    fn graph_payload(&self, d: &Document, kind: Kind) -> Result<GraphBody> {
        d.expect(&[kind])?;
        let b: GraphBody = body(&d.payload)?;
        let extra = |present: bool, field: &str| -> Result<()> {
            if present {
                invalid(format!("field {field:?} is not allowed in a {kind:?} document"))
            } else {
                Ok(())
            }
        };
        extra(kind != Kind::Curve && b.lengths.is_some(), "lengths")?;
        extra(kind != Kind::Model && b.widths.is_some(), "widths")?;
        extra(kind != Kind::Model && b.degree.is_some(), "degree")?;
        extra(kind != Kind::Graph && b.labels.is_some(), "labels")?;
        Ok(b)
    }

    pub fn graph(&mut self, d: &Document) -> Result<WeightedGraph> {
        let b = self.graph_payload(d, Kind::Graph)?;
        self.graph_body(&b)
    }

    /// Stable model: a graph document, optionally with vertex labels.
    pub fn curve_model(&mut self, d: &Document) -> Result<CurveModel> {
        let b = self.graph_payload(d, Kind::Graph)?;
        let g = self.graph_body(&b)?;
        CurveModel::new(g, &b.labels.unwrap_or_default())
    }

    pub fn curve(&mut self, d: &Document) -> Result<TropicalCurve> {
        let b = self.graph_payload(d, Kind::Curve)?;
        let g = self.graph_body(&b)?;
        let Some(raw) = &b.lengths else {
            return invalid("curve document without lengths");
        };
        let mut lengths = BTreeMap::new();
        for (e, s) in raw {
            lengths.insert(e.clone(), self.rational(s)?);
        }
        TropicalCurve::new(g, &lengths)
    }

    pub fn model(&mut self, d: &Document) -> Result<NodalModel> {
        let b = self.graph_payload(d, Kind::Model)?;
        let g = self.graph_body(&b)?;
        let (Some(widths), Some(degree)) = (&b.widths, b.degree) else {
            return invalid("model document needs widths and degree");
        };
        NodalModel::new(g, widths, degree)
    }

    pub fn form(&mut self, d: &Document) -> Result<QuadraticForm> {
        d.expect(&[Kind::Form])?;
        let b: FormBody = body(&d.payload)?;
        if b.gram.len() != b.dim || b.gram.iter().any(|r| r.len() != b.dim) {
            return invalid("gram matrix does not match dim");
        }
        let mut rows = Vec::with_capacity(b.dim);
        for r in &b.gram {
            rows.push(r.iter().map(|s| self.rational(s)).collect::<Result<Vec<_>>>()?);
        }
        QuadraticForm::new(RatMatrix::from_rows(rows))
    }
}

fn graph_body(g: &WeightedGraph) -> GraphBody {
    let id = |v: usize| g.vertices()[v].id.clone();
    GraphBody {
        vertices: g
            .vertices()
            .iter()
            .map(|v| VertexBody {
                id: v.id.clone(),
                weight: v.weight,
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeBody {
                id: e.id.clone(),
                ends: [id(e.ends[0]), id(e.ends[1])],
            })
            .collect(),
        lengths: None,
        widths: None,
        degree: None,
        labels: None,
    }
}

pub fn graph_value(g: &WeightedGraph) -> Value {
    to_value(&graph_body(g))
}

pub fn graph_document(g: &WeightedGraph) -> Document {
    Document::new(Kind::Graph, graph_value(g))
}

pub fn curve_model_document(x: &CurveModel) -> Document {
    let mut b = graph_body(x.dual());
    let labels: BTreeMap<String, String> = x.labels().into_iter().filter(|(_, l)| !l.is_empty()).collect();
    if !labels.is_empty() {
        b.labels = Some(labels);
    }
    Document::new(Kind::Graph, to_value(&b))
}

pub fn curve_value(c: &TropicalCurve) -> Value {
    let mut b = graph_body(c.graph());
    b.lengths = Some(c.lengths().iter().map(|(e, l)| (e.clone(), format_rational(l))).collect());
    to_value(&b)
}

pub fn curve_document(c: &TropicalCurve) -> Document {
    Document::new(Kind::Curve, curve_value(c))
}

pub fn model_document(m: &NodalModel) -> Document {
    let mut b = graph_body(m.dual());
    b.widths = Some(m.widths());
    b.degree = Some(m.degree());
    Document::new(Kind::Model, to_value(&b))
}

pub fn rational_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(format_rational).collect())
        .collect()
}

pub fn integer_rows(m: &IntMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(BigInt::to_string).collect())
        .collect()
}

pub fn form_value(q: &QuadraticForm) -> Value {
    to_value(&FormBody {
        dim: q.dim(),
        gram: rational_rows(q.gram()),
    })
}

pub fn form_document(q: &QuadraticForm) -> Document {
    Document::new(Kind::Form, form_value(q))
}

fn cells(cs: &[Cell]) -> Value {
    to_value(&cs)
}

pub fn delaunay_document(d: &DelaunayDecomposition) -> Document {
    Document::new(
        Kind::Delaunay,
        json!({
            "ambient_dim": d.ambient_dim(),
            "rank": d.rank(),
            "projection": integer_rows(d.projection()),
            "f_vector": d.f_vector(),
            "star_volume": format_rational(&d.star_volume()),
            "full_cells": cells(d.full_cells()),
            "star": cells(d.star()),
        }),
    )
}

pub fn poset_document(p: &StrataPoset) -> Document {
    let pair = |&(i, j): &(usize, usize)| json!([p.elements[i].label, p.elements[j].label]);
    Document::new(
        Kind::Poset,
        json!({
            "genus": p.genus,
            "elements": p.elements.iter().map(|s| json!({
                "label": s.label,
                "dimension": s.dimension,
                "graph": graph_value(&s.graph),
            })).collect::<Vec<_>>(),
            "relations": p.relations.iter().map(pair).collect::<Vec<_>>(),
            "covering": p.covering().iter().map(pair).collect::<Vec<_>>(),
        }),
    )
}

/// Hasse diagram: one node per stratum, arrows only for covering pairs,
/// pointing from the dominating stratum to the dominated one.
pub fn poset_dot(p: &StrataPoset) -> String {
    let mut s = format!("digraph strata_g{} {{\n  rankdir=TB;\n", p.genus);
    for e in &p.elements {
        let weights: Vec<String> = e.graph.vertices().iter().map(|v| v.weight.to_string()).collect();
        let _ = writeln!(
            s,
            "  \"{}\" [label=\"|E|={} w=({})\"];",
            e.label,
            e.dimension,
            weights.join(",")
        );
    }
    for (i, j) in p.covering() {
        let _ = writeln!(s, "  \"{}\" -> \"{}\";", p.elements[i].label, p.elements[j].label);
    }
    s.push_str("}\n");
    s
}
