//! JSON documents.
//!
//! Rationals are always `"p/q"` strings. Points are `{"vertex":"u"}` or
//! `{"edge":"e1","offset":"1/2"}`; inside sets, interior model vertices are
//! named `"e1@1/2"` and model edges `"e1#k"` (the `k`-th piece counted from the
//! first end of `e1`).

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::divisor::{Divisor, FiringCertificate, FiringStep};
use crate::engine::{ReductionResult, TraceEntry, TraceStep};
use crate::error::{Error, Result};
use crate::error_minmax::ErrorProfile;
use crate::graph::{build_graph, normalize_point, refine_model, GraphDescription, MetricGraph, Model, PointRef};
use crate::rational::{format_rational, parse_rational};
use crate::topology::AdmissibleSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorEntryJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<String>,
    pub coeff: i64,
}

pub type DivisorJson = Vec<DivisorEntryJson>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetJson {
    #[serde(default)]
    pub model_points: Vec<PointJson>,
    #[serde(rename = "I")]
    pub vertices: Vec<String>,
    #[serde(rename = "J")]
    pub edges: Vec<String>,
    #[serde(default)]
    pub spset: Vec<PointJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepJson {
    pub set: SetJson,
    pub eps: String,
}

pub type CertificateJson = Vec<StepJson>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub max_error: i64,
    pub minmax: Option<SetJson>,
    pub is_break: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum StepTagJson {
    MoveChip { from: PointJson, to: PointJson },
    Fire { eps: String },
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntryJson {
    pub max_error: i64,
    pub minmax: SetJson,
    pub branch_points: usize,
    pub step: StepTagJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionJson {
    pub semibreak: DivisorJson,
    pub break_divisor: DivisorJson,
    pub certificate: CertificateJson,
    pub iterations: usize,
    pub updates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntryJson>>,
}

/// Parses a document, reporting the line and column of the first problem.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents always serialize")
}

pub fn parse_graph(text: &str) -> Result<Arc<MetricGraph>> {
    let desc: GraphDescription = parse(text)?;
    Ok(Arc::new(build_graph(&desc)?))
}

pub fn point_to_json(graph: &MetricGraph, p: &PointRef) -> PointJson {
    match p {
        PointRef::Vertex(v) => PointJson { vertex: Some(graph.vertex_id(*v).to_string()), edge: None, offset: None },
        PointRef::Edge { edge, offset } => PointJson {
            vertex: None,
            edge: Some(graph.edge(*edge).id.clone()),
            offset: Some(format_rational(offset)),
        },
    }
}

fn point_from_parts(
    graph: &MetricGraph,
    vertex: &Option<String>,
    edge: &Option<String>,
    offset: &Option<String>,
) -> Result<PointRef> {
    match (vertex, edge, offset) {
        (Some(v), None, None) => Ok(PointRef::Vertex(graph.vertex_by_id(v)?)),
        (None, Some(e), Some(off)) => normalize_point(graph, graph.edge_by_id(e)?, &parse_rational(off)?),
        _ => Err(Error::Parse(
            "a point is either {\"vertex\"} or {\"edge\", \"offset\"}".into(),
        )),
    }
}

pub fn point_from_json(graph: &MetricGraph, p: &PointJson) -> Result<PointRef> {
    point_from_parts(graph, &p.vertex, &p.edge, &p.offset)
}

pub fn divisor_to_json(graph: &MetricGraph, d: &Divisor) -> DivisorJson {
    d.iter()
        .map(|(p, coeff)| {
            let PointJson { vertex, edge, offset } = point_to_json(graph, p);
            DivisorEntryJson { vertex, edge, offset, coeff }
        })
        .collect()
}

pub fn divisor_from_json(graph: &MetricGraph, doc: &DivisorJson) -> Result<Divisor> {
    let mut d = Divisor::zero();
    for entry in doc {
        let p = point_from_parts(graph, &entry.vertex, &entry.edge, &entry.offset)?;
        d.add_chips(p, entry.coeff);
    }
    Ok(d)
}

pub fn parse_divisor(graph: &MetricGraph, text: &str) -> Result<Divisor> {
    divisor_from_json(graph, &parse(text)?)
}

/// `"u"` for an input vertex, `"e1@1/2"` for an interior point.
pub fn point_name(graph: &MetricGraph, p: &PointRef) -> String {
    match p {
        PointRef::Vertex(v) => graph.vertex_id(*v).to_string(),
        PointRef::Edge { edge, offset } => format!("{}@{}", graph.edge(*edge).id, format_rational(offset)),
    }
}

pub fn point_by_name(graph: &MetricGraph, name: &str) -> Result<PointRef> {
    match name.split_once('@') {
        None => Ok(PointRef::Vertex(graph.vertex_by_id(name)?)),
        Some((edge, offset)) => normalize_point(graph, graph.edge_by_id(edge)?, &parse_rational(offset)?),
    }
}

pub fn set_to_json(set: &AdmissibleSet) -> SetJson {
    let model = set.model();
    let graph = model.graph();
    SetJson {
        model_points: model.extra_points().iter().map(|p| point_to_json(graph, p)).collect(),
        vertices: set.vertex_indices().map(|v| point_name(graph, model.point(v))).collect(),
        edges: set.edge_indices().map(|e| model.edge_name(e)).collect(),
        spset: set.spset().iter().map(|p| point_to_json(graph, p)).collect(),
    }
}

pub fn set_from_json(graph: &Arc<MetricGraph>, doc: &SetJson) -> Result<AdmissibleSet> {
    let mut points = doc
        .model_points
        .iter()
        .map(|p| point_from_json(graph, p))
        .collect::<Result<Vec<_>>>()?;
    let named = doc
        .vertices
        .iter()
        .map(|n| point_by_name(graph, n))
        .collect::<Result<Vec<_>>>()?;
    points.extend(named.iter().cloned());
    let model: Arc<Model> = Arc::new(refine_model(graph, points)?);
    let vertices: Vec<usize> = named.iter().map(|p| model.vertex_of(p).expect("model refined at p")).collect();
    let edges = doc.edges.iter().map(|n| model.edge_by_name(n)).collect::<Result<Vec<_>>>()?;
    AdmissibleSet::from_indices(model, vertices, edges)
}

pub fn certificate_to_json(cert: &FiringCertificate) -> CertificateJson {
    cert.steps
        .iter()
        .map(|s| StepJson { set: set_to_json(&s.set), eps: format_rational(&s.eps) })
        .collect()
}

pub fn certificate_from_json(graph: &Arc<MetricGraph>, doc: &CertificateJson) -> Result<FiringCertificate> {
    let steps = doc
        .iter()
        .map(|s| Ok(FiringStep::new(set_from_json(graph, &s.set)?, parse_rational(&s.eps)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiringCertificate::new(steps))
}

pub fn profile_to_json(profile: &ErrorProfile) -> ProfileJson {
    ProfileJson {
        max_error: profile.max_error,
        minmax: (!profile.minmax.is_empty()).then(|| set_to_json(&profile.minmax)),
        is_break: profile.is_break_signal,
    }
}

pub fn profile_from_json(graph: &Arc<MetricGraph>, doc: &ProfileJson) -> Result<ErrorProfile> {
    let minmax = match &doc.minmax {
        Some(s) => set_from_json(graph, s)?,
        None => AdmissibleSet::empty(Arc::new(Model::trivial(graph))),
    };
    Ok(ErrorProfile { max_error: doc.max_error, minmax, is_break_signal: doc.is_break })
}

fn trace_to_json(graph: &MetricGraph, entry: &TraceEntry) -> TraceEntryJson {
    let step = match &entry.step {
        TraceStep::MoveChip { from, to } => StepTagJson::MoveChip {
            from: point_to_json(graph, from),
            to: point_to_json(graph, to),
        },
        TraceStep::Fire { eps } => StepTagJson::Fire { eps: format_rational(eps) },
        TraceStep::Done => StepTagJson::Done,
    };
    TraceEntryJson {
        max_error: entry.max_error,
        minmax: set_to_json(&entry.minmax),
        branch_points: entry.branch_points,
        step,
    }
}

fn trace_from_json(graph: &Arc<MetricGraph>, doc: &TraceEntryJson) -> Result<TraceEntry> {
    let step = match &doc.step {
        StepTagJson::MoveChip { from, to } => TraceStep::MoveChip {
            from: point_from_json(graph, from)?,
            to: point_from_json(graph, to)?,
        },
        StepTagJson::Fire { eps } => TraceStep::Fire { eps: parse_rational(eps)? },
        StepTagJson::Done => TraceStep::Done,
    };
    Ok(TraceEntry {
        max_error: doc.max_error,
        minmax: set_from_json(graph, &doc.minmax)?,
        branch_points: doc.branch_points,
        step,
    })
}

pub fn reduction_to_json(graph: &MetricGraph, r: &ReductionResult) -> ReductionJson {
    ReductionJson {
        semibreak: divisor_to_json(graph, &r.semibreak),
        break_divisor: divisor_to_json(graph, &r.break_divisor),
        certificate: certificate_to_json(&r.certificate),
        iterations: r.iterations,
        updates: r.updates,
        trace: r.trace.as_ref().map(|t| t.iter().map(|e| trace_to_json(graph, e)).collect()),
    }
}

pub fn reduction_from_json(graph: &Arc<MetricGraph>, doc: &ReductionJson) -> Result<ReductionResult> {
    Ok(ReductionResult {
        semibreak: divisor_from_json(graph, &doc.semibreak)?,
        break_divisor: divisor_from_json(graph, &doc.break_divisor)?,
        certificate: certificate_from_json(graph, &doc.certificate)?,
        iterations: doc.iterations,
        updates: doc.updates,
        trace: doc
            .trace
            .as_ref()
            .map(|t| t.iter().map(|e| trace_from_json(graph, e)).collect::<Result<Vec<_>>>())
            .transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{semibreak_reduce, ReduceOptions};
    use crate::graph::fixtures::*;

    #[test]
    fn graph_document() {
        let text = r#"{"vertices":["u","v"],"edges":[
            {"id":"e1","ends":["u","v"],"length":"1/1"},
            {"id":"e2","ends":["u","v"],"length":"2/2"},
            {"id":"e3","ends":["u","v"],"length":"1"}]}"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(*g, *theta());
        let again = parse_graph(&to_pretty(&g.to_description())).unwrap();
        assert_eq!(*again, *g);
        assert!(matches!(parse_graph("{\"vertices\":[}"), Err(Error::Parse(m)) if m.contains("line 1")));
    }

    #[test]
    fn divisor_document() {
        let g = theta();
        let text = r#"[{"vertex":"u","coeff":1},{"edge":"e1","offset":"1/2","coeff":2},{"edge":"e2","offset":"0/1","coeff":1}]"#;
        let d = parse_divisor(&g, text).unwrap();
        assert_eq!(d.get(&vx(&g, "u")), 2);
        assert_eq!(d.get(&mid(&g, "e1")), 2);
        let doc = divisor_to_json(&g, &d);
        assert_eq!(divisor_from_json(&g, &parse(&to_pretty(&doc)).unwrap()).unwrap(), d);
        assert!(parse_divisor(&g, r#"[{"vertex":"u","edge":"e1","coeff":1}]"#).is_err());
        assert!(matches!(
            parse_divisor(&g, r#"[{"edge":"e1","offset":"3/2","coeff":1}]"#),
            Err(Error::OffsetOutOfRange { .. })
        ));
    }

    #[test]
    fn set_document() {
        let g = dumbbell();
        let w = mid(&g, "e");
        let m = Arc::new(refine_model(&g, [w.clone()]).unwrap());
        let s = AdmissibleSet::from_indices(
            Arc::clone(&m),
            [m.vertex_of(&vx(&g, "u")).unwrap(), m.vertex_of(&w).unwrap()],
            [m.edge_by_name("A#0").unwrap(), m.edge_by_name("e#0").unwrap()],
        )
        .unwrap();
        let doc = set_to_json(&s);
        assert_eq!(doc.vertices, vec!["u", "e@1/2"]);
        assert_eq!(doc.edges, vec!["A#0", "e#0"]);
        assert_eq!(doc.spset.len(), 2);
        let text = to_pretty(&doc);
        assert_eq!(set_from_json(&g, &parse(&text).unwrap()).unwrap(), s);

        let bad = SetJson { model_points: vec![], vertices: vec![], edges: vec!["A#0".into()], spset: vec![] };
        assert!(matches!(set_from_json(&g, &bad), Err(Error::MalformedSet(_))));
    }

    #[test]
    fn reduction_document_round_trips() {
        let g = dumbbell();
        let d = Divisor::point(mid(&g, "e"));
        let r = semibreak_reduce(&g, &d, ReduceOptions { trace: true, ..Default::default() }).unwrap();
        let doc = reduction_to_json(&g, &r);
        let text = to_pretty(&doc);
        let back = reduction_from_json(&g, &parse(&text).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(reduction_to_json(&g, &back), doc);
    }
}
