//! Metric graphs, points, models and exact shortest distances.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type VertexIdx = usize;
pub type EdgeIdx = usize;

/// Which end of an edge: `Tail` is `end0` (offset 0), `Head` is `end1`
/// (offset = length).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn index(self) -> usize {
        match self {
            End::Tail => 0,
            End::Head => 1,
        }
    }

    pub fn opposite(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDescription {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDescription>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDescription {
    pub id: String,
    pub ends: [String; 2],
    #[serde(with = "rational::serde_str")]
    pub length: Rational,
}

impl EdgeDescription {
    pub fn new(id: &str, end0: &str, end1: &str, length: Rational) -> Self {
        EdgeDescription {
            id: id.to_string(),
            ends: [end0.to_string(), end1.to_string()],
            length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [VertexIdx; 2],
    pub length: Rational,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

/// A validated compact connected metric graph.
///
/// Vertices and edges are stored sorted by id, so index order is id order and
/// every derived tie-break is deterministic. Input vertices of valency two are
/// kept (the input is treated as a chosen model); the branch points are the
/// vertices of valency other than two.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    vertex_ids: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<(EdgeIdx, End)>>,
    branch: Vec<bool>,
    genus: usize,
    vertex_lookup: HashMap<String, VertexIdx>,
    edge_lookup: HashMap<String, EdgeIdx>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_ids == other.vertex_ids && self.edges == other.edges
    }
}

impl Eq for MetricGraph {}

fn check_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains('#') || id.contains('@') {
        return Err(Error::InvalidId(id.to_string()));
    }
    Ok(())
}

/// Validates a graph description.
pub fn build_graph(desc: &GraphDescription) -> Result<MetricGraph> {
    let mut vertex_ids = desc.vertices.clone();
    for id in &vertex_ids {
        check_id(id)?;
    }
    vertex_ids.sort();
    if let Some(w) = vertex_ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId(w[0].clone()));
    }
    if vertex_ids.is_empty() {
        return Err(Error::DegenerateGraph("no vertices"));
    }
    let vertex_lookup: HashMap<String, VertexIdx> = vertex_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();

    let mut sorted: Vec<&EdgeDescription> = desc.edges.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let mut edges = Vec::with_capacity(sorted.len());
    for (k, e) in sorted.iter().enumerate() {
        check_id(&e.id)?;
        if k > 0 && sorted[k - 1].id == e.id {
            return Err(Error::DuplicateId(e.id.clone()));
        }
        let mut ends = [0; 2];
        for (slot, name) in ends.iter_mut().zip(&e.ends) {
            *slot = *vertex_lookup
                .get(name)
                .ok_or_else(|| Error::UnknownVertex(name.clone()))?;
        }
        if !e.length.is_positive() {
            return Err(Error::NonpositiveLength(e.id.clone()));
        }
        edges.push(Edge {
            id: e.id.clone(),
            ends,
            length: e.length.clone(),
        });
    }
    if let Some(clash) = edges.iter().find(|e| vertex_lookup.contains_key(&e.id)) {
        return Err(Error::DuplicateId(clash.id.clone()));
    }
    let edge_lookup = edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.clone(), i))
        .collect();

    let mut incidence = vec![Vec::new(); vertex_ids.len()];
    for (i, e) in edges.iter().enumerate() {
        incidence[e.ends[0]].push((i, End::Tail));
        incidence[e.ends[1]].push((i, End::Head));
    }

    if vertex_ids.len() == 1 && edges.is_empty() {
        return Err(Error::DegenerateGraph("a single point"));
    }
    let mut uf = UnionFind::new(vertex_ids.len());
    for e in &edges {
        uf.union(e.ends[0], e.ends[1]);
    }
    if (1..vertex_ids.len()).any(|v| uf.find(v) != uf.find(0)) {
        return Err(Error::DisconnectedGraph);
    }
    let branch: Vec<bool> = incidence.iter().map(|inc| inc.len() != 2).collect();
    if !branch.iter().any(|&b| b) {
        return Err(Error::DegenerateGraph("a circle"));
    }
    let genus = edges.len() + 1 - vertex_ids.len();

    Ok(MetricGraph {
        vertex_ids,
        edges,
        incidence,
        branch,
        genus,
        vertex_lookup,
        edge_lookup,
    })
}

impl MetricGraph {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, v: VertexIdx) -> &str {
        &self.vertex_ids[v]
    }

    pub fn edge(&self, e: EdgeIdx) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn incidence(&self, v: VertexIdx) -> &[(EdgeIdx, End)] {
        &self.incidence[v]
    }

    pub fn valency(&self, v: VertexIdx) -> usize {
        self.incidence[v].len()
    }

    pub fn is_branch(&self, v: VertexIdx) -> bool {
        self.branch[v]
    }

    /// The branch points, in id order.
    pub fn branch_points(&self) -> Vec<VertexIdx> {
        (0..self.vertex_count()).filter(|&v| self.branch[v]).collect()
    }

    pub fn vertex_by_id(&self, id: &str) -> Result<VertexIdx> {
        self.vertex_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_by_id(&self, id: &str) -> Result<EdgeIdx> {
        self.edge_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn to_description(&self) -> GraphDescription {
        GraphDescription {
            vertices: self.vertex_ids.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDescription {
                    id: e.id.clone(),
                    ends: [
                        self.vertex_ids[e.ends[0]].clone(),
                        self.vertex_ids[e.ends[1]].clone(),
                    ],
                    length: e.length.clone(),
                })
                .collect(),
        }
    }

    /// Base-edge coordinates of a point: a vertex reports one of its incident
    /// edge-ends (or `None` for an isolated vertex, which cannot occur in a
    /// validated graph).
    pub fn point_position(&self, p: &PointRef) -> (EdgeIdx, Rational) {
        match p {
            PointRef::Vertex(v) => {
                let (e, end) = self.incidence[*v][0];
                let offset = match end {
                    End::Tail => Rational::zero(),
                    End::Head => self.edges[e].length.clone(),
                };
                (e, offset)
            }
            PointRef::Edge { edge, offset } => (*edge, offset.clone()),
        }
    }

    /// Checks that a point refers to this graph and is normalized.
    pub fn check_point(&self, p: &PointRef) -> Result<()> {
        match p {
            PointRef::Vertex(v) if *v < self.vertex_count() => Ok(()),
            PointRef::Edge { edge, offset }
                if *edge < self.edge_count()
                    && offset.is_positive()
                    && *offset < self.edges[*edge].length =>
            {
                Ok(())
            }
            _ => Err(Error::PointOffGraph),
        }
    }
}

/// Maps `(edge, offset)` with `0 <= offset <= length` to its normal form:
/// the two extreme offsets become the end vertices.
pub fn normalize_point(graph: &MetricGraph, edge: EdgeIdx, offset: &Rational) -> Result<PointRef> {
    let e = graph
        .edges
        .get(edge)
        .ok_or_else(|| Error::UnknownEdge(format!("#{edge}")))?;
    if offset.is_negative() || *offset > e.length {
        return Err(Error::OffsetOutOfRange {
            edge: e.id.clone(),
            offset: rational::format_rational(offset),
            length: rational::format_rational(&e.length),
        });
    }
    if offset.is_zero() {
        Ok(PointRef::Vertex(e.ends[0]))
    } else if *offset == e.length {
        Ok(PointRef::Vertex(e.ends[1]))
    } else {
        Ok(PointRef::Edge {
            edge,
            offset: offset.clone(),
        })
    }
}

/// A point of the metric graph in normal form.
///
/// The derived order is (kind, index, offset) with vertices first; since
/// indices follow id order this is the deterministic tie-break order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointRef {
    Vertex(VertexIdx),
    Edge { edge: EdgeIdx, offset: Rational },
}

impl PointRef {
    pub fn as_vertex(&self) -> Option<VertexIdx> {
        match self {
            PointRef::Vertex(v) => Some(*v),
            PointRef::Edge { .. } => None,
        }
    }
}

/// One edge of a model: the sub-interval `[start, end]` of a base edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelEdge {
    pub base: EdgeIdx,
    /// Position among the pieces of the base edge, counted from `end0`.
    pub sub: usize,
    pub start: Rational,
    pub end: Rational,
    /// Model vertex indices at `start` and `end`.
    pub ends: [usize; 2],
}

impl ModelEdge {
    pub fn length(&self) -> Rational {
        &self.end - &self.start
    }

    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

/// A subdivision of the input graph at finitely many interior points.
///
/// Model vertex `i < graph.vertex_count()` is input vertex `i`; the remaining
/// model vertices are the extra points in [`PointRef`] order.
#[derive(Clone, Debug)]
pub struct Model {
    graph: Arc<MetricGraph>,
    points: Vec<PointRef>,
    lookup: BTreeMap<PointRef, usize>,
    edges: Vec<ModelEdge>,
    incidence: Vec<Vec<(usize, End)>>,
    pieces: Vec<std::ops::Range<usize>>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph)
            && self.points == other.points
    }
}

impl Eq for Model {}

/// Builds the model whose vertex set is the input vertices plus `points`.
pub fn refine_model<I>(graph: &Arc<MetricGraph>, points: I) -> Result<Model>
where
    I: IntoIterator<Item = PointRef>,
{
    let mut extra: BTreeSet<(EdgeIdx, Rational)> = BTreeSet::new();
    for p in points {
        graph.check_point(&p)?;
        if let PointRef::Edge { edge, offset } = p {
            extra.insert((edge, offset));
        }
    }
    let nv = graph.vertex_count();
    let mut points_vec: Vec<PointRef> = (0..nv).map(PointRef::Vertex).collect();
    points_vec.extend(
        extra
            .iter()
            .map(|(edge, offset)| PointRef::Edge { edge: *edge, offset: offset.clone() }),
    );
    let lookup: BTreeMap<PointRef, usize> = points_vec
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();

    let mut edges = Vec::new();
    let mut pieces = Vec::with_capacity(graph.edge_count());
    for (b, base) in graph.edges().iter().enumerate() {
        let first = edges.len();
        let mut cuts: Vec<(Rational, usize)> = vec![(Rational::zero(), base.ends[0])];
        for (edge, offset) in extra.range((b, Rational::zero())..) {
            if *edge != b {
                break;
            }
            let p = PointRef::Edge { edge: b, offset: offset.clone() };
            cuts.push((offset.clone(), lookup[&p]));
        }
        cuts.push((base.length.clone(), base.ends[1]));
        for (sub, w) in cuts.windows(2).enumerate() {
            edges.push(ModelEdge {
                base: b,
                sub,
                start: w[0].0.clone(),
                end: w[1].0.clone(),
                ends: [w[0].1, w[1].1],
            });
        }
        pieces.push(first..edges.len());
    }
    let mut incidence = vec![Vec::new(); points_vec.len()];
    for (i, e) in edges.iter().enumerate() {
        incidence[e.ends[0]].push((i, End::Tail));
        incidence[e.ends[1]].push((i, End::Head));
    }
    Ok(Model {
        graph: Arc::clone(graph),
        points: points_vec,
        lookup,
        edges,
        incidence,
        pieces,
    })
}

/// Where a point sits in a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Vertex(usize),
    Interior(usize),
}

impl Model {
    pub fn trivial(graph: &Arc<MetricGraph>) -> Model {
        refine_model(graph, std::iter::empty()).expect("no points to validate")
    }

    pub fn graph(&self) -> &Arc<MetricGraph> {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn point(&self, v: usize) -> &PointRef {
        &self.points[v]
    }

    pub fn points(&self) -> &[PointRef] {
        &self.points
    }

    /// The interior points added on top of the input vertices.
    pub fn extra_points(&self) -> &[PointRef] {
        &self.points[self.graph.vertex_count()..]
    }

    pub fn edge(&self, e: usize) -> &ModelEdge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[ModelEdge] {
        &self.edges
    }

    pub fn incidence(&self, v: usize) -> &[(usize, End)] {
        &self.incidence[v]
    }

    pub fn pieces_of(&self, base: EdgeIdx) -> std::ops::Range<usize> {
        self.pieces[base].clone()
    }

    pub fn vertex_of(&self, p: &PointRef) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    /// Model vertices that are branch points of the metric graph.
    pub fn is_branch(&self, v: usize) -> bool {
        v < self.graph.vertex_count() && self.graph.is_branch(v)
    }

    /// Deterministic sub-edge id `"<base id>#<k>"`.
    pub fn edge_name(&self, e: usize) -> String {
        let me = &self.edges[e];
        format!("{}#{}", self.graph.edge(me.base).id, me.sub)
    }

    pub fn edge_by_name(&self, name: &str) -> Result<usize> {
        let (base, sub) = name
            .rsplit_once('#')
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))?;
        let b = self.graph.edge_by_id(base)?;
        let sub: usize = sub
            .parse()
            .map_err(|_| Error::UnknownEdge(name.to_string()))?;
        let range = self.pieces_of(b);
        if sub >= range.len() {
            return Err(Error::UnknownEdge(name.to_string()));
        }
        Ok(range.start + sub)
    }

    pub fn locate(&self, p: &PointRef) -> Location {
        if let Some(v) = self.vertex_of(p) {
            return Location::Vertex(v);
        }
        match p {
            PointRef::Vertex(_) => unreachable!("input vertices are model vertices"),
            PointRef::Edge { edge, offset } => {
                let range = self.pieces_of(*edge);
                let i = range
                    .clone()
                    .find(|&i| self.edges[i].start < *offset && *offset < self.edges[i].end)
                    .expect("interior point lies inside one piece");
                Location::Interior(i)
            }
        }
    }

    /// The model edge of this model that contains the sub-interval
    /// `[start, end]` of a base edge.
    pub fn piece_containing(&self, base: EdgeIdx, start: &Rational, end: &Rational) -> Option<usize> {
        self.pieces_of(base)
            .find(|&i| self.edges[i].start <= *start && *end <= self.edges[i].end)
    }

    /// A finer model with the extra points added.
    pub fn refine<I: IntoIterator<Item = PointRef>>(&self, points: I) -> Result<Model> {
        refine_model(
            &self.graph,
            self.extra_points().iter().cloned().chain(points),
        )
    }

    pub fn same_graph(&self, other: &Model) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph
    }

    /// The coarsest model refining both.
    pub fn common_refinement(&self, other: &Model) -> Result<Model> {
        if !self.same_graph(other) {
            return Err(Error::ModelMismatch);
        }
        self.refine(other.extra_points().iter().cloned())
    }

    /// True when every vertex of `self` is a vertex of `finer`.
    pub fn is_refined_by(&self, finer: &Model) -> bool {
        self.same_graph(finer) && self.extra_points().iter().all(|p| finer.vertex_of(p).is_some())
    }

    /// Multi-source Dijkstra from the marked model vertices.
    pub fn distances_from(&self, sources: &[bool]) -> Vec<Option<Rational>> {
        let mut dist: Vec<Option<Rational>> = vec![None; self.vertex_count()];
        let mut heap = BinaryHeap::new();
        for (v, &s) in sources.iter().enumerate() {
            if s {
                dist[v] = Some(Rational::zero());
                heap.push(Reverse((Rational::zero(), v)));
            }
        }
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref().is_some_and(|best| *best < d) {
                continue;
            }
            for &(e, end) in &self.incidence[v] {
                let edge = &self.edges[e];
                let w = edge.ends[end.opposite().index()];
                let nd = &d + edge.length();
                if dist[w].as_ref().is_none_or(|best| nd < *best) {
                    dist[w] = Some(nd.clone());
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }
}

/// Where a walk along the graph ends up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkStop {
    /// Landed after exactly the requested distance.
    Landed(PointRef),
    /// Reached a branch point with distance left over.
    HitBranch { vertex: VertexIdx, remaining: Rational },
}

impl MetricGraph {
    /// Walks `distance` along the graph starting at offset `start` of base edge
    /// `edge`, heading towards `toward`. Passing through a valency-two vertex
    /// continues on its other edge; a branch point stops the walk.
    pub fn walk(&self, edge: EdgeIdx, start: &Rational, toward: End, distance: &Rational) -> WalkStop {
        let mut edge = edge;
        let mut pos = start.clone();
        let mut toward = toward;
        let mut remaining = distance.clone();
        loop {
            let len = &self.edges[edge].length;
            let room = match toward {
                End::Head => len - &pos,
                End::Tail => pos.clone(),
            };
            if remaining < room {
                let offset = match toward {
                    End::Head => &pos + &remaining,
                    End::Tail => &pos - &remaining,
                };
                return WalkStop::Landed(
                    normalize_point(self, edge, &offset).expect("offset inside the edge"),
                );
            }
            remaining -= room;
            let w = self.edges[edge].ends[toward.index()];
            if remaining.is_zero() {
                return WalkStop::Landed(PointRef::Vertex(w));
            }
            if self.branch[w] {
                return WalkStop::HitBranch { vertex: w, remaining };
            }
            let &(next, next_end) = self.incidence[w]
                .iter()
                .find(|&&(e, end)| !(e == edge && end == toward))
                .expect("valency-two vertex has a second edge-end");
            edge = next;
            toward = next_end.opposite();
            pos = match next_end {
                End::Tail => Rational::zero(),
                End::Head => self.edges[next].length.clone(),
            };
        }
    }

    /// Follows an edge-end out of a vertex until the first branch point.
    pub fn walk_to_branch(&self, edge: EdgeIdx, from: End) -> VertexIdx {
        let mut edge = edge;
        let mut toward = from.opposite();
        loop {
            let w = self.edges[edge].ends[toward.index()];
            if self.branch[w] {
                return w;
            }
            let &(next, next_end) = self.incidence[w]
                .iter()
                .find(|&&(e, end)| !(e == edge && end == toward))
                .expect("valency-two vertex has a second edge-end");
            edge = next;
            toward = next_end.opposite();
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
