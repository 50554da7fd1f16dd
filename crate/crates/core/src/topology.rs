//! Closed admissible sets and their topology.
//!
//! A closed admissible set is carried together with a model `G` as a pair
//! `(I, J)`: a set of model vertices and a set of model edges whose endpoints
//! all lie in `I`. The set it stands for is `I` together with the closed edges
//! in `J`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Model, PointRef, UnionFind};
use crate::rational::{self, Rational};

#[derive(Clone)]
pub struct AdmissibleSet {
    model: Arc<Model>,
    vertices: Vec<bool>,
    edges: Vec<bool>,
}

impl fmt::Debug for AdmissibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let graph = self.model.graph();
        let names: Vec<String> = self
            .vertex_indices()
            .map(|v| match self.model.point(v) {
                PointRef::Vertex(w) => graph.vertex_id(*w).to_string(),
                PointRef::Edge { edge, offset } => {
                    format!("{}@{}", graph.edge(*edge).id, rational::format_rational(offset))
                }
            })
            .collect();
        let edges: Vec<String> = self.edge_indices().map(|e| self.model.edge_name(e)).collect();
        f.debug_struct("AdmissibleSet")
            .field("I", &names)
            .field("J", &edges)
            .finish()
    }
}

/// Semantic equality: both sets are compared in a common refinement.
impl PartialEq for AdmissibleSet {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.model, &other.model) || *self.model == *other.model {
            return self.vertices == other.vertices && self.edges == other.edges;
        }
        match self.aligned(other) {
            Ok((a, b)) => a.vertices == b.vertices && a.edges == b.edges,
            Err(_) => false,
        }
    }
}

impl Eq for AdmissibleSet {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyProfile {
    pub chi_s: i64,
    pub chi_complement: i64,
    pub p_a: i64,
    pub psi: i64,
    pub components: i64,
    pub betti1: i64,
}

/// A connected component of the open complement `Γ \ S`.
#[derive(Clone, Debug)]
pub struct ComplementComponent {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub has_branch_point: bool,
    pub length: Rational,
}

impl AdmissibleSet {
    pub fn new(model: Arc<Model>, vertices: Vec<bool>, edges: Vec<bool>) -> Result<Self> {
        if vertices.len() != model.vertex_count() || edges.len() != model.edge_count() {
            return Err(Error::MalformedSet("membership vectors do not match the model".into()));
        }
        for (e, _) in edges.iter().enumerate().filter(|(_, &inside)| inside) {
            let me = model.edge(e);
            if !vertices[me.ends[0]] || !vertices[me.ends[1]] {
                return Err(Error::MalformedSet(format!(
                    "edge {} is in J but an endpoint is not in I",
                    model.edge_name(e)
                )));
            }
        }
        Ok(AdmissibleSet { model, vertices, edges })
    }

    pub fn from_indices<I, J>(model: Arc<Model>, vertices: I, edges: J) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
        J: IntoIterator<Item = usize>,
    {
        let mut vs = vec![false; model.vertex_count()];
        let mut es = vec![false; model.edge_count()];
        for v in vertices {
            *vs.get_mut(v)
                .ok_or_else(|| Error::MalformedSet(format!("no model vertex {v}")))? = true;
        }
        for e in edges {
            *es.get_mut(e)
                .ok_or_else(|| Error::MalformedSet(format!("no model edge {e}")))? = true;
        }
        Self::new(model, vs, es)
    }

    pub fn empty(model: Arc<Model>) -> Self {
        let (nv, ne) = (model.vertex_count(), model.edge_count());
        AdmissibleSet { model, vertices: vec![false; nv], edges: vec![false; ne] }
    }

    pub fn full(model: Arc<Model>) -> Self {
        let (nv, ne) = (model.vertex_count(), model.edge_count());
        AdmissibleSet { model, vertices: vec![true; nv], edges: vec![true; ne] }
    }

    /// `conv_G(X)`: `X` plus every model edge whose endpoint slots both lie in
    /// `X` (loops at a vertex of `X` included).
    pub fn conv_model(model: Arc<Model>, subset: &[bool]) -> Self {
        assert_eq!(subset.len(), model.vertex_count());
        let edges = model
            .edges()
            .iter()
            .map(|e| subset[e.ends[0]] && subset[e.ends[1]])
            .collect();
        AdmissibleSet { model, vertices: subset.to_vec(), edges }
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn graph(&self) -> &Arc<MetricGraph> {
        self.model.graph()
    }

    pub fn vertices(&self) -> &[bool] {
        &self.vertices
    }

    pub fn edges(&self) -> &[bool] {
        &self.edges
    }

    pub fn vertex_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn is_empty(&self) -> bool {
        !self.vertices.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.vertices.iter().all(|&b| b) && self.edges.iter().all(|&b| b)
    }

    pub fn contains_point(&self, p: &PointRef) -> bool {
        match self.model.locate(p) {
            crate::graph::Location::Vertex(v) => self.vertices[v],
            crate::graph::Location::Interior(e) => self.edges[e],
        }
    }

    /// Number of branch points of the metric graph lying in the set.
    pub fn branch_point_count(&self) -> usize {
        self.vertex_indices().filter(|&v| self.model.is_branch(v)).count()
    }

    /// Re-expresses the set in a finer model.
    pub fn refine_to(&self, target: &Arc<Model>) -> Result<Self> {
        if Arc::ptr_eq(&self.model, target) || *self.model == **target {
            return Ok(AdmissibleSet { model: Arc::clone(target), ..self.clone() });
        }
        if !self.model.is_refined_by(target) {
            return Err(Error::ModelMismatch);
        }
        let vertices = target.points().iter().map(|p| self.contains_point(p)).collect();
        let edges = target
            .edges()
            .iter()
            .map(|e| {
                let old = self
                    .model
                    .piece_containing(e.base, &e.start, &e.end)
                    .expect("finer piece lies in a coarser piece");
                self.edges[old]
            })
            .collect();
        Ok(AdmissibleSet { model: Arc::clone(target), vertices, edges })
    }

    /// Both sets in their common refinement.
    pub fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        if Arc::ptr_eq(&self.model, &other.model) || *self.model == *other.model {
            return Ok((self.clone(), AdmissibleSet { model: Arc::clone(&self.model), ..other.clone() }));
        }
        let common = Arc::new(self.model.common_refinement(&other.model)?);
        Ok((self.refine_to(&common)?, other.refine_to(&common)?))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let vertices = a.vertices.iter().zip(&b.vertices).map(|(x, y)| *x || *y).collect();
        let edges = a.edges.iter().zip(&b.edges).map(|(x, y)| *x || *y).collect();
        Ok(AdmissibleSet { model: a.model, vertices, edges })
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let vertices = a.vertices.iter().zip(&b.vertices).map(|(x, y)| *x && *y).collect();
        let edges = a.edges.iter().zip(&b.edges).map(|(x, y)| *x && *y).collect();
        Ok(AdmissibleSet { model: a.model, vertices, edges })
    }

    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        let (a, b) = self.aligned(other)?;
        Ok(a.vertices.iter().zip(&b.vertices).all(|(x, y)| !*x || *y)
            && a.edges.iter().zip(&b.edges).all(|(x, y)| !*x || *y))
    }

    /// The set with finitely many extra points added.
    pub fn with_points<I: IntoIterator<Item = PointRef>>(&self, points: I) -> Result<Self> {
        let points: Vec<PointRef> = points.into_iter().collect();
        let model = Arc::new(self.model.refine(points.iter().cloned())?);
        let mut out = self.refine_to(&model)?;
        for p in &points {
            let v = model.vertex_of(p).expect("refined at p");
            out.vertices[v] = true;
        }
        Ok(out)
    }

    pub fn profile(&self) -> TopologyProfile {
        topology_profile(self)
    }

    pub fn psi(&self) -> i64 {
        topology_profile(self).psi
    }

    /// Connected components of the open complement, in order of their
    /// smallest member.
    pub fn complement_components(&self) -> Vec<ComplementComponent> {
        let nv = self.model.vertex_count();
        let mut uf = UnionFind::new(nv + self.model.edge_count());
        for (e, me) in self.model.edges().iter().enumerate() {
            if self.edges[e] {
                continue;
            }
            for &end in &me.ends {
                if !self.vertices[end] {
                    uf.union(nv + e, end);
                }
            }
        }
        let mut groups: BTreeMap<usize, ComplementComponent> = BTreeMap::new();
        let mut order: Vec<usize> = Vec::new();
        let mut entry = |root: usize, groups: &mut BTreeMap<usize, ComplementComponent>| {
            groups.entry(root).or_insert_with(|| {
                order.push(root);
                ComplementComponent {
                    vertices: Vec::new(),
                    edges: Vec::new(),
                    has_branch_point: false,
                    length: Rational::zero(),
                }
            });
        };
        for v in (0..nv).filter(|&v| !self.vertices[v]) {
            let root = uf.find(v);
            entry(root, &mut groups);
            let c = groups.get_mut(&root).unwrap();
            c.vertices.push(v);
            c.has_branch_point |= self.model.is_branch(v);
        }
        for e in (0..self.model.edge_count()).filter(|&e| !self.edges[e]) {
            let root = uf.find(nv + e);
            entry(root, &mut groups);
            let c = groups.get_mut(&root).unwrap();
            c.edges.push(e);
            c.length += self.model.edge(e).length();
        }
        let mut out: Vec<ComplementComponent> = order.into_iter().map(|r| groups.remove(&r).unwrap()).collect();
        out.sort_by_key(|c| (c.vertices.first().copied().unwrap_or(usize::MAX), c.edges.first().copied()));
        out
    }

    /// The convex hull: every complement component that avoids all branch
    /// points is an open segment inside one edge of the metric graph with both
    /// ends in the set, and gets filled in.
    pub fn convex_hull(&self) -> Self {
        let mut out = self.clone();
        for c in self.complement_components() {
            if !c.has_branch_point {
                for v in c.vertices {
                    out.vertices[v] = true;
                }
                for e in c.edges {
                    out.edges[e] = true;
                }
            }
        }
        out
    }

    pub fn is_convex(&self) -> bool {
        self.complement_components().iter().all(|c| c.has_branch_point)
    }

    /// Number of complement segments with both ends in the set.
    pub fn diff_count(&self) -> usize {
        self.complement_components()
            .iter()
            .filter(|c| !c.has_branch_point)
            .count()
    }

    /// `val_S` on the boundary, keyed by model vertex.
    pub fn boundary_valence_by_vertex(&self) -> Vec<(usize, usize)> {
        self.vertex_indices()
            .filter_map(|v| {
                let leaving = self
                    .model
                    .incidence(v)
                    .iter()
                    .filter(|(e, _)| !self.edges[*e])
                    .count();
                (leaving > 0).then_some((v, leaving))
            })
            .collect()
    }

    pub fn boundary_valence(&self) -> BTreeMap<PointRef, usize> {
        self.boundary_valence_by_vertex()
            .into_iter()
            .map(|(v, val)| (self.model.point(v).clone(), val))
            .collect()
    }

    pub fn cut_size(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        if self.is_full() {
            return Err(Error::NotProper);
        }
        Ok(self.boundary_valence_by_vertex().iter().map(|(_, val)| val).sum())
    }

    /// Exact distance from the set to the nearest of `targets` (input vertices).
    pub fn distance_to(&self, targets: &[usize]) -> Result<Rational> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        if targets.is_empty() {
            return Err(Error::EmptyTargets);
        }
        let dist = self.model.distances_from(&self.vertices);
        targets
            .iter()
            .map(|&t| {
                dist.get(t)
                    .cloned()
                    .flatten()
                    .ok_or_else(|| Error::UnknownVertex(format!("#{t}")))
            })
            .try_fold(None::<Rational>, |best, d| {
                let d = d?;
                Ok(Some(match best {
                    Some(b) if b <= d => b,
                    _ => d,
                }))
            })
            .map(|d| d.expect("targets nonempty"))
    }

    /// `dist(S, V_Γ \ S)`; `None` when every branch point lies in the set.
    pub fn distance_to_outside_branch_points(&self) -> Result<Option<Rational>> {
        let graph = self.model.graph();
        let targets: Vec<usize> = graph
            .branch_points()
            .into_iter()
            .filter(|&v| !self.vertices[v])
            .collect();
        if targets.is_empty() {
            if self.is_empty() {
                return Err(Error::EmptySet);
            }
            return Ok(None);
        }
        self.distance_to(&targets).map(Some)
    }

    /// Refines the model at every point whose distance from the set is exactly
    /// `eps`, returning the refined set and per-vertex distances.
    fn level_refinement(&self, eps: &Rational) -> Result<(AdmissibleSet, Vec<Rational>)> {
        if !eps.is_positive() {
            return Err(Error::NonpositiveEps);
        }
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let dist = self.vertex_distances();
        let graph = self.model.graph();
        let mut cuts = Vec::new();
        for (e, me) in self.model.edges().iter().enumerate() {
            if self.edges[e] {
                continue;
            }
            let len = me.length();
            let near_start = eps - &dist[me.ends[0]];
            let near_end = &len - (eps - &dist[me.ends[1]]);
            for t in [near_start, near_end] {
                if t.is_positive() && t < len {
                    let offset = &me.start + t;
                    cuts.push(crate::graph::normalize_point(graph, me.base, &offset)?);
                }
            }
        }
        let model = Arc::new(self.model.refine(cuts)?);
        let set = self.refine_to(&model)?;
        let dist = set.vertex_distances();
        Ok((set, dist))
    }

    fn vertex_distances(&self) -> Vec<Rational> {
        self.model
            .distances_from(&self.vertices)
            .into_iter()
            .map(|d| d.expect("metric graph is connected"))
            .collect()
    }

    /// The closed `eps`-fattening `{x : d(x, S) <= eps}`.
    pub fn fatten(&self, eps: &Rational) -> Result<Self> {
        let (set, dist) = self.level_refinement(eps)?;
        let model = Arc::clone(&set.model);
        let vertices = dist.iter().map(|d| d <= eps).collect();
        let two = rational::int(2);
        let edges = model
            .edges()
            .iter()
            .enumerate()
            .map(|(e, me)| {
                set.edges[e] || (&dist[me.ends[0]] + &dist[me.ends[1]] + me.length()) / &two <= *eps
            })
            .collect();
        AdmissibleSet::new(model, vertices, edges)
    }

    /// The closed set `{x : d(x, S) >= eps}`, the complement of the open
    /// `eps`-neighbourhood.
    pub fn far_set(&self, eps: &Rational) -> Result<Self> {
        let (set, dist) = self.level_refinement(eps)?;
        let model = Arc::clone(&set.model);
        let vertices = dist.iter().map(|d| d >= eps).collect();
        let edges = model
            .edges()
            .iter()
            .enumerate()
            .map(|(e, me)| {
                !set.edges[e] && dist[me.ends[0]] >= *eps && dist[me.ends[1]] >= *eps
            })
            .collect();
        AdmissibleSet::new(model, vertices, edges)
    }

    /// Per base edge, the endpoints of the maximal closed pieces of
    /// `ē ∩ S`. Convex sets are recovered as the convex hull of these points.
    pub fn spset(&self) -> Vec<PointRef> {
        let graph = self.model.graph();
        let mut out = BTreeSet::new();
        for b in 0..graph.edge_count() {
            let pieces: Vec<usize> = self.model.pieces_of(b).collect();
            // cut vertices along the base edge, in order
            let mut cuts: Vec<usize> = vec![self.model.edge(pieces[0]).ends[0]];
            cuts.extend(pieces.iter().map(|&p| self.model.edge(p).ends[1]));
            let mut k = 0;
            while k < cuts.len() {
                if !self.vertices[cuts[k]] {
                    k += 1;
                    continue;
                }
                let start = k;
                while k < pieces.len() && self.edges[pieces[k]] {
                    k += 1;
                }
                out.insert(self.model.point(cuts[start]).clone());
                out.insert(self.model.point(cuts[k]).clone());
                k += 1;
            }
        }
        out.into_iter().collect()
    }
}

/// Euler characteristics, arithmetic genus and genus contribution of a closed
/// admissible set.
pub fn topology_profile(set: &AdmissibleSet) -> TopologyProfile {
    let model = set.model();
    let n_i = set.vertex_indices().count() as i64;
    let n_j = set.edge_indices().count() as i64;
    let chi_s = n_i - n_j;

    let outside = (model.vertex_count() as i64) - n_i;
    let mut chi_complement = outside;
    for (e, me) in model.edges().iter().enumerate() {
        if set.edges()[e] {
            continue;
        }
        let (a, b) = (set.vertices()[me.ends[0]], set.vertices()[me.ends[1]]);
        if !a && !b {
            chi_complement -= 1;
        } else if a && b {
            chi_complement += 1;
        }
    }
    let chi_gamma = 1 - model.graph().genus() as i64;

    let mut uf = UnionFind::new(model.vertex_count());
    for e in set.edge_indices() {
        let me = model.edge(e);
        uf.union(me.ends[0], me.ends[1]);
    }
    let roots: BTreeSet<usize> = set.vertex_indices().map(|v| uf.find(v)).collect();
    let components = roots.len() as i64;

    TopologyProfile {
        chi_s,
        chi_complement,
        p_a: 1 - chi_s,
        psi: chi_complement - chi_gamma,
        components,
        betti1: components - chi_s,
    }
}

pub fn convex_hull(set: &AdmissibleSet) -> AdmissibleSet {
    set.convex_hull()
}

pub fn conv_model(model: &Arc<Model>, subset: &[bool]) -> AdmissibleSet {
    AdmissibleSet::conv_model(Arc::clone(model), subset)
}

pub fn diff_count(set: &AdmissibleSet) -> usize {
    set.diff_count()
}

pub fn boundary_valence(set: &AdmissibleSet) -> BTreeMap<PointRef, usize> {
    set.boundary_valence()
}

pub fn cut_size(set: &AdmissibleSet) -> Result<usize> {
    set.cut_size()
}

pub fn fatten(set: &AdmissibleSet, eps: &Rational) -> Result<AdmissibleSet> {
    set.fatten(eps)
}

pub fn distance_from_set(set: &AdmissibleSet, targets: &[usize]) -> Result<Rational> {
    set.distance_to(targets)
}

/// Smallest number of disjoint open segments whose removal disconnects the
/// graph: 1 when there is a bridge, otherwise 2 (two cuts on any edge).
pub fn metric_min_cut_size(graph: &MetricGraph) -> usize {
    for skip in 0..graph.edge_count() {
        if graph.edge(skip).is_loop() {
            continue;
        }
        let mut uf = UnionFind::new(graph.vertex_count());
        for (e, edge) in graph.edges().iter().enumerate() {
            if e != skip {
                uf.union(edge.ends[0], edge.ends[1]);
            }
        }
        let root = uf.find(0);
        if (1..graph.vertex_count()).any(|v| uf.find(v) != root) {
            return 1;
        }
    }
    2
}
