//! Random graphs, divisors and sets shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semibreak_core::graph::Model;
use semibreak_core::oracle::{spanning_tree_complements, DEFAULT_TREE_EDGE_BOUND};
use semibreak_core::rational::{int, rat};
use semibreak_core::{
    build_graph, normalize_point, refine_model, AdmissibleSet, Divisor, EdgeDescription, Error,
    GraphDescription, MetricGraph, PointRef, Rational,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct GraphParams {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_genus: usize,
    pub max_denominator: i64,
    pub integer_lengths: bool,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams { max_vertices: 6, max_edges: 9, max_genus: 4, max_denominator: 8, integer_lengths: false }
    }
}

fn random_length(rng: &mut ChaCha8Rng, params: &GraphParams) -> Rational {
    if params.integer_lengths {
        int(rng.gen_range(1..=3))
    } else {
        let den = rng.gen_range(1..=params.max_denominator);
        rat(rng.gen_range(1..=2 * den), den)
    }
}

/// A connected multigraph (loops allowed) with a branch point: a random
/// spanning tree plus `g` extra edges.
pub fn random_graph(rng: &mut ChaCha8Rng, params: &GraphParams) -> Arc<MetricGraph> {
    loop {
        let n = rng.gen_range(1..=params.max_vertices);
        let mut ends: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
        let room = params.max_genus.min(params.max_edges - (n - 1));
        let extra = rng.gen_range(0..=room);
        for _ in 0..extra {
            ends.push((rng.gen_range(0..n), rng.gen_range(0..n)));
        }
        ends.shuffle(rng);
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges = ends
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
                EdgeDescription::new(&format!("e{k}"), &vertices[a], &vertices[b], random_length(rng, params))
            })
            .collect();
        match build_graph(&GraphDescription { vertices, edges }) {
            Ok(g) => return Arc::new(g),
            Err(Error::DegenerateGraph(_)) => continue,
            Err(e) => panic!("generator produced an invalid graph: {e}"),
        }
    }
}

/// A bridgeless graph: two branch points joined by `k >= 3` parallel edges,
/// optionally with loops or a subdivided edge.
pub fn random_theta_like(rng: &mut ChaCha8Rng) -> Arc<MetricGraph> {
    let k = rng.gen_range(3..=4);
    let mut vertices = vec!["a".to_string(), "b".to_string()];
    let mut edges: Vec<EdgeDescription> = (0..k)
        .map(|i| EdgeDescription::new(&format!("p{i}"), "a", "b", rat(rng.gen_range(1..=4), rng.gen_range(1..=3))))
        .collect();
    if rng.gen_bool(0.5) {
        edges.push(EdgeDescription::new("loop", "a", "a", rat(rng.gen_range(1..=4), 2)));
    }
    if rng.gen_bool(0.5) {
        vertices.push("m".into());
        edges.push(EdgeDescription::new("q0", "a", "m", int(1)));
        edges.push(EdgeDescription::new("q1", "m", "b", rat(1, 2)));
    }
    Arc::new(build_graph(&GraphDescription { vertices, edges }).expect("theta-like graphs are valid"))
}

pub fn random_point(rng: &mut ChaCha8Rng, graph: &MetricGraph, integral: bool) -> PointRef {
    if rng.gen_bool(0.35) {
        return PointRef::Vertex(rng.gen_range(0..graph.vertex_count()));
    }
    let e = rng.gen_range(0..graph.edge_count());
    let length = &graph.edge(e).length;
    let offset = if integral {
        let whole = length.to_integer();
        let top: i64 = whole.try_into().expect("small lengths");
        int(rng.gen_range(0..=top))
    } else {
        let parts = rng.gen_range(2..=4);
        length * rat(rng.gen_range(1..parts), parts)
    };
    normalize_point(graph, e, &offset).expect("offset inside the edge")
}

pub fn random_effective(rng: &mut ChaCha8Rng, graph: &MetricGraph, degree: usize, integral: bool) -> Divisor {
    let mut d = Divisor::zero();
    for _ in 0..degree {
        // chips like to pile up, which exercises multiplicities
        let p = match d.support().cloned().collect::<Vec<_>>().choose(rng) {
            Some(existing) if rng.gen_bool(0.25) => existing.clone(),
            _ => random_point(rng, graph, integral),
        };
        d.add_chips(p, 1);
    }
    d
}

pub fn random_instance(rng: &mut ChaCha8Rng, params: &GraphParams) -> (Arc<MetricGraph>, Divisor) {
    let graph = random_graph(rng, params);
    let degree = rng.gen_range(0..=graph.genus());
    let d = random_effective(rng, &graph, degree, params.integer_lengths);
    (graph, d)
}

pub fn random_model(rng: &mut ChaCha8Rng, graph: &Arc<MetricGraph>, extra: usize) -> Arc<Model> {
    let points: Vec<PointRef> = (0..extra).map(|_| random_point(rng, graph, false)).collect();
    Arc::new(refine_model(graph, points).expect("points lie on the graph"))
}

pub fn random_closed_set(rng: &mut ChaCha8Rng, model: &Arc<Model>) -> AdmissibleSet {
    let density = rng.gen_range(0.2..0.9);
    let vertices: Vec<bool> = (0..model.vertex_count()).map(|_| rng.gen_bool(density)).collect();
    let edges = model
        .edges()
        .iter()
        .map(|e| vertices[e.ends[0]] && vertices[e.ends[1]] && rng.gen_bool(0.7))
        .collect();
    AdmissibleSet::new(Arc::clone(model), vertices, edges).expect("closed by construction")
}

fn point_in_closure(rng: &mut ChaCha8Rng, model: &Model, edge: usize) -> PointRef {
    let me = model.edge(edge);
    let graph = model.graph();
    match rng.gen_range(0..3) {
        0 => model.point(me.ends[0]).clone(),
        1 => model.point(me.ends[1]).clone(),
        _ => {
            let t = &me.start + me.length() * rat(1, 2);
            normalize_point(graph, me.base, &t).expect("midpoint of a piece")
        }
    }
}

/// One point in the closure of each of `count` edges removed by a random
/// spanning tree of a random model.
pub fn random_tree_divisor(rng: &mut ChaCha8Rng, graph: &Arc<MetricGraph>, count: usize) -> Divisor {
    let extra = rng.gen_range(0..=2);
    let model = random_model(rng, graph, extra);
    let trees = spanning_tree_complements(&model, DEFAULT_TREE_EDGE_BOUND).expect("small model");
    let tree = trees.choose(rng).expect("a connected graph has a spanning tree");
    let mut chosen = tree.edges.clone();
    chosen.shuffle(rng);
    Divisor::from_pairs(chosen.iter().take(count).map(|&e| (point_in_closure(rng, &model, e), 1)))
}

pub fn random_break_divisor(rng: &mut ChaCha8Rng, graph: &Arc<MetricGraph>) -> Divisor {
    random_tree_divisor(rng, graph, graph.genus())
}

pub fn theta() -> Arc<MetricGraph> {
    Arc::new(
        build_graph(&GraphDescription {
            vertices: vec!["u".into(), "v".into()],
            edges: vec![
                EdgeDescription::new("e1", "u", "v", int(1)),
                EdgeDescription::new("e2", "u", "v", int(1)),
                EdgeDescription::new("e3", "u", "v", int(1)),
            ],
        })
        .unwrap(),
    )
}

/// Loops `A` at `u` and `B` at `v`, joined by the bridge `e`.
pub fn dumbbell() -> Arc<MetricGraph> {
    Arc::new(
        build_graph(&GraphDescription {
            vertices: vec!["u".into(), "v".into()],
            edges: vec![
                EdgeDescription::new("A", "u", "u", int(1)),
                EdgeDescription::new("B", "v", "v", int(1)),
                EdgeDescription::new("e", "u", "v", int(1)),
            ],
        })
        .unwrap(),
    )
}

pub fn vx(graph: &MetricGraph, id: &str) -> PointRef {
    PointRef::Vertex(graph.vertex_by_id(id).unwrap())
}

pub fn at(graph: &MetricGraph, edge: &str, offset: Rational) -> PointRef {
    normalize_point(graph, graph.edge_by_id(edge).unwrap(), &offset).unwrap()
}
