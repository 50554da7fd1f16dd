//! Brute-force verifiers.
//!
//! These share no code path with the engine beyond graph construction and the
//! closed-set type: they enumerate spanning trees, matchings and sets directly.

use std::sync::Arc;

use crate::divisor::{degree_on, Divisor};
use crate::error::{Error, Result};
use crate::error_minmax::{support_model, ErrorProfile};
use crate::graph::{MetricGraph, Model, UnionFind};
use crate::topology::AdmissibleSet;

pub const DEFAULT_TREE_EDGE_BOUND: usize = 25;
pub const MAX_ORACLE_VERTICES: usize = 16;
/// Largest number of closed `(I, J)` forms enumerated for the second check.
pub const SET_FORM_BUDGET: u64 = 1 << 16;

/// The model edges left out of one spanning tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeComplement {
    pub edges: Vec<usize>,
}

impl TreeComplement {
    pub fn names(&self, model: &Model) -> Vec<String> {
        self.edges.iter().map(|&e| model.edge_name(e)).collect()
    }
}

pub fn spanning_tree_complements(model: &Model, bound: usize) -> Result<Vec<TreeComplement>> {
    if model.edge_count() > bound {
        return Err(Error::TooLarge(format!(
            "{} model edges exceed the spanning-tree bound {bound}",
            model.edge_count()
        )));
    }
    let genus = model.graph().genus();
    let mut out = Vec::new();
    let mut excluded = Vec::new();
    let parent: Vec<usize> = (0..model.vertex_count()).collect();
    search(model, 0, parent, &mut excluded, genus, &mut out);
    out.sort();
    Ok(out)
}

fn root(parent: &[usize], mut x: usize) -> usize {
    while parent[x] != x {
        x = parent[x];
    }
    x
}

fn search(
    model: &Model,
    next: usize,
    parent: Vec<usize>,
    excluded: &mut Vec<usize>,
    genus: usize,
    out: &mut Vec<TreeComplement>,
) {
    if next == model.edge_count() {
        if excluded.len() == genus {
            out.push(TreeComplement { edges: excluded.clone() });
        }
        return;
    }
    let remaining = model.edge_count() - next;
    if excluded.len() + remaining < genus {
        return;
    }
    let [a, b] = model.edge(next).ends;
    let (ra, rb) = (root(&parent, a), root(&parent, b));
    if ra != rb {
        let mut contracted = parent.clone();
        contracted[ra] = rb;
        search(model, next + 1, contracted, excluded, genus, out);
    }
    if excluded.len() < genus {
        excluded.push(next);
        search(model, next + 1, parent, excluded, genus, out);
        excluded.pop();
    }
}

/// Kuhn's augmenting paths: can every chip be matched to a distinct edge?
fn perfect_matching(adjacency: &[Vec<usize>], right: usize) -> bool {
    fn augment(u: usize, adjacency: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adjacency[u] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none() || augment(owner[r].unwrap(), adjacency, seen, owner) {
                owner[r] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    (0..adjacency.len()).all(|u| {
        let mut seen = vec![false; right];
        augment(u, adjacency, &mut seen, &mut owner)
    })
}

/// Is `D` dominated by a break divisor? Searches spanning trees of the model
/// carrying `supp(D)` for a matching of chips to removed edges.
pub fn is_semibreak_bruteforce(graph: &Arc<MetricGraph>, d: &Divisor) -> Result<bool> {
    d.check(graph)?;
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    if d.degree() > graph.genus() as i64 {
        return Ok(false);
    }
    let model = support_model(graph, d)?;
    let chips: Vec<usize> = d
        .iter()
        .flat_map(|(p, k)| {
            let v = model.vertex_of(p).expect("support is on the model");
            std::iter::repeat_n(v, k as usize)
        })
        .collect();
    for tree in spanning_tree_complements(&model, DEFAULT_TREE_EDGE_BOUND)? {
        let adjacency: Vec<Vec<usize>> = chips
            .iter()
            .map(|&v| {
                tree.edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| model.edge(e).ends.contains(&v))
                    .map(|(slot, _)| slot)
                    .collect()
            })
            .collect();
        if perfect_matching(&adjacency, tree.edges.len()) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn error(d: &Divisor, set: &AdmissibleSet) -> i64 {
    degree_on(d, set) - set.profile().psi
}

/// Maximum of the error over proper sets `conv_G(X)`, the intersection of
/// all maximizers, and `Error(Γ) > ME` as the break test. When affordable,
/// every closed `(I, J)` form on the same model is enumerated as well and
/// must give the same answer.
pub fn max_error_bruteforce(graph: &Arc<MetricGraph>, d: &Divisor) -> Result<ErrorProfile> {
    d.check(graph)?;
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    let model = support_model(graph, d)?;
    let n = model.vertex_count();
    if n > MAX_ORACLE_VERTICES {
        return Err(Error::TooLarge(format!("{n} model vertices exceed {MAX_ORACLE_VERTICES}")));
    }
    let full_mask = (1u64 << n) - 1;
    let mut best: Option<(i64, AdmissibleSet)> = None;
    for mask in 0..full_mask {
        let x: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let s = AdmissibleSet::conv_model(Arc::clone(&model), &x);
        best = Some(keep_best(best, error(d, &s), s)?);
    }
    let (max_error, minmax) = best.expect("at least the empty set");
    let whole = error(d, &AdmissibleSet::full(Arc::clone(&model)));

    if let Some(count) = closed_form_count(&model) {
        if count <= SET_FORM_BUDGET {
            let (other_max, other_min) = all_closed_forms_best(&model, d)?;
            if other_max != max_error || other_min != minmax {
                return Err(Error::InvariantViolation(format!(
                    "closed-form enumeration disagrees: ME {other_max} vs {max_error}"
                )));
            }
        }
    }

    Ok(ErrorProfile { max_error, minmax, is_break_signal: whole > max_error })
}

fn keep_best(best: Option<(i64, AdmissibleSet)>, err: i64, s: AdmissibleSet) -> Result<(i64, AdmissibleSet)> {
    Ok(match best {
        Some((b, set)) if err < b => (b, set),
        Some((b, set)) if err == b => (b, set.intersection(&s)?),
        _ => (err, s),
    })
}

fn closed_form_count(model: &Model) -> Option<u64> {
    let n = model.vertex_count();
    let mut total: u64 = 0;
    for mask in 0u64..(1u64 << n) {
        let inside = model
            .edges()
            .iter()
            .filter(|e| mask >> e.ends[0] & 1 == 1 && mask >> e.ends[1] & 1 == 1)
            .count();
        total = total.checked_add(1u64.checked_shl(inside as u32)?)?;
        if total > SET_FORM_BUDGET {
            return Some(total);
        }
    }
    Some(total)
}

fn all_closed_forms_best(model: &Arc<Model>, d: &Divisor) -> Result<(i64, AdmissibleSet)> {
    let n = model.vertex_count();
    let mut best: Option<(i64, AdmissibleSet)> = None;
    for mask in 0u64..(1u64 << n) {
        let vertices: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let inside: Vec<usize> = model
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| vertices[e.ends[0]] && vertices[e.ends[1]])
            .map(|(i, _)| i)
            .collect();
        for sub in 0u64..(1u64 << inside.len()) {
            let mut edges = vec![false; model.edge_count()];
            for (k, &e) in inside.iter().enumerate() {
                edges[e] = sub >> k & 1 == 1;
            }
            let s = AdmissibleSet::new(Arc::clone(model), vertices.clone(), edges)?;
            if s.is_full() {
                continue;
            }
            best = Some(keep_best(best, error(d, &s), s)?);
        }
    }
    Ok(best.expect("at least the empty set"))
}

/// Euler characteristics of a closed set and of its open complement, each
/// computed as `b0 - b1` of a finite graph homotopy equivalent to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EulerCharacteristics {
    pub set: i64,
    pub complement: i64,
}

fn betti(nodes: usize, links: &[(usize, usize)]) -> (i64, i64) {
    let mut uf = UnionFind::new(nodes);
    let mut cycles = 0;
    let mut merges = 0;
    for &(a, b) in links {
        if uf.union(a, b) {
            merges += 1;
        } else {
            cycles += 1;
        }
    }
    (nodes as i64 - merges, cycles)
}

pub fn euler_characteristic_oracle(set: &AdmissibleSet) -> EulerCharacteristics {
    let model = set.model();
    let nv = model.vertex_count();

    let inside_links: Vec<(usize, usize)> =
        set.edge_indices().map(|e| (model.edge(e).ends[0], model.edge(e).ends[1])).collect();
    let inside_nodes: Vec<usize> = set.vertex_indices().collect();
    let mut relabel = vec![usize::MAX; nv];
    for (i, &v) in inside_nodes.iter().enumerate() {
        relabel[v] = i;
    }
    let links: Vec<(usize, usize)> = inside_links.iter().map(|&(a, b)| (relabel[a], relabel[b])).collect();
    let (b0, b1) = betti(inside_nodes.len(), &links);
    let chi_set = b0 - b1;

    // complement: free vertices plus one midpoint node per open edge, the
    // midpoint linked to each endpoint lying outside the set
    let mut outside = vec![usize::MAX; nv];
    let mut nodes = 0;
    for v in (0..nv).filter(|&v| !set.vertices()[v]) {
        outside[v] = nodes;
        nodes += 1;
    }
    let mut links = Vec::new();
    for e in (0..model.edge_count()).filter(|&e| !set.edges()[e]) {
        let midpoint = nodes;
        nodes += 1;
        for &end in &model.edge(e).ends {
            if outside[end] != usize::MAX {
                links.push((midpoint, outside[end]));
            }
        }
    }
    let (b0, b1) = betti(nodes, &links);
    EulerCharacteristics { set: chi_set, complement: b0 - b1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::{build_graph, EdgeDescription, GraphDescription, PointRef};
    use crate::rational::int;

    #[test]
    fn tree_complements() {
        let g = theta();
        let m = Model::trivial(&g);
        let names: Vec<Vec<String>> = spanning_tree_complements(&m, DEFAULT_TREE_EDGE_BOUND)
            .unwrap()
            .iter()
            .map(|t| t.names(&m))
            .collect();
        assert_eq!(names, vec![vec!["e1#0", "e2#0"], vec!["e1#0", "e3#0"], vec!["e2#0", "e3#0"]]);

        let g = dumbbell();
        let m = Model::trivial(&g);
        let all = spanning_tree_complements(&m, DEFAULT_TREE_EDGE_BOUND).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].names(&m), vec!["A#0", "B#0"]);

        let star = Arc::new(
            build_graph(&GraphDescription {
                vertices: vec!["c".into(), "x".into(), "y".into(), "z".into()],
                edges: vec![
                    EdgeDescription::new("a", "c", "x", int(1)),
                    EdgeDescription::new("b", "c", "y", int(1)),
                    EdgeDescription::new("d", "c", "z", int(1)),
                ],
            })
            .unwrap(),
        );
        let all = spanning_tree_complements(&Model::trivial(&star), DEFAULT_TREE_EDGE_BOUND).unwrap();
        assert_eq!(all, vec![TreeComplement { edges: vec![] }]);
        assert!(matches!(spanning_tree_complements(&Model::trivial(&g), 2), Err(Error::TooLarge(_))));
    }

    #[test]
    fn semibreak_examples() {
        let g = theta();
        let d = Divisor::from_pairs([(mid(&g, "e1"), 1), (mid(&g, "e2"), 1)]);
        assert!(is_semibreak_bruteforce(&g, &d).unwrap());
        assert!(is_semibreak_bruteforce(&g, &Divisor::zero()).unwrap());
        assert!(!is_semibreak_bruteforce(&g, &Divisor::from_pairs([(mid(&g, "e1"), 2)])).unwrap());

        let g = dumbbell();
        assert!(!is_semibreak_bruteforce(&g, &Divisor::point(mid(&g, "e"))).unwrap());
        assert!(is_semibreak_bruteforce(&g, &Divisor::point(vx(&g, "v"))).unwrap());
    }

    #[test]
    fn max_error_examples() {
        let g = theta();
        let m1 = mid(&g, "e1");
        let p = max_error_bruteforce(&g, &Divisor::from_pairs([(m1.clone(), 2)])).unwrap();
        assert_eq!(p.max_error, 1);
        let only = p.minmax.model().vertex_of(&m1).unwrap();
        assert_eq!(p.minmax.vertex_indices().collect::<Vec<_>>(), vec![only]);
        assert!(!p.is_break_signal);

        let uv = Divisor::from_pairs([(vx(&g, "u"), 1), (vx(&g, "v"), 1)]);
        let p = max_error_bruteforce(&g, &uv).unwrap();
        assert_eq!(p.max_error, 0);
        assert!(p.minmax.is_empty());
        assert!(p.is_break_signal);

        let g = dumbbell();
        let w = mid(&g, "e");
        let d = Divisor::from_pairs([(vx(&g, "u"), 1), (w.clone(), 1)]);
        let p = max_error_bruteforce(&g, &d).unwrap();
        assert_eq!(p.max_error, 1);
        let m = p.minmax.model();
        let expected = AdmissibleSet::from_indices(
            Arc::clone(m),
            [m.vertex_of(&vx(&g, "u")).unwrap(), m.vertex_of(&w).unwrap()],
            [m.edge_by_name("A#0").unwrap(), m.edge_by_name("e#0").unwrap()],
        )
        .unwrap();
        assert_eq!(p.minmax, expected);
    }

    #[test]
    fn euler_characteristics_match_profile() {
        let g = dumbbell();
        let w = mid(&g, "e");
        let m = Arc::new(crate::graph::refine_model(&g, [w.clone()]).unwrap());
        for mask in 0u64..8 {
            let x: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            let s = AdmissibleSet::conv_model(Arc::clone(&m), &x);
            let oracle = euler_characteristic_oracle(&s);
            let p = s.profile();
            assert_eq!((oracle.set, oracle.complement), (p.chi_s, p.chi_complement), "{s:?}");
        }
        let u = PointRef::Vertex(0);
        let s = AdmissibleSet::from_indices(Arc::clone(&m), [m.vertex_of(&u).unwrap()], []).unwrap();
        // open interval inside A, plus a space retracting onto the loop B
        assert_eq!(euler_characteristic_oracle(&s).complement, 1);
    }
}
