//! The error function, max-error and the minimal max-error set.
//!
//! For `D` effective, `Error(D, S) = deg(D|_S) - ψ(S)`. The max-error `ME(D)`
//! is the maximum over proper closed admissible sets, and `minmax(D)` the
//! unique smallest set attaining it. Both are found by minimizing the
//! submodular function `X ↦ -Error(D, conv_G(X))` over subsets of the vertices
//! of a model carrying `supp(D)`.

#[cfg(feature = "min-norm")]
mod min_norm;

use std::fmt;
use std::sync::Arc;

use crate::divisor::{degree_on, Divisor};
use crate::error::{Error, Result};
use crate::graph::{refine_model, MetricGraph, Model};
use crate::rational::{self, Rational};
use crate::topology::AdmissibleSet;

pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive { bound: usize },
    MinNorm,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Exhaustive { bound: DEFAULT_EXHAUSTIVE_BOUND }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Strategy::default()),
            "min_norm" | "min-norm" => Ok(Strategy::MinNorm),
            other => Err(Error::Parse(format!("unknown strategy `{other}`"))),
        }
    }
}

enum Evaluator<'a> {
    Integer(Box<dyn Fn(&[bool]) -> i64 + 'a>),
    Rational(Box<dyn Fn(&[bool]) -> Rational + 'a>),
}

/// A set function on `{0, …, size-1}`, given by its membership vector.
pub struct SubmodularObjective<'a> {
    size: usize,
    eval: Evaluator<'a>,
}

impl fmt::Debug for SubmodularObjective<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubmodularObjective").field("size", &self.size).finish()
    }
}

impl<'a> SubmodularObjective<'a> {
    pub fn new(size: usize, f: impl Fn(&[bool]) -> Rational + 'a) -> Self {
        SubmodularObjective { size, eval: Evaluator::Rational(Box::new(f)) }
    }

    pub fn integer(size: usize, f: impl Fn(&[bool]) -> i64 + 'a) -> Self {
        SubmodularObjective { size, eval: Evaluator::Integer(Box::new(f)) }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn value(&self, x: &[bool]) -> Rational {
        match &self.eval {
            Evaluator::Integer(f) => rational::int(f(x)),
            Evaluator::Rational(f) => f(x),
        }
    }

    /// `f'(X) = f(X) + |X| / (2 size)`.
    pub fn perturbed(&self, x: &[bool]) -> Rational {
        let count = x.iter().filter(|&&b| b).count() as i64;
        self.value(x) + rational::rat(count, 2 * self.size.max(1) as i64)
    }
}

/// The unique inclusion-smallest minimizer of the perturbed objective `f'`.
/// For integer-valued `f` this is the smallest minimizer of `f` itself.
pub fn smallest_submodular_minimizer(obj: &SubmodularObjective<'_>, strategy: Strategy) -> Result<Vec<bool>> {
    match strategy {
        Strategy::Exhaustive { bound } => exhaustive(obj, bound),
        Strategy::MinNorm => min_norm_minimizer(obj),
    }
}

#[cfg(feature = "min-norm")]
fn min_norm_minimizer(obj: &SubmodularObjective<'_>) -> Result<Vec<bool>> {
    Ok(min_norm::smallest_minimizer(|x| obj.perturbed(x), obj.size))
}

#[cfg(not(feature = "min-norm"))]
fn min_norm_minimizer(_obj: &SubmodularObjective<'_>) -> Result<Vec<bool>> {
    Err(Error::SolverNotAvailable)
}

fn exhaustive(obj: &SubmodularObjective<'_>, bound: usize) -> Result<Vec<bool>> {
    let n = obj.size;
    if n > bound || n >= 63 {
        return Err(Error::GroundSetTooLarge { size: n, bound });
    }
    let mut x = vec![false; n];
    let fill = |mask: u64, x: &mut Vec<bool>| {
        for (i, slot) in x.iter_mut().enumerate() {
            *slot = mask >> i & 1 == 1;
        }
    };
    // all minimizers of f' form a lattice; their intersection is the answer
    let mut best_mask = 0u64;
    match &obj.eval {
        Evaluator::Integer(f) => {
            let scale = 2 * n as i128;
            let mut best: Option<i128> = None;
            for mask in 0u64..(1u64 << n) {
                fill(mask, &mut x);
                let key = scale * f(&x) as i128 + mask.count_ones() as i128;
                match best {
                    Some(b) if key > b => {}
                    Some(b) if key == b => best_mask &= mask,
                    _ => {
                        best = Some(key);
                        best_mask = mask;
                    }
                }
            }
        }
        Evaluator::Rational(_) => {
            let mut best: Option<Rational> = None;
            for mask in 0u64..(1u64 << n) {
                fill(mask, &mut x);
                let key = obj.perturbed(&x);
                match &best {
                    Some(b) if key > *b => {}
                    Some(b) if key == *b => best_mask &= mask,
                    _ => {
                        best = Some(key);
                        best_mask = mask;
                    }
                }
            }
        }
    }
    fill(best_mask, &mut x);
    Ok(x)
}

/// `Error(D, S) = deg(D|_S) - ψ(S)`.
pub fn error_of_set(d: &Divisor, set: &AdmissibleSet) -> i64 {
    degree_on(d, set) - set.psi()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorProfile {
    pub max_error: i64,
    /// Empty when the max-error is zero.
    pub minmax: AdmissibleSet,
    /// The smallest minimizer was the whole graph, i.e. `D` is a break divisor.
    pub is_break_signal: bool,
}

/// Checks effectiveness and `0 <= deg(D) <= g`.
pub fn check_effective_in_range(graph: &MetricGraph, d: &Divisor) -> Result<()> {
    d.check(graph)?;
    let degree = d.degree();
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    if degree > graph.genus() as i64 {
        return Err(Error::DegreeOutOfRange { degree, genus: graph.genus() });
    }
    Ok(())
}

/// The model whose vertices are the input vertices and `supp(D)`.
pub fn support_model(graph: &Arc<MetricGraph>, d: &Divisor) -> Result<Arc<Model>> {
    Ok(Arc::new(refine_model(graph, d.support().cloned())?))
}

/// `X ↦ -Error(D, conv_G(X))` on the vertices of `model`, which must carry
/// `supp(D)`.
pub fn error_objective<'a>(model: &'a Model, d: &Divisor) -> SubmodularObjective<'a> {
    let n = model.vertex_count();
    let mut chips = vec![0i64; n];
    for (p, k) in d.iter() {
        let v = model.vertex_of(p).expect("support lies on model vertices");
        chips[v] += k;
    }
    let chi_gamma = 1 - model.graph().genus() as i64;
    SubmodularObjective::integer(n, move |x: &[bool]| {
        let degree: i64 = chips.iter().zip(x).filter(|(_, &b)| b).map(|(k, _)| k).sum();
        let outside = x.iter().filter(|&&b| !b).count() as i64;
        let open_edges = model
            .edges()
            .iter()
            .filter(|e| !x[e.ends[0]] && !x[e.ends[1]])
            .count() as i64;
        let psi = outside - open_edges - chi_gamma;
        psi - degree
    })
}

pub fn max_error_profile(graph: &Arc<MetricGraph>, d: &Divisor, strategy: Strategy) -> Result<ErrorProfile> {
    check_effective_in_range(graph, d)?;
    let model = support_model(graph, d)?;
    let objective = error_objective(&model, d);
    let x = smallest_submodular_minimizer(&objective, strategy)?;
    if x.iter().all(|&b| b) {
        return Ok(ErrorProfile {
            max_error: 0,
            minmax: AdmissibleSet::empty(Arc::clone(&model)),
            is_break_signal: true,
        });
    }
    let minmax = AdmissibleSet::conv_model(Arc::clone(&model), &x);
    let max_error = error_of_set(d, &minmax);
    Ok(ErrorProfile { max_error, minmax, is_break_signal: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::PointRef;
    use crate::rational::int;

    fn count(x: &[bool]) -> i64 {
        x.iter().filter(|&&b| b).count() as i64
    }

    fn strategies() -> Vec<Strategy> {
        let mut out = vec![Strategy::default()];
        if cfg!(feature = "min-norm") {
            out.push(Strategy::MinNorm);
        }
        out
    }

    fn set(model: &Arc<Model>, vs: &[&PointRef], es: &[&str]) -> AdmissibleSet {
        AdmissibleSet::from_indices(
            Arc::clone(model),
            vs.iter().map(|p| model.vertex_of(p).unwrap()),
            es.iter().map(|n| model.edge_by_name(n).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn cardinality_objectives() {
        for s in strategies() {
            let up = SubmodularObjective::integer(4, count);
            assert_eq!(smallest_submodular_minimizer(&up, s).unwrap(), vec![false; 4]);
            let down = SubmodularObjective::new(4, |x| -int(count(x)));
            assert_eq!(smallest_submodular_minimizer(&down, s).unwrap(), vec![true; 4]);
        }
    }

    #[test]
    fn exhaustive_bound() {
        let big = SubmodularObjective::integer(21, count);
        assert_eq!(
            smallest_submodular_minimizer(&big, Strategy::default()),
            Err(Error::GroundSetTooLarge { size: 21, bound: 20 })
        );
    }

    #[test]
    fn error_of_set_examples() {
        let g = theta();
        let m1 = mid(&g, "e1");
        let d = Divisor::from_pairs([(m1.clone(), 2)]);
        let m = support_model(&g, &d).unwrap();
        assert_eq!(error_of_set(&d, &set(&m, &[&m1], &[])), 1);
        assert_eq!(error_of_set(&d, &AdmissibleSet::empty(m)), 0);

        let g = dumbbell();
        let w = mid(&g, "e");
        let d = Divisor::from_pairs([(vx(&g, "u"), 1), (w.clone(), 1)]);
        let m = support_model(&g, &d).unwrap();
        let s = set(&m, &[&vx(&g, "u"), &w], &["A#0", "e#0"]);
        assert_eq!(error_of_set(&d, &s), 1);
    }

    #[test]
    fn theta_objective_table() {
        let g = theta();
        let m1 = mid(&g, "e1");
        let d = Divisor::from_pairs([(m1.clone(), 2)]);
        let m = support_model(&g, &d).unwrap();
        let obj = error_objective(&m, &d);
        let mut expected = vec![false; 3];
        expected[m.vertex_of(&m1).unwrap()] = true;
        for s in strategies() {
            assert_eq!(smallest_submodular_minimizer(&obj, s).unwrap(), expected);
        }
    }

    #[test]
    fn profile_examples() {
        for s in strategies() {
            let g = theta();
            let m1 = mid(&g, "e1");
            let d = Divisor::from_pairs([(m1.clone(), 2)]);
            let p = max_error_profile(&g, &d, s).unwrap();
            assert_eq!(p.max_error, 1);
            assert_eq!(p.minmax, set(p.minmax.model(), &[&m1], &[]));
            assert!(!p.is_break_signal);

            let d = Divisor::from_pairs([(vx(&g, "u"), 1), (vx(&g, "v"), 1)]);
            let p = max_error_profile(&g, &d, s).unwrap();
            assert_eq!((p.max_error, p.is_break_signal), (0, true));
            assert!(p.minmax.is_empty());

            let g = dumbbell();
            let w = mid(&g, "e");
            let d = Divisor::from_pairs([(vx(&g, "u"), 1), (w.clone(), 1)]);
            let p = max_error_profile(&g, &d, s).unwrap();
            assert_eq!(p.max_error, 1);
            assert_eq!(p.minmax, set(p.minmax.model(), &[&vx(&g, "u"), &w], &["A#0", "e#0"]));
        }
    }

    #[test]
    fn profile_errors() {
        let g = theta();
        let u = vx(&g, "u");
        let d = Divisor::from_pairs([(u.clone(), 3)]);
        assert!(matches!(
            max_error_profile(&g, &d, Strategy::default()),
            Err(Error::DegreeOutOfRange { degree: 3, genus: 2 })
        ));
        let d = Divisor::from_pairs([(u, 2), (vx(&g, "v"), -1)]);
        assert_eq!(max_error_profile(&g, &d, Strategy::default()), Err(Error::NotEffective));
    }
}
