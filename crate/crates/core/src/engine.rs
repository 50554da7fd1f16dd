//! The semibreak reduction loop and the decisions built on it.
//!
//! Starting from `E = (g - d) (q)` with `q` the branch point of smallest id,
//! each pass computes `S = minmax(D + E)`. When `S` is empty (or `D + E` is a
//! break divisor) the pair is returned. Otherwise a chip of `E` sitting on the
//! boundary of `S` is pushed out to the next branch point, or, when no such
//! chip exists, `S` is fired on `D` by its distance to the nearest branch point
//! outside it.

use std::sync::Arc;

use crate::divisor::{fire_set, Divisor, FiringCertificate, FiringStep};
use crate::error::{Error, Result};
use crate::error_minmax::{check_effective_in_range, max_error_profile, Strategy};
use crate::graph::{End, MetricGraph, PointRef};
use crate::rational::Rational;
use crate::topology::AdmissibleSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    pub strategy: Strategy,
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    MoveChip { from: PointRef, to: PointRef },
    Fire { eps: Rational },
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub max_error: i64,
    pub minmax: AdmissibleSet,
    pub branch_points: usize,
    pub step: TraceStep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub semibreak: Divisor,
    pub break_divisor: Divisor,
    /// Replays the input onto `semibreak`.
    pub certificate: FiringCertificate,
    /// Passes through the loop, including the final one.
    pub iterations: usize,
    /// Chip moves plus firings.
    pub updates: usize,
    pub trace: Option<Vec<TraceEntry>>,
}

/// The smallest-id branch point.
pub fn base_point(graph: &MetricGraph) -> PointRef {
    PointRef::Vertex(graph.branch_points()[0])
}

pub fn iteration_bound(graph: &MetricGraph) -> usize {
    graph.genus() * graph.branch_points().len()
}

pub fn is_break(graph: &Arc<MetricGraph>, d: &Divisor, strategy: Strategy) -> Result<bool> {
    d.check(graph)?;
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    if d.degree() != graph.genus() as i64 {
        return Ok(false);
    }
    Ok(max_error_profile(graph, d, strategy)?.is_break_signal)
}

pub fn semibreak_reduce(graph: &Arc<MetricGraph>, d: &Divisor, options: ReduceOptions) -> Result<ReductionResult> {
    check_effective_in_range(graph, d)?;
    let missing = graph.genus() as i64 - d.degree();
    let mut e = Divisor::from_pairs([(base_point(graph), missing)]);
    let mut d = d.clone();
    let mut certificate = FiringCertificate::default();
    let mut trace = options.trace.then(Vec::new);
    let bound = iteration_bound(graph);
    let mut iterations = 0;
    let mut updates = 0;

    loop {
        iterations += 1;
        let total = &d + &e;
        let profile = max_error_profile(graph, &total, options.strategy)?;
        let s = profile.minmax;
        let mut record = |step: TraceStep, s: &AdmissibleSet| {
            if let Some(t) = trace.as_mut() {
                t.push(TraceEntry {
                    max_error: profile.max_error,
                    minmax: s.clone(),
                    branch_points: s.branch_point_count(),
                    step,
                });
            }
        };
        if profile.is_break_signal || profile.max_error == 0 {
            record(TraceStep::Done, &s);
            return Ok(ReductionResult {
                semibreak: d,
                break_divisor: total,
                certificate,
                iterations,
                updates,
                trace,
            });
        }

        updates += 1;
        if updates > bound {
            return Err(Error::IterationBoundExceeded { bound });
        }
        let model = Arc::clone(s.model());
        let boundary = s.boundary_valence_by_vertex();
        let pushed = boundary
            .iter()
            .map(|(v, _)| model.point(*v))
            .filter(|p| e.get(p) > 0)
            .min()
            .cloned();

        if let Some(from) = pushed {
            let Some(vertex) = from.as_vertex() else {
                return Err(Error::InvariantViolation(format!(
                    "chip of E at {from:?} is not on a vertex"
                )));
            };
            let v = model.vertex_of(&from).expect("boundary point is a model vertex");
            let (base, end) = model
                .incidence(v)
                .iter()
                .filter(|(me, _)| !s.edges()[*me])
                .map(|&(me, end)| (model.edge(me).base, end))
                .min_by_key(|&(base, end)| (base, end == End::Head))
                .expect("boundary point has a leaving direction");
            let target = graph.walk_to_branch(base, end);
            let to = PointRef::Vertex(target);
            if target == vertex || s.contains_point(&to) {
                return Err(Error::InvariantViolation(format!(
                    "leaving direction along edge {} returns into minmax",
                    graph.edge(base).id
                )));
            }
            e.add_chips(from.clone(), -1);
            e.add_chips(to.clone(), 1);
            record(TraceStep::MoveChip { from, to }, &s);
        } else {
            let eps = s.distance_to_outside_branch_points()?.ok_or_else(|| {
                Error::InvariantViolation("minmax contains every branch point".into())
            })?;
            let fired = fire_set(&d, &s, &eps)?;
            if !fired.is_effective() {
                return Err(Error::InvariantViolation(format!(
                    "firing minmax by {eps} left a negative coefficient"
                )));
            }
            record(TraceStep::Fire { eps: eps.clone() }, &s);
            certificate.steps.push(FiringStep::new(s, eps));
            d = fired;
        }
    }
}

fn require_degree_genus(graph: &MetricGraph, d: &Divisor) -> Result<()> {
    check_effective_in_range(graph, d)?;
    if d.degree() != graph.genus() as i64 {
        return Err(Error::DegreeOutOfRange { degree: d.degree(), genus: graph.genus() });
    }
    Ok(())
}

/// The unique break divisor equivalent to `D` (of degree `g`), together with a
/// certificate leading to it.
pub fn break_representative_with_certificate(
    graph: &Arc<MetricGraph>,
    d: &Divisor,
    strategy: Strategy,
) -> Result<(Divisor, FiringCertificate)> {
    require_degree_genus(graph, d)?;
    let result = semibreak_reduce(graph, d, ReduceOptions { strategy, trace: false })?;
    Ok((result.semibreak, result.certificate))
}

pub fn break_representative(graph: &Arc<MetricGraph>, d: &Divisor, strategy: Strategy) -> Result<Divisor> {
    break_representative_with_certificate(graph, d, strategy).map(|(b, _)| b)
}

fn augmented(graph: &MetricGraph, d1: &Divisor, d2: &Divisor) -> Result<(Divisor, Divisor)> {
    check_effective_in_range(graph, d1)?;
    check_effective_in_range(graph, d2)?;
    if d1.degree() != d2.degree() {
        return Err(Error::DegreeMismatch(d1.degree(), d2.degree()));
    }
    let pad = Divisor::from_pairs([(base_point(graph), graph.genus() as i64 - d1.degree())]);
    Ok((d1 + &pad, d2 + &pad))
}

pub fn are_equivalent(graph: &Arc<MetricGraph>, d1: &Divisor, d2: &Divisor, strategy: Strategy) -> Result<bool> {
    let (a1, a2) = augmented(graph, d1, d2)?;
    Ok(break_representative(graph, &a1, strategy)? == break_representative(graph, &a2, strategy)?)
}

/// A certificate leading from `D1` to `D2`, or `None` when they are not
/// equivalent. Firing moves do not depend on the divisor they act on, so the
/// certificate found for the padded divisors also applies to `D1` itself.
pub fn equivalence_certificate(
    graph: &Arc<MetricGraph>,
    d1: &Divisor,
    d2: &Divisor,
    strategy: Strategy,
) -> Result<Option<FiringCertificate>> {
    let (a1, a2) = augmented(graph, d1, d2)?;
    let (b1, c1) = break_representative_with_certificate(graph, &a1, strategy)?;
    let (b2, c2) = break_representative_with_certificate(graph, &a2, strategy)?;
    if b1 != b2 {
        return Ok(None);
    }
    Ok(Some(c1.then(c2.reversed()?)))
}
