//! Divisors, chip-firing moves and certificates of linear equivalence.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::graph::{End, MetricGraph, PointRef, WalkStop};
use crate::rational::{self, Rational};
use crate::topology::AdmissibleSet;

/// A finite formal sum of points with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Divisor {
    chips: BTreeMap<PointRef, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    pub fn point(p: PointRef) -> Self {
        Divisor::from_pairs([(p, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (PointRef, i64)>>(pairs: I) -> Self {
        let mut d = Divisor::zero();
        for (p, k) in pairs {
            d.add_chips(p, k);
        }
        d
    }

    pub fn add_chips(&mut self, p: PointRef, k: i64) {
        if k == 0 {
            return;
        }
        match self.chips.entry(p) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += k;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(k);
            }
        }
    }

    pub fn get(&self, p: &PointRef) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.chips.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = &PointRef> {
        self.chips.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointRef, i64)> {
        self.chips.iter().map(|(p, &k)| (p, k))
    }

    pub fn is_zero(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&k| k > 0)
    }

    /// Checks every support point against the graph.
    pub fn check(&self, graph: &MetricGraph) -> Result<()> {
        self.chips.keys().try_for_each(|p| graph.check_point(p))
    }
}

impl Add<&Divisor> for &Divisor {
    type Output = Divisor;

    fn add(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, k) in rhs.iter() {
            out.add_chips(p.clone(), k);
        }
        out
    }
}

impl Sub<&Divisor> for &Divisor {
    type Output = Divisor;

    fn sub(self, rhs: &Divisor) -> Divisor {
        self + &(-rhs)
    }
}

impl Neg for &Divisor {
    type Output = Divisor;

    fn neg(self) -> Divisor {
        Divisor { chips: self.chips.iter().map(|(p, k)| (p.clone(), -k)).collect() }
    }
}

/// `deg(D|_S)`.
pub fn degree_on(d: &Divisor, set: &AdmissibleSet) -> i64 {
    d.iter().filter(|(p, _)| set.contains_point(p)).map(|(_, k)| k).sum()
}

/// `div(φ)` for `φ = min(eps, d(·, S))`.
///
/// Every complement segment free of branch points must be at least `2 eps`
/// long, so that the wavefronts leaving its two ends meet at most at its
/// midpoint.
pub fn firing_delta(set: &AdmissibleSet, eps: &Rational) -> Result<Divisor> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if set.is_full() {
        return Err(Error::NotProper);
    }
    if !eps.is_positive() {
        return Err(Error::NonpositiveEps);
    }
    if let Some(limit) = set.distance_to_outside_branch_points()? {
        if *eps > limit {
            return Err(Error::EpsTooLarge {
                eps: rational::format_rational(eps),
                limit: rational::format_rational(&limit),
            });
        }
    }
    let twice = eps * rational::int(2);
    if set
        .complement_components()
        .iter()
        .any(|c| !c.has_branch_point && c.length < twice)
    {
        return Err(Error::NotConvex);
    }

    let model = set.model();
    let graph = model.graph();
    let mut delta = Divisor::zero();
    for (v, _) in set.boundary_valence_by_vertex() {
        let p = model.point(v).clone();
        for &(e, end) in model.incidence(v) {
            if set.edges()[e] {
                continue;
            }
            let me = model.edge(e);
            let (start, toward) = match end {
                End::Tail => (&me.start, End::Head),
                End::Head => (&me.end, End::Tail),
            };
            match graph.walk(me.base, start, toward, eps) {
                WalkStop::Landed(q) => {
                    delta.add_chips(p.clone(), -1);
                    delta.add_chips(q, 1);
                }
                WalkStop::HitBranch { vertex, .. } => {
                    return Err(Error::InvariantViolation(format!(
                        "firing front reached branch point {} before eps",
                        graph.vertex_id(vertex)
                    )));
                }
            }
        }
    }
    Ok(delta)
}

/// `D + div(φ_{S,eps})`. The result need not be effective.
pub fn fire_set(d: &Divisor, set: &AdmissibleSet, eps: &Rational) -> Result<Divisor> {
    Ok(d + &firing_delta(set, eps)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiringStep {
    pub set: AdmissibleSet,
    pub eps: Rational,
}

impl FiringStep {
    pub fn new(set: AdmissibleSet, eps: Rational) -> Self {
        FiringStep { set, eps }
    }

    pub fn apply(&self, d: &Divisor) -> Result<Divisor> {
        fire_set(d, &self.set, &self.eps)
    }

    /// The step undoing this one: firing `{x : d(x, S) >= eps}` by `eps`.
    pub fn reversed(&self) -> Result<FiringStep> {
        Ok(FiringStep { set: self.set.far_set(&self.eps)?, eps: self.eps.clone() })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiringCertificate {
    pub steps: Vec<FiringStep>,
}

impl FiringCertificate {
    pub fn new(steps: Vec<FiringStep>) -> Self {
        FiringCertificate { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// A certificate leading from the target back to the source.
    pub fn reversed(&self) -> Result<FiringCertificate> {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(FiringStep::reversed)
            .collect::<Result<_>>()?;
        Ok(FiringCertificate { steps })
    }

    pub fn then(mut self, other: FiringCertificate) -> FiringCertificate {
        self.steps.extend(other.steps);
        self
    }
}

pub fn apply_certificate(d: &Divisor, cert: &FiringCertificate) -> Result<Divisor> {
    cert.steps.iter().try_fold(d.clone(), |acc, step| step.apply(&acc))
}

/// True when `D` is supported on vertices of the unit subdivision.
pub fn is_integral(graph: &MetricGraph, d: &Divisor) -> Result<bool> {
    if graph.edges().iter().any(|e| !rational::is_integer(&e.length)) {
        return Err(Error::NonIntegerLengths);
    }
    Ok(d.support().all(|p| match p {
        PointRef::Vertex(_) => true,
        PointRef::Edge { offset, .. } => rational::is_integer(offset),
    }))
}
