//! Exact divisor theory on compact metric graphs.
//!
//! The crate covers the pieces needed to move an effective divisor of degree at
//! most the genus into a *semibreak* representative of its linear equivalence
//! class:
//!
//! - [`graph`]: metric graphs with rational edge lengths, models (subdivisions)
//!   and shortest distances.
//! - [`topology`]: closed admissible sets, Euler characteristics, the genus
//!   contribution `psi`, convex hulls and cuts.
//! - [`divisor`]: divisors, chip-firing moves and replayable certificates.
//! - [`error_minmax`]: the error function, the max-error value and the unique
//!   smallest max-error set, found by submodular minimization.
//! - [`engine`]: the reduction loop, break-divisor tests, canonical break
//!   representatives and linear-equivalence decisions.
//! - [`oracle`]: brute-force verifiers used to audit the engine.
//! - [`json`]: the JSON documents consumed and produced by the CLI.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod divisor;
pub mod engine;
pub mod error;
pub mod error_minmax;
pub mod graph;
pub mod json;
pub mod oracle;
pub mod rational;
pub mod topology;

pub use divisor::{apply_certificate, degree_on, fire_set, is_integral, Divisor, FiringCertificate, FiringStep};
pub use engine::{
    are_equivalent, break_representative, equivalence_certificate, is_break, semibreak_reduce,
    ReduceOptions, ReductionResult, TraceEntry, TraceStep,
};
pub use error::{Error, Result};
pub use error_minmax::{
    error_of_set, max_error_profile, smallest_submodular_minimizer, ErrorProfile, Strategy,
    SubmodularObjective,
};
pub use graph::{
    build_graph, normalize_point, refine_model, EdgeDescription, End, GraphDescription,
    MetricGraph, Model, ModelEdge, PointRef,
};
pub use rational::Rational;
pub use topology::{AdmissibleSet, TopologyProfile};
