//! Joint VNF placement and traffic routing for service-oriented networks.
//!
//! A *service* is a traffic flow from a source to a destination that must pass
//! through an ordered chain of network functions; functions run on cloud
//! nodes, traffic may be split across a bounded number of paths per chain
//! segment, and every service carries an end-to-end latency budget. This
//! crate models that planning problem and solves it exactly:
//!
//! * [`model`] — physical network, service requests, objective weights, and
//!   domain-level solutions, generic over the numeric [`scalar::Scalar`] type;
//! * [`vnet`] — the virtual-network transform that replicates each cloud node
//!   into per-function clones so placement becomes a routing decision;
//! * [`milp`] — a solver-agnostic MILP intermediate representation, LP-format
//!   export/import, an in-tree simplex, and deterministic branch-and-bound;
//! * [`ns1`] / [`ns2`] — two provably equivalent MILP formulations: a natural
//!   per-endpoint-pair formulation and a compact per-segment formulation;
//! * [`semantics`] — decoding solver output into domain solutions, domain
//!   feasibility verification, and the constructive mappings between the two
//!   formulations' solution spaces;
//! * [`flowdec`] — decomposition of per-segment edge flows into end-to-end
//!   paths and the derived path-count / data-rate statistics;
//! * [`gen`] — deterministic benchmark instance generation plus the small
//!   worked fixture network used throughout the tests;
//! * [`experiments`] — batch comparison and sweep harnesses with CSV output;
//! * [`fileio`] — canonical (byte-deterministic) JSON instance and report
//!   serialization.
//!
//! The default pipeline stores all instance quantities as exact rationals
//! ([`Rat`]) and converts to `f64` only at the LP boundary, which keeps the
//! equivalence and conservation checks exact.

pub mod experiments;
pub mod fileio;
pub mod flowdec;
pub mod gen;
pub mod milp;
pub mod model;
pub mod ns1;
pub mod ns2;
pub mod scalar;
pub mod semantics;
pub mod vnet;

/// Exact rational scalar used by the default pipeline.
pub type Rat = num_rational::BigRational;

/// Instance with exact rational quantities (the canonical on-disk form).
pub type Instance = model::SlicingInstance<Rat>;

/// Domain solution with exact rational quantities.
pub type Solution = model::SlicingSolution<Rat>;

/// Instance with `f64` quantities (the "float pipeline" used in tolerance-
/// based tests and quick experiments).
pub type InstanceF64 = model::SlicingInstance<f64>;

/// Virtual network with exact rational quantities.
pub type Vnet = vnet::VirtualNetwork<Rat>;

pub use model::{ObjectiveWeights, PhysicalNetwork, ServiceRequest, SlicingInstance, SlicingSolution};
pub use scalar::Scalar;
