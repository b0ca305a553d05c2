//! State-vector collapse prescriptions on 1+1 Minkowski spacetime.
//!
//! The crate models experiments as scenarios: labeled subsystems with
//! world-lines, local interaction and measurement events anchored at
//! spacetime points, and an initial state on a flat surface. On top of that
//! it provides:
//!
//! - surface states Ψ(S) for flat surfaces and light cones, with collapses
//!   from exactly the measurements before S ([`collapse`]);
//! - point prescriptions (backward-cone, forward-cone, flat-frame) and
//!   world-line traces ([`collapse`]);
//! - a brute-force outcome enumerator verifying that all prescriptions and
//!   causal orderings reproduce the same standard probabilities ([`oracle`]);
//! - property-attribution rules and the two-meson "curious attribution"
//!   report ([`attribution`]);
//! - the nonlocal isospin-certification gadget and built-in scenarios
//!   ([`gadgets`]).

pub mod attribution;
pub mod checks;
pub mod collapse;
pub mod error;
pub mod gadgets;
pub mod hilbert;
pub mod oracle;
pub mod scenario;
pub mod spacetime;

pub use attribution::{AttributionRule, CuriousReport, Verdict};
pub use collapse::{Prescription, SurfaceState, TraceSegment};
pub use error::{Error, Result};
pub use hilbert::{
    EigenVerdict, LocalOperator, OperatorKind, SpaceDescriptor, StateVector, SubsystemLabel,
};
pub use oracle::{Branch, OutcomeDistribution};
pub use scenario::{OutcomeAssignment, Scenario, Violation, WorldLine};
pub use spacetime::{CausalRelation, CausalSurface, Event, SurfaceSide};
