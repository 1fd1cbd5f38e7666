//! Shortest ruler-and-compass constructions of a triangle from three of its
//! characteristic points.
//!
//! The pipeline: a [`catalog::Catalog`] names every object a construction may
//! produce; [`kb::derive_relations`] probes random triangles to learn which
//! incidences, ratios and angle identities hold for every triangle;
//! [`planner::solve`] searches for a shortest sequence of construction steps
//! that reaches `A`, `B` and `C`; [`verifier`] replays plans symbolically and
//! numerically; [`emitter`] writes the same planning problem as a MiniZinc
//! model for external solvers.

pub mod bench;
pub mod bitset;
pub mod catalog;
pub mod emitter;
pub mod geometry;
pub mod kb;
pub mod planner;
pub mod verifier;

pub use catalog::{AngleId, Catalog, CircleId, Instantiation, LineId, ObjectId, ObjectKind, PointId};
pub use kb::KnowledgeBase;
pub use planner::{Plan, PlannerConfig, Problem, State, Step, StepKind, Strategy};
