//! Fixed-point iteration for weak contractions.
//!
//! Eight update rules (Picard, Mann, Ishikawa, Picard-Mann, SP, CR,
//! Picard-S and a two-step scheme `y = T[(1−β)x + βTx]`,
//! `x⁺ = T[(1−α)y + αTy]`) over scalars, vectors and grid functions, with
//! tools to compare their rates, probe stability under perturbation,
//! certify the contraction condition and solve delay differential
//! equations through their integral operator.

// `!(x > 0.0)` style guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod contraction;
pub mod csvio;
pub mod delay;
mod error;
pub mod harness;
pub mod iteration;
pub mod problems;
pub mod schedule;
pub mod scheme;
pub mod space;

pub use error::{Error, Result};
pub use iteration::{iterate, iterate_with, IterRecord, IterationTrace, StopReason, Stopping};
pub use schedule::{Schedule, Sequence, StepParams};
pub use scheme::{step, SchemeKind};
pub use space::{DomainSpec, FromCoords, Point, SelfMap, Vector};
