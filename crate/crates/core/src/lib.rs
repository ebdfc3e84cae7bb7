//! Structured intake and algorithm design for optimization projects.
//!
//! The crate is organised around the life of an optimization project:
//!
//! * [`checklist`] walks a team through a ten-item problem-definition
//!   checklist and produces a [`problem_model::ProblemSpec`].
//! * [`problem_model`] holds that specification plus its linter.
//! * [`qrak`] classifies side constraints with four-letter QRAK codes.
//! * [`recommender`] maps a finalized specification to ranked algorithm
//!   families through a data-driven rule table.
//! * [`contopt`] is a small continuous-optimization core: box normalization,
//!   Nelder-Mead with several initial-simplex rules, and a benchmark runner
//!   that audits how those rules behave.
//! * [`experiment`] plans and analyses benchmark experiments with
//!   controllable, observable and noise factors.
//!
//! All persisted documents share the canonical JSON form produced by
//! [`canonical`].

// `!(a <= b)` is how the validators reject NaN along with wrong order.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod checklist;
pub mod contopt;
pub mod experiment;
pub mod problem_model;
pub mod qrak;
pub mod recommender;

pub use problem_model::{ProblemSpec, Ternary};
pub use qrak::QrakCode;
