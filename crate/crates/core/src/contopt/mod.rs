//! Continuous optimization on boxes.
//!
//! Provides affine normalization of a box to the unit hypercube, the three
//! initial-simplex rules found in common Nelder-Mead implementations, a
//! fixed-coefficient Nelder-Mead, a few test functions and a benchmark
//! runner that compares initialization rules.
//!
//! The recommended setup is to normalize the search box and start from a
//! [`InitRule::RegionOfInterest`] simplex with `h = 0.25`; see
//! [`RECOMMENDED_UNIT_STEP`].

mod bench;
mod domain;
mod functions;
mod nelder_mead;
mod simplex;

use thiserror::Error;

pub use bench::{benchmark_init_rules, BenchConfig, BenchRow, BenchTable, PERTURBATION_FRACTION};
pub use domain::{normalization_map, wrap_objective, AffineNormalization, BoxDomain, Mapped, NormalizedObjective};
pub use functions::TestFunction;
pub use nelder_mead::{nelder_mead, Coefficients, NMConfig, NMResult, Termination};
pub use simplex::{build_simplex, simplex_quality, InitRule, Quality, Simplex};

/// Step size for a region-of-interest simplex on a normalized domain.
pub const RECOMMENDED_UNIT_STEP: f64 = 0.25;

/// Default improvement over the known optimum that counts as "reached".
pub const DEFAULT_TARGET: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContoptError {
    #[error("dimension must be at least 1")]
    DimensionZero,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid box domain: {0}")]
    InvalidDomain(String),
    #[error("region-of-interest step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("invalid Nelder-Mead configuration: {0}")]
    InvalidConfig(String),
    #[error("evaluation budget must be positive")]
    BudgetZero,
    #[error("benchmark input list {0} is empty")]
    EmptyInput(&'static str),
    #[error("invalid test function: {0}")]
    InvalidFunction(String),
}

/// Something that can be minimized.
pub trait Objective {
    fn evaluate(&self, x: &[f64]) -> f64;

    /// Evaluates at `origin + offset`.
    ///
    /// Nelder-Mead iterates on offsets from its start vertex and calls this
    /// entry point, so wrappers that move the origin (see [`Translated`])
    /// can do so without rounding the offset.
    fn evaluate_offset(&self, origin: &[f64], offset: &[f64]) -> f64 {
        let x: Vec<f64> = origin.iter().zip(offset).map(|(o, d)| o + d).collect();
        self.evaluate(&x)
    }
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// `x -> inner(x - shift)`: the same problem moved by `shift`.
#[derive(Debug, Clone)]
pub struct Translated<O> {
    pub inner: O,
    pub shift: Vec<f64>,
}

impl<O: Objective> Objective for Translated<O> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        let moved: Vec<f64> = x.iter().zip(&self.shift).map(|(v, t)| v - t).collect();
        self.inner.evaluate(&moved)
    }

    fn evaluate_offset(&self, origin: &[f64], offset: &[f64]) -> f64 {
        let moved: Vec<f64> = origin.iter().zip(&self.shift).map(|(v, t)| v - t).collect();
        self.inner.evaluate_offset(&moved, offset)
    }
}

/// Wraps an objective and counts its evaluations.
#[derive(Debug, Default)]
pub struct Counted<O> {
    inner: O,
    count: std::sync::atomic::AtomicUsize,
}

impl<O> Counted<O> {
    pub fn new(inner: O) -> Self {
        Counted {
            inner,
            count: std::sync::atomic::AtomicUsize::new(0),
        }
    }

    pub fn count(&self) -> usize {
        self.count.load(std::sync::atomic::Ordering::SeqCst)
    }
}

impl<O: Objective> Objective for Counted<O> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.count.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        self.inner.evaluate(x)
    }

    fn evaluate_offset(&self, origin: &[f64], offset: &[f64]) -> f64 {
        self.count.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        self.inner.evaluate_offset(origin, offset)
    }
}

impl<O: Objective> Objective for &Counted<O> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }

    fn evaluate_offset(&self, origin: &[f64], offset: &[f64]) -> f64 {
        (**self).evaluate_offset(origin, offset)
    }
}

pub(crate) fn format_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}
