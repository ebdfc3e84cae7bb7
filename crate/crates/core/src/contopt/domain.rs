use serde::{Deserialize, Serialize};

use super::{ContoptError, Objective};

/// Axis-aligned box `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawBox> for BoxDomain {
    type Error = ContoptError;

    fn try_from(raw: RawBox) -> Result<Self, Self::Error> {
        BoxDomain::new(raw.lower, raw.upper)
    }
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ContoptError> {
        if lower.is_empty() {
            return Err(ContoptError::DimensionZero);
        }
        if lower.len() != upper.len() {
            return Err(ContoptError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ContoptError::InvalidDomain(format!(
                    "coordinate {j}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    /// The same interval in every coordinate.
    pub fn cube(lower: f64, upper: f64, n: usize) -> Result<Self, ContoptError> {
        BoxDomain::new(vec![lower; n], vec![upper; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

/// Result of mapping a point; optimizers may legitimately step outside the
/// box, so leaving it is flagged rather than rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Mapped {
    pub point: Vec<f64>,
    pub inside: bool,
}

/// Componentwise affine map of a box onto `[0, 1]^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineNormalization {
    domain: BoxDomain,
}

pub fn normalization_map(domain: BoxDomain) -> AffineNormalization {
    AffineNormalization { domain }
}

impl AffineNormalization {
    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), ContoptError> {
        if x.len() != self.domain.dim() {
            return Err(ContoptError::DimensionMismatch {
                expected: self.domain.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Mapped, ContoptError> {
        self.check_dim(x)?;
        let point = x
            .iter()
            .zip(self.domain.lower.iter().zip(&self.domain.upper))
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect();
        Ok(Mapped {
            point,
            inside: self.domain.contains(x),
        })
    }

    pub fn inverse(&self, u: &[f64]) -> Result<Vec<f64>, ContoptError> {
        self.check_dim(u)?;
        Ok(self.inverse_unchecked(u))
    }

    fn inverse_unchecked(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.domain.lower.iter().zip(&self.domain.upper))
            .map(|(t, (lo, hi))| lo + t * (hi - lo))
            .collect()
    }
}

/// An objective on the original box seen through the unit cube.
#[derive(Debug)]
pub struct NormalizedObjective<O> {
    inner: O,
    map: AffineNormalization,
}

pub fn wrap_objective<O: Objective>(f: O, map: AffineNormalization) -> NormalizedObjective<O> {
    NormalizedObjective { inner: f, map }
}

impl<O> NormalizedObjective<O> {
    pub fn map(&self) -> &AffineNormalization {
        &self.map
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: Objective> Objective for NormalizedObjective<O> {
    /// Panics if `u` has the wrong dimension.
    fn evaluate(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.map.domain.dim(), "point dimension");
        self.inner.evaluate(&self.map.inverse_unchecked(u))
    }
}
