use serde::{Deserialize, Serialize};

use super::{format_point, ContoptError, Objective};

/// Benchmark functions with a known unique minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    Sphere {
        n: usize,
    },
    ShiftedSphere {
        center: Vec<f64>,
    },
    Rosenbrock {
        n: usize,
    },
    /// `sum_i condition^(i/(n-1)) x_i^2`.
    Ellipsoid {
        n: usize,
        condition: f64,
    },
}

impl TestFunction {
    pub fn validate(&self) -> Result<(), ContoptError> {
        match self {
            TestFunction::Sphere { n } if *n == 0 => Err(ContoptError::DimensionZero),
            TestFunction::ShiftedSphere { center } if center.is_empty() => Err(ContoptError::DimensionZero),
            TestFunction::Rosenbrock { n } if *n < 2 => {
                Err(ContoptError::InvalidFunction("rosenbrock needs n >= 2".into()))
            }
            TestFunction::Ellipsoid { n, .. } if *n == 0 => Err(ContoptError::DimensionZero),
            TestFunction::Ellipsoid { condition, .. } if !(*condition >= 1.0) => Err(ContoptError::InvalidFunction(
                format!("ellipsoid condition must be >= 1, got {condition}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Sphere { n } => format!("sphere{n}"),
            TestFunction::ShiftedSphere { center } => format!("shifted_sphere{}", format_point(center)),
            TestFunction::Rosenbrock { n } => format!("rosenbrock{n}"),
            TestFunction::Ellipsoid { n, condition } => format!("ellipsoid{n}(cond={condition})"),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Sphere { n } | TestFunction::Rosenbrock { n } | TestFunction::Ellipsoid { n, .. } => *n,
            TestFunction::ShiftedSphere { center } => center.len(),
        }
    }

    pub fn optimum(&self) -> Vec<f64> {
        match self {
            TestFunction::Sphere { n } | TestFunction::Ellipsoid { n, .. } => vec![0.0; *n],
            TestFunction::ShiftedSphere { center } => center.clone(),
            TestFunction::Rosenbrock { n } => vec![1.0; *n],
        }
    }

    pub fn optimal_value(&self) -> f64 {
        0.0
    }
}

impl Objective for TestFunction {
    fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Sphere { .. } => x.iter().map(|v| v * v).sum(),
            TestFunction::ShiftedSphere { center } => x.iter().zip(center).map(|(v, c)| (v - c) * (v - c)).sum(),
            TestFunction::Rosenbrock { .. } => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            TestFunction::Ellipsoid { n, condition } => x
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let weight = if *n == 1 {
                        1.0
                    } else {
                        condition.powf(i as f64 / (*n as f64 - 1.0))
                    };
                    weight * v * v
                })
                .sum(),
        }
    }
}
