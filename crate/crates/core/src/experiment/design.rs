use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::problem_model::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorCategory {
    Response,
    Controllable,
    Observable,
    Noise,
}

impl FactorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorCategory::Response => "response",
            FactorCategory::Controllable => "controllable",
            FactorCategory::Observable => "observable",
            FactorCategory::Noise => "noise",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "response" => FactorCategory::Response,
            "controllable" => FactorCategory::Controllable,
            "observable" => FactorCategory::Observable,
            "noise" => FactorCategory::Noise,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub label: String,
    #[serde(default)]
    pub value: Option<Value>,
}

impl Level {
    pub fn new(label: impl Into<String>) -> Self {
        Level {
            label: label.into(),
            value: None,
        }
    }
}

/// Factor as declared by the experimenter, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFactor {
    pub name: String,
    pub category: FactorCategory,
    #[serde(default)]
    pub levels: Vec<Level>,
    /// Whether the selection should be made per level of this factor.
    /// Observable factors always condition; noise factors never may.
    #[serde(default)]
    pub conditioning: bool,
}

impl RawFactor {
    pub fn new(name: &str, category: FactorCategory, levels: &[&str]) -> Self {
        RawFactor {
            name: name.to_string(),
            category,
            levels: levels.iter().map(|l| Level::new(*l)).collect(),
            conditioning: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub name: String,
    pub category: FactorCategory,
    pub levels: Vec<Level>,
}

impl FactorSpec {
    pub fn is_response(&self) -> bool {
        self.category == FactorCategory::Response
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.label == label)
    }
}

pub fn classify_factors(raw: &[RawFactor]) -> Result<Vec<FactorSpec>, ExperimentError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for f in raw {
        if !seen.insert(f.name.as_str()) {
            return Err(ExperimentError::DuplicateName(f.name.clone()));
        }
        match f.category {
            FactorCategory::Response if !f.levels.is_empty() => {
                return Err(ExperimentError::ResponseWithLevels(f.name.clone()))
            }
            FactorCategory::Noise if f.conditioning => return Err(ExperimentError::NoiseConditioning(f.name.clone())),
            FactorCategory::Response => {}
            _ if f.levels.is_empty() => return Err(ExperimentError::EmptyLevels(f.name.clone())),
            _ => {}
        }
        let mut labels = BTreeSet::new();
        for level in &f.levels {
            if !labels.insert(level.label.as_str()) {
                return Err(ExperimentError::DuplicateLevel {
                    factor: f.name.clone(),
                    label: level.label.clone(),
                });
            }
        }
        out.push(FactorSpec {
            name: f.name.clone(),
            category: f.category,
            levels: f.levels.clone(),
        });
    }
    Ok(out)
}

/// Factor name to level label.
pub type Assignment = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    /// Sorted by name.
    pub factors: Vec<FactorSpec>,
    pub cells: Vec<Assignment>,
    pub replicates: u32,
}

impl Design {
    pub fn factor(&self, name: &str) -> Option<&FactorSpec> {
        self.factors.iter().find(|f| f.name == name)
    }

    pub fn of_category(&self, category: FactorCategory) -> impl Iterator<Item = &FactorSpec> {
        self.factors.iter().filter(move |f| f.category == category)
    }

    pub fn total_runs(&self) -> usize {
        self.cells.len() * self.replicates as usize
    }

    /// Level indices of `assignment` restricted to `category`, in factor order.
    pub(crate) fn level_key(&self, assignment: &Assignment, category: FactorCategory) -> Vec<usize> {
        self.of_category(category)
            .map(|f| {
                assignment
                    .get(&f.name)
                    .and_then(|label| f.level_index(label))
                    .unwrap_or(usize::MAX)
            })
            .collect()
    }

    pub(crate) fn restrict(&self, assignment: &Assignment, category: FactorCategory) -> Assignment {
        self.of_category(category)
            .filter_map(|f| assignment.get(&f.name).map(|l| (f.name.clone(), l.clone())))
            .collect()
    }
}

/// Crosses every controllable, observable and noise factor.
///
/// Cells are enumerated in lexicographic order of level indices with
/// factors ordered by name (the last name varies fastest).
pub fn full_factorial(factors: &[FactorSpec], replicates: u32) -> Result<Design, ExperimentError> {
    if !factors.iter().any(|f| f.category == FactorCategory::Controllable) {
        return Err(ExperimentError::MissingControllable);
    }
    if !factors.iter().any(|f| f.is_response()) {
        return Err(ExperimentError::MissingResponse);
    }
    if replicates == 0 {
        return Err(ExperimentError::InvalidReplicates);
    }
    let mut sorted = factors.to_vec();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    for pair in sorted.windows(2) {
        if pair[0].name == pair[1].name {
            return Err(ExperimentError::DuplicateName(pair[0].name.clone()));
        }
    }
    let varying: Vec<&FactorSpec> = sorted.iter().filter(|f| !f.is_response()).collect();
    if let Some(empty) = varying.iter().find(|f| f.levels.is_empty()) {
        return Err(ExperimentError::EmptyLevels(empty.name.clone()));
    }
    let total: usize = varying.iter().map(|f| f.levels.len()).product();
    let mut cells = Vec::with_capacity(total);
    let mut index = vec![0usize; varying.len()];
    for _ in 0..total {
        cells.push(
            varying
                .iter()
                .zip(&index)
                .map(|(f, i)| (f.name.clone(), f.levels[*i].label.clone()))
                .collect(),
        );
        for pos in (0..varying.len()).rev() {
            index[pos] += 1;
            if index[pos] < varying[pos].levels.len() {
                break;
            }
            index[pos] = 0;
        }
    }
    Ok(Design {
        factors: sorted,
        cells,
        replicates,
    })
}
