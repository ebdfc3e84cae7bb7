use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::design::{Assignment, Design, FactorCategory};
use super::ExperimentError;

/// Relative tolerance under which two aggregated values count as tied.
/// Relative so that rescaling all responses cannot create or break ties.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    /// One level label per non-response factor.
    pub cell: Assignment,
    /// Zero-based.
    pub replicate: u32,
    pub responses: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Mean,
    WorstCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Mean => "mean",
            Aggregation::WorstCase => "worst_case",
        }
    }
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Minimize => "minimize",
            Direction::Maximize => "maximize",
        }
    }

    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Minimize => a.total_cmp(&b).is_lt(),
            Direction::Maximize => a.total_cmp(&b).is_gt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub observable: Assignment,
    pub controllable: Assignment,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustSelection {
    pub response: String,
    pub aggregation: Aggregation,
    pub direction: Direction,
    /// One entry per observable level combination, in level-index order.
    pub entries: Vec<SelectionEntry>,
}

fn describe(cell: &Assignment, replicate: u32) -> String {
    let parts: Vec<String> = cell.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}} replicate {replicate}", parts.join(","))
}

fn tied(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Picks, for every observable level combination, the controllable
/// combination with the best aggregate over all noise levels and replicates.
///
/// Aggregated values within a relative 1e-12 of the best are treated as
/// tied; ties go to the controllable combination with the smallest level
/// indices (factors in name order).
pub fn robust_select(
    design: &Design,
    runs: &[RunRecord],
    response: &str,
    aggregation: Aggregation,
    direction: Direction,
) -> Result<RobustSelection, ExperimentError> {
    if !design.of_category(FactorCategory::Response).any(|f| f.name == response) {
        return Err(ExperimentError::UnknownResponse(response.to_string()));
    }
    let cell_index: BTreeMap<&Assignment, usize> = design.cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut observed: Vec<Vec<Option<f64>>> = vec![vec![None; design.replicates as usize]; design.cells.len()];
    for run in runs {
        let Some(&i) = cell_index.get(&run.cell) else {
            return Err(ExperimentError::UnknownCell(describe(&run.cell, run.replicate)));
        };
        if run.replicate >= design.replicates {
            return Err(ExperimentError::UnknownCell(describe(&run.cell, run.replicate)));
        }
        let slot = &mut observed[i][run.replicate as usize];
        if slot.is_some() {
            return Err(ExperimentError::DuplicateRun(describe(&run.cell, run.replicate)));
        }
        let Some(&value) = run.responses.get(response) else {
            return Err(ExperimentError::MissingResponseValue {
                run: describe(&run.cell, run.replicate),
                response: response.to_string(),
            });
        };
        *slot = Some(value);
    }
    let missing: Vec<String> = observed
        .iter()
        .enumerate()
        .flat_map(|(i, reps)| {
            reps.iter()
                .enumerate()
                .filter(|(_, v)| v.is_none())
                .map(move |(r, _)| (i, r))
        })
        .map(|(i, r)| describe(&design.cells[i], r as u32))
        .collect();
    if !missing.is_empty() {
        return Err(ExperimentError::IncompleteRuns(missing));
    }

    // observable key -> controllable key -> collected values
    type Groups = BTreeMap<Vec<usize>, (Assignment, BTreeMap<Vec<usize>, (Assignment, Vec<f64>)>)>;
    let mut groups: Groups = BTreeMap::new();
    for (i, cell) in design.cells.iter().enumerate() {
        let obs_key = design.level_key(cell, FactorCategory::Observable);
        let ctl_key = design.level_key(cell, FactorCategory::Controllable);
        let (_, by_ctl) = groups
            .entry(obs_key)
            .or_insert_with(|| (design.restrict(cell, FactorCategory::Observable), BTreeMap::new()));
        let (_, values) = by_ctl
            .entry(ctl_key)
            .or_insert_with(|| (design.restrict(cell, FactorCategory::Controllable), Vec::new()));
        values.extend(observed[i].iter().map(|v| v.unwrap_or(f64::NAN)));
    }

    let mut entries = Vec::with_capacity(groups.len());
    for (_, (observable, by_ctl)) in groups {
        let scored: Vec<(Assignment, f64)> = by_ctl
            .into_values()
            .map(|(ctl, values)| (ctl, aggregate(&values, aggregation, direction)))
            .collect();
        let best = scored
            .iter()
            .map(|(_, v)| *v)
            .reduce(|acc, v| if direction.better(v, acc) { v } else { acc })
            .unwrap_or(f64::NAN);
        // `scored` is in level-index order, so the first tied entry wins.
        let (controllable, value) = scored.into_iter().find(|(_, v)| tied(*v, best)).unwrap_or_default();
        entries.push(SelectionEntry {
            observable,
            controllable,
            value,
        });
    }
    Ok(RobustSelection {
        response: response.to_string(),
        aggregation,
        direction,
        entries,
    })
}

fn aggregate(values: &[f64], aggregation: Aggregation, direction: Direction) -> f64 {
    match aggregation {
        Aggregation::Mean => values.iter().sum::<f64>() / values.len() as f64,
        Aggregation::WorstCase => values
            .iter()
            .copied()
            .reduce(|acc, v| if direction.better(acc, v) { v } else { acc })
            .unwrap_or(f64::NAN),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{classify_factors, full_factorial, RawFactor};
    use FactorCategory::*;

    fn design() -> Design {
        let specs = classify_factors(&[
            RawFactor::new("algorithm", Controllable, &["A", "B"]),
            RawFactor::new("seed", Noise, &["1", "2", "3"]),
            RawFactor::new("y", Response, &[]),
        ])
        .unwrap();
        full_factorial(&specs, 1).unwrap()
    }

    fn runs(design: &Design) -> Vec<RunRecord> {
        let a = [3.0, 3.0, 9.0];
        let b = [4.0, 4.0, 4.0];
        design
            .cells
            .iter()
            .map(|cell| {
                let seed: usize = cell["seed"].parse().unwrap();
                let y = if cell["algorithm"] == "A" {
                    a[seed - 1]
                } else {
                    b[seed - 1]
                };
                RunRecord {
                    cell: cell.clone(),
                    replicate: 0,
                    responses: BTreeMap::from([("y".to_string(), y)]),
                    seed: seed as u64,
                }
            })
            .collect()
    }

    #[test]
    fn mean_and_worst_case_pick_b() {
        let d = design();
        let r = runs(&d);
        for (agg, value) in [(Aggregation::Mean, 4.0), (Aggregation::WorstCase, 4.0)] {
            let sel = robust_select(&d, &r, "y", agg, Direction::Minimize).unwrap();
            assert_eq!(sel.entries.len(), 1);
            assert_eq!(sel.entries[0].controllable["algorithm"], "B");
            assert_eq!(sel.entries[0].value, value);
            assert!(sel.entries[0].observable.is_empty());
        }
        let sel = robust_select(&d, &r, "y", Aggregation::Mean, Direction::Maximize).unwrap();
        assert_eq!(sel.entries[0].controllable["algorithm"], "A");
        assert_eq!(sel.entries[0].value, 5.0);
    }

    #[test]
    fn missing_run_and_unknown_response() {
        let d = design();
        let mut r = runs(&d);
        r.pop();
        assert!(matches!(
            robust_select(&d, &r, "y", Aggregation::Mean, Direction::Minimize),
            Err(ExperimentError::IncompleteRuns(m)) if m.len() == 1
        ));
        assert_eq!(
            robust_select(&d, &runs(&d), "z", Aggregation::Mean, Direction::Minimize),
            Err(ExperimentError::UnknownResponse("z".into()))
        );
    }

    #[test]
    fn ties_go_to_first_level() {
        let d = design();
        let mut r = runs(&d);
        for run in &mut r {
            run.responses.insert("y".into(), 1.0);
        }
        let sel = robust_select(&d, &r, "y", Aggregation::Mean, Direction::Minimize).unwrap();
        assert_eq!(sel.entries[0].controllable["algorithm"], "A");
    }
}
