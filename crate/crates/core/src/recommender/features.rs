//! Features a rule predicate can test, extracted from a finalized spec.

use std::collections::BTreeMap;
use std::fmt;

use crate::problem_model::{leaves, DataType, Objective, ProblemSpec, Ternary, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Spec,
    Objective,
    Variable,
    Constraint,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::Spec => "spec",
            Scope::Objective => "objective",
            Scope::Variable => "variable",
            Scope::Constraint => "constraint",
        }
    }

    pub(crate) fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "objective" => Scope::Objective,
            "variable" => Scope::Variable,
            "constraint" => Scope::Constraint,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Compared with `==`/`!=` against one of the listed values.
    Enum(&'static [&'static str]),
    Number,
    Text,
}

pub struct FeatureDef {
    pub name: &'static str,
    pub scope: Scope,
    pub kind: FeatureKind,
}

const TERNARY: &[&str] = &["yes", "no", "unknown"];
const YES_NO: &[&str] = &["yes", "no"];

/// Every feature a predicate may reference.
pub const FEATURES: &[FeatureDef] = &[
    FeatureDef {
        name: "goal",
        scope: Scope::Spec,
        kind: FeatureKind::Enum(&[
            "find_feasible",
            "find_robust",
            "find_best",
            "detect_local_optima",
            "approximate_level_set",
            "approximate_pareto_set",
            "approximate_pareto_front",
            "interactive",
        ]),
    },
    FeatureDef {
        name: "paradigm",
        scope: Scope::Spec,
        kind: FeatureKind::Enum(&[
            "single_objective",
            "multi_objective",
            "scalarized",
            "constraint_satisfaction",
        ]),
    },
    FeatureDef {
        name: "n_objectives",
        scope: Scope::Spec,
        kind: FeatureKind::Number,
    },
    FeatureDef {
        name: "n_variables",
        scope: Scope::Spec,
        kind: FeatureKind::Number,
    },
    FeatureDef {
        name: "n_constraints",
        scope: Scope::Spec,
        kind: FeatureKind::Number,
    },
    FeatureDef {
        name: "n_conflicts",
        scope: Scope::Spec,
        kind: FeatureKind::Number,
    },
    FeatureDef {
        name: "name",
        scope: Scope::Objective,
        kind: FeatureKind::Text,
    },
    FeatureDef {
        name: "analytic_form",
        scope: Scope::Objective,
        kind: FeatureKind::Enum(TERNARY),
    },
    FeatureDef {
        name: "gradient_available",
        scope: Scope::Objective,
        kind: FeatureKind::Enum(TERNARY),
    },
    FeatureDef {
        name: "deterministic",
        scope: Scope::Objective,
        kind: FeatureKind::Enum(TERNARY),
    },
    FeatureDef {
        name: "additively_separable",
        scope: Scope::Objective,
        kind: FeatureKind::Enum(TERNARY),
    },
    FeatureDef {
        name: "shape",
        scope: Scope::Objective,
        kind: FeatureKind::Enum(&["linear", "quadratic", "convex", "multimodal", "unknown"]),
    },
    FeatureDef {
        name: "global_structure",
        scope: Scope::Objective,
        kind: FeatureKind::Enum(&["funnel", "symmetric", "none", "unknown"]),
    },
    FeatureDef {
        name: "budget_evals",
        scope: Scope::Objective,
        kind: FeatureKind::Number,
    },
    FeatureDef {
        name: "name",
        scope: Scope::Variable,
        kind: FeatureKind::Text,
    },
    FeatureDef {
        name: "dtype",
        scope: Scope::Variable,
        kind: FeatureKind::Enum(&["real", "integer", "categorical", "binary", "unknown"]),
    },
    FeatureDef {
        name: "bounded",
        scope: Scope::Variable,
        kind: FeatureKind::Enum(YES_NO),
    },
    FeatureDef {
        name: "transform",
        scope: Scope::Variable,
        kind: FeatureKind::Enum(&["none", "log", "sqrt", "custom"]),
    },
    FeatureDef {
        name: "name",
        scope: Scope::Constraint,
        kind: FeatureKind::Text,
    },
    FeatureDef {
        name: "known",
        scope: Scope::Constraint,
        kind: FeatureKind::Enum(YES_NO),
    },
    FeatureDef {
        name: "classified",
        scope: Scope::Constraint,
        kind: FeatureKind::Enum(YES_NO),
    },
    FeatureDef {
        name: "q",
        scope: Scope::Constraint,
        kind: FeatureKind::Enum(&["q", "n"]),
    },
    FeatureDef {
        name: "r",
        scope: Scope::Constraint,
        kind: FeatureKind::Enum(&["r", "u"]),
    },
    FeatureDef {
        name: "a",
        scope: Scope::Constraint,
        kind: FeatureKind::Enum(&["a", "s"]),
    },
    FeatureDef {
        name: "k",
        scope: Scope::Constraint,
        kind: FeatureKind::Enum(&["k", "h"]),
    },
    FeatureDef {
        name: "code",
        scope: Scope::Constraint,
        kind: FeatureKind::Text,
    },
];

/// Looks a feature up, searching `scope` first and then spec level.
pub(crate) fn lookup(name: &str, scope: Scope) -> Option<&'static FeatureDef> {
    FEATURES
        .iter()
        .find(|f| f.name == name && f.scope == scope)
        .or_else(|| FEATURES.iter().find(|f| f.name == name && f.scope == Scope::Spec))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Text(String),
    Number(f64),
    /// Not determinable from the spec; every comparison against it is false.
    Missing,
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Text(s) => f.write_str(s),
            FeatureValue::Number(n) => write!(f, "{n}"),
            FeatureValue::Missing => f.write_str("?"),
        }
    }
}

pub type FeatureMap = BTreeMap<&'static str, FeatureValue>;

/// One entity a quantifier ranges over.
#[derive(Debug, Clone)]
pub struct Item {
    pub label: String,
    pub values: FeatureMap,
}

#[derive(Debug, Clone)]
pub struct Features {
    pub spec: FeatureMap,
    /// Leaves of the selected objectives.
    pub objectives: Vec<Item>,
    pub variables: Vec<Item>,
    pub constraints: Vec<Item>,
}

impl Features {
    pub fn items(&self, scope: Scope) -> &[Item] {
        match scope {
            Scope::Spec => &[],
            Scope::Objective => &self.objectives,
            Scope::Variable => &self.variables,
            Scope::Constraint => &self.constraints,
        }
    }
}

fn text(s: &str) -> FeatureValue {
    FeatureValue::Text(s.to_string())
}

fn ternary(t: Ternary) -> FeatureValue {
    text(t.as_str())
}

fn yes_no(b: bool) -> FeatureValue {
    text(if b { "yes" } else { "no" })
}

/// Units under which a budget is already a count of evaluations.
const EVALUATION_UNITS: [&str; 2] = ["evaluations", "evals"];

fn budget_evals(spec: &ProblemSpec, leaf: &Objective) -> FeatureValue {
    let budget = &spec.budget;
    if EVALUATION_UNITS.contains(&budget.unit.as_str()) {
        return FeatureValue::Number(budget.midpoint());
    }
    match &leaf.cost {
        Some(cost) if cost.unit == budget.unit && cost.midpoint() > 0.0 => {
            FeatureValue::Number(budget.midpoint() / cost.midpoint())
        }
        _ => FeatureValue::Missing,
    }
}

fn leaf_paths<'a>(path: &str, obj: &'a Objective, out: &mut Vec<(String, &'a Objective)>) {
    if obj.is_leaf() {
        out.push((path.to_string(), obj));
    }
    for part in &obj.parts {
        leaf_paths(&format!("{path}.{}", part.name), part, out);
    }
}

/// Extracts features over the formulation's selection. Returns `None` when
/// the spec has no formulation.
pub fn extract(spec: &ProblemSpec) -> Option<Features> {
    let formulation = spec.formulation.as_ref()?;
    let selected = &formulation.selected_objectives;
    let n_conflicts = spec
        .conflicts
        .iter()
        .filter(|(a, b)| selected.contains(a) && selected.contains(b))
        .count();
    let spec_map: FeatureMap = [
        ("goal", text(spec.goal.as_str())),
        (
            "paradigm",
            text(match formulation.paradigm {
                crate::problem_model::Paradigm::SingleObjective => "single_objective",
                crate::problem_model::Paradigm::MultiObjective => "multi_objective",
                crate::problem_model::Paradigm::Scalarized => "scalarized",
                crate::problem_model::Paradigm::ConstraintSatisfaction => "constraint_satisfaction",
            }),
        ),
        ("n_objectives", FeatureValue::Number(selected.len() as f64)),
        (
            "n_variables",
            FeatureValue::Number(formulation.selected_variables.len() as f64),
        ),
        (
            "n_constraints",
            FeatureValue::Number(formulation.selected_constraints.len() as f64),
        ),
        ("n_conflicts", FeatureValue::Number(n_conflicts as f64)),
    ]
    .into_iter()
    .collect();

    let mut objectives = Vec::new();
    for path in selected {
        let Some(root) = spec.objective(path) else { continue };
        let mut found = Vec::new();
        leaf_paths(path, root, &mut found);
        debug_assert_eq!(found.len(), leaves(root).len());
        for (label, leaf) in found {
            if objectives.iter().any(|o: &Item| o.label == label) {
                continue;
            }
            let values: FeatureMap = [
                ("name", text(&label)),
                ("analytic_form", ternary(leaf.analytic_form)),
                ("gradient_available", ternary(leaf.gradient_available)),
                ("deterministic", ternary(leaf.deterministic)),
                ("additively_separable", ternary(root.additively_separable)),
                ("shape", text(leaf.shape.as_str())),
                ("global_structure", text(leaf.global_structure.as_str())),
                ("budget_evals", budget_evals(spec, leaf)),
            ]
            .into_iter()
            .collect();
            objectives.push(Item { label, values });
        }
    }

    let variables = formulation
        .selected_variables
        .iter()
        .filter_map(|name| spec.variable(name))
        .map(|v| Item {
            label: v.name.clone(),
            values: [
                ("name", text(&v.name)),
                ("dtype", text(v.dtype.map_or("unknown", DataType::as_str))),
                ("bounded", yes_no(v.lower.is_some() && v.upper.is_some())),
                (
                    "transform",
                    text(match v.transform {
                        Transform::None => "none",
                        Transform::Log => "log",
                        Transform::Sqrt => "sqrt",
                        Transform::Custom(_) => "custom",
                    }),
                ),
            ]
            .into_iter()
            .collect(),
        })
        .collect();

    let constraints = formulation
        .selected_constraints
        .iter()
        .filter_map(|name| spec.constraint(name))
        .map(|c| {
            let letters: Vec<FeatureValue> = match c.code {
                Some(code) => code
                    .render()
                    .chars()
                    .map(|ch| FeatureValue::Text(ch.to_ascii_lowercase().to_string()))
                    .collect(),
                None => vec![FeatureValue::Missing; 4],
            };
            let mut values: FeatureMap = [
                ("name", text(&c.name)),
                ("known", yes_no(c.known)),
                ("classified", yes_no(c.code.is_some())),
                (
                    "code",
                    c.code
                        .map_or(FeatureValue::Missing, |code| FeatureValue::Text(code.render())),
                ),
            ]
            .into_iter()
            .collect();
            for (key, value) in ["q", "r", "a", "k"].into_iter().zip(letters) {
                values.insert(key, value);
            }
            Item {
                label: c.name.clone(),
                values,
            }
        })
        .collect();

    Some(Features {
        spec: spec_map,
        objectives,
        variables,
        constraints,
    })
}
