//! Structured optimization-problem specification and its linter.
//!
//! A [`ProblemSpec`] is what an intake meeting produces. Missing knowledge
//! is recorded explicitly ([`Ternary::Unknown`], `None` bounds) rather
//! than guessed. [`validate_spec`] never fails; structural problems are
//! reported as [`Severity::Error`] findings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{self, DocumentError, SCHEMA_VERSION};
use crate::qrak::{self, QrakCode};

/// Yes/no answer where "nobody in the room knows" is a first-class value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ternary {
    Yes,
    No,
    #[default]
    Unknown,
}

impl Ternary {
    pub fn as_str(self) -> &'static str {
        match self {
            Ternary::Yes => "yes",
            Ternary::No => "no",
            Ternary::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalKind {
    FindFeasible,
    FindRobust,
    FindBest,
    DetectLocalOptima,
    ApproximateLevelSet,
    ApproximateParetoSet,
    ApproximateParetoFront,
    Interactive,
}

impl GoalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GoalKind::FindFeasible => "find_feasible",
            GoalKind::FindRobust => "find_robust",
            GoalKind::FindBest => "find_best",
            GoalKind::DetectLocalOptima => "detect_local_optima",
            GoalKind::ApproximateLevelSet => "approximate_level_set",
            GoalKind::ApproximateParetoSet => "approximate_pareto_set",
            GoalKind::ApproximateParetoFront => "approximate_pareto_front",
            GoalKind::Interactive => "interactive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Linear,
    Quadratic,
    Convex,
    Multimodal,
    #[default]
    Unknown,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Linear => "linear",
            Shape::Quadratic => "quadratic",
            Shape::Convex => "convex",
            Shape::Multimodal => "multimodal",
            Shape::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalStructure {
    Funnel,
    Symmetric,
    None,
    #[default]
    Unknown,
}

impl GlobalStructure {
    pub fn as_str(self) -> &'static str {
        match self {
            GlobalStructure::Funnel => "funnel",
            GlobalStructure::Symmetric => "symmetric",
            GlobalStructure::None => "none",
            GlobalStructure::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    Constant,
    Range,
    Distribution(String),
}

/// Run time or cost, either a constant, a range or a named distribution
/// summarised by its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostEstimate {
    pub kind: CostKind,
    pub low: f64,
    pub high: f64,
    pub unit: String,
}

impl CostEstimate {
    pub fn constant(value: f64, unit: impl Into<String>) -> Self {
        CostEstimate {
            kind: CostKind::Constant,
            low: value,
            high: value,
            unit: unit.into(),
        }
    }

    pub fn range(low: f64, high: f64, unit: impl Into<String>) -> Self {
        CostEstimate {
            kind: CostKind::Range,
            low,
            high,
            unit: unit.into(),
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }

    pub(crate) fn problems(&self) -> Option<String> {
        if !self.low.is_finite() || !self.high.is_finite() {
            Some("cost bounds must be finite".into())
        } else if self.low < 0.0 {
            Some(format!("cost low {} is negative", self.low))
        } else if self.low > self.high {
            Some(format!("cost low {} exceeds high {}", self.low, self.high))
        } else {
            None
        }
    }
}

/// Closed interval in objective units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    pub name: String,
    /// Decomposition into terms of different meaning; the checklist
    /// questions attach to the leaves.
    pub parts: Vec<Objective>,
    pub additively_separable: Ternary,
    pub analytic_form: Ternary,
    pub gradient_available: Ternary,
    pub shape: Shape,
    pub global_structure: GlobalStructure,
    pub deterministic: Ternary,
    pub domain_vars: Vec<String>,
    pub image_bounds: Option<Interval>,
    pub cost: Option<CostEstimate>,
}

impl Objective {
    /// An objective about which nothing is known yet.
    pub fn named(name: impl Into<String>) -> Self {
        Objective {
            name: name.into(),
            parts: Vec::new(),
            additively_separable: Ternary::Unknown,
            analytic_form: Ternary::Unknown,
            gradient_available: Ternary::Unknown,
            shape: Shape::Unknown,
            global_structure: GlobalStructure::Unknown,
            deterministic: Ternary::Unknown,
            domain_vars: Vec::new(),
            image_bounds: None,
            cost: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.parts.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataType {
    Real,
    Integer,
    Categorical,
    Binary,
}

impl DataType {
    pub fn as_str(self) -> &'static str {
        match self {
            DataType::Real => "real",
            DataType::Integer => "integer",
            DataType::Categorical => "categorical",
            DataType::Binary => "binary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Influence {
    High,
    Medium,
    Low,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    None,
    Log,
    Sqrt,
    Custom(String),
}

/// Scalar default value of a decision variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Integer(i64),
    Real(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionVariable {
    pub name: String,
    /// `None` until the data type has been stated.
    pub dtype: Option<DataType>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub default: Option<Value>,
    pub influence: BTreeMap<String, Influence>,
    pub transform: Transform,
}

impl DecisionVariable {
    pub fn named(name: impl Into<String>) -> Self {
        DecisionVariable {
            name: name.into(),
            dtype: None,
            lower: None,
            upper: None,
            default: None,
            influence: BTreeMap::new(),
            transform: Transform::None,
        }
    }

    pub fn real(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        DecisionVariable {
            dtype: Some(DataType::Real),
            lower: Some(lower),
            upper: Some(upper),
            ..DecisionVariable::named(name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub name: String,
    pub known: bool,
    pub a_priori: Ternary,
    pub relaxable: Ternary,
    pub quantifiable: Ternary,
    pub cost: Option<CostEstimate>,
    /// Derived from the flags; `None` while any flag of a known
    /// constraint is still unknown.
    pub code: Option<QrakCode>,
}

impl ConstraintSpec {
    pub fn named(name: impl Into<String>) -> Self {
        ConstraintSpec {
            name: name.into(),
            known: true,
            a_priori: Ternary::Unknown,
            relaxable: Ternary::Unknown,
            quantifiable: Ternary::Unknown,
            cost: None,
            code: None,
        }
    }

    /// Sets the flags and derives the code.
    pub fn classified(
        name: impl Into<String>,
        known: bool,
        a_priori: Ternary,
        relaxable: Ternary,
        quantifiable: Ternary,
    ) -> Result<Self, qrak::QrakError> {
        let code = qrak::classify(known, a_priori, relaxable, quantifiable)?;
        let forced = |t: Ternary| if known { t } else { Ternary::No };
        Ok(ConstraintSpec {
            name: name.into(),
            known,
            a_priori: forced(a_priori),
            relaxable: forced(relaxable),
            quantifiable: forced(quantifiable),
            cost: None,
            code: Some(code),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Paradigm {
    SingleObjective,
    MultiObjective,
    Scalarized,
    ConstraintSatisfaction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Formulation {
    pub selected_objectives: Vec<String>,
    pub selected_variables: Vec<String>,
    pub selected_constraints: Vec<String>,
    pub paradigm: Paradigm,
}

/// Background knowledge, kept as structured free text.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub theoretical_relationships: String,
    pub expert_knowledge: String,
    pub previous_attempts: String,
    pub context: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Participant {
    pub name: String,
    pub role: String,
}

impl Participant {
    pub fn new(name: impl Into<String>, role: impl Into<String>) -> Self {
        Participant {
            name: name.into(),
            role: role.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Responsibility {
    pub person: String,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema_version: u32,
    pub goal: GoalKind,
    pub background: Background,
    pub objectives: Vec<Objective>,
    pub variables: Vec<DecisionVariable>,
    pub constraints: Vec<ConstraintSpec>,
    /// Declared conflicting objective pairs; names are objective paths.
    pub conflicts: Vec<(String, String)>,
    pub formulation: Option<Formulation>,
    /// Free-text label; the vocabulary is deliberately unconstrained.
    pub cost_model: String,
    pub budget: CostEstimate,
    pub responsibilities: Vec<Responsibility>,
    pub participants: Vec<Participant>,
}

impl ProblemSpec {
    /// Every objective with its dotted path (`f`, `f.g`, ...), depth first.
    pub fn objective_paths(&self) -> Vec<(String, &Objective)> {
        fn walk<'a>(prefix: Option<&str>, objs: &'a [Objective], out: &mut Vec<(String, &'a Objective)>) {
            for obj in objs {
                let path = match prefix {
                    Some(p) => format!("{p}.{}", obj.name),
                    None => obj.name.clone(),
                };
                out.push((path.clone(), obj));
                walk(Some(&path), &obj.parts, out);
            }
        }
        let mut out = Vec::new();
        walk(None, &self.objectives, &mut out);
        out
    }

    pub fn objective(&self, path: &str) -> Option<&Objective> {
        let mut segments = path.split('.');
        let first = segments.next()?;
        let mut current = self.objectives.iter().find(|o| o.name == first)?;
        for seg in segments {
            current = current.parts.iter().find(|o| o.name == seg)?;
        }
        Some(current)
    }

    pub fn variable(&self, name: &str) -> Option<&DecisionVariable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn constraint(&self, name: &str) -> Option<&ConstraintSpec> {
        self.constraints.iter().find(|c| c.name == name)
    }
}

/// Collects the leaves below (and including) an objective.
pub fn leaves(objective: &Objective) -> Vec<&Objective> {
    if objective.is_leaf() {
        return vec![objective];
    }
    objective.parts.iter().flat_map(leaves).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub subject: String,
}

impl Finding {
    fn new(severity: Severity, code: &str, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity,
            code: code.to_string(),
            message: message.into(),
            subject: subject.into(),
        }
    }
}

pub mod codes {
    pub const NO_BOUNDS: &str = "NO_BOUNDS";
    pub const PARTIAL_BOUNDS: &str = "PARTIAL_BOUNDS";
    pub const INVALID_BOUNDS: &str = "INVALID_BOUNDS";
    pub const LOG_NONPOSITIVE: &str = "LOG_NONPOSITIVE";
    pub const SEPARABLE_UNPARTITIONED: &str = "SEPARABLE_UNPARTITIONED";
    pub const DANGLING_REF: &str = "DANGLING_REF";
    pub const CONFLICTS_UNEXAMINED: &str = "CONFLICTS_UNEXAMINED";
    pub const DUPLICATE_NAME: &str = "DUPLICATE_NAME";
    pub const INVALID_NAME: &str = "INVALID_NAME";
    pub const CYCLIC_PART: &str = "CYCLIC_PART";
    pub const INVALID_IMAGE_BOUNDS: &str = "INVALID_IMAGE_BOUNDS";
    pub const INVALID_COST: &str = "INVALID_COST";
    pub const EMPTY_SELECTION: &str = "EMPTY_SELECTION";
    pub const SELF_CONFLICT: &str = "SELF_CONFLICT";
    pub const QRAK_INCONSISTENT: &str = "QRAK_INCONSISTENT";
    pub const QRAK_MISMATCH: &str = "QRAK_MISMATCH";
    pub const UNCLASSIFIED_CONSTRAINT: &str = "UNCLASSIFIED_CONSTRAINT";
    pub const NO_FORMULATION: &str = "NO_FORMULATION";
    pub const UNSUPPORTED_VERSION: &str = "UNSUPPORTED_VERSION";
    pub const UNBOUNDED_SELECTED: &str = "UNBOUNDED_SELECTED";
}

/// Identifiers are ASCII words; dots are reserved for objective paths.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn check_names<'a>(kind: &str, names: impl Iterator<Item = &'a str>, scope: &str, out: &mut Vec<Finding>) {
    let mut seen = BTreeSet::new();
    for name in names {
        if !is_identifier(name) {
            out.push(Finding::new(
                Severity::Error,
                codes::INVALID_NAME,
                name,
                format!("{kind} name {name:?} is not an identifier"),
            ));
        }
        if !seen.insert(name) {
            out.push(Finding::new(
                Severity::Error,
                codes::DUPLICATE_NAME,
                name,
                format!("{kind} {name:?} declared more than once in {scope}"),
            ));
        }
    }
}

fn check_cost(cost: &CostEstimate, subject: &str, out: &mut Vec<Finding>) {
    if let Some(problem) = cost.problems() {
        out.push(Finding::new(Severity::Error, codes::INVALID_COST, subject, problem));
    }
}

fn check_objective(
    obj: &Objective,
    path: &str,
    ancestors: &mut Vec<String>,
    variables: &BTreeSet<&str>,
    out: &mut Vec<Finding>,
) {
    if ancestors.contains(&obj.name) {
        out.push(Finding::new(
            Severity::Error,
            codes::CYCLIC_PART,
            path,
            format!("objective {:?} contains itself as a part", obj.name),
        ));
    }
    check_names("objective part", obj.parts.iter().map(|p| p.name.as_str()), path, out);
    if obj.additively_separable == Ternary::Yes && obj.parts.len() < 2 {
        out.push(Finding::new(
            Severity::Warning,
            codes::SEPARABLE_UNPARTITIONED,
            path,
            "marked additively separable but not split into at least two parts",
        ));
    }
    for var in &obj.domain_vars {
        if !variables.contains(var.as_str()) {
            out.push(Finding::new(
                Severity::Error,
                codes::DANGLING_REF,
                path,
                format!("domain references undeclared variable {var:?}"),
            ));
        }
    }
    if let Some(image) = obj.image_bounds {
        if !(image.lower <= image.upper) {
            out.push(Finding::new(
                Severity::Error,
                codes::INVALID_IMAGE_BOUNDS,
                path,
                format!("image lower {} exceeds upper {}", image.lower, image.upper),
            ));
        }
    }
    if let Some(cost) = &obj.cost {
        check_cost(cost, path, out);
    }
    ancestors.push(obj.name.clone());
    for part in &obj.parts {
        check_objective(part, &format!("{path}.{}", part.name), ancestors, variables, out);
    }
    ancestors.pop();
}

/// Lints a specification. The result is sorted by subject, then code.
pub fn validate_spec(spec: &ProblemSpec) -> Vec<Finding> {
    let mut out = Vec::new();

    if spec.schema_version != SCHEMA_VERSION {
        out.push(Finding::new(
            Severity::Error,
            codes::UNSUPPORTED_VERSION,
            "schema_version",
            format!("schema_version {} is not supported", spec.schema_version),
        ));
    }

    check_names(
        "objective",
        spec.objectives.iter().map(|o| o.name.as_str()),
        "objectives",
        &mut out,
    );
    check_names(
        "variable",
        spec.variables.iter().map(|v| v.name.as_str()),
        "variables",
        &mut out,
    );
    check_names(
        "constraint",
        spec.constraints.iter().map(|c| c.name.as_str()),
        "constraints",
        &mut out,
    );

    let variable_names: BTreeSet<&str> = spec.variables.iter().map(|v| v.name.as_str()).collect();
    let objective_paths: BTreeSet<String> = spec.objective_paths().into_iter().map(|(p, _)| p).collect();
    let constraint_names: BTreeSet<&str> = spec.constraints.iter().map(|c| c.name.as_str()).collect();

    for obj in &spec.objectives {
        check_objective(obj, &obj.name, &mut Vec::new(), &variable_names, &mut out);
    }

    for var in &spec.variables {
        let name = var.name.as_str();
        let needs_bounds = !matches!(var.dtype, Some(DataType::Categorical) | Some(DataType::Binary));
        match (var.lower, var.upper) {
            (None, None) if needs_bounds => out.push(Finding::new(
                Severity::Warning,
                codes::NO_BOUNDS,
                name,
                "no lower or upper bound known",
            )),
            (Some(_), None) | (None, Some(_)) if needs_bounds => out.push(Finding::new(
                Severity::Warning,
                codes::PARTIAL_BOUNDS,
                name,
                "only one bound known",
            )),
            (Some(lo), Some(hi)) if !(lo < hi) => out.push(Finding::new(
                Severity::Error,
                codes::INVALID_BOUNDS,
                name,
                format!("lower bound {lo} is not below upper bound {hi}"),
            )),
            _ => {}
        }
        if var.transform == Transform::Log {
            if let Some(lo) = var.lower {
                if lo <= 0.0 {
                    out.push(Finding::new(
                        Severity::Error,
                        codes::LOG_NONPOSITIVE,
                        name,
                        format!("log transform needs a positive lower bound, got {lo}"),
                    ));
                }
            }
        }
        for target in var.influence.keys() {
            if !objective_paths.contains(target) {
                out.push(Finding::new(
                    Severity::Error,
                    codes::DANGLING_REF,
                    name,
                    format!("influence references undeclared objective {target:?}"),
                ));
            }
        }
    }

    for con in &spec.constraints {
        let name = con.name.as_str();
        if let Some(cost) = &con.cost {
            check_cost(cost, name, &mut out);
        }
        match qrak::classify(con.known, con.a_priori, con.relaxable, con.quantifiable) {
            Err(qrak::QrakError::InconsistentFlags(flag)) => out.push(Finding::new(
                Severity::Error,
                codes::QRAK_INCONSISTENT,
                name,
                format!("hidden constraint cannot have {flag} = yes"),
            )),
            Err(_) => {
                if let Some(code) = con.code {
                    out.push(Finding::new(
                        Severity::Error,
                        codes::QRAK_MISMATCH,
                        name,
                        format!("code {code} recorded although flags are incomplete"),
                    ));
                } else {
                    out.push(Finding::new(
                        Severity::Info,
                        codes::UNCLASSIFIED_CONSTRAINT,
                        name,
                        "QRAK code cannot be derived while flags are unknown",
                    ));
                }
            }
            Ok(expected) => {
                if !con.known
                    && [con.a_priori, con.relaxable, con.quantifiable]
                        .iter()
                        .any(|t| *t != Ternary::No)
                {
                    out.push(Finding::new(
                        Severity::Error,
                        codes::QRAK_INCONSISTENT,
                        name,
                        "hidden constraint must record a_priori, relaxable and quantifiable as no",
                    ));
                }
                if con.code != Some(expected) {
                    out.push(Finding::new(
                        Severity::Error,
                        codes::QRAK_MISMATCH,
                        name,
                        format!(
                            "recorded code {} does not match derived code {expected}",
                            con.code.map(|c| c.render()).unwrap_or_else(|| "none".into())
                        ),
                    ));
                }
            }
        }
    }

    for (a, b) in &spec.conflicts {
        for side in [a, b] {
            if !objective_paths.contains(side) {
                out.push(Finding::new(
                    Severity::Error,
                    codes::DANGLING_REF,
                    "conflicts",
                    format!("conflict references undeclared objective {side:?}"),
                ));
            }
        }
        if a == b {
            out.push(Finding::new(
                Severity::Error,
                codes::SELF_CONFLICT,
                "conflicts",
                format!("objective {a:?} listed as conflicting with itself"),
            ));
        }
    }

    check_cost(&spec.budget, "budget", &mut out);

    match &spec.formulation {
        None => out.push(Finding::new(
            Severity::Warning,
            codes::NO_FORMULATION,
            "formulation",
            "no problem formulation decided yet",
        )),
        Some(form) => {
            let refs = [
                ("objective", &form.selected_objectives),
                ("variable", &form.selected_variables),
                ("constraint", &form.selected_constraints),
            ];
            for (kind, names) in refs {
                for name in names.iter() {
                    let declared = match kind {
                        "objective" => objective_paths.contains(name),
                        "variable" => variable_names.contains(name.as_str()),
                        _ => constraint_names.contains(name.as_str()),
                    };
                    if !declared {
                        out.push(Finding::new(
                            Severity::Error,
                            codes::DANGLING_REF,
                            "formulation",
                            format!("formulation selects undeclared {kind} {name:?}"),
                        ));
                    }
                }
            }
            if form.selected_objectives.is_empty() || form.selected_variables.is_empty() {
                out.push(Finding::new(
                    Severity::Error,
                    codes::EMPTY_SELECTION,
                    "formulation",
                    "formulation must select at least one objective and one variable",
                ));
            }
            if form.selected_objectives.len() > 1 && spec.conflicts.is_empty() {
                out.push(Finding::new(
                    Severity::Info,
                    codes::CONFLICTS_UNEXAMINED,
                    "formulation",
                    "several objectives selected but no conflicting pairs recorded",
                ));
            }
        }
    }

    out.sort_by(|x, y| {
        (x.subject.as_str(), x.code.as_str(), x.message.as_str()).cmp(&(
            y.subject.as_str(),
            y.code.as_str(),
            y.message.as_str(),
        ))
    });
    out
}

/// Extra checks applied when a formulation is finalized: every selected
/// real variable needs a box so that the search space can be normalized.
pub fn finalization_findings(spec: &ProblemSpec) -> Vec<Finding> {
    let mut out = Vec::new();
    if let Some(form) = &spec.formulation {
        for name in &form.selected_variables {
            if let Some(var) = spec.variable(name) {
                if var.dtype == Some(DataType::Real) && (var.lower.is_none() || var.upper.is_none()) {
                    out.push(Finding::new(
                        Severity::Error,
                        codes::UNBOUNDED_SELECTED,
                        name.as_str(),
                        "selected real variable needs both bounds",
                    ));
                }
            }
        }
    }
    out
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("at least two objectives are needed to list conflict candidates")]
    EmptyObjectives,
}

fn ordered_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Unordered pairs of top-level objectives that nobody has declared as
/// conflicting yet, sorted lexicographically.
pub fn conflict_candidates(spec: &ProblemSpec) -> Result<Vec<(String, String)>, ModelError> {
    if spec.objectives.len() < 2 {
        return Err(ModelError::EmptyObjectives);
    }
    let declared: BTreeSet<(String, String)> = spec.conflicts.iter().map(|(a, b)| ordered_pair(a, b)).collect();
    let mut names: Vec<&str> = spec.objectives.iter().map(|o| o.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    let mut out = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let pair = ordered_pair(a, b);
            if !declared.contains(&pair) {
                out.push(pair);
            }
        }
    }
    Ok(out)
}

pub fn parse_spec(document: &[u8]) -> Result<ProblemSpec, DocumentError> {
    canonical::from_versioned_bytes(document)
}

pub fn write_spec(spec: &ProblemSpec) -> Vec<u8> {
    canonical::to_bytes(spec)
}
