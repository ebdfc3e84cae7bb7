use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::problem_model::{
    Background, CostEstimate, DataType, Formulation, GlobalStructure, GoalKind, Influence, Interval, Participant,
    Responsibility, Shape, Ternary, Transform, Value,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    ParticipantList,
    GoalKind,
    FreeText,
    ObjectiveBlock,
    VariableBlock,
    ConstraintBlock,
    PairList,
    FormulationBlock,
    CostBlock,
    ResponsibilityList,
    Decomposition,
    Analytic,
    Shape,
    GlobalStructure,
    Deterministic,
    ObjectiveDomain,
    Cost,
    VariableDomain,
    DefaultValue,
    Influence,
    Transform,
    Known,
    APriori,
    Relaxable,
    Quantifiable,
}

impl AnswerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnswerKind::ParticipantList => "participant_list",
            AnswerKind::GoalKind => "goal_kind",
            AnswerKind::FreeText => "free_text",
            AnswerKind::ObjectiveBlock => "objective_block",
            AnswerKind::VariableBlock => "variable_block",
            AnswerKind::ConstraintBlock => "constraint_block",
            AnswerKind::PairList => "pair_list",
            AnswerKind::FormulationBlock => "formulation_block",
            AnswerKind::CostBlock => "cost_block",
            AnswerKind::ResponsibilityList => "responsibility_list",
            AnswerKind::Decomposition => "decomposition",
            AnswerKind::Analytic => "analytic",
            AnswerKind::Shape => "shape",
            AnswerKind::GlobalStructure => "global_structure",
            AnswerKind::Deterministic => "deterministic",
            AnswerKind::ObjectiveDomain => "objective_domain",
            AnswerKind::Cost => "cost",
            AnswerKind::VariableDomain => "variable_domain",
            AnswerKind::DefaultValue => "default_value",
            AnswerKind::Influence => "influence",
            AnswerKind::Transform => "transform",
            AnswerKind::Known => "known",
            AnswerKind::APriori => "a_priori",
            AnswerKind::Relaxable => "relaxable",
            AnswerKind::Quantifiable => "quantifiable",
        }
    }
}

/// One answer; `{"kind": ..., "value": ...}` on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case", deny_unknown_fields)]
pub enum Answer {
    ParticipantList(Vec<Participant>),
    GoalKind(GoalKind),
    FreeText(Background),
    ObjectiveBlock(Vec<String>),
    VariableBlock(Vec<String>),
    ConstraintBlock(Vec<String>),
    PairList(Vec<(String, String)>),
    FormulationBlock(Formulation),
    CostBlock {
        cost_model: String,
        budget: CostEstimate,
    },
    ResponsibilityList(Vec<Responsibility>),
    Decomposition {
        parts: Vec<String>,
        additively_separable: Ternary,
    },
    Analytic {
        analytic_form: Ternary,
        gradient_available: Ternary,
    },
    Shape(Shape),
    GlobalStructure(GlobalStructure),
    Deterministic(Ternary),
    ObjectiveDomain {
        domain_vars: Vec<String>,
        image_bounds: Option<Interval>,
    },
    Cost(CostEstimate),
    VariableDomain {
        dtype: DataType,
        lower: Option<f64>,
        upper: Option<f64>,
    },
    DefaultValue(Option<Value>),
    Influence(BTreeMap<String, Influence>),
    Transform(Transform),
    Known(bool),
    APriori {
        a_priori: Ternary,
        cost: Option<CostEstimate>,
    },
    Relaxable(Ternary),
    Quantifiable(Ternary),
}

impl Answer {
    pub fn kind(&self) -> AnswerKind {
        match self {
            Answer::ParticipantList(_) => AnswerKind::ParticipantList,
            Answer::GoalKind(_) => AnswerKind::GoalKind,
            Answer::FreeText(_) => AnswerKind::FreeText,
            Answer::ObjectiveBlock(_) => AnswerKind::ObjectiveBlock,
            Answer::VariableBlock(_) => AnswerKind::VariableBlock,
            Answer::ConstraintBlock(_) => AnswerKind::ConstraintBlock,
            Answer::PairList(_) => AnswerKind::PairList,
            Answer::FormulationBlock(_) => AnswerKind::FormulationBlock,
            Answer::CostBlock { .. } => AnswerKind::CostBlock,
            Answer::ResponsibilityList(_) => AnswerKind::ResponsibilityList,
            Answer::Decomposition { .. } => AnswerKind::Decomposition,
            Answer::Analytic { .. } => AnswerKind::Analytic,
            Answer::Shape(_) => AnswerKind::Shape,
            Answer::GlobalStructure(_) => AnswerKind::GlobalStructure,
            Answer::Deterministic(_) => AnswerKind::Deterministic,
            Answer::ObjectiveDomain { .. } => AnswerKind::ObjectiveDomain,
            Answer::Cost(_) => AnswerKind::Cost,
            Answer::VariableDomain { .. } => AnswerKind::VariableDomain,
            Answer::DefaultValue(_) => AnswerKind::DefaultValue,
            Answer::Influence(_) => AnswerKind::Influence,
            Answer::Transform(_) => AnswerKind::Transform,
            Answer::Known(_) => AnswerKind::Known,
            Answer::APriori { .. } => AnswerKind::APriori,
            Answer::Relaxable(_) => AnswerKind::Relaxable,
            Answer::Quantifiable(_) => AnswerKind::Quantifiable,
        }
    }
}
