use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::answer::{Answer, AnswerKind};
use crate::canonical::SCHEMA_VERSION;
use crate::problem_model::{
    Background, ConstraintSpec, CostEstimate, DecisionVariable, Formulation, GoalKind, Objective, Participant,
    ProblemSpec, Responsibility,
};

/// Algorithm-engineering-cycle stage of the project the session belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Planning,
    Design,
    Implementation,
    Experimentation,
    Application,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceState {
    Pending,
    Answered { answer: Answer },
    Skipped { reason: String },
}

/// Specification under construction; fields stay empty until answered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Draft {
    pub goal: Option<GoalKind>,
    pub background: Background,
    pub objectives: Vec<Objective>,
    pub variables: Vec<DecisionVariable>,
    pub constraints: Vec<ConstraintSpec>,
    pub conflicts: Vec<(String, String)>,
    pub formulation: Option<Formulation>,
    pub cost_model: Option<String>,
    pub budget: Option<CostEstimate>,
    pub responsibilities: Vec<Responsibility>,
    pub participants: Vec<Participant>,
}

impl Draft {
    /// The draft as a specification, once goal and budget exist.
    pub fn to_spec(&self) -> Option<ProblemSpec> {
        Some(ProblemSpec {
            schema_version: SCHEMA_VERSION,
            goal: self.goal?,
            background: self.background.clone(),
            objectives: self.objectives.clone(),
            variables: self.variables.clone(),
            constraints: self.constraints.clone(),
            conflicts: self.conflicts.clone(),
            formulation: self.formulation.clone(),
            cost_model: self.cost_model.clone()?,
            budget: self.budget.clone()?,
            responsibilities: self.responsibilities.clone(),
            participants: self.participants.clone(),
        })
    }

    pub fn from_spec(spec: &ProblemSpec) -> Self {
        Draft {
            goal: Some(spec.goal),
            background: spec.background.clone(),
            objectives: spec.objectives.clone(),
            variables: spec.variables.clone(),
            constraints: spec.constraints.clone(),
            conflicts: spec.conflicts.clone(),
            formulation: spec.formulation.clone(),
            cost_model: Some(spec.cost_model.clone()),
            budget: Some(spec.budget.clone()),
            responsibilities: spec.responsibilities.clone(),
            participants: spec.participants.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecklistSession {
    pub schema_version: u32,
    pub id: String,
    pub template_version: u32,
    /// Incremented by every successful mutation, starting at 1.
    pub revision: u64,
    pub stage: Stage,
    /// Planning iteration; incremented on reopen.
    pub iteration: u32,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    /// Every instance ever created, by id, including inactive ones.
    pub states: BTreeMap<String, InstanceState>,
    /// Rebuilt from `states` after every mutation.
    pub draft: Draft,
    /// Set by finalize, cleared by reopen.
    pub finalized: Option<ProblemSpec>,
}

/// An active instance as presented to a client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceView {
    pub id: String,
    pub item_id: String,
    pub sub_item_id: Option<String>,
    /// Objective path, variable or constraint name for expanded instances.
    pub entity: Option<String>,
    pub title: String,
    pub prompt: String,
    pub answer_kind: AnswerKind,
    pub required: bool,
    pub state: InstanceState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Progress {
    pub answered: usize,
    pub skipped: usize,
    pub pending: usize,
    pub total: usize,
}
