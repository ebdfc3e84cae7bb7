use serde::{Deserialize, Serialize};

use super::answer::AnswerKind;
use super::ChecklistError;
use crate::canonical::{self, DocumentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpandsPer {
    /// Every objective and, recursively, every part of a decomposed one.
    Objective,
    Variable,
    Constraint,
}

/// When a per-entity sub-item applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpawnWhen {
    Always,
    /// Objective without parts.
    Leaf,
    /// Objective without parts whose shape is (or may be) multimodal.
    LeafMultimodal,
    /// Constraint not declared hidden.
    Known,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubItem {
    pub id: String,
    pub prompt: String,
    pub answer_kind: AnswerKind,
    pub when: SpawnWhen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub id: String,
    pub title: String,
    pub prompt: String,
    pub answer_kind: AnswerKind,
    pub expands_per: Option<ExpandsPer>,
    pub required_for_finalize: bool,
    pub sub_items: Vec<SubItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecklistTemplate {
    pub schema_version: u32,
    pub version: u32,
    pub items: Vec<Item>,
}

const DEFAULT_TEMPLATE: &str = include_str!("../../data/default_template.json");

type SubStructure = (&'static str, AnswerKind, SpawnWhen);

/// Item ids, answer kinds and sub-items the engine knows how to interpret.
/// Templates may reword prompts and titles but must keep this structure.
const STRUCTURE: &[(&str, AnswerKind, &[SubStructure])] = &[
    ("item1", AnswerKind::ParticipantList, &[]),
    ("item2", AnswerKind::GoalKind, &[]),
    ("item3", AnswerKind::FreeText, &[]),
    (
        "item4",
        AnswerKind::ObjectiveBlock,
        &[
            ("decomposition", AnswerKind::Decomposition, SpawnWhen::Always),
            ("analytic", AnswerKind::Analytic, SpawnWhen::Leaf),
            ("shape", AnswerKind::Shape, SpawnWhen::Leaf),
            (
                "global_structure",
                AnswerKind::GlobalStructure,
                SpawnWhen::LeafMultimodal,
            ),
            ("deterministic", AnswerKind::Deterministic, SpawnWhen::Leaf),
            ("domain", AnswerKind::ObjectiveDomain, SpawnWhen::Leaf),
            ("cost", AnswerKind::Cost, SpawnWhen::Leaf),
        ],
    ),
    (
        "item5",
        AnswerKind::VariableBlock,
        &[
            ("domain", AnswerKind::VariableDomain, SpawnWhen::Always),
            ("default", AnswerKind::DefaultValue, SpawnWhen::Always),
            ("influence", AnswerKind::Influence, SpawnWhen::Always),
            ("transform", AnswerKind::Transform, SpawnWhen::Always),
        ],
    ),
    (
        "item6",
        AnswerKind::ConstraintBlock,
        &[
            ("known", AnswerKind::Known, SpawnWhen::Always),
            ("a_priori", AnswerKind::APriori, SpawnWhen::Known),
            ("relaxable", AnswerKind::Relaxable, SpawnWhen::Known),
            ("quantifiable", AnswerKind::Quantifiable, SpawnWhen::Known),
        ],
    ),
    ("item7", AnswerKind::PairList, &[]),
    ("item8", AnswerKind::FormulationBlock, &[]),
    ("item9", AnswerKind::CostBlock, &[]),
    ("item10", AnswerKind::ResponsibilityList, &[]),
];

/// Items that can never be skipped, whatever the template says.
const ALWAYS_REQUIRED: [&str; 4] = ["item2", "item8", "item9", "item10"];

impl ChecklistTemplate {
    /// The shipped ten-item template.
    pub fn default_template() -> Self {
        Self::parse(DEFAULT_TEMPLATE.as_bytes()).expect("shipped template is valid")
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, DocumentError> {
        let template: ChecklistTemplate = canonical::from_versioned_bytes(bytes)?;
        template
            .check()
            .map_err(|e| DocumentError::at_field("items", e.to_string()))?;
        Ok(template)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        canonical::to_bytes(self)
    }

    fn check(&self) -> Result<(), ChecklistError> {
        let bad = |reason: String| Err(ChecklistError::InvalidTemplate { reason });
        if self.items.len() != STRUCTURE.len() {
            return bad(format!(
                "expected {} items, found {}",
                STRUCTURE.len(),
                self.items.len()
            ));
        }
        for (item, (id, kind, subs)) in self.items.iter().zip(STRUCTURE) {
            if item.id != *id || item.answer_kind != *kind {
                return bad(format!("expected item {id} ({}), found {}", kind.as_str(), item.id));
            }
            if ALWAYS_REQUIRED.contains(id) && !item.required_for_finalize {
                return bad(format!("{id} must be required_for_finalize"));
            }
            if item.sub_items.len() != subs.len() {
                return bad(format!("{id}: expected {} sub-items", subs.len()));
            }
            for (sub, (sid, skind, when)) in item.sub_items.iter().zip(subs.iter()) {
                if sub.id != *sid || sub.answer_kind != *skind || sub.when != *when {
                    return bad(format!("{id}: expected sub-item {sid}, found {}", sub.id));
                }
            }
        }
        Ok(())
    }

    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }
}
