//! Checklist-driven intake sessions.
//!
//! A session walks a team through the ten-item template. Items 4 to 6
//! expand into one block per objective (and objective part), variable and
//! constraint, and every bullet of such a block is its own instance that
//! can be answered or skipped independently. Instance ids combine the item,
//! the bullet and the entity path: `item4.shape[f.g]`.
//!
//! Every mutation rebuilds the draft specification from the current
//! answers, so re-answering an earlier item is always safe. Instances that
//! no longer apply (for example, the blocks of an objective removed from
//! the list) are dropped while pending and kept, inactive, once answered or
//! skipped; they come back into play if the entity reappears.
//!
//! Editorial rules not fixed by the checklist itself:
//!
//! * item 2 (goal) is required like items 8 to 10, because a specification
//!   without a goal is meaningless;
//! * item 7 (conflicts) may be skipped only while at most one objective is
//!   declared and at most one selected; a skip is reverted to pending when
//!   that stops being true;
//! * item 3 is one structured free-text answer;
//! * skipping whether a listed constraint is known treats it as known, with
//!   the remaining flags still to be asked;
//! * a constraint gets its QRAK code once every flag is yes or no.

mod answer;
mod engine;
mod session;
mod template;

use serde::Serialize;
use thiserror::Error;

pub use answer::{Answer, AnswerKind};
pub use engine::{Engine, NextItem};
pub use session::{ChecklistSession, Draft, InstanceState, InstanceView, Progress, Stage};
pub use template::{ChecklistTemplate, ExpandsPer, Item, SpawnWhen, SubItem};

use crate::problem_model::Finding;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum ChecklistError {
    #[error("at least one participant is needed")]
    EmptyParticipants,
    #[error("no active item instance {instance:?}")]
    UnknownInstance { instance: String },
    #[error("{instance} expects a {expected} answer, got {found}")]
    AnswerTypeMismatch {
        instance: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("QRAK inconsistency for {constraint}: {reason}")]
    QrakInconsistent { constraint: String, reason: String },
    #[error("{instance} is required and cannot be skipped")]
    RequiredItem { instance: String },
    #[error("a skip needs a reason")]
    EmptyReason,
    #[error("{instance} is not pending")]
    NotPending { instance: String },
    #[error("session incomplete; pending: {}", .pending.join(", "))]
    IncompleteSession { pending: Vec<String> },
    #[error("specification has {} error finding(s): {}", .findings.len(), .findings.iter().map(|f| format!("{} on {}", f.code, f.subject)).collect::<Vec<_>>().join(", "))]
    SpecInvalid { findings: Vec<Finding> },
    #[error("session has not been finalized")]
    NotFinalized,
    #[error("invalid answer for {instance}: {reason}")]
    InvalidAnswer { instance: String, reason: String },
    #[error("session is in stage {stage:?}; reopen it before editing")]
    NotEditable { stage: Stage },
    #[error("cannot move from stage {from:?} to {to:?}")]
    InvalidStageTransition { from: Stage, to: Stage },
    #[error("invalid template: {reason}")]
    InvalidTemplate { reason: String },
}

impl ChecklistError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ChecklistError::EmptyParticipants => "EmptyParticipants",
            ChecklistError::UnknownInstance { .. } => "UnknownInstance",
            ChecklistError::AnswerTypeMismatch { .. } => "AnswerTypeMismatch",
            ChecklistError::QrakInconsistent { .. } => "QrakInconsistent",
            ChecklistError::RequiredItem { .. } => "RequiredItem",
            ChecklistError::EmptyReason => "EmptyReason",
            ChecklistError::NotPending { .. } => "NotPending",
            ChecklistError::IncompleteSession { .. } => "IncompleteSession",
            ChecklistError::SpecInvalid { .. } => "SpecInvalid",
            ChecklistError::NotFinalized => "NotFinalized",
            ChecklistError::InvalidAnswer { .. } => "InvalidAnswer",
            ChecklistError::NotEditable { .. } => "NotEditable",
            ChecklistError::InvalidStageTransition { .. } => "InvalidStageTransition",
            ChecklistError::InvalidTemplate { .. } => "InvalidTemplate",
        }
    }
}
