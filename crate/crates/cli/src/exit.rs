//! Process exit codes.
//!
//! | code | meaning |
//! |---:|---|
//! | 0 | success |
//! | 1 | any other failure |
//! | 2 | bad command line |
//! | 3 | `validate` found Error-severity findings |
//! | 4 | malformed input document |
//! | 5 | unsupported schema or template version |
//! | 6 | session incomplete (finalize with pending items) |
//! | 7 | request rejected by the engine (bad answer, skip, transition, config) |
//! | 8 | finalized specification would be invalid |
//! | 9 | file system error |
//! | 10 | session or specification not finalized |

use greybox_core::canonical::DocumentError;
use greybox_core::checklist::ChecklistError;
use greybox_core::contopt::ContoptError;
use greybox_core::experiment::ExperimentError;
use greybox_core::recommender::{RecommendError, RuleTableError};
use thiserror::Error;

use crate::intake::{SessionExists, StaleRevision};

pub const OK: u8 = 0;
pub const OTHER: u8 = 1;
pub const USAGE: u8 = 2;
pub const VALIDATION: u8 = 3;
pub const PARSE: u8 = 4;
pub const VERSION: u8 = 5;
pub const INCOMPLETE: u8 = 6;
pub const REJECTED: u8 = 7;
pub const SPEC_INVALID: u8 = 8;
pub const IO: u8 = 9;
pub const UNFINALIZED: u8 = 10;

/// Returned by `validate` after the findings have been printed.
#[derive(Debug, Error)]
#[error("{0} error finding(s)")]
pub struct ValidationFailed(pub usize);

/// Input that could not be decoded outside the canonical document types.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct BadInput(pub String);

pub fn code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ChecklistError>() {
            return match e {
                ChecklistError::IncompleteSession { .. } => INCOMPLETE,
                ChecklistError::SpecInvalid { .. } => SPEC_INVALID,
                ChecklistError::NotFinalized => UNFINALIZED,
                _ => REJECTED,
            };
        }
        if let Some(e) = cause.downcast_ref::<DocumentError>() {
            return match e {
                DocumentError::Parse { .. } => PARSE,
                DocumentError::Version { .. } => VERSION,
            };
        }
        if let Some(e) = cause.downcast_ref::<RecommendError>() {
            return match e {
                RecommendError::Unfinalized => UNFINALIZED,
                _ => OTHER,
            };
        }
        if let Some(e) = cause.downcast_ref::<ExperimentError>() {
            return match e {
                ExperimentError::Csv(_) => PARSE,
                _ => REJECTED,
            };
        }
        if cause.is::<StaleRevision>() || cause.is::<SessionExists>() {
            return REJECTED;
        }
        if cause.is::<ValidationFailed>() {
            return VALIDATION;
        }
        if cause.is::<BadInput>() || cause.is::<serde_json::Error>() || cause.is::<RuleTableError>() {
            return PARSE;
        }
        if cause.is::<ContoptError>() {
            return REJECTED;
        }
        if cause.is::<std::io::Error>() {
            return IO;
        }
    }
    OTHER
}
