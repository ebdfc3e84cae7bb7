//! Session operations on persisted files.
//!
//! Both the `intake` subcommands and the HTTP handlers go through these
//! functions, so the same inputs produce the same files either way.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use greybox_core::checklist::{Answer, ChecklistSession, Engine, NextItem, Progress, Stage};
use greybox_core::problem_model::{parse_spec, Participant, ProblemSpec};
use serde::Serialize;
use thiserror::Error;

use crate::store::{self, spec_path_for};

#[derive(Debug, Error)]
#[error("stale revision {provided}; the session is at revision {current}")]
pub struct StaleRevision {
    pub current: u64,
    pub provided: u64,
}

#[derive(Debug, Error)]
#[error("session {0} already exists")]
pub struct SessionExists(pub String);

/// Where a session stands; the body of `GET /sessions/{id}/next` and of
/// `intake resume --format json`.
#[derive(Debug, Clone, Serialize)]
pub struct Status {
    pub session_id: String,
    pub revision: u64,
    pub stage: Stage,
    pub iteration: u32,
    pub progress: Progress,
    pub next: NextItem,
}

pub fn status(engine: &Engine, session: &ChecklistSession, jump: Option<&str>) -> Result<Status> {
    Ok(Status {
        session_id: session.id.clone(),
        revision: session.revision,
        stage: session.stage,
        iteration: session.iteration,
        progress: engine.progress(session),
        next: engine.next_item(session, jump)?,
    })
}

/// `"A:client,B:optimizer"` -> participants. A missing role is empty.
pub fn parse_participants(text: &str) -> Vec<Participant> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|entry| match entry.split_once(':') {
            Some((name, role)) => Participant::new(name.trim(), role.trim()),
            None => Participant::new(entry, ""),
        })
        .collect()
}

fn check_revision(session: &ChecklistSession, expected: Option<u64>) -> Result<()> {
    match expected {
        Some(provided) if provided != session.revision => Err(StaleRevision {
            current: session.revision,
            provided,
        }
        .into()),
        _ => Ok(()),
    }
}

/// Starts a session and writes it to `place(id)`, refusing to overwrite an
/// existing file.
pub fn create(
    engine: &Engine,
    participants: Vec<Participant>,
    id: Option<String>,
    place: impl FnOnce(&str) -> Result<PathBuf>,
) -> Result<(ChecklistSession, PathBuf)> {
    let session = engine.new_session(participants, id)?;
    let path = place(&session.id)?;
    if path.exists() {
        return Err(SessionExists(session.id).into());
    }
    store::save_session(engine, &path, &session)?;
    Ok((session, path))
}

pub fn answer(
    engine: &Engine,
    path: &Path,
    instance: &str,
    answer: Answer,
    expected_revision: Option<u64>,
) -> Result<ChecklistSession> {
    let session = store::load_session(engine, path)?;
    check_revision(&session, expected_revision)?;
    let next = engine.answer(&session, instance, answer)?;
    store::save_session(engine, path, &next)?;
    Ok(next)
}

pub fn skip(
    engine: &Engine,
    path: &Path,
    instance: &str,
    reason: &str,
    expected_revision: Option<u64>,
) -> Result<ChecklistSession> {
    let session = store::load_session(engine, path)?;
    check_revision(&session, expected_revision)?;
    let next = engine.skip(&session, instance, reason)?;
    store::save_session(engine, path, &next)?;
    Ok(next)
}

/// Finalizes the session, writing the specification next to the session
/// file before the session itself.
pub fn finalize(
    engine: &Engine,
    path: &Path,
    expected_revision: Option<u64>,
) -> Result<(ChecklistSession, ProblemSpec)> {
    let session = store::load_session(engine, path)?;
    check_revision(&session, expected_revision)?;
    let (next, spec) = engine.finalize(&session)?;
    store::save_spec(&spec_path_for(path), &spec)?;
    store::save_session(engine, path, &next)?;
    Ok((next, spec))
}

/// The finalized specification of a session file.
pub fn export(engine: &Engine, path: &Path) -> Result<ProblemSpec> {
    let session = store::load_session(engine, path)?;
    Ok(engine.export(&session)?)
}

pub fn read_spec(path: &Path) -> Result<ProblemSpec> {
    let bytes = store::read(path)?;
    parse_spec(&bytes).with_context(|| format!("parsing {}", path.display()))
}
