//! File persistence shared by the CLI and the HTTP service.
//!
//! A session lives in `<dir>/<id>.session`; once finalized its
//! specification is written next to it as `<dir>/<id>.spec.json`. Every
//! write goes to a temporary file in the same directory that is then
//! renamed over the target, so readers never see a partial document.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use anyhow::{Context, Result};
use greybox_core::checklist::{ChecklistSession, Engine};
use greybox_core::problem_model::{write_spec, ProblemSpec};

pub const SESSION_EXT: &str = "session";
pub const SPEC_SUFFIX: &str = ".spec.json";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing {}", path.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

/// `s.session` -> `s.spec.json`; other names get the suffix appended.
pub fn spec_path_for(session: &Path) -> PathBuf {
    let name = session
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = name.strip_suffix(&format!(".{SESSION_EXT}")).unwrap_or(&name);
    session.with_file_name(format!("{stem}{SPEC_SUFFIX}"))
}

pub fn load_session(engine: &Engine, path: &Path) -> Result<ChecklistSession> {
    let bytes = read(path)?;
    engine
        .load_session(&bytes)
        .with_context(|| format!("loading session {}", path.display()))
}

pub fn save_session(engine: &Engine, path: &Path, session: &ChecklistSession) -> Result<()> {
    write_atomic(path, &engine.save_session(session))
}

pub fn save_spec(path: &Path, spec: &ProblemSpec) -> Result<()> {
    write_atomic(path, &write_spec(spec))
}

/// Session ids become file names, so only a conservative alphabet is
/// accepted.
pub fn valid_session_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// A directory of sessions with one writer lock per session id.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl Store {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Store {
            dir: dir.into(),
            locks: Mutex::new(HashMap::new()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn session_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.{SESSION_EXT}"))
    }

    pub fn spec_path(&self, id: &str) -> PathBuf {
        spec_path_for(&self.session_path(id))
    }

    /// Lock serializing mutations of one session.
    pub fn lock(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(id.to_string()).or_default().clone()
    }
}
