use std::fmt::Write as _;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use greybox_core::canonical;
use greybox_core::checklist::{Answer, ChecklistSession, Engine, InstanceState, NextItem};
use greybox_core::contopt::BenchConfig;
use greybox_core::experiment::{
    parse_design_csv, parse_runs_csv, render_report, report_skeleton, robust_select, write_cells_csv, Aggregation,
    Direction, ReportMetadata, ReportSkeleton,
};
use greybox_core::problem_model::{has_errors, validate_spec, write_spec, Finding};
use greybox_core::recommender::{explain, recommend, render_markdown};

use crate::exit::{BadInput, ValidationFailed};
use crate::intake::{self, Status};
use crate::store::{self, spec_path_for, valid_session_id, SESSION_EXT};

#[derive(Debug, Parser)]
#[command(
    name = "greybox",
    version,
    about = "Structured intake and algorithm design for optimization projects"
)]
pub struct Cli {
    /// Directory holding `<id>.session` and `<id>.spec.json` files.
    #[arg(long, global = true, env = "GREYBOX_DATA_DIR", default_value = "greybox-data")]
    pub data_dir: PathBuf,
    /// Fixed timestamp (RFC 3339) for every session mutation; useful for
    /// reproducible files.
    #[arg(long, global = true, env = "GREYBOX_NOW")]
    pub now: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a checklist session stored in a file.
    #[command(subcommand)]
    Intake(IntakeCommand),
    /// Lint a specification; exits 3 when any finding is an error.
    Validate {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Rank algorithm families for a finalized specification.
    Recommend {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Benchmark initial-simplex rules from a JSON configuration.
    Bench {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the blank run sheet of a design.
    Plan {
        design: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an experiment report from a design, its runs and selections.
    Report(ReportArgs),
    /// Print the default checklist template.
    Template {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the session HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long)]
    pub runs: Option<PathBuf>,
    /// `response:mean|worst_case:minimize|maximize`; repeatable.
    #[arg(long = "select")]
    pub selections: Vec<String>,
    /// JSON report content (`{"title": ..., "sections": [...]}`).
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    /// Title for a guide-sheet report when no metadata is given.
    #[arg(long, default_value = "Experiment report")]
    pub title: String,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
}

/// A session file path, or a session id looked up in the data directory.
#[derive(Debug, Args)]
pub struct SessionArg {
    pub session: String,
}

#[derive(Debug, Subcommand)]
pub enum IntakeCommand {
    /// Start a session; item 1 is answered from the participant list.
    New {
        /// Comma-separated `name:role` pairs.
        #[arg(long)]
        participants: String,
        #[arg(long)]
        id: Option<String>,
        /// Session file; defaults to `<data-dir>/<id>.session`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Show progress and the next pending instance.
    Resume {
        #[command(flatten)]
        session: SessionArg,
        /// Show this pending instance instead of the first one.
        #[arg(long)]
        jump: Option<String>,
        /// List every active instance.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Answer (or re-answer) an instance.
    Answer {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long)]
        instance: String,
        /// Answer as JSON: `{"kind": ..., "value": ...}`.
        #[arg(long, conflicts_with = "answer_file", required_unless_present = "answer_file")]
        answer: Option<String>,
        #[arg(long)]
        answer_file: Option<PathBuf>,
        /// Fail unless the session is at this revision.
        #[arg(long)]
        revision: Option<u64>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Skip a pending, optional instance.
    Skip {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long)]
        instance: String,
        #[arg(long)]
        reason: String,
        #[arg(long)]
        revision: Option<u64>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Finalize; writes `<name>.spec.json` next to the session file.
    Finalize {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long)]
        revision: Option<u64>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
    /// Write the finalized specification.
    Export {
        #[command(flatten)]
        session: SessionArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn engine(now: Option<&str>) -> Result<Engine> {
    let engine = Engine::default();
    Ok(match now {
        None => engine,
        Some(text) => {
            let at: DateTime<Utc> = DateTime::parse_from_rfc3339(text)
                .map_err(|e| BadInput(format!("--now {text:?}: {e}")))?
                .to_utc();
            engine.with_fixed_time(at)
        }
    })
}

fn session_path(data_dir: &Path, arg: &str) -> PathBuf {
    let as_path = PathBuf::from(arg);
    if as_path.exists() || arg.contains(std::path::MAIN_SEPARATOR) || arg.ends_with(&format!(".{SESSION_EXT}")) {
        as_path
    } else {
        data_dir.join(format!("{arg}.{SESSION_EXT}"))
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => store::write_atomic(path, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn print(text: &str) -> Result<()> {
    emit(None, text.as_bytes())
}

fn status_markdown(status: &Status) -> String {
    let mut out = String::new();
    let p = &status.progress;
    let _ = writeln!(
        out,
        "session {} (revision {}, stage {:?}, iteration {})",
        status.session_id, status.revision, status.stage, status.iteration
    );
    let _ = writeln!(
        out,
        "progress: {} answered, {} skipped, {} pending of {}",
        p.answered, p.skipped, p.pending, p.total
    );
    match &status.next {
        NextItem::Done => {
            let _ = writeln!(out, "next: nothing pending; run `intake finalize`");
        }
        NextItem::Item(view) => {
            let required = if view.required { ", required" } else { "" };
            let _ = writeln!(out, "next: {} [{}{}]", view.id, view.answer_kind.as_str(), required);
            let _ = writeln!(out, "  {}: {}", view.title, view.prompt);
        }
    }
    out
}

fn show_status(engine: &Engine, session: &ChecklistSession, jump: Option<&str>, format: Format) -> Result<()> {
    let status = intake::status(engine, session, jump)?;
    match format {
        Format::Json => print(&canonical::to_string(&status)),
        _ => print(&status_markdown(&status)),
    }
}

fn list_instances(engine: &Engine, session: &ChecklistSession, format: Format) -> Result<()> {
    let views = engine.instances(session);
    if format == Format::Json {
        return print(&canonical::to_string(&views));
    }
    let mut out = String::from("| instance | kind | required | state |\n|---|---|---|---|\n");
    for v in views {
        let state = match v.state {
            InstanceState::Pending => "pending".to_string(),
            InstanceState::Answered { .. } => "answered".to_string(),
            InstanceState::Skipped { reason } => format!("skipped ({reason})"),
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            v.id,
            v.answer_kind.as_str(),
            v.required,
            state
        );
    }
    print(&out)
}

fn read_answer(inline: Option<String>, file: Option<PathBuf>) -> Result<Answer> {
    let text = match (inline, file) {
        (Some(text), _) => text,
        (None, Some(path)) => String::from_utf8(store::read(&path)?).map_err(|e| BadInput(e.to_string()))?,
        (None, None) => bail!(BadInput("an answer is required".into())),
    };
    serde_json::from_str(&text).map_err(|e| BadInput(format!("answer is not valid: {e}")).into())
}

fn run_intake(cmd: IntakeCommand, data_dir: &Path, engine: &Engine) -> Result<()> {
    match cmd {
        IntakeCommand::New {
            participants,
            id,
            out,
            format,
        } => {
            if let Some(id) = &id {
                if out.is_none() && !valid_session_id(id) {
                    bail!(BadInput(format!(
                        "session id {id:?} may only use letters, digits, '-' and '_'"
                    )));
                }
            }
            let participants = intake::parse_participants(&participants);
            let (session, path) = intake::create(engine, participants, id, |id| {
                Ok(out.unwrap_or_else(|| data_dir.join(format!("{id}.{SESSION_EXT}"))))
            })?;
            eprintln!("created {}", path.display());
            show_status(engine, &session, None, format)
        }
        IntakeCommand::Resume {
            session,
            jump,
            all,
            format,
        } => {
            let path = session_path(data_dir, &session.session);
            let session = store::load_session(engine, &path)?;
            if all {
                list_instances(engine, &session, format)
            } else {
                show_status(engine, &session, jump.as_deref(), format)
            }
        }
        IntakeCommand::Answer {
            session,
            instance,
            answer,
            answer_file,
            revision,
            format,
        } => {
            let path = session_path(data_dir, &session.session);
            let answer = read_answer(answer, answer_file)?;
            let session = intake::answer(engine, &path, &instance, answer, revision)?;
            show_status(engine, &session, None, format)
        }
        IntakeCommand::Skip {
            session,
            instance,
            reason,
            revision,
            format,
        } => {
            let path = session_path(data_dir, &session.session);
            let session = intake::skip(engine, &path, &instance, &reason, revision)?;
            show_status(engine, &session, None, format)
        }
        IntakeCommand::Finalize {
            session,
            revision,
            format,
        } => {
            let path = session_path(data_dir, &session.session);
            let (session, spec) = intake::finalize(engine, &path, revision)?;
            let spec_path = spec_path_for(&path);
            match format {
                Format::Json => emit(None, &write_spec(&spec)),
                _ => print(&format!(
                    "finalized {} at revision {}; specification written to {}\n",
                    session.id,
                    session.revision,
                    spec_path.display()
                )),
            }
        }
        IntakeCommand::Export { session, out } => {
            let path = session_path(data_dir, &session.session);
            let spec = intake::export(engine, &path)?;
            emit(out.as_deref(), &write_spec(&spec))
        }
    }
}

fn findings_markdown(findings: &[Finding]) -> String {
    if findings.is_empty() {
        return "no findings\n".into();
    }
    let mut out = String::from("| severity | code | subject | message |\n|---|---|---|---|\n");
    for f in findings {
        let _ = writeln!(out, "| {} | {} | {} | {} |", f.severity, f.code, f.subject, f.message);
    }
    out
}

fn parse_selection(text: &str) -> Result<(String, Aggregation, Direction)> {
    let parts: Vec<&str> = text.split(':').collect();
    let [response, aggregation, direction] = parts[..] else {
        bail!(BadInput(format!(
            "--select {text:?}: expected response:aggregation:direction"
        )));
    };
    let aggregation = match aggregation {
        "mean" => Aggregation::Mean,
        "worst_case" | "worst" => Aggregation::WorstCase,
        other => bail!(BadInput(format!("unknown aggregation {other:?} (mean, worst_case)"))),
    };
    let direction = match direction {
        "minimize" | "min" => Direction::Minimize,
        "maximize" | "max" => Direction::Maximize,
        other => bail!(BadInput(format!("unknown direction {other:?} (minimize, maximize)"))),
    };
    Ok((response.to_string(), aggregation, direction))
}

fn run_report(args: ReportArgs) -> Result<()> {
    let design_text = String::from_utf8(store::read(&args.design)?).map_err(|e| BadInput(e.to_string()))?;
    let design = parse_design_csv(&design_text)?;
    let runs = match &args.runs {
        Some(path) => {
            let text = String::from_utf8(store::read(path)?).map_err(|e| BadInput(e.to_string()))?;
            parse_runs_csv(&design, &text)?
        }
        None => Vec::new(),
    };
    let mut selections = Vec::new();
    for spec in &args.selections {
        let (response, aggregation, direction) = parse_selection(spec)?;
        selections.push(robust_select(&design, &runs, &response, aggregation, direction)?);
    }
    let skeleton = match &args.metadata {
        Some(path) => {
            let meta: ReportMetadata =
                serde_json::from_slice(&store::read(path)?).with_context(|| format!("parsing {}", path.display()))?;
            report_skeleton(&meta)
        }
        None => ReportSkeleton::guide_sheet(&args.title),
    };
    match args.format {
        Format::Json => print(&canonical::to_string(&selections)),
        _ => print(&render_report(&skeleton, Some(&design), &selections)),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Intake(cmd) => {
            let engine = engine(cli.now.as_deref())?;
            run_intake(cmd, &cli.data_dir, &engine)
        }
        Command::Validate { spec, format } => {
            let spec = intake::read_spec(&spec)?;
            let findings = validate_spec(&spec);
            match format {
                Format::Json => print(&canonical::to_string(&findings))?,
                _ => print(&findings_markdown(&findings))?,
            }
            if has_errors(&findings) {
                let n = findings
                    .iter()
                    .filter(|f| f.severity == greybox_core::problem_model::Severity::Error)
                    .count();
                return Err(ValidationFailed(n).into());
            }
            Ok(())
        }
        Command::Recommend { spec, format } => {
            let spec = intake::read_spec(&spec)?;
            let recs = recommend(&spec)?;
            match format {
                Format::Json => print(&canonical::to_string(&recs)),
                _ => {
                    let mut out = render_markdown(&recs);
                    out.push('\n');
                    for rec in &recs {
                        out.push_str(&explain(rec));
                        out.push('\n');
                    }
                    print(&out)
                }
            }
        }
        Command::Bench { config, format, out } => {
            let bytes = store::read(&config)?;
            let config: BenchConfig =
                serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", config.display()))?;
            let table = config.run()?;
            let text = match format {
                Format::Csv => table.to_csv(),
                Format::Md => table.to_markdown(),
                Format::Json => canonical::to_string(&table),
            };
            emit(out.as_deref(), text.as_bytes())
        }
        Command::Plan { design, out } => {
            let text = String::from_utf8(store::read(&design)?).map_err(|e| BadInput(e.to_string()))?;
            let design = parse_design_csv(&text)?;
            emit(out.as_deref(), write_cells_csv(&design).as_bytes())
        }
        Command::Report(args) => run_report(args),
        Command::Template { out } => emit(out.as_deref(), &Engine::default().template().to_bytes()),
        Command::Serve { host, port } => {
            let engine = engine(cli.now.as_deref())?;
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| BadInput(format!("{host}:{port}: {e}")))?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(crate::http::serve(engine, cli.data_dir, addr))
        }
    }
}
