//! Scripted answers for walking a checklist session to the end.

#![allow(dead_code)]

use std::collections::BTreeMap;

use greybox_core::checklist::{
    Answer, AnswerKind, ChecklistError, ChecklistSession, Engine, InstanceState, InstanceView, NextItem, Stage,
};
use greybox_core::problem_model::{finalization_findings, has_errors, validate_spec};
use greybox_core::problem_model::{
    Background, CostEstimate, DataType, Formulation, GlobalStructure, GoalKind, Influence, Interval, Paradigm,
    Participant, Responsibility, Shape, Ternary, Transform, Value,
};

pub fn participants() -> Vec<Participant> {
    vec![Participant::new("A", "client"), Participant::new("B", "optimizer")]
}

pub fn fixed_engine() -> Engine {
    let at = chrono::DateTime::parse_from_rfc3339("2024-05-01T09:00:00Z")
        .unwrap()
        .to_utc();
    Engine::default().with_fixed_time(at)
}

fn ternary(choice: u8) -> Ternary {
    [Ternary::Yes, Ternary::No, Ternary::Unknown][choice as usize % 3]
}

fn pick<T: Clone>(choice: u8, options: &[T]) -> T {
    options[choice as usize % options.len()].clone()
}

/// A valid-looking answer for `view`. `choice` varies the content; the
/// formulation only selects declared names unless `choice % 11 == 10`.
pub fn answer_for(session: &ChecklistSession, view: &InstanceView, choice: u8) -> Answer {
    let draft = &session.draft;
    let depth = view.entity.as_deref().map_or(0, |e| e.split('.').count());
    match view.answer_kind {
        AnswerKind::ParticipantList => Answer::ParticipantList(participants()),
        AnswerKind::GoalKind => Answer::GoalKind(pick(choice, &[GoalKind::FindBest, GoalKind::FindRobust])),
        AnswerKind::FreeText => Answer::FreeText(Background {
            theoretical_relationships: "mass balance".into(),
            ..Background::default()
        }),
        AnswerKind::ObjectiveBlock => Answer::ObjectiveBlock(
            pick(choice, &[vec!["f"], vec!["f", "g"]])
                .into_iter()
                .map(String::from)
                .collect(),
        ),
        AnswerKind::VariableBlock => Answer::VariableBlock(
            pick(choice, &[vec!["x1"], vec!["x1", "x2"]])
                .into_iter()
                .map(String::from)
                .collect(),
        ),
        AnswerKind::ConstraintBlock => Answer::ConstraintBlock(
            pick(choice, &[vec![], vec!["c1"], vec!["c1", "c2"]])
                .into_iter()
                .map(String::from)
                .collect(),
        ),
        AnswerKind::PairList => {
            let names: Vec<&str> = draft.objectives.iter().map(|o| o.name.as_str()).collect();
            if names.len() >= 2 && choice.is_multiple_of(2) {
                Answer::PairList(vec![(names[0].to_string(), names[1].to_string())])
            } else {
                Answer::PairList(vec![])
            }
        }
        AnswerKind::FormulationBlock => {
            let mut objectives: Vec<String> = draft.objectives.iter().map(|o| o.name.clone()).collect();
            let mut variables: Vec<String> = draft.variables.iter().map(|v| v.name.clone()).collect();
            if choice % 3 == 1 {
                objectives.truncate(1);
                variables.truncate(1);
            }
            if choice % 11 == 10 {
                variables.push("undeclared".into());
            }
            let paradigm = if objectives.len() > 1 {
                Paradigm::MultiObjective
            } else {
                Paradigm::SingleObjective
            };
            Answer::FormulationBlock(Formulation {
                selected_objectives: objectives,
                selected_variables: variables,
                selected_constraints: draft.constraints.iter().map(|c| c.name.clone()).collect(),
                paradigm,
            })
        }
        AnswerKind::CostBlock => Answer::CostBlock {
            cost_model: "wall clock".into(),
            budget: CostEstimate::constant(3600.0, "s"),
        },
        AnswerKind::ResponsibilityList => Answer::ResponsibilityList(vec![Responsibility {
            person: "B".into(),
            role: "implements the solver".into(),
        }]),
        AnswerKind::Decomposition => {
            let split = depth < 2 && choice % 4 == 3;
            Answer::Decomposition {
                parts: if split { vec!["p".into(), "q".into()] } else { vec![] },
                additively_separable: if split { Ternary::Yes } else { Ternary::No },
            }
        }
        AnswerKind::Analytic => Answer::Analytic {
            analytic_form: ternary(choice),
            gradient_available: ternary(choice / 3),
        },
        AnswerKind::Shape => Answer::Shape(pick(
            choice,
            &[
                Shape::Linear,
                Shape::Quadratic,
                Shape::Convex,
                Shape::Multimodal,
                Shape::Unknown,
            ],
        )),
        AnswerKind::GlobalStructure => Answer::GlobalStructure(pick(
            choice,
            &[
                GlobalStructure::Funnel,
                GlobalStructure::Symmetric,
                GlobalStructure::None,
                GlobalStructure::Unknown,
            ],
        )),
        AnswerKind::Deterministic => Answer::Deterministic(ternary(choice)),
        AnswerKind::ObjectiveDomain => Answer::ObjectiveDomain {
            domain_vars: draft.variables.iter().take(1).map(|v| v.name.clone()).collect(),
            image_bounds: (choice.is_multiple_of(2)).then_some(Interval {
                lower: 0.0,
                upper: 10.0,
            }),
        },
        AnswerKind::Cost => Answer::Cost(CostEstimate::range(0.5, 2.0, "s")),
        AnswerKind::VariableDomain => match choice % 3 {
            0 => Answer::VariableDomain {
                dtype: DataType::Real,
                lower: Some(-5.0),
                upper: Some(5.0),
            },
            1 => Answer::VariableDomain {
                dtype: DataType::Integer,
                lower: Some(0.0),
                upper: Some(10.0),
            },
            _ => Answer::VariableDomain {
                dtype: DataType::Categorical,
                lower: None,
                upper: None,
            },
        },
        AnswerKind::DefaultValue => Answer::DefaultValue((choice.is_multiple_of(2)).then_some(Value::Real(1.0))),
        AnswerKind::Influence => {
            let mut map = BTreeMap::new();
            if let Some(o) = draft.objectives.first() {
                map.insert(
                    o.name.clone(),
                    pick(choice, &[Influence::High, Influence::Low, Influence::Unknown]),
                );
            }
            Answer::Influence(map)
        }
        AnswerKind::Transform => Answer::Transform(pick(choice, &[Transform::None, Transform::Sqrt])),
        AnswerKind::Known => Answer::Known(!choice.is_multiple_of(4)),
        AnswerKind::APriori => Answer::APriori {
            a_priori: ternary(choice),
            cost: (choice % 3 == 1).then(|| CostEstimate::constant(30.0, "s")),
        },
        AnswerKind::Relaxable => Answer::Relaxable(ternary(choice)),
        AnswerKind::Quantifiable => Answer::Quantifiable(ternary(choice)),
    }
}

/// Answers every pending instance in order until the session is done.
pub fn complete(engine: &Engine, mut session: ChecklistSession, choice: u8) -> ChecklistSession {
    for step in 0..500 {
        let view = match engine.next_item(&session, None).unwrap() {
            NextItem::Done => return session,
            NextItem::Item(view) => view,
        };
        let answer = answer_for(&session, &view, choice.wrapping_add(step as u8));
        session = engine.answer(&session, &view.id, answer).unwrap();
    }
    panic!("session did not terminate");
}

/// One random edit in a walk.
#[derive(Debug, Clone)]
pub enum Op {
    AnswerNext(u8),
    SkipNext,
    Reanswer(u16, u8),
    JumpAnswer(u16, u8),
    SkipAny(u16),
}

pub fn answered_ids(s: &ChecklistSession) -> Vec<String> {
    s.states
        .iter()
        .filter(|(_, st)| matches!(st, InstanceState::Answered { .. }))
        .map(|(id, _)| id.clone())
        .collect()
}

pub fn apply(engine: &Engine, s: &ChecklistSession, op: &Op) -> Result<ChecklistSession, ChecklistError> {
    let views = engine.instances(s);
    let pending: Vec<_> = views.iter().filter(|v| v.state == InstanceState::Pending).collect();
    match *op {
        Op::AnswerNext(c) => match pending.first() {
            Some(v) => engine.answer(s, &v.id, answer_for(s, v, c)),
            None => Ok(s.clone()),
        },
        Op::SkipNext => match pending.first() {
            Some(v) => engine.skip(s, &v.id, "not known yet"),
            None => Ok(s.clone()),
        },
        Op::Reanswer(i, c) => {
            let v = &views[i as usize % views.len()];
            engine.answer(s, &v.id, answer_for(s, v, c))
        }
        Op::JumpAnswer(i, c) => {
            if pending.is_empty() {
                return Ok(s.clone());
            }
            let v = pending[i as usize % pending.len()];
            engine.answer(s, &v.id, answer_for(s, v, c))
        }
        Op::SkipAny(i) => {
            let v = &views[i as usize % views.len()];
            engine.skip(s, &v.id, "skipped in a hurry")
        }
    }
}

/// Runs `ops` (ignoring rejected ones), optionally completes the walk, then
/// checks the finalize rule: success exactly when nothing is pending, the
/// required items are answered and the draft lints clean.
pub fn check_walk(engine: &Engine, ops: &[Op], finish: bool, finish_choice: u8) -> Result<(), String> {
    let mut s = engine.new_session(participants(), None).map_err(|e| e.to_string())?;
    for op in ops {
        let before = answered_ids(&s);
        if let Ok(next) = apply(engine, &s, op) {
            let after = answered_ids(&next);
            if let Some(lost) = before.iter().find(|id| !after.contains(id)) {
                return Err(format!("{lost} lost its answer after {op:?}"));
            }
            s = next;
        }
    }
    if finish {
        s = complete(engine, s, finish_choice);
    }

    let bytes = engine.save_session(&s);
    if engine.load_session(&bytes).as_ref() != Ok(&s) {
        return Err("save/load did not round-trip".into());
    }

    let views = engine.instances(&s);
    let none_pending = views.iter().all(|v| v.state != InstanceState::Pending);
    let required_answered = ["item8", "item9", "item10"]
        .iter()
        .all(|id| matches!(s.states.get(*id), Some(InstanceState::Answered { .. })));
    let complete_enough = none_pending && required_answered;
    let lint_clean = s.draft.to_spec().is_some_and(|spec| {
        let mut findings = validate_spec(&spec);
        findings.extend(finalization_findings(&spec));
        !has_errors(&findings)
    });

    match engine.finalize(&s) {
        Ok((done, spec)) => {
            if !complete_enough {
                return Err("finalized with pending or unanswered required items".into());
            }
            if done.stage != Stage::Design {
                return Err(format!("finalized into stage {:?}", done.stage));
            }
            if has_errors(&validate_spec(&spec)) {
                return Err("finalized spec has error findings".into());
            }
            if engine.load_session(&engine.save_session(&done)).as_ref() != Ok(&done) {
                return Err("finalized session did not round-trip".into());
            }
        }
        Err(ChecklistError::IncompleteSession { pending }) => {
            if complete_enough || pending.is_empty() {
                return Err(format!("IncompleteSession {pending:?} on a complete session"));
            }
        }
        Err(ChecklistError::SpecInvalid { .. }) => {
            if !complete_enough || lint_clean {
                return Err("SpecInvalid on an incomplete or lint-clean session".into());
            }
        }
        Err(other) => return Err(format!("unexpected {other:?}")),
    }
    Ok(())
}
