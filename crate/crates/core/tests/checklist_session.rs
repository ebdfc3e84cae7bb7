#[path = "support/checklist_walk.rs"]
mod walk;

use greybox_core::canonical::DocumentError;
use greybox_core::checklist::{Answer, ChecklistError, ChecklistSession, Engine, InstanceState, NextItem, Stage};
use greybox_core::problem_model::{
    CostEstimate, DataType, Formulation, GlobalStructure, GoalKind, Paradigm, Responsibility, Shape, Ternary,
};
use greybox_core::QrakCode;
use proptest::prelude::*;

use walk::{answer_for, check_walk, complete, fixed_engine, participants, Op};

fn fresh() -> (Engine, ChecklistSession) {
    let engine = fixed_engine();
    let session = engine.new_session(participants(), None).unwrap();
    (engine, session)
}

fn next_id(engine: &Engine, session: &ChecklistSession) -> Option<String> {
    match engine.next_item(session, None).unwrap() {
        NextItem::Item(view) => Some(view.id),
        NextItem::Done => None,
    }
}

fn pending_top_level(session: &ChecklistSession) -> usize {
    session
        .states
        .iter()
        .filter(|(id, st)| !id.contains('.') && matches!(st, InstanceState::Pending))
        .count()
}

fn with_constraint(name: &str) -> (Engine, ChecklistSession) {
    let (engine, s) = fresh();
    let s = engine
        .answer(&s, "item6", Answer::ConstraintBlock(vec![name.into()]))
        .unwrap();
    (engine, s)
}

#[test]
fn new_session_answers_item1_and_leaves_nine_pending() {
    let (engine, s) = fresh();
    assert_eq!(pending_top_level(&s), 9);
    assert!(matches!(s.states["item1"], InstanceState::Answered { .. }));
    assert_eq!(s.stage, Stage::Planning);
    assert_eq!(s.revision, 1);
    assert_eq!(engine.template().items.len(), 10);
    assert_eq!(s.id.len(), 16);
}

#[test]
fn empty_participants_are_rejected() {
    let engine = fixed_engine();
    assert_eq!(
        engine.new_session(vec![], None).unwrap_err(),
        ChecklistError::EmptyParticipants
    );
}

#[test]
fn fresh_session_asks_for_the_goal_first() {
    let (engine, s) = fresh();
    assert_eq!(next_id(&engine, &s).as_deref(), Some("item2"));
}

#[test]
fn decomposed_objective_expands_per_part() {
    let (engine, s) = fresh();
    let s = engine
        .answer(&s, "item4", Answer::ObjectiveBlock(vec!["f".into()]))
        .unwrap();
    let s = engine
        .answer(
            &s,
            "item4.decomposition[f]",
            Answer::Decomposition {
                parts: vec!["g".into(), "h".into()],
                additively_separable: Ternary::Yes,
            },
        )
        .unwrap();
    let ids: Vec<String> = engine.instances(&s).into_iter().map(|v| v.id).collect();
    for part in ["f.g", "f.h"] {
        assert!(ids.contains(&format!("item4.decomposition[{part}]")));
        assert!(ids.contains(&format!("item4.shape[{part}]")));
    }
    // A decomposed objective is described through its parts.
    assert!(!ids.contains(&"item4.shape[f]".to_string()));
    let f = &s.draft.objectives[0];
    assert_eq!(f.parts.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), ["g", "h"]);

    // Jumping ahead to a part block is allowed.
    match engine.next_item(&s, Some("item4.shape[f.h]")).unwrap() {
        NextItem::Item(view) => assert_eq!(view.entity.as_deref(), Some("f.h")),
        NextItem::Done => panic!("expected an item"),
    }
}

#[test]
fn jump_to_unknown_or_answered_instance_is_rejected() {
    let (engine, s) = fresh();
    assert!(matches!(
        engine.next_item(&s, Some("item4.shape[zz]")),
        Err(ChecklistError::UnknownInstance { .. })
    ));
    assert!(matches!(
        engine.next_item(&s, Some("item1")),
        Err(ChecklistError::NotPending { .. })
    ));
}

#[test]
fn hidden_constraint_is_nush() {
    let (engine, s) = with_constraint("c");
    let s = engine.answer(&s, "item6.known[c]", Answer::Known(false)).unwrap();
    let c = &s.draft.constraints[0];
    assert_eq!(c.code, Some("NUSH".parse::<QrakCode>().unwrap()));
    let ids: Vec<String> = engine.instances(&s).into_iter().map(|v| v.id).collect();
    assert!(!ids.iter().any(|id| id.starts_with("item6.relaxable")));
}

#[test]
fn hidden_but_relaxable_is_inconsistent() {
    let (engine, s) = with_constraint("c");
    let s = engine.answer(&s, "item6.known[c]", Answer::Known(true)).unwrap();
    let s = engine
        .answer(&s, "item6.relaxable[c]", Answer::Relaxable(Ternary::Yes))
        .unwrap();
    let err = engine.answer(&s, "item6.known[c]", Answer::Known(false)).unwrap_err();
    assert!(matches!(err, ChecklistError::QrakInconsistent { ref constraint, .. } if constraint == "c"));
}

#[test]
fn known_constraint_is_classified_once_all_flags_are_settled() {
    let (engine, s) = with_constraint("c");
    let s = engine.answer(&s, "item6.known[c]", Answer::Known(true)).unwrap();
    let s = engine
        .answer(
            &s,
            "item6.a_priori[c]",
            Answer::APriori {
                a_priori: Ternary::No,
                cost: Some(CostEstimate::constant(20.0, "s")),
            },
        )
        .unwrap();
    let s = engine
        .answer(&s, "item6.relaxable[c]", Answer::Relaxable(Ternary::No))
        .unwrap();
    assert_eq!(s.draft.constraints[0].code, None);
    let s = engine
        .answer(&s, "item6.quantifiable[c]", Answer::Quantifiable(Ternary::Yes))
        .unwrap();
    assert_eq!(s.draft.constraints[0].code, Some("QUSK".parse().unwrap()));
}

#[test]
fn variable_list_spawns_one_block_each() {
    let (engine, s) = fresh();
    let before = engine.progress(&s).pending;
    let s = engine
        .answer(&s, "item5", Answer::VariableBlock(vec!["x1".into(), "x2".into()]))
        .unwrap();
    let ids: Vec<String> = engine.instances(&s).into_iter().map(|v| v.id).collect();
    for x in ["x1", "x2"] {
        for bullet in ["domain", "default", "influence", "transform"] {
            assert!(ids.contains(&format!("item5.{bullet}[{x}]")));
        }
    }
    assert_eq!(engine.progress(&s).pending, before - 1 + 8);
}

#[test]
fn wrong_answer_kind_is_rejected() {
    let (engine, s) = fresh();
    let err = engine.answer(&s, "item2", Answer::Known(true)).unwrap_err();
    assert_eq!(
        err,
        ChecklistError::AnswerTypeMismatch {
            instance: "item2".into(),
            expected: "goal_kind",
            found: "known",
        }
    );
    assert!(matches!(
        engine.answer(&s, "item4.shape[f]", Answer::Shape(Shape::Linear)),
        Err(ChecklistError::UnknownInstance { .. })
    ));
}

#[test]
fn skipped_global_structure_stays_unknown() {
    let (engine, s) = fresh();
    let s = engine
        .answer(&s, "item4", Answer::ObjectiveBlock(vec!["f".into()]))
        .unwrap();
    let s = engine
        .answer(&s, "item4.shape[f]", Answer::Shape(Shape::Multimodal))
        .unwrap();
    let s = engine.skip(&s, "item4.global_structure[f]", "no data").unwrap();
    assert!(matches!(
        s.states["item4.global_structure[f]"],
        InstanceState::Skipped { .. }
    ));
    assert_eq!(s.draft.objectives[0].global_structure, GlobalStructure::Unknown);
}

#[test]
fn skip_errors() {
    let (engine, s) = fresh();
    assert_eq!(
        engine.skip(&s, "item8", "ran out of time").unwrap_err(),
        ChecklistError::RequiredItem {
            instance: "item8".into()
        }
    );
    assert_eq!(engine.skip(&s, "item3", "").unwrap_err(), ChecklistError::EmptyReason);
    assert_eq!(
        engine.skip(&s, "item3", "   ").unwrap_err(),
        ChecklistError::EmptyReason
    );
    assert!(matches!(
        engine.skip(&s, "item1", "x"),
        Err(ChecklistError::NotPending { .. })
    ));
}

#[test]
fn conflicts_item_becomes_required_with_two_objectives() {
    let (engine, s) = fresh();
    let s = engine.skip(&s, "item7", "single objective").unwrap();
    let s = engine
        .answer(&s, "item4", Answer::ObjectiveBlock(vec!["f".into(), "g".into()]))
        .unwrap();
    assert_eq!(s.states["item7"], InstanceState::Pending);
    assert!(matches!(
        engine.skip(&s, "item7", "later"),
        Err(ChecklistError::RequiredItem { .. })
    ));
}

#[test]
fn completed_session_finalizes_into_a_spec() {
    let (engine, s) = fresh();
    let s = complete(&engine, s, 0);
    let (done, spec) = engine.finalize(&s).unwrap();
    assert_eq!(done.stage, Stage::Design);
    assert!(!spec.objectives.is_empty());
    assert!(!spec.variables.is_empty());
    assert_eq!(engine.export(&done).unwrap(), spec);
    assert!(matches!(
        engine.answer(&done, "item3", Answer::Known(true)),
        Err(ChecklistError::NotEditable { .. })
    ));
}

#[test]
fn pending_budget_blocks_finalize() {
    let engine = fixed_engine();
    let mut s = engine.new_session(participants(), None).unwrap();
    while let Some(id) = next_id(&engine, &s) {
        if id == "item9" {
            // Answer everything except item 9.
            let after = engine.instances(&s).into_iter().find(|v| v.id == "item10").unwrap();
            let answer = answer_for(&s, &after, 0);
            s = engine.answer(&s, "item10", answer).unwrap();
            break;
        }
        let view = engine.instances(&s).into_iter().find(|v| v.id == id).unwrap();
        let answer = answer_for(&s, &view, 0);
        s = engine.answer(&s, &id, answer).unwrap();
    }
    assert_eq!(
        engine.finalize(&s).unwrap_err(),
        ChecklistError::IncompleteSession {
            pending: vec!["item9".into()]
        }
    );
}

#[test]
fn dangling_formulation_reference_is_spec_invalid() {
    let (engine, s) = fresh();
    let s = complete(&engine, s, 0);
    let s = engine
        .answer(
            &s,
            "item8",
            Answer::FormulationBlock(Formulation {
                selected_objectives: vec!["f".into()],
                selected_variables: vec!["nope".into()],
                selected_constraints: vec![],
                paradigm: Paradigm::SingleObjective,
            }),
        )
        .unwrap();
    match engine.finalize(&s).unwrap_err() {
        ChecklistError::SpecInvalid { findings } => {
            assert!(findings.iter().any(|f| f.code == "DANGLING_REF"), "{findings:?}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn reopen_starts_a_new_iteration_from_the_previous_spec() {
    let (engine, s) = fresh();
    let (done, spec) = engine.finalize(&complete(&engine, s, 0)).unwrap();
    assert!(matches!(
        engine.advance_stage(&done, Stage::Experimentation),
        Err(ChecklistError::InvalidStageTransition { .. })
    ));
    let impl_stage = engine.advance_stage(&done, Stage::Implementation).unwrap();
    let reopened = engine.advance_stage(&impl_stage, Stage::Planning).unwrap();
    assert_eq!(reopened.stage, Stage::Planning);
    assert_eq!(reopened.iteration, 2);
    assert_eq!(reopened.draft.to_spec().unwrap(), spec);
    assert_eq!(engine.export(&reopened).unwrap_err(), ChecklistError::NotFinalized);
    let s = engine
        .answer(
            &reopened,
            "item10",
            Answer::ResponsibilityList(vec![Responsibility {
                person: "A".into(),
                role: "runs experiments".into(),
            }]),
        )
        .unwrap();
    let (_, spec2) = engine.finalize(&s).unwrap();
    assert_eq!(spec2.responsibilities[0].person, "A");
}

#[test]
fn save_load_round_trip_mid_session() {
    let (engine, s) = fresh();
    let s = engine
        .answer(&s, "item2", Answer::GoalKind(GoalKind::FindBest))
        .unwrap();
    let s = engine
        .answer(&s, "item4", Answer::ObjectiveBlock(vec!["f".into()]))
        .unwrap();
    let s = engine.skip(&s, "item3", "nobody knows").unwrap();
    let bytes = engine.save_session(&s);
    assert_eq!(engine.load_session(&bytes).unwrap(), s);
    assert_eq!(engine.save_session(&engine.load_session(&bytes).unwrap()), bytes);
}

#[test]
fn truncated_session_is_a_parse_error() {
    let (engine, s) = fresh();
    let bytes = engine.save_session(&s);
    let err = engine.load_session(&bytes[..bytes.len() / 2]).unwrap_err();
    assert!(matches!(err, DocumentError::Parse { .. }), "{err:?}");
}

#[test]
fn other_template_version_is_a_version_error() {
    let (engine, s) = fresh();
    let mut bumped = s.clone();
    bumped.template_version += 1;
    let err = engine.load_session(&engine.save_session(&bumped)).unwrap_err();
    assert!(
        matches!(
            err,
            DocumentError::Version {
                field: "template_version",
                ..
            }
        ),
        "{err:?}"
    );
}

#[test]
fn session_ids_are_stable_for_fixed_inputs() {
    let a = fixed_engine().new_session(participants(), None).unwrap();
    let b = fixed_engine().new_session(participants(), None).unwrap();
    assert_eq!(a.id, b.id);
    let c = fixed_engine().new_session(participants(), Some("mine".into())).unwrap();
    assert_eq!(c.id, "mine");
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => any::<u8>().prop_map(Op::AnswerNext),
        1 => Just(Op::SkipNext),
        1 => (any::<u16>(), any::<u8>()).prop_map(|(i, c)| Op::Reanswer(i, c)),
        1 => (any::<u16>(), any::<u8>()).prop_map(|(i, c)| Op::JumpAnswer(i, c)),
        1 => any::<u16>().prop_map(Op::SkipAny),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_sessions_obey_the_finalize_rule(
        ops in prop::collection::vec(op(), 0..80),
        finish in any::<bool>(),
        finish_choice in any::<u8>(),
    ) {
        let engine = fixed_engine();
        if let Err(msg) = check_walk(&engine, &ops, finish, finish_choice) {
            prop_assert!(false, "{}", msg);
        }
    }
}

#[test]
fn completed_walks_mostly_finalize() {
    // Sanity check that the generator reaches the success branch.
    let engine = fixed_engine();
    let ok = (0..40u8)
        .filter(|c| {
            let s = complete(&engine, engine.new_session(participants(), None).unwrap(), *c);
            engine.finalize(&s).is_ok()
        })
        .count();
    assert!(ok >= 20, "only {ok} of 40 walks finalized");
}

#[test]
fn inverted_variable_bounds_are_rejected() {
    let (engine, s) = fresh();
    let s = engine
        .answer(&s, "item5", Answer::VariableBlock(vec!["x".into()]))
        .unwrap();
    let err = engine
        .answer(
            &s,
            "item5.domain[x]",
            Answer::VariableDomain {
                dtype: DataType::Real,
                lower: Some(2.0),
                upper: Some(1.0),
            },
        )
        .unwrap_err();
    assert!(matches!(err, ChecklistError::InvalidAnswer { .. }));
}
