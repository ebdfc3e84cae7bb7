use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::answer::{Answer, AnswerKind};
use super::session::{ChecklistSession, Draft, InstanceState, InstanceView, Progress, Stage};
use super::template::{ChecklistTemplate, SpawnWhen};
use super::ChecklistError;
use crate::canonical::{self, DocumentError, SCHEMA_VERSION};
use crate::problem_model::{
    finalization_findings, is_identifier, validate_spec, ConstraintSpec, CostEstimate, DecisionVariable, Objective,
    Participant, ProblemSpec, Severity, Shape, Ternary,
};
use crate::qrak;

/// Deepest objective decomposition accepted (top-level objective = 1).
const MAX_DEPTH: usize = 8;

const CONFLICTS_ITEM: &str = "item7";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum NextItem {
    Item(InstanceView),
    Done,
}

/// Position of an active instance in the template.
#[derive(Debug, Clone)]
struct Slot {
    id: String,
    item: usize,
    sub: Option<usize>,
    entity: Option<String>,
}

struct Layout {
    slots: Vec<Slot>,
    draft: Draft,
    conflicts_required: bool,
}

impl Layout {
    fn slot(&self, id: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.id == id)
    }
}

type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

/// Runs sessions against one template. Operations take a session and
/// return a new one; the input is never modified.
#[derive(Clone)]
pub struct Engine {
    template: ChecklistTemplate,
    clock: Clock,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("template_version", &self.template.version)
            .finish()
    }
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(ChecklistTemplate::default_template())
    }
}

fn instance_id(item: &str, sub: &str, entity: &str) -> String {
    format!("{item}.{sub}[{entity}]")
}

fn invalid(instance: &str, reason: impl Into<String>) -> ChecklistError {
    ChecklistError::InvalidAnswer {
        instance: instance.to_string(),
        reason: reason.into(),
    }
}

fn check_names(instance: &str, names: &[String]) -> Result<(), ChecklistError> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !is_identifier(name) {
            return Err(invalid(instance, format!("{name:?} is not a valid identifier")));
        }
        if !seen.insert(name) {
            return Err(invalid(instance, format!("{name:?} listed twice")));
        }
    }
    Ok(())
}

fn check_cost(instance: &str, cost: &CostEstimate) -> Result<(), ChecklistError> {
    match cost.problems() {
        Some(problem) => Err(invalid(instance, problem)),
        None => Ok(()),
    }
}

fn objective_paths(objectives: &[Objective], prefix: Option<&str>, out: &mut Vec<String>) {
    for o in objectives {
        let path = prefix.map_or_else(|| o.name.clone(), |p| format!("{p}.{}", o.name));
        out.push(path.clone());
        objective_paths(&o.parts, Some(&path), out);
    }
}

fn apply_objective(obj: &mut Objective, answer: &Answer) {
    match answer {
        Answer::Decomposition {
            additively_separable, ..
        } => obj.additively_separable = *additively_separable,
        Answer::Analytic {
            analytic_form,
            gradient_available,
        } => {
            obj.analytic_form = *analytic_form;
            obj.gradient_available = *gradient_available;
        }
        Answer::Shape(shape) => obj.shape = *shape,
        Answer::GlobalStructure(g) => obj.global_structure = *g,
        Answer::Deterministic(d) => obj.deterministic = *d,
        Answer::ObjectiveDomain {
            domain_vars,
            image_bounds,
        } => {
            obj.domain_vars = domain_vars.clone();
            obj.image_bounds = *image_bounds;
        }
        Answer::Cost(cost) => obj.cost = Some(cost.clone()),
        _ => {}
    }
}

fn apply_variable(var: &mut DecisionVariable, answer: &Answer) {
    match answer {
        Answer::VariableDomain { dtype, lower, upper } => {
            var.dtype = Some(*dtype);
            var.lower = *lower;
            var.upper = *upper;
        }
        Answer::DefaultValue(v) => var.default = v.clone(),
        Answer::Influence(map) => var.influence = map.clone(),
        Answer::Transform(t) => var.transform = t.clone(),
        _ => {}
    }
}

fn apply_constraint(c: &mut ConstraintSpec, answer: &Answer) {
    match answer {
        Answer::Known(known) => c.known = *known,
        Answer::APriori { a_priori, cost } => {
            c.a_priori = *a_priori;
            c.cost = cost.clone();
        }
        Answer::Relaxable(r) => c.relaxable = *r,
        Answer::Quantifiable(q) => c.quantifiable = *q,
        _ => {}
    }
}

impl Engine {
    pub fn new(template: ChecklistTemplate) -> Self {
        Engine {
            template,
            clock: Arc::new(Utc::now),
        }
    }

    pub fn with_clock(mut self, clock: impl Fn() -> DateTime<Utc> + Send + Sync + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    /// Every timestamp the engine writes will be `at`.
    pub fn with_fixed_time(self, at: DateTime<Utc>) -> Self {
        self.with_clock(move || at)
    }

    pub fn template(&self) -> &ChecklistTemplate {
        &self.template
    }

    fn now(&self) -> DateTime<Utc> {
        (self.clock)()
    }

    fn answered<'a>(states: &'a BTreeMap<String, InstanceState>, id: &str) -> Option<&'a Answer> {
        match states.get(id) {
            Some(InstanceState::Answered { answer }) => Some(answer),
            _ => None,
        }
    }

    fn settled(states: &BTreeMap<String, InstanceState>, id: &str) -> bool {
        matches!(
            states.get(id),
            Some(InstanceState::Answered { .. } | InstanceState::Skipped { .. })
        )
    }

    fn item_index(&self, id: &str) -> usize {
        self.template
            .items
            .iter()
            .position(|i| i.id == id)
            .expect("template structure is checked on load")
    }

    fn push_top(&self, slots: &mut Vec<Slot>, item: usize) {
        slots.push(Slot {
            id: self.template.items[item].id.clone(),
            item,
            sub: None,
            entity: None,
        });
    }

    fn objective_block(
        &self,
        states: &BTreeMap<String, InstanceState>,
        item: usize,
        path: &str,
        name: &str,
        slots: &mut Vec<Slot>,
    ) -> Objective {
        let template_item = &self.template.items[item];
        let mut obj = Objective::named(name);
        let mut parts: Vec<String> = Vec::new();
        for (sub_index, sub) in template_item.sub_items.iter().enumerate() {
            let id = instance_id(&template_item.id, &sub.id, path);
            let applies = match sub.when {
                SpawnWhen::Always => true,
                SpawnWhen::Leaf => parts.is_empty(),
                SpawnWhen::LeafMultimodal => {
                    let shape_id = instance_id(&template_item.id, "shape", path);
                    parts.is_empty()
                        && Self::settled(states, &shape_id)
                        && matches!(obj.shape, Shape::Multimodal | Shape::Unknown)
                }
                SpawnWhen::Known => true,
            };
            if !applies {
                continue;
            }
            slots.push(Slot {
                id: id.clone(),
                item,
                sub: Some(sub_index),
                entity: Some(path.to_string()),
            });
            if let Some(answer) = Self::answered(states, &id) {
                if let Answer::Decomposition { parts: p, .. } = answer {
                    parts = p.clone();
                }
                apply_objective(&mut obj, answer);
            }
        }
        for part in &parts {
            let child = format!("{path}.{part}");
            obj.parts.push(self.objective_block(states, item, &child, part, slots));
        }
        obj
    }

    /// Rebuilds the draft and the ordered list of active instances from the
    /// recorded states.
    fn layout(&self, states: &BTreeMap<String, InstanceState>) -> Layout {
        let mut slots = Vec::new();
        let mut draft = Draft::default();
        for (item_index, item) in self.template.items.iter().enumerate() {
            self.push_top(&mut slots, item_index);
            let Some(answer) = Self::answered(states, &item.id) else {
                continue;
            };
            match answer {
                Answer::ParticipantList(p) => draft.participants = p.clone(),
                Answer::GoalKind(g) => draft.goal = Some(*g),
                Answer::FreeText(b) => draft.background = b.clone(),
                Answer::ObjectiveBlock(names) => {
                    for name in names {
                        let obj = self.objective_block(states, item_index, name, name, &mut slots);
                        draft.objectives.push(obj);
                    }
                }
                Answer::VariableBlock(names) => {
                    for name in names {
                        let mut var = DecisionVariable::named(name.clone());
                        for (sub_index, sub) in item.sub_items.iter().enumerate() {
                            let id = instance_id(&item.id, &sub.id, name);
                            slots.push(Slot {
                                id: id.clone(),
                                item: item_index,
                                sub: Some(sub_index),
                                entity: Some(name.clone()),
                            });
                            if let Some(a) = Self::answered(states, &id) {
                                apply_variable(&mut var, a);
                            }
                        }
                        draft.variables.push(var);
                    }
                }
                Answer::ConstraintBlock(names) => {
                    for name in names {
                        draft
                            .constraints
                            .push(self.constraint_block(states, item_index, name, &mut slots));
                    }
                }
                Answer::PairList(pairs) => draft.conflicts = pairs.clone(),
                Answer::FormulationBlock(f) => draft.formulation = Some(f.clone()),
                Answer::CostBlock { cost_model, budget } => {
                    draft.cost_model = Some(cost_model.clone());
                    draft.budget = Some(budget.clone());
                }
                Answer::ResponsibilityList(r) => draft.responsibilities = r.clone(),
                _ => {}
            }
        }
        let selected = draft.formulation.as_ref().map_or(0, |f| f.selected_objectives.len());
        let conflicts_required = draft.objectives.len() > 1 || selected > 1;
        Layout {
            slots,
            draft,
            conflicts_required,
        }
    }

    fn constraint_block(
        &self,
        states: &BTreeMap<String, InstanceState>,
        item: usize,
        name: &str,
        slots: &mut Vec<Slot>,
    ) -> ConstraintSpec {
        let template_item = &self.template.items[item];
        let mut c = ConstraintSpec::named(name);
        let mut known_settled = false;
        for (sub_index, sub) in template_item.sub_items.iter().enumerate() {
            let id = instance_id(&template_item.id, &sub.id, name);
            let applies = match sub.when {
                SpawnWhen::Known => known_settled && c.known,
                _ => true,
            };
            if !applies {
                continue;
            }
            slots.push(Slot {
                id: id.clone(),
                item,
                sub: Some(sub_index),
                entity: Some(name.to_string()),
            });
            if sub.answer_kind == AnswerKind::Known {
                known_settled = Self::settled(states, &id);
            }
            if let Some(answer) = Self::answered(states, &id) {
                apply_constraint(&mut c, answer);
            }
        }
        if !c.known {
            c.a_priori = Ternary::No;
            c.relaxable = Ternary::No;
            c.quantifiable = Ternary::No;
            c.cost = None;
        }
        c.code = qrak::classify(c.known, c.a_priori, c.relaxable, c.quantifiable).ok();
        c
    }

    /// Brings `states` in line with the layout: new instances become
    /// pending, pending instances that no longer apply disappear, and a
    /// skipped conflicts item reverts to pending once it is required.
    fn reconcile(&self, mut states: BTreeMap<String, InstanceState>) -> (BTreeMap<String, InstanceState>, Layout) {
        let layout = self.layout(&states);
        let active: BTreeSet<&str> = layout.slots.iter().map(|s| s.id.as_str()).collect();
        states.retain(|id, st| active.contains(id.as_str()) || !matches!(st, InstanceState::Pending));
        for slot in &layout.slots {
            states.entry(slot.id.clone()).or_insert(InstanceState::Pending);
        }
        if layout.conflicts_required {
            if let Some(st @ InstanceState::Skipped { .. }) = states.get_mut(CONFLICTS_ITEM) {
                *st = InstanceState::Pending;
            }
        }
        (states, layout)
    }

    fn required(&self, layout: &Layout, slot: &Slot) -> bool {
        let item = &self.template.items[slot.item];
        slot.sub.is_none() && (item.required_for_finalize || (item.id == CONFLICTS_ITEM && layout.conflicts_required))
    }

    fn view(&self, session: &ChecklistSession, layout: &Layout, slot: &Slot) -> InstanceView {
        let item = &self.template.items[slot.item];
        let (sub_item_id, prompt, kind) = match slot.sub {
            Some(i) => {
                let sub = &item.sub_items[i];
                (Some(sub.id.clone()), sub.prompt.clone(), sub.answer_kind)
            }
            None => (None, item.prompt.clone(), item.answer_kind),
        };
        InstanceView {
            id: slot.id.clone(),
            item_id: item.id.clone(),
            sub_item_id,
            entity: slot.entity.clone(),
            title: item.title.clone(),
            prompt,
            answer_kind: kind,
            required: self.required(layout, slot),
            state: session.states.get(&slot.id).cloned().unwrap_or(InstanceState::Pending),
        }
    }

    /// Active instances in template order.
    pub fn instances(&self, session: &ChecklistSession) -> Vec<InstanceView> {
        let layout = self.layout(&session.states);
        layout.slots.iter().map(|s| self.view(session, &layout, s)).collect()
    }

    pub fn progress(&self, session: &ChecklistSession) -> Progress {
        let mut p = Progress {
            answered: 0,
            skipped: 0,
            pending: 0,
            total: 0,
        };
        for view in self.instances(session) {
            p.total += 1;
            match view.state {
                InstanceState::Pending => p.pending += 1,
                InstanceState::Answered { .. } => p.answered += 1,
                InstanceState::Skipped { .. } => p.skipped += 1,
            }
        }
        p
    }

    fn session_id(created_at: DateTime<Utc>, participants: &[Participant]) -> String {
        let mut hasher = Sha256::new();
        hasher.update(created_at.to_rfc3339_opts(SecondsFormat::AutoSi, true));
        for p in participants {
            hasher.update(b"\n");
            hasher.update(&p.name);
            hasher.update(b":");
            hasher.update(&p.role);
        }
        hex::encode(&hasher.finalize()[..8])
    }

    fn check_participants(instance: &str, participants: &[Participant]) -> Result<(), ChecklistError> {
        if participants.is_empty() {
            return Err(ChecklistError::EmptyParticipants);
        }
        if participants.iter().any(|p| p.name.trim().is_empty()) {
            return Err(invalid(instance, "participant names must not be empty"));
        }
        Ok(())
    }

    /// Starts a session with item 1 answered from `participants`. Without an
    /// explicit id one is derived from the creation time and participants.
    pub fn new_session(
        &self,
        participants: Vec<Participant>,
        id: Option<String>,
    ) -> Result<ChecklistSession, ChecklistError> {
        let first = &self.template.items[0];
        Self::check_participants(&first.id, &participants)?;
        let now = self.now();
        let id = id.unwrap_or_else(|| Self::session_id(now, &participants));
        let mut states = BTreeMap::new();
        states.insert(
            first.id.clone(),
            InstanceState::Answered {
                answer: Answer::ParticipantList(participants),
            },
        );
        let (states, layout) = self.reconcile(states);
        Ok(ChecklistSession {
            schema_version: SCHEMA_VERSION,
            id,
            template_version: self.template.version,
            revision: 1,
            stage: Stage::Planning,
            iteration: 1,
            created_at: now,
            updated_at: now,
            states,
            draft: layout.draft,
            finalized: None,
        })
    }

    /// First pending instance in template order, or the pending instance
    /// named by `jump`.
    pub fn next_item(&self, session: &ChecklistSession, jump: Option<&str>) -> Result<NextItem, ChecklistError> {
        let layout = self.layout(&session.states);
        let pending = |s: &&Slot| matches!(session.states.get(&s.id), None | Some(InstanceState::Pending));
        match jump {
            Some(id) => {
                let slot = layout.slot(id).ok_or_else(|| ChecklistError::UnknownInstance {
                    instance: id.to_string(),
                })?;
                if !pending(&slot) {
                    return Err(ChecklistError::NotPending {
                        instance: id.to_string(),
                    });
                }
                Ok(NextItem::Item(self.view(session, &layout, slot)))
            }
            None => Ok(layout
                .slots
                .iter()
                .find(pending)
                .map_or(NextItem::Done, |s| NextItem::Item(self.view(session, &layout, s)))),
        }
    }

    fn editable(session: &ChecklistSession) -> Result<(), ChecklistError> {
        if session.stage != Stage::Planning {
            return Err(ChecklistError::NotEditable { stage: session.stage });
        }
        Ok(())
    }

    fn commit(&self, session: &ChecklistSession, states: BTreeMap<String, InstanceState>) -> ChecklistSession {
        let (states, layout) = self.reconcile(states);
        ChecklistSession {
            revision: session.revision + 1,
            updated_at: self.now(),
            states,
            draft: layout.draft,
            ..session.clone()
        }
    }

    fn validate_answer(&self, session: &ChecklistSession, slot: &Slot, answer: &Answer) -> Result<(), ChecklistError> {
        let id = slot.id.as_str();
        match answer {
            Answer::ParticipantList(p) => Self::check_participants(id, p)?,
            Answer::ObjectiveBlock(names) | Answer::VariableBlock(names) | Answer::ConstraintBlock(names) => {
                check_names(id, names)?
            }
            Answer::Decomposition { parts, .. } => {
                check_names(id, parts)?;
                let depth = slot.entity.as_deref().map_or(0, |p| p.split('.').count());
                if !parts.is_empty() && depth >= MAX_DEPTH {
                    return Err(invalid(id, format!("decompositions nest at most {MAX_DEPTH} levels")));
                }
            }
            Answer::PairList(pairs) => {
                if let Some((a, _)) = pairs.iter().find(|(a, b)| a == b) {
                    return Err(invalid(id, format!("{a:?} cannot conflict with itself")));
                }
            }
            Answer::CostBlock { budget, .. } => check_cost(id, budget)?,
            Answer::Cost(cost) => check_cost(id, cost)?,
            Answer::APriori { cost: Some(cost), .. } => check_cost(id, cost)?,
            Answer::VariableDomain { lower, upper, .. } => {
                if lower.is_some_and(|v| !v.is_finite()) || upper.is_some_and(|v| !v.is_finite()) {
                    return Err(invalid(id, "bounds must be finite"));
                }
                if let (Some(l), Some(u)) = (lower, upper) {
                    if l >= u {
                        return Err(invalid(id, format!("lower bound {l} must be below upper bound {u}")));
                    }
                }
            }
            Answer::ObjectiveDomain {
                image_bounds: Some(b), ..
            } => {
                if !(b.lower <= b.upper) {
                    return Err(invalid(id, "image lower bound exceeds upper bound"));
                }
            }
            Answer::Influence(map) => {
                let mut paths = Vec::new();
                objective_paths(&session.draft.objectives, None, &mut paths);
                if let Some(unknown) = map.keys().find(|k| !paths.contains(k)) {
                    return Err(invalid(id, format!("{unknown:?} is not a declared objective")));
                }
            }
            Answer::ResponsibilityList(list) if list.iter().any(|r| r.person.trim().is_empty()) => {
                return Err(invalid(id, "each responsibility needs a person"))
            }
            Answer::Known(false) => {
                let item = &self.template.items[slot.item];
                let name = slot.entity.as_deref().unwrap_or_default();
                for sub in &item.sub_items {
                    if sub.when != SpawnWhen::Known {
                        continue;
                    }
                    let flag_id = instance_id(&item.id, &sub.id, name);
                    let yes = match Self::answered(&session.states, &flag_id) {
                        Some(Answer::APriori { a_priori, .. }) => *a_priori == Ternary::Yes,
                        Some(Answer::Relaxable(t) | Answer::Quantifiable(t)) => *t == Ternary::Yes,
                        _ => false,
                    };
                    if yes {
                        return Err(ChecklistError::QrakInconsistent {
                            constraint: name.to_string(),
                            reason: format!(
                                "a hidden constraint is always NUSH, but {} was answered yes; change that answer first",
                                sub.id
                            ),
                        });
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Records (or replaces) the answer of an active instance.
    pub fn answer(
        &self,
        session: &ChecklistSession,
        instance: &str,
        answer: Answer,
    ) -> Result<ChecklistSession, ChecklistError> {
        Self::editable(session)?;
        let layout = self.layout(&session.states);
        let slot = layout.slot(instance).ok_or_else(|| ChecklistError::UnknownInstance {
            instance: instance.to_string(),
        })?;
        let view = self.view(session, &layout, slot);
        if view.answer_kind != answer.kind() {
            return Err(ChecklistError::AnswerTypeMismatch {
                instance: instance.to_string(),
                expected: view.answer_kind.as_str(),
                found: answer.kind().as_str(),
            });
        }
        self.validate_answer(session, slot, &answer)?;
        let mut states = session.states.clone();
        states.insert(instance.to_string(), InstanceState::Answered { answer });
        Ok(self.commit(session, states))
    }

    /// Marks a pending instance as skipped; the fields it would have filled
    /// stay unknown.
    pub fn skip(
        &self,
        session: &ChecklistSession,
        instance: &str,
        reason: &str,
    ) -> Result<ChecklistSession, ChecklistError> {
        Self::editable(session)?;
        let layout = self.layout(&session.states);
        let slot = layout.slot(instance).ok_or_else(|| ChecklistError::UnknownInstance {
            instance: instance.to_string(),
        })?;
        if self.required(&layout, slot) {
            return Err(ChecklistError::RequiredItem {
                instance: instance.to_string(),
            });
        }
        if !matches!(session.states.get(instance), None | Some(InstanceState::Pending)) {
            return Err(ChecklistError::NotPending {
                instance: instance.to_string(),
            });
        }
        if reason.trim().is_empty() {
            return Err(ChecklistError::EmptyReason);
        }
        let mut states = session.states.clone();
        states.insert(
            instance.to_string(),
            InstanceState::Skipped {
                reason: reason.to_string(),
            },
        );
        Ok(self.commit(session, states))
    }

    /// Turns a complete session into a specification and moves it to the
    /// design stage.
    pub fn finalize(&self, session: &ChecklistSession) -> Result<(ChecklistSession, ProblemSpec), ChecklistError> {
        Self::editable(session)?;
        let layout = self.layout(&session.states);
        let pending: Vec<String> = layout
            .slots
            .iter()
            .filter(|s| {
                !matches!(
                    session.states.get(&s.id),
                    Some(InstanceState::Answered { .. } | InstanceState::Skipped { .. })
                ) || (self.required(&layout, s)
                    && !matches!(session.states.get(&s.id), Some(InstanceState::Answered { .. })))
            })
            .map(|s| s.id.clone())
            .collect();
        if !pending.is_empty() {
            return Err(ChecklistError::IncompleteSession { pending });
        }
        let spec = layout
            .draft
            .to_spec()
            .ok_or_else(|| ChecklistError::IncompleteSession {
                pending: vec!["item2".into(), "item9".into()],
            })?;
        let mut findings = validate_spec(&spec);
        findings.extend(finalization_findings(&spec));
        findings.retain(|f| f.severity == Severity::Error);
        if !findings.is_empty() {
            return Err(ChecklistError::SpecInvalid { findings });
        }
        let next = ChecklistSession {
            revision: session.revision + 1,
            updated_at: self.now(),
            stage: Stage::Design,
            finalized: Some(spec.clone()),
            ..session.clone()
        };
        Ok((next, spec))
    }

    pub fn export(&self, session: &ChecklistSession) -> Result<ProblemSpec, ChecklistError> {
        session.finalized.clone().ok_or(ChecklistError::NotFinalized)
    }

    /// Starts a new planning iteration. The answers are kept, so the draft
    /// begins as a copy of the last finalized specification.
    pub fn reopen(&self, session: &ChecklistSession) -> Result<ChecklistSession, ChecklistError> {
        if session.stage == Stage::Planning {
            return Err(ChecklistError::InvalidStageTransition {
                from: Stage::Planning,
                to: Stage::Planning,
            });
        }
        Ok(ChecklistSession {
            revision: session.revision + 1,
            updated_at: self.now(),
            stage: Stage::Planning,
            iteration: session.iteration + 1,
            finalized: None,
            ..session.clone()
        })
    }

    /// Moves one stage forward, or back to planning. Leaving planning
    /// requires [`Engine::finalize`].
    pub fn advance_stage(&self, session: &ChecklistSession, to: Stage) -> Result<ChecklistSession, ChecklistError> {
        if to == Stage::Planning {
            return self.reopen(session);
        }
        let order = [
            Stage::Planning,
            Stage::Design,
            Stage::Implementation,
            Stage::Experimentation,
            Stage::Application,
        ];
        let from = order.iter().position(|s| *s == session.stage).unwrap_or(0);
        let target = order.iter().position(|s| *s == to).unwrap_or(0);
        if session.stage == Stage::Planning || target != from + 1 {
            return Err(ChecklistError::InvalidStageTransition {
                from: session.stage,
                to,
            });
        }
        Ok(ChecklistSession {
            revision: session.revision + 1,
            updated_at: self.now(),
            stage: to,
            ..session.clone()
        })
    }

    pub fn save_session(&self, session: &ChecklistSession) -> Vec<u8> {
        canonical::to_bytes(session)
    }

    pub fn load_session(&self, bytes: &[u8]) -> Result<ChecklistSession, DocumentError> {
        let mut session: ChecklistSession = canonical::from_versioned_bytes(bytes)?;
        if session.template_version != self.template.version {
            return Err(DocumentError::Version {
                field: "template_version",
                found: session.template_version as i64,
                supported: self.template.version,
            });
        }
        let (states, layout) = self.reconcile(session.states);
        session.states = states;
        session.draft = layout.draft;
        Ok(session)
    }

    /// Index of a top-level item by id; exposed for clients that group
    /// instances by item.
    pub fn item_position(&self, id: &str) -> usize {
        self.item_index(id)
    }
}
