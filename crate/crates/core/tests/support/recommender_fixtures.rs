//! Named fixture specs covering every rule in the shipped recommender table.
//! Shared with the acceptance suite through `#[path]`.

use greybox_core::problem_model::{
    Background, ConstraintSpec, CostEstimate, DataType, DecisionVariable, Formulation, GlobalStructure, GoalKind,
    Objective, Paradigm, Participant, ProblemSpec, Responsibility, Shape, Ternary,
};

pub fn objective(
    name: &str,
    analytic: Ternary,
    gradient: Ternary,
    shape: Shape,
    structure: GlobalStructure,
) -> Objective {
    let mut f = Objective::named(name);
    f.analytic_form = analytic;
    f.gradient_available = gradient;
    f.shape = shape;
    f.global_structure = structure;
    f.deterministic = Ternary::Yes;
    f.domain_vars = vec!["x".into(), "y".into()];
    f.cost = Some(CostEstimate::constant(0.001, "s"));
    f
}

pub fn base(objectives: Vec<Objective>) -> ProblemSpec {
    let selected = objectives.iter().map(|o| o.name.clone()).collect();
    ProblemSpec {
        schema_version: 1,
        goal: GoalKind::FindBest,
        background: Background::default(),
        objectives,
        variables: vec![
            DecisionVariable::real("x", -5.0, 5.0),
            DecisionVariable::real("y", -5.0, 5.0),
        ],
        constraints: vec![],
        conflicts: vec![],
        formulation: Some(Formulation {
            selected_objectives: selected,
            selected_variables: vec!["x".into(), "y".into()],
            selected_constraints: vec![],
            paradigm: Paradigm::SingleObjective,
        }),
        cost_model: "wall-clock seconds".into(),
        budget: CostEstimate::constant(3600.0, "s"),
        responsibilities: vec![Responsibility {
            person: "A".into(),
            role: "runs the evaluations".into(),
        }],
        participants: vec![Participant::new("A", "client"), Participant::new("B", "optimizer")],
    }
}

fn single(analytic: Ternary, gradient: Ternary, shape: Shape, structure: GlobalStructure) -> ProblemSpec {
    base(vec![objective("f", analytic, gradient, shape, structure)])
}

fn with_constraint(mut spec: ProblemSpec, c: ConstraintSpec) -> ProblemSpec {
    spec.formulation
        .as_mut()
        .unwrap()
        .selected_constraints
        .push(c.name.clone());
    spec.constraints.push(c);
    spec
}

fn two_conflicting(goal: GoalKind) -> ProblemSpec {
    use GlobalStructure as G;
    use Ternary::*;
    let mut spec = base(vec![
        objective("f", No, No, Shape::Unknown, G::Unknown),
        objective("g", No, No, Shape::Unknown, G::Unknown),
    ]);
    spec.goal = goal;
    spec.conflicts = vec![("f".into(), "g".into())];
    spec.formulation.as_mut().unwrap().paradigm = Paradigm::MultiObjective;
    spec
}

pub fn fixtures() -> Vec<(&'static str, ProblemSpec)> {
    use GlobalStructure as G;
    use Ternary::*;
    let budget_constraint = ConstraintSpec::classified("budget", true, Yes, No, Yes).unwrap();
    let sim_constraint = ConstraintSpec::classified("stress", true, No, Yes, Yes).unwrap();
    let hidden = ConstraintSpec::classified("crash", false, No, No, No).unwrap();
    let mut noisy = single(No, No, Shape::Unknown, G::Unknown);
    noisy.objectives[0].deterministic = No;
    let mut expensive = single(No, No, Shape::Multimodal, G::Unknown);
    expensive.objectives[0].cost = Some(CostEstimate::range(30.0, 90.0, "s"));
    let mut integer = single(No, No, Shape::Unknown, G::Unknown);
    integer.variables[1].dtype = Some(DataType::Integer);
    integer.variables[1].lower = Some(0.0);
    integer.variables[1].upper = Some(10.0);
    vec![
        (
            "linear",
            with_constraint(single(Yes, Yes, Shape::Linear, G::None), budget_constraint.clone()),
        ),
        (
            "quadratic_constrained",
            with_constraint(single(Yes, No, Shape::Quadratic, G::None), budget_constraint),
        ),
        ("quadratic_unconstrained", single(Yes, Yes, Shape::Quadratic, G::None)),
        ("convex_gradient", single(Yes, Yes, Shape::Convex, G::None)),
        ("multimodal_funnel", single(No, No, Shape::Multimodal, G::Funnel)),
        ("multimodal_none", single(No, No, Shape::Multimodal, G::None)),
        ("multimodal_symmetric", single(No, No, Shape::Multimodal, G::Symmetric)),
        ("unknown_shape", single(Unknown, Unknown, Shape::Unknown, G::Unknown)),
        ("noisy", noisy),
        ("expensive", expensive),
        ("pareto_front", two_conflicting(GoalKind::ApproximateParetoFront)),
        ("conflicting_best", two_conflicting(GoalKind::FindBest)),
        (
            "simulation_constraints",
            with_constraint(
                with_constraint(single(No, No, Shape::Unknown, G::Unknown), sim_constraint),
                hidden,
            ),
        ),
        ("integer_variable", integer),
    ]
}
