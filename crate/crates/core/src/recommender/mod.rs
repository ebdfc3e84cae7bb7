//! Rule-based recommendation of algorithm families.
//!
//! Rules live in `data/recommender_rules.json`: a list of objects with
//! `rule_id`, `predicate` (see [`predicate`] for the grammar), `family`,
//! `rank_weight`, `rationale` and `citation`. A rule whose `family` is
//! `null` is an annotation: it never ranks a family but, when it fires, is
//! appended to the trace of every recommendation.
//!
//! Each family scores the sum of the weights of its fired rules. Families
//! are ranked by score, and ties are broken by the order in
//! `data/family_priority.json`.
//!
//! Families are deliberately coarse. Typical members: `restart_funnel`
//! covers basin hopping, iterated local search and IPOP-CMA-ES;
//! `direct_search_local` covers Nelder-Mead and pattern search;
//! `model_based_surrogate` covers efficient global optimization and other
//! Kriging or RBF methods.

mod features;
pub mod predicate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem_model::ProblemSpec;
pub use features::{extract, FeatureDef, FeatureKind, FeatureValue, Features, Scope, FEATURES};
pub use predicate::{Expr, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    AnalyticSolution,
    GradientBased,
    QuasiNewton,
    LinearProgramming,
    QuadraticProgramming,
    DirectSearchLocal,
    RestartFunnel,
    GlobalMultistart,
    ModelBasedSurrogate,
    NoiseTolerant,
    MultiObjective,
    Scalarization,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::AnalyticSolution,
        Family::GradientBased,
        Family::QuasiNewton,
        Family::LinearProgramming,
        Family::QuadraticProgramming,
        Family::DirectSearchLocal,
        Family::RestartFunnel,
        Family::GlobalMultistart,
        Family::ModelBasedSurrogate,
        Family::NoiseTolerant,
        Family::MultiObjective,
        Family::Scalarization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::AnalyticSolution => "analytic_solution",
            Family::GradientBased => "gradient_based",
            Family::QuasiNewton => "quasi_newton",
            Family::LinearProgramming => "linear_programming",
            Family::QuadraticProgramming => "quadratic_programming",
            Family::DirectSearchLocal => "direct_search_local",
            Family::RestartFunnel => "restart_funnel",
            Family::GlobalMultistart => "global_multistart",
            Family::ModelBasedSurrogate => "model_based_surrogate",
            Family::NoiseTolerant => "noise_tolerant",
            Family::MultiObjective => "multi_objective",
            Family::Scalarization => "scalarization",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFire {
    pub rule_id: String,
    pub matched_features: Vec<String>,
    pub rationale: String,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recommendation {
    family: Family,
    rank: u32,
    score: f64,
    trace: Vec<RuleFire>,
}

impl Recommendation {
    pub fn new(family: Family, rank: u32, score: f64, trace: Vec<RuleFire>) -> Result<Self, RecommendError> {
        if trace.is_empty() {
            return Err(RecommendError::EmptyTrace);
        }
        if rank == 0 {
            return Err(RecommendError::InvalidRank);
        }
        Ok(Recommendation {
            family,
            rank,
            score,
            trace,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn trace(&self) -> &[RuleFire] {
        &self.trace
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecommendError {
    #[error("the specification has no formulation yet; finalize it first")]
    Unfinalized,
    #[error("a recommendation needs a non-empty rule trace")]
    EmptyTrace,
    #[error("ranks start at 1")]
    InvalidRank,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleTableError {
    #[error("rule table is not valid JSON: {0}")]
    Parse(String),
    #[error("rule {rule_id:?}: predicate {message}")]
    Predicate { rule_id: String, message: String },
    #[error("rule id {0:?} used more than once")]
    DuplicateRule(String),
    #[error("rule {0:?} has a negative or non-finite weight")]
    InvalidWeight(String),
    #[error("family priority list must name every family exactly once")]
    InvalidPriority,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    rule_id: String,
    predicate: String,
    family: Option<Family>,
    rank_weight: f64,
    rationale: String,
    citation: String,
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub rule_id: String,
    pub source: String,
    pub predicate: Expr,
    pub family: Option<Family>,
    pub rank_weight: f64,
    pub rationale: String,
    pub citation: String,
}

#[derive(Debug, Clone)]
pub struct RuleTable {
    rules: Vec<Rule>,
    priority: Vec<Family>,
}

const DEFAULT_RULES: &str = include_str!("../../data/recommender_rules.json");
const DEFAULT_PRIORITY: &str = include_str!("../../data/family_priority.json");

impl RuleTable {
    pub fn from_json(rules: &str, priority: &str) -> Result<Self, RuleTableError> {
        let raw: Vec<RawRule> = serde_json::from_str(rules).map_err(|e| RuleTableError::Parse(e.to_string()))?;
        let priority: Vec<Family> = serde_json::from_str(priority).map_err(|e| RuleTableError::Parse(e.to_string()))?;
        let distinct: BTreeSet<Family> = priority.iter().copied().collect();
        if priority.len() != Family::ALL.len() || distinct.len() != Family::ALL.len() {
            return Err(RuleTableError::InvalidPriority);
        }
        let mut seen = BTreeSet::new();
        let mut rules = Vec::with_capacity(raw.len());
        for r in raw {
            if !seen.insert(r.rule_id.clone()) {
                return Err(RuleTableError::DuplicateRule(r.rule_id));
            }
            if !r.rank_weight.is_finite() || r.rank_weight < 0.0 {
                return Err(RuleTableError::InvalidWeight(r.rule_id));
            }
            let predicate = predicate::parse(&r.predicate).map_err(|e| RuleTableError::Predicate {
                rule_id: r.rule_id.clone(),
                message: e.to_string(),
            })?;
            rules.push(Rule {
                rule_id: r.rule_id,
                source: r.predicate,
                predicate,
                family: r.family,
                rank_weight: r.rank_weight,
                rationale: r.rationale,
                citation: r.citation,
            });
        }
        Ok(RuleTable { rules, priority })
    }

    /// The shipped table, parsed once.
    pub fn shipped() -> &'static RuleTable {
        static TABLE: OnceLock<RuleTable> = OnceLock::new();
        TABLE
            .get_or_init(|| RuleTable::from_json(DEFAULT_RULES, DEFAULT_PRIORITY).expect("shipped rule table is valid"))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn priority(&self) -> &[Family] {
        &self.priority
    }

    /// Ids of the rules that fire on `spec`, in table order.
    pub fn fired(&self, spec: &ProblemSpec) -> Result<Vec<String>, RecommendError> {
        let features = extract(spec).ok_or(RecommendError::Unfinalized)?;
        Ok(self
            .fire(&features)
            .into_iter()
            .map(|(r, _)| r.rule_id.clone())
            .collect())
    }

    fn fire(&self, features: &Features) -> Vec<(&Rule, Vec<String>)> {
        self.rules
            .iter()
            .filter_map(|rule| {
                let mut matched = Vec::new();
                predicate::evaluate(&rule.predicate, features, &mut matched).then_some((rule, matched))
            })
            .collect()
    }

    pub fn recommend(&self, spec: &ProblemSpec) -> Result<Vec<Recommendation>, RecommendError> {
        let features = extract(spec).ok_or(RecommendError::Unfinalized)?;
        let fired = self.fire(&features);
        let to_fire = |rule: &Rule, matched: &[String]| RuleFire {
            rule_id: rule.rule_id.clone(),
            matched_features: matched.to_vec(),
            rationale: rule.rationale.clone(),
            citation: rule.citation.clone(),
        };
        let mut by_family: BTreeMap<Family, (f64, Vec<RuleFire>)> = BTreeMap::new();
        let mut annotations = Vec::new();
        for (rule, matched) in &fired {
            match rule.family {
                Some(family) => {
                    let entry = by_family.entry(family).or_insert((0.0, Vec::new()));
                    entry.0 += rule.rank_weight;
                    entry.1.push(to_fire(rule, matched));
                }
                None => annotations.push(to_fire(rule, matched)),
            }
        }
        let priority = |f: Family| self.priority.iter().position(|p| *p == f).unwrap_or(usize::MAX);
        let mut ranked: Vec<(Family, f64, Vec<RuleFire>)> =
            by_family.into_iter().map(|(f, (s, t))| (f, s, t)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(priority(a.0).cmp(&priority(b.0))));
        ranked
            .into_iter()
            .enumerate()
            .map(|(i, (family, score, mut trace))| {
                trace.extend(annotations.iter().cloned());
                Recommendation::new(family, i as u32 + 1, score, trace)
            })
            .collect()
    }
}

/// Ranks algorithm families for a finalized spec with the shipped table.
pub fn recommend(spec: &ProblemSpec) -> Result<Vec<Recommendation>, RecommendError> {
    RuleTable::shipped().recommend(spec)
}

/// Human-readable rationale for one recommendation.
pub fn explain(rec: &Recommendation) -> String {
    let mut out = format!("{} (rank {}, score {}):\n", rec.family.as_str(), rec.rank, rec.score);
    for fire in &rec.trace {
        let _ = write!(out, "- [{}] {}", fire.rule_id, fire.rationale);
        if !fire.matched_features.is_empty() {
            let _ = write!(out, "; matched {}", fire.matched_features.join(", "));
        }
        let _ = writeln!(out, ". See {}.", fire.citation);
    }
    out
}

/// Markdown table with one row per recommendation and the trace in the
/// last column.
pub fn render_markdown(recs: &[Recommendation]) -> String {
    let mut out = String::from("| rank | family | score | trace |\n|---|---|---|---|\n");
    for rec in recs {
        let trace: Vec<String> = rec
            .trace
            .iter()
            .map(|f| {
                let matched = if f.matched_features.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", f.matched_features.join(", "))
                };
                format!("{}{} [{}]", f.rule_id, matched, f.citation)
            })
            .collect();
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            rec.rank,
            rec.family.as_str(),
            rec.score,
            trace.join("<br>").replace('|', "\\|")
        );
    }
    out
}
