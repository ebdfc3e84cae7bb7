//! QRAK constraint classification.
//!
//! Every side constraint gets a four-letter code: quantifiable (Q) or not
//! (N), relaxable (R) or unrelaxable (U), a-priori (A) or simulation-based
//! (S), known (K) or hidden (H). A hidden constraint can only be `NUSH`, so
//! there are nine valid codes in total.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem_model::Ternary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifiability {
    Quantifiable,
    Nonquantifiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relaxability {
    Relaxable,
    Unrelaxable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Evaluation {
    APriori,
    SimulationBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Knowledge {
    Known,
    Hidden,
}

impl Quantifiability {
    fn letter(self) -> char {
        match self {
            Self::Quantifiable => 'Q',
            Self::Nonquantifiable => 'N',
        }
    }
}

impl Relaxability {
    fn letter(self) -> char {
        match self {
            Self::Relaxable => 'R',
            Self::Unrelaxable => 'U',
        }
    }
}

impl Evaluation {
    fn letter(self) -> char {
        match self {
            Self::APriori => 'A',
            Self::SimulationBased => 'S',
        }
    }
}

impl Knowledge {
    fn letter(self) -> char {
        match self {
            Self::Known => 'K',
            Self::Hidden => 'H',
        }
    }
}

/// A validated four-letter constraint code.
///
/// Serialized as its rendered string, e.g. `"QRAK"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct QrakCode {
    q: Quantifiability,
    r: Relaxability,
    a: Evaluation,
    k: Knowledge,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QrakError {
    #[error("hidden constraints are always NUSH; {0} cannot be yes for a hidden constraint")]
    InconsistentFlags(&'static str),
    #[error("known constraint cannot be classified while {0} is unknown")]
    Unclassifiable(&'static str),
    #[error("invalid QRAK code {0:?}")]
    InvalidCode(String),
}

impl QrakCode {
    pub const NUSH: QrakCode = QrakCode {
        q: Quantifiability::Nonquantifiable,
        r: Relaxability::Unrelaxable,
        a: Evaluation::SimulationBased,
        k: Knowledge::Hidden,
    };

    /// Builds a code, rejecting hidden codes other than `NUSH`.
    pub fn new(q: Quantifiability, r: Relaxability, a: Evaluation, k: Knowledge) -> Result<Self, QrakError> {
        let code = QrakCode { q, r, a, k };
        if k == Knowledge::Hidden && code != Self::NUSH {
            return Err(QrakError::InvalidCode(code.render()));
        }
        Ok(code)
    }

    pub fn quantifiability(&self) -> Quantifiability {
        self.q
    }

    pub fn relaxability(&self) -> Relaxability {
        self.r
    }

    pub fn evaluation(&self) -> Evaluation {
        self.a
    }

    pub fn knowledge(&self) -> Knowledge {
        self.k
    }

    pub fn is_hidden(&self) -> bool {
        self.k == Knowledge::Hidden
    }

    /// The four letters in the order q, r, a, k.
    pub fn render(&self) -> String {
        [self.q.letter(), self.r.letter(), self.a.letter(), self.k.letter()]
            .iter()
            .collect()
    }
}

impl fmt::Display for QrakCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for QrakCode {
    type Err = QrakError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QrakError::InvalidCode(s.to_string());
        let letters: Vec<char> = s.chars().collect();
        if letters.len() != 4 {
            return Err(bad());
        }
        let q = match letters[0] {
            'Q' => Quantifiability::Quantifiable,
            'N' => Quantifiability::Nonquantifiable,
            _ => return Err(bad()),
        };
        let r = match letters[1] {
            'R' => Relaxability::Relaxable,
            'U' => Relaxability::Unrelaxable,
            _ => return Err(bad()),
        };
        let a = match letters[2] {
            'A' => Evaluation::APriori,
            'S' => Evaluation::SimulationBased,
            _ => return Err(bad()),
        };
        let k = match letters[3] {
            'K' => Knowledge::Known,
            'H' => Knowledge::Hidden,
            _ => return Err(bad()),
        };
        QrakCode::new(q, r, a, k).map_err(|_| bad())
    }
}

impl TryFrom<String> for QrakCode {
    type Error = QrakError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<QrakCode> for String {
    fn from(code: QrakCode) -> Self {
        code.render()
    }
}

impl PartialOrd for QrakCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QrakCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.render().cmp(&other.render())
    }
}

fn known_flag(value: Ternary, name: &'static str) -> Result<bool, QrakError> {
    match value {
        Ternary::Yes => Ok(true),
        Ternary::No => Ok(false),
        Ternary::Unknown => Err(QrakError::Unclassifiable(name)),
    }
}

/// Derives the code from the four checklist answers.
///
/// A hidden constraint (`known == false`) is always `NUSH`; answering
/// `yes` to any of the other questions for it is an inconsistency.
pub fn classify(
    known: bool,
    a_priori: Ternary,
    relaxable: Ternary,
    quantifiable: Ternary,
) -> Result<QrakCode, QrakError> {
    if !known {
        for (value, name) in [
            (a_priori, "a_priori"),
            (relaxable, "relaxable"),
            (quantifiable, "quantifiable"),
        ] {
            if value == Ternary::Yes {
                return Err(QrakError::InconsistentFlags(name));
            }
        }
        return Ok(QrakCode::NUSH);
    }
    let q = if known_flag(quantifiable, "quantifiable")? {
        Quantifiability::Quantifiable
    } else {
        Quantifiability::Nonquantifiable
    };
    let r = if known_flag(relaxable, "relaxable")? {
        Relaxability::Relaxable
    } else {
        Relaxability::Unrelaxable
    };
    let a = if known_flag(a_priori, "a_priori")? {
        Evaluation::APriori
    } else {
        Evaluation::SimulationBased
    };
    QrakCode::new(q, r, a, Knowledge::Known)
}

/// The eight codes available to known constraints, sorted by rendered string.
pub fn enumerate_known_classes() -> Vec<QrakCode> {
    let mut out = Vec::with_capacity(8);
    for q in [Quantifiability::Quantifiable, Quantifiability::Nonquantifiable] {
        for r in [Relaxability::Relaxable, Relaxability::Unrelaxable] {
            for a in [Evaluation::APriori, Evaluation::SimulationBased] {
                out.push(QrakCode {
                    q,
                    r,
                    a,
                    k: Knowledge::Known,
                });
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HintCategory {
    APrioriStandard,
    SimulationExpensive,
    Unrelaxable,
    PenaltyHandling,
    FaultySoftware,
}

/// Advisory treatment text for one code.
///
/// `category` is the primary class (hidden, simulation-based or a-priori);
/// `notes` carries the secondary remarks that follow from the R/U and Q/N
/// letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    pub category: HintCategory,
    pub text: String,
    pub notes: Vec<(HintCategory, String)>,
}

#[derive(Debug, Deserialize)]
struct HintTable {
    version: u32,
    hints: Vec<HintRow>,
}

#[derive(Debug, Deserialize)]
struct HintRow {
    category: HintCategory,
    text: String,
}

const HINT_TABLE: &str = include_str!("../data/qrak_hints.json");

fn hint_table() -> &'static HintTable {
    static TABLE: OnceLock<HintTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(HINT_TABLE).expect("shipped hint table parses"))
}

/// Version of the shipped hint wording.
pub fn hint_table_version() -> u32 {
    hint_table().version
}

fn hint_text(category: HintCategory) -> String {
    hint_table()
        .hints
        .iter()
        .find(|row| row.category == category)
        .map(|row| row.text.clone())
        .expect("hint table covers every category")
}

pub fn treatment_hint(code: QrakCode) -> Hint {
    if code.is_hidden() {
        return Hint {
            category: HintCategory::FaultySoftware,
            text: hint_text(HintCategory::FaultySoftware),
            notes: Vec::new(),
        };
    }
    let category = match code.evaluation() {
        Evaluation::APriori => HintCategory::APrioriStandard,
        Evaluation::SimulationBased => HintCategory::SimulationExpensive,
    };
    let mut notes = Vec::new();
    if code.relaxability() == Relaxability::Unrelaxable {
        notes.push((HintCategory::Unrelaxable, hint_text(HintCategory::Unrelaxable)));
    }
    if code.relaxability() == Relaxability::Relaxable && code.quantifiability() == Quantifiability::Quantifiable {
        notes.push((HintCategory::PenaltyHandling, hint_text(HintCategory::PenaltyHandling)));
    }
    Hint {
        category,
        text: hint_text(category),
        notes,
    }
}
