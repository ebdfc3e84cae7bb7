use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::design::{Assignment, Design};
use super::select::RobustSelection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionKind {
    ResearchQuestion,
    PreExperimentalPlanning,
    Task,
    Setup,
    Results,
    Observations,
    Discussion,
}

impl SectionKind {
    pub const ALL: [SectionKind; 7] = [
        SectionKind::ResearchQuestion,
        SectionKind::PreExperimentalPlanning,
        SectionKind::Task,
        SectionKind::Setup,
        SectionKind::Results,
        SectionKind::Observations,
        SectionKind::Discussion,
    ];

    pub fn title(self) -> &'static str {
        match self {
            SectionKind::ResearchQuestion => "Research question",
            SectionKind::PreExperimentalPlanning => "Pre-experimental planning",
            SectionKind::Task => "Task",
            SectionKind::Setup => "Setup",
            SectionKind::Results => "Results",
            SectionKind::Observations => "Observations",
            SectionKind::Discussion => "Discussion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub kind: SectionKind,
    #[serde(default)]
    pub body: String,
}

/// Author-supplied report content; sections may come in any order and any
/// subset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportMetadata {
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub sections: Vec<Section>,
}

/// Always holds the seven sections in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ReportMetadata")]
pub struct ReportSkeleton {
    title: String,
    sections: Vec<Section>,
}

impl From<ReportMetadata> for ReportSkeleton {
    fn from(meta: ReportMetadata) -> Self {
        report_skeleton(&meta)
    }
}

impl ReportSkeleton {
    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn body(&self, kind: SectionKind) -> &str {
        &self.sections[kind as usize].body
    }

    pub fn set_body(&mut self, kind: SectionKind, body: impl Into<String>) {
        self.sections[kind as usize].body = body.into();
    }

    /// Skeleton whose planning section carries guide-sheet prompts to be
    /// filled in before any runs are made.
    pub fn guide_sheet(title: &str) -> Self {
        let prompts = [
            "Objective of the experiment:",
            "Relevant background and prior results:",
            "Response variables and how they are measured:",
            "Controllable factors, their ranges and levels:",
            "Factors held constant:",
            "Observable and noise factors, and how they are handled:",
            "Interactions expected among factors:",
            "Restrictions (budget, run time, hardware):",
            "Design chosen and number of replicates:",
            "Planned analysis and decision rule:",
        ];
        let body = prompts.iter().map(|p| format!("- {p}")).collect::<Vec<_>>().join("\n");
        report_skeleton(&ReportMetadata {
            title: title.to_string(),
            sections: vec![Section {
                kind: SectionKind::PreExperimentalPlanning,
                body,
            }],
        })
    }
}

/// Normalizes author content into the fixed seven-section order. Repeated
/// sections are joined with a blank line in input order.
pub fn report_skeleton(meta: &ReportMetadata) -> ReportSkeleton {
    let sections = SectionKind::ALL
        .iter()
        .map(|&kind| Section {
            kind,
            body: meta
                .sections
                .iter()
                .filter(|s| s.kind == kind && !s.body.trim().is_empty())
                .map(|s| s.body.trim_end())
                .collect::<Vec<_>>()
                .join("\n\n"),
        })
        .collect();
    ReportSkeleton {
        title: meta.title.clone(),
        sections,
    }
}

fn assignment_label(a: &Assignment) -> String {
    if a.is_empty() {
        "(all)".to_string()
    } else {
        a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
    }
}

fn escape(cell: &str) -> String {
    cell.replace('|', "\\|")
}

fn design_table(out: &mut String, design: &Design) {
    out.push_str("### Design\n\n| factor | category | levels | labels |\n|---|---|---|---|\n");
    for f in &design.factors {
        let labels: Vec<&str> = f.levels.iter().map(|l| l.label.as_str()).collect();
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            escape(&f.name),
            f.category.as_str(),
            f.levels.len(),
            escape(&labels.join(", "))
        );
    }
    let _ = writeln!(
        out,
        "\nCells: {}. Replicates: {}. Total runs: {}.\n",
        design.cells.len(),
        design.replicates,
        design.total_runs()
    );
}

fn selection_table(out: &mut String, selection: &RobustSelection) {
    let _ = writeln!(
        out,
        "### Selection: {} ({}, {})\n\n| observable | best controllable | value |\n|---|---|---|",
        escape(&selection.response),
        selection.aggregation.as_str(),
        selection.direction.as_str()
    );
    for e in &selection.entries {
        let _ = writeln!(
            out,
            "| {} | {} | {} |",
            escape(&assignment_label(&e.observable)),
            escape(&assignment_label(&e.controllable)),
            e.value
        );
    }
    out.push('\n');
}

/// Renders Markdown. The results section gets the design dimensions and one
/// table per selection appended after any authored text.
pub fn render_report(skeleton: &ReportSkeleton, design: Option<&Design>, selections: &[RobustSelection]) -> String {
    let mut out = String::new();
    let title = if skeleton.title.is_empty() {
        "Experiment report"
    } else {
        &skeleton.title
    };
    let _ = writeln!(out, "# {title}\n");
    for section in &skeleton.sections {
        let _ = writeln!(out, "## {}\n", section.kind.title());
        if !section.body.is_empty() {
            let _ = writeln!(out, "{}\n", section.body);
        }
        if section.kind == SectionKind::Results {
            if let Some(design) = design {
                design_table(&mut out, design);
            }
            for selection in selections {
                selection_table(&mut out, selection);
            }
        }
        if section.body.is_empty()
            && (section.kind != SectionKind::Results || (design.is_none() && selections.is_empty()))
        {
            out.push_str("_Not yet written._\n\n");
        }
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_metadata_gives_seven_empty_sections() {
        let s = report_skeleton(&ReportMetadata::default());
        assert_eq!(s.sections().len(), 7);
        assert!(s.sections().iter().all(|s| s.body.is_empty()));
        let kinds: Vec<_> = s.sections().iter().map(|s| s.kind).collect();
        assert_eq!(kinds, SectionKind::ALL);
        let md = render_report(&s, None, &[]);
        assert_eq!(md.matches("\n## ").count(), 7);
    }

    #[test]
    fn permuted_input_is_normalized() {
        let meta = ReportMetadata {
            title: "t".into(),
            sections: vec![
                Section {
                    kind: SectionKind::Discussion,
                    body: "d".into(),
                },
                Section {
                    kind: SectionKind::ResearchQuestion,
                    body: "q".into(),
                },
            ],
        };
        let s = report_skeleton(&meta);
        assert_eq!(s.body(SectionKind::ResearchQuestion), "q");
        assert_eq!(s.sections()[6].body, "d");
        let json = serde_json::to_string(&meta).unwrap();
        let parsed: ReportSkeleton = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn guide_sheet_prompts_in_planning() {
        let s = ReportSkeleton::guide_sheet("x");
        assert!(s
            .body(SectionKind::PreExperimentalPlanning)
            .contains("Controllable factors"));
        assert!(s.body(SectionKind::Task).is_empty());
    }
}
