use std::collections::BTreeSet;

use greybox_core::checklist::ChecklistTemplate;

const DOC: &str = include_str!("../../../docs/checklist.md");

/// `(entry id, keywords)` for every bullet in the documentation.
fn documented() -> Vec<(String, Vec<String>)> {
    DOC.lines()
        .filter_map(|line| line.strip_prefix("- `"))
        .map(|rest| {
            let (id, keywords) = rest.split_once("`:").expect("entry line has `id`: keywords");
            let keywords = keywords.split(',').map(|k| k.trim().to_lowercase()).collect();
            (id.to_string(), keywords)
        })
        .collect()
}

fn template_entries(template: &ChecklistTemplate) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for item in &template.items {
        out.push((item.id.clone(), item.prompt.clone()));
        for sub in &item.sub_items {
            out.push((format!("{}.{}", item.id, sub.id), sub.prompt.clone()));
        }
    }
    out
}

#[test]
fn docs_and_template_list_the_same_entries() {
    let template = ChecklistTemplate::default_template();
    let documented: BTreeSet<String> = documented().into_iter().map(|(id, _)| id).collect();
    let shipped: BTreeSet<String> = template_entries(&template).into_iter().map(|(id, _)| id).collect();
    assert_eq!(documented, shipped);
    assert_eq!(template.items.len(), 10);
}

#[test]
fn every_prompt_mentions_its_documented_keywords() {
    let template = ChecklistTemplate::default_template();
    let prompts = template_entries(&template);
    for (id, keywords) in documented() {
        let prompt = &prompts.iter().find(|(p, _)| *p == id).expect("entry exists").1;
        let prompt = prompt.to_lowercase();
        for keyword in keywords {
            assert!(prompt.contains(&keyword), "{id}: prompt lacks {keyword:?}: {prompt}");
        }
    }
}

#[test]
fn required_items_are_marked_in_docs_and_template() {
    let template = ChecklistTemplate::default_template();
    for item in &template.items {
        let heading = DOC
            .lines()
            .find(|l| l.starts_with(&format!("## {} ", item.id)))
            .expect("every item has a heading");
        assert_eq!(heading.ends_with("(required)"), item.required_for_finalize, "{heading}");
    }
}
