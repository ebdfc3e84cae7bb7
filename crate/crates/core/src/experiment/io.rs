//! CSV formats.
//!
//! Design file: header `factor,category,levels,replicates`, one row per
//! factor, level labels separated by `|` (empty for responses); the
//! replicate count must be the same on every row.
//!
//! Runs file: header `replicate,seed,<factors...>,<responses...>` with
//! non-response factors and responses each in name order. Empty response
//! cells mean "not measured".

use std::collections::BTreeMap;

use super::design::{classify_factors, full_factorial, Design, FactorCategory, Level, RawFactor};
use super::select::RunRecord;
use super::ExperimentError;

fn csv_err(e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Csv(e.to_string())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory writer cannot fail");
    String::from_utf8(bytes).expect("csv output is built from UTF-8 strings")
}

pub fn write_design_csv(design: &Design) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["factor", "category", "levels", "replicates"]).unwrap();
    let replicates = design.replicates.to_string();
    for f in &design.factors {
        let levels: Vec<&str> = f.levels.iter().map(|l| l.label.as_str()).collect();
        w.write_record([f.name.as_str(), f.category.as_str(), &levels.join("|"), &replicates])
            .unwrap();
    }
    finish(w)
}

pub fn parse_design_csv(text: &str) -> Result<Design, ExperimentError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["factor", "category", "levels", "replicates"] {
        return Err(ExperimentError::Csv(format!(
            "expected header factor,category,levels,replicates, found {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut raw = Vec::new();
    let mut replicates: Option<u32> = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = row + 2;
        let category = FactorCategory::parse(&record[1])
            .ok_or_else(|| ExperimentError::Csv(format!("line {line}: unknown category {:?}", &record[1])))?;
        let levels = if record[2].is_empty() {
            Vec::new()
        } else {
            record[2].split('|').map(Level::new).collect()
        };
        let reps: u32 = record[3]
            .trim()
            .parse()
            .map_err(|_| ExperimentError::Csv(format!("line {line}: invalid replicates {:?}", &record[3])))?;
        if replicates.is_some_and(|r| r != reps) {
            return Err(ExperimentError::Csv(format!(
                "line {line}: replicates differ between rows"
            )));
        }
        replicates = Some(reps);
        raw.push(RawFactor {
            name: record[0].to_string(),
            category,
            levels,
            conditioning: false,
        });
    }
    let specs = classify_factors(&raw)?;
    full_factorial(&specs, replicates.unwrap_or(0))
}

fn factor_columns(design: &Design) -> (Vec<&str>, Vec<&str>) {
    let factors = design
        .factors
        .iter()
        .filter(|f| !f.is_response())
        .map(|f| f.name.as_str())
        .collect();
    let responses = design
        .of_category(FactorCategory::Response)
        .map(|f| f.name.as_str())
        .collect();
    (factors, responses)
}

fn runs_header(design: &Design) -> Vec<String> {
    let (factors, responses) = factor_columns(design);
    ["replicate", "seed"]
        .into_iter()
        .chain(factors)
        .chain(responses)
        .map(str::to_string)
        .collect()
}

/// Run sheet: every cell and replicate with blank seed and response columns.
pub fn write_cells_csv(design: &Design) -> String {
    let (factors, responses) = factor_columns(design);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(runs_header(design)).unwrap();
    for cell in &design.cells {
        for r in 0..design.replicates {
            let mut row = vec![r.to_string(), String::new()];
            row.extend(factors.iter().map(|f| cell.get(*f).cloned().unwrap_or_default()));
            row.extend(responses.iter().map(|_| String::new()));
            w.write_record(row).unwrap();
        }
    }
    finish(w)
}

pub fn write_runs_csv(design: &Design, runs: &[RunRecord]) -> String {
    let (factors, responses) = factor_columns(design);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(runs_header(design)).unwrap();
    for run in runs {
        let mut row = vec![run.replicate.to_string(), run.seed.to_string()];
        row.extend(factors.iter().map(|f| run.cell.get(*f).cloned().unwrap_or_default()));
        row.extend(
            responses
                .iter()
                .map(|r| run.responses.get(*r).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(row).unwrap();
    }
    finish(w)
}

/// Columns are matched by header name, so their order does not matter.
pub fn parse_runs_csv(design: &Design, text: &str) -> Result<Vec<RunRecord>, ExperimentError> {
    let (factors, responses) = factor_columns(design);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ExperimentError::Csv(format!("missing column {name:?}")))
    };
    let rep_col = column("replicate")?;
    let seed_col = headers.iter().position(|h| h == "seed");
    let factor_cols = factors
        .iter()
        .map(|f| column(f).map(|c| (*f, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let response_cols: Vec<(&str, usize)> = responses
        .iter()
        .filter_map(|r| headers.iter().position(|h| h == *r).map(|c| (*r, c)))
        .collect();
    let mut runs = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = row + 2;
        let replicate = record[rep_col]
            .trim()
            .parse()
            .map_err(|_| ExperimentError::Csv(format!("line {line}: invalid replicate {:?}", &record[rep_col])))?;
        let seed = match seed_col.map(|c| record[c].trim()) {
            None | Some("") => 0,
            Some(s) => s
                .parse()
                .map_err(|_| ExperimentError::Csv(format!("line {line}: invalid seed {s:?}")))?,
        };
        let cell = factor_cols
            .iter()
            .map(|(f, c)| (f.to_string(), record[*c].to_string()))
            .collect();
        let mut values = BTreeMap::new();
        for (r, c) in &response_cols {
            let raw = record[*c].trim();
            if raw.is_empty() {
                continue;
            }
            let v: f64 = raw
                .parse()
                .map_err(|_| ExperimentError::Csv(format!("line {line}: invalid value {raw:?} for {r:?}")))?;
            values.insert(r.to_string(), v);
        }
        runs.push(RunRecord {
            cell,
            replicate,
            responses: values,
            seed,
        });
    }
    Ok(runs)
}
