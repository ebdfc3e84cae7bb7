//! Cross-product benchmark of initialization rules.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_simplex, format_point, nelder_mead, simplex_quality, ContoptError, InitRule, NMConfig, TestFunction,
    DEFAULT_TARGET,
};

/// Replicates after the first perturb each start coordinate uniformly in
/// `[-r, r]` with `r = PERTURBATION_FRACTION * max(1, max_j |x_j|)`.
pub const PERTURBATION_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub functions: Vec<TestFunction>,
    pub starts: Vec<Vec<f64>>,
    pub rules: Vec<InitRule>,
    pub nm: NMConfig,
    #[serde(default)]
    pub replicates: Option<u32>,
    #[serde(default)]
    pub seed: u64,
    /// Distance above the optimal value that counts as reached.
    #[serde(default)]
    pub target: Option<f64>,
}

impl BenchConfig {
    pub fn run(&self) -> Result<BenchTable, ContoptError> {
        run(self, true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub function: String,
    pub start: String,
    pub rule: String,
    pub replicate: u32,
    pub init_diameter: f64,
    pub edge_ratio: f64,
    pub evals_to_target: Option<usize>,
    pub best_f: f64,
    pub evals_used: usize,
    pub termination: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub target: f64,
    pub rows: Vec<BenchRow>,
}

pub const CSV_HEADER: [&str; 8] = [
    "function",
    "start",
    "rule",
    "init_diameter",
    "edge_ratio",
    "evals_to_target",
    "best_f",
    "termination",
];

fn sci(v: f64) -> String {
    format!("{v:e}")
}

impl BenchTable {
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record([
                    row.function.clone(),
                    row.start.clone(),
                    row.rule.clone(),
                    sci(row.init_diameter),
                    sci(row.edge_ratio),
                    row.evals_to_target.map(|e| e.to_string()).unwrap_or_default(),
                    sci(row.best_f),
                    row.termination.clone(),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("flush to Vec")).expect("UTF-8 fields")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Initial simplex benchmark\n");
        let _ = writeln!(out, "Target: best_f below optimum + {}\n", self.target);
        let _ = writeln!(
            out,
            "| function | start | rule | init diameter | edge ratio | evals to target | best f | termination |"
        );
        let _ = writeln!(out, "|---|---|---|---:|---:|---:|---:|---|");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {:.3e} | {:.3e} | {} | {:.3e} | {} |",
                r.function,
                r.start,
                r.rule,
                r.init_diameter,
                r.edge_ratio,
                r.evals_to_target
                    .map(|e| e.to_string())
                    .unwrap_or_else(|| "not reached".into()),
                r.best_f,
                r.termination
            );
        }
        let reached = self.rows.iter().filter(|r| r.evals_to_target.is_some()).count();
        let _ = writeln!(out, "\n{reached} of {} runs reached the target.", self.rows.len());
        out
    }
}

/// Runs every (function, start, rule, replicate) cell.
///
/// Replicate 1 uses the start as given; later replicates use a perturbed
/// start drawn from a generator seeded by `seed` and the cell coordinates,
/// so the table does not depend on execution order. All rules of one
/// (function, start, replicate) share the same perturbed start.
pub fn benchmark_init_rules(
    functions: &[TestFunction],
    starts: &[Vec<f64>],
    rules: &[InitRule],
    cfg: &NMConfig,
    replicates: Option<u32>,
    seed: u64,
) -> Result<BenchTable, ContoptError> {
    let config = BenchConfig {
        functions: functions.to_vec(),
        starts: starts.to_vec(),
        rules: rules.to_vec(),
        nm: *cfg,
        replicates,
        seed,
        target: None,
    };
    run(&config, true)
}

struct Cell {
    function: usize,
    start: usize,
    rule: usize,
    replicate: u32,
}

fn perturbed_start(base: &[f64], seed: u64, function: usize, start: usize, replicate: u32) -> Vec<f64> {
    if replicate <= 1 {
        return base.to_vec();
    }
    let key = seed
        ^ (function as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (start as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ u64::from(replicate).wrapping_mul(0x1656_67B1_9E37_79F9);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let radius = PERTURBATION_FRACTION * base.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    base.iter().map(|v| v + rng.random_range(-radius..=radius)).collect()
}

pub(crate) fn run(config: &BenchConfig, parallel: bool) -> Result<BenchTable, ContoptError> {
    if config.functions.is_empty() {
        return Err(ContoptError::EmptyInput("functions"));
    }
    if config.starts.is_empty() {
        return Err(ContoptError::EmptyInput("starts"));
    }
    if config.rules.is_empty() {
        return Err(ContoptError::EmptyInput("rules"));
    }
    let replicates = config.replicates.unwrap_or(1);
    if replicates == 0 {
        return Err(ContoptError::InvalidConfig("replicates must be >= 1".into()));
    }
    config.nm.validate()?;
    let target = config.target.unwrap_or(DEFAULT_TARGET);
    for f in &config.functions {
        f.validate()?;
        for s in &config.starts {
            if s.len() != f.dim() {
                return Err(ContoptError::DimensionMismatch {
                    expected: f.dim(),
                    found: s.len(),
                });
            }
        }
    }
    for rule in &config.rules {
        build_simplex(*rule, &config.starts[0])?;
    }

    let mut cells = Vec::new();
    for function in 0..config.functions.len() {
        for start in 0..config.starts.len() {
            for replicate in 1..=replicates {
                for rule in 0..config.rules.len() {
                    cells.push(Cell {
                        function,
                        start,
                        rule,
                        replicate,
                    });
                }
            }
        }
    }

    let run_cell = |cell: &Cell| -> Result<BenchRow, ContoptError> {
        let f = &config.functions[cell.function];
        let x1 = perturbed_start(
            &config.starts[cell.start],
            config.seed,
            cell.function,
            cell.start,
            cell.replicate,
        );
        let rule = config.rules[cell.rule];
        let simplex = build_simplex(rule, &x1)?;
        let quality = simplex_quality(&simplex);
        let result = nelder_mead(f, &simplex, &config.nm)?;
        Ok(BenchRow {
            function: f.name(),
            start: format_point(&x1),
            rule: rule.label(),
            replicate: cell.replicate,
            init_diameter: quality.diameter,
            edge_ratio: quality.edge_ratio,
            evals_to_target: result.evals_to_reach(f.optimal_value() + target),
            best_f: result.best_f,
            evals_used: result.evals_used,
            termination: result.termination.as_str().to_string(),
        })
    };

    let rows: Result<Vec<BenchRow>, ContoptError> = if parallel {
        cells.par_iter().map(run_cell).collect()
    } else {
        cells.iter().map(run_cell).collect()
    };
    let mut rows = rows?;
    rows.sort_by(|a, b| {
        (&a.function, &a.start, &a.rule, a.replicate).cmp(&(&b.function, &b.start, &b.rule, b.replicate))
    });
    Ok(BenchTable { target, rows })
}
