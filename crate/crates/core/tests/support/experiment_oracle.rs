//! Brute-force oracle for robust selection on small random designs.
//! Shared with the acceptance suite through `#[path]`.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use greybox_core::experiment::{
    classify_factors, full_factorial, Aggregation, Assignment, Design, Direction, FactorCategory, RawFactor, RunRecord,
};

#[derive(Debug, Clone)]
pub struct Case {
    /// (category, level count) per non-response factor; names are f0, f1, ...
    pub factors: Vec<(FactorCategory, usize)>,
    pub replicates: u32,
    pub values: Vec<i64>,
    pub scale: f64,
}

pub fn build(case: &Case) -> Design {
    let mut raw: Vec<RawFactor> = case
        .factors
        .iter()
        .enumerate()
        .map(|(i, (cat, n))| {
            let labels: Vec<String> = (0..*n).map(|l| format!("L{l}")).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            RawFactor::new(&format!("f{i}"), *cat, &refs)
        })
        .collect();
    raw.push(RawFactor::new("y", FactorCategory::Response, &[]));
    full_factorial(&classify_factors(&raw).unwrap(), case.replicates).unwrap()
}

pub fn runs(design: &Design, case: &Case, scale: f64) -> Vec<RunRecord> {
    let mut values = case.values.iter();
    let mut out = Vec::new();
    for cell in &design.cells {
        for r in 0..design.replicates {
            let v = *values.next().unwrap() as f64 * scale;
            out.push(RunRecord {
                cell: cell.clone(),
                replicate: r,
                responses: BTreeMap::from([("y".to_string(), v)]),
                seed: 0,
            });
        }
    }
    out
}

/// All level-index tuples for the given level counts, first index slowest.
pub fn tuples(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in counts {
        let mut next = Vec::new();
        for prefix in &out {
            for l in 0..n {
                let mut t = prefix.clone();
                t.push(l);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Brute force over explicit assignments using exact integer arithmetic.
/// Returns (observable, controllable, aggregate numerator, denominator).
pub fn oracle(case: &Case, agg: Aggregation, dir: Direction) -> Vec<(Assignment, Assignment, i64, i64)> {
    let design = build(case);
    let mut table: HashMap<(Assignment, u32), i64> = HashMap::new();
    let mut values = case.values.iter();
    for cell in &design.cells {
        for r in 0..case.replicates {
            table.insert((cell.clone(), r), *values.next().unwrap());
        }
    }
    let named = |cat: FactorCategory| -> Vec<(String, usize)> {
        case.factors
            .iter()
            .enumerate()
            .filter(|(_, (c, _))| *c == cat)
            .map(|(i, (_, n))| (format!("f{i}"), *n))
            .collect()
    };
    let obs = named(FactorCategory::Observable);
    let ctl = named(FactorCategory::Controllable);
    let noise = named(FactorCategory::Noise);
    let assign = |names: &[(String, usize)], t: &[usize]| -> Assignment {
        names
            .iter()
            .zip(t)
            .map(|((n, _), l)| (n.clone(), format!("L{l}")))
            .collect()
    };
    let counts = |names: &[(String, usize)]| names.iter().map(|(_, n)| *n).collect::<Vec<_>>();
    let mut result = Vec::new();
    for o in tuples(&counts(&obs)) {
        let oa = assign(&obs, &o);
        let mut best: Option<(Assignment, i64, i64)> = None;
        for c in tuples(&counts(&ctl)) {
            let ca = assign(&ctl, &c);
            let mut sum = 0;
            let mut count = 0;
            let mut worst: Option<i64> = None;
            for n in tuples(&counts(&noise)) {
                let mut full = oa.clone();
                full.extend(ca.clone());
                full.extend(assign(&noise, &n));
                for r in 0..case.replicates {
                    let v = table[&(full.clone(), r)];
                    sum += v;
                    count += 1;
                    worst = Some(match (worst, dir) {
                        (None, _) => v,
                        (Some(w), Direction::Minimize) => w.max(v),
                        (Some(w), Direction::Maximize) => w.min(v),
                    });
                }
            }
            let (num, den) = match agg {
                Aggregation::Mean => (sum, count),
                Aggregation::WorstCase => (worst.unwrap(), 1),
            };
            let better = match &best {
                None => true,
                // num/den vs bn/bd with positive denominators
                Some((_, bn, bd)) => match dir {
                    Direction::Minimize => num * bd < bn * den,
                    Direction::Maximize => num * bd > bn * den,
                },
            };
            if better {
                best = Some((ca, num, den));
            }
        }
        let (ca, num, den) = best.unwrap();
        result.push((oa, ca, num, den));
    }
    result
}

pub const MODES: [(Aggregation, Direction); 4] = [
    (Aggregation::Mean, Direction::Minimize),
    (Aggregation::Mean, Direction::Maximize),
    (Aggregation::WorstCase, Direction::Minimize),
    (Aggregation::WorstCase, Direction::Maximize),
];
