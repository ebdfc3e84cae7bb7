use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ContoptError;

/// How the n+1 starting vertices are derived from a single start point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitRule {
    /// Scale coordinate i by 1.05, or set it to 0.00025 when it is exactly
    /// zero (fminsearch / SciPy).
    Pfeffer,
    /// Add `0.1 * max_j |x_j|` to coordinate i (R's `optim`).
    NashOptim,
    /// Add a fixed step `h` to coordinate i.
    RegionOfInterest { h: f64 },
}

impl InitRule {
    pub fn label(&self) -> String {
        match self {
            InitRule::Pfeffer => "pfeffer".to_string(),
            InitRule::NashOptim => "nash_optim".to_string(),
            InitRule::RegionOfInterest { h } => format!("roi(h={h})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    /// Vertices in construction order; `points[0]` is the start point.
    pub points: Vec<Vec<f64>>,
    pub provenance: InitRule,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }
}

pub fn build_simplex(rule: InitRule, x1: &[f64]) -> Result<Simplex, ContoptError> {
    let n = x1.len();
    if n == 0 {
        return Err(ContoptError::DimensionZero);
    }
    if let InitRule::RegionOfInterest { h } = rule {
        if !(h > 0.0 && h.is_finite()) {
            return Err(ContoptError::InvalidStep(h));
        }
    }
    let nash_step = 0.1 * x1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut points = Vec::with_capacity(n + 1);
    points.push(x1.to_vec());
    for i in 0..n {
        let mut p = x1.to_vec();
        p[i] = match rule {
            InitRule::Pfeffer => {
                if x1[i] != 0.0 {
                    1.05 * x1[i]
                } else {
                    0.00025
                }
            }
            InitRule::NashOptim => x1[i] + nash_step,
            InitRule::RegionOfInterest { h } => x1[i] + h,
        };
        points.push(p);
    }
    Ok(Simplex {
        points,
        provenance: rule,
    })
}

/// Conditioning diagnostics of a simplex. Edges are measured from the
/// start vertex; the diameter is the largest pairwise distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quality {
    pub diameter: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    /// `max_edge / min_edge`, infinite when `min_edge == 0`.
    pub edge_ratio: f64,
    pub volume: f64,
    pub degenerate: bool,
}

/// Edge ratio above which a simplex counts as degenerate.
pub const DEGENERATE_EDGE_RATIO: f64 = 1e6;

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(distance(a, b));
        }
    }
    best
}

/// `|det(edges)| / n!` with edges taken from the first vertex.
pub(crate) fn volume(points: &[Vec<f64>]) -> f64 {
    let n = points[0].len();
    let edges = DMatrix::from_fn(n, n, |r, c| points[r + 1][c] - points[0][c]);
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    edges.determinant().abs() / factorial
}

pub fn simplex_quality(s: &Simplex) -> Quality {
    let start = &s.points[0];
    let edges: Vec<f64> = s.points[1..].iter().map(|p| distance(start, p)).collect();
    let min_edge = edges.iter().copied().fold(f64::INFINITY, f64::min);
    let max_edge = edges.iter().copied().fold(0.0, f64::max);
    let edge_ratio = if min_edge == 0.0 {
        f64::INFINITY
    } else {
        max_edge / min_edge
    };
    let volume = volume(&s.points);
    Quality {
        diameter: diameter(&s.points),
        min_edge,
        max_edge,
        edge_ratio,
        volume,
        degenerate: volume == 0.0 || edge_ratio > DEGENERATE_EDGE_RATIO,
    }
}
