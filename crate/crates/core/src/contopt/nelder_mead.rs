use serde::{Deserialize, Serialize};

use super::simplex::{diameter, volume, Simplex};
use super::{ContoptError, Objective};

/// Step coefficients of the fixed-coefficient Nelder-Mead variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for Coefficients {
    fn default() -> Self {
        Coefficients {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NMConfig {
    pub max_evals: usize,
    /// Stop once `f_worst - f_best <= f_tol`.
    pub f_tol: f64,
    /// Stop once the simplex diameter is `<= x_tol`.
    pub x_tol: f64,
    #[serde(default)]
    pub coefficients: Coefficients,
}

impl Default for NMConfig {
    fn default() -> Self {
        NMConfig {
            max_evals: 1000,
            f_tol: 1e-12,
            x_tol: 1e-10,
            coefficients: Coefficients::default(),
        }
    }
}

impl NMConfig {
    pub fn with_budget(max_evals: usize) -> Self {
        NMConfig {
            max_evals,
            ..NMConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ContoptError> {
        if self.max_evals == 0 {
            return Err(ContoptError::BudgetZero);
        }
        let c = &self.coefficients;
        let bad = |msg: String| Err(ContoptError::InvalidConfig(msg));
        if !(self.f_tol >= 0.0) || !(self.x_tol >= 0.0) {
            return bad(format!(
                "tolerances must be >= 0, got f_tol={} x_tol={}",
                self.f_tol, self.x_tol
            ));
        }
        if !(c.reflection > 0.0) {
            return bad(format!("reflection must be > 0, got {}", c.reflection));
        }
        if !(c.expansion > 1.0) {
            return bad(format!("expansion must be > 1, got {}", c.expansion));
        }
        if !(c.contraction > 0.0 && c.contraction < 1.0) {
            return bad(format!("contraction must be in (0, 1), got {}", c.contraction));
        }
        if !(c.shrink > 0.0 && c.shrink < 1.0) {
            return bad(format!("shrink must be in (0, 1), got {}", c.shrink));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FTol,
    XTol,
    Budget,
    DegenerateStall,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::FTol => "f_tol",
            Termination::XTol => "x_tol",
            Termination::Budget => "budget",
            Termination::DegenerateStall => "degenerate_stall",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NMResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evals_used: usize,
    pub termination: Termination,
    /// `(eval_index, best_f_so_far)` after every evaluation, 1-based.
    pub history: Vec<(usize, f64)>,
}

impl NMResult {
    /// First evaluation index at which the best value dropped below `level`.
    pub fn evals_to_reach(&self, level: f64) -> Option<usize> {
        self.history.iter().find(|(_, f)| *f < level).map(|(i, _)| *i)
    }
}

struct Budgeted<'a, O> {
    f: &'a O,
    origin: &'a [f64],
    max: usize,
    used: usize,
    best: f64,
    best_x: Vec<f64>,
    history: Vec<(usize, f64)>,
}

impl<O: Objective> Budgeted<'_, O> {
    /// `None` once the budget is exhausted. NaN is treated as +inf.
    fn eval(&mut self, offset: &[f64]) -> Option<f64> {
        if self.used >= self.max {
            return None;
        }
        let mut value = self.f.evaluate_offset(self.origin, offset);
        if value.is_nan() {
            value = f64::INFINITY;
        }
        self.used += 1;
        if value < self.best || self.history.is_empty() {
            self.best = value;
            self.best_x = offset.to_vec();
        }
        self.history.push((self.used, self.best));
        Some(value)
    }
}

fn along(from: &[f64], to: &[f64], coef: f64) -> Vec<f64> {
    // from + coef * (to - from)
    from.iter().zip(to).map(|(a, b)| a + coef * (b - a)).collect()
}

/// Minimizes `f` starting from `s0`.
///
/// The iteration runs on offsets from `s0.points[0]`, so moving the
/// problem and the start by the same vector leaves every step bit-for-bit
/// unchanged. Vertices are kept sorted with a stable sort; ties keep their
/// construction order.
pub fn nelder_mead<O: Objective>(f: &O, s0: &Simplex, cfg: &NMConfig) -> Result<NMResult, ContoptError> {
    cfg.validate()?;
    let n = s0.dim();
    if n == 0 {
        return Err(ContoptError::DimensionZero);
    }
    if s0.points.len() != n + 1 || s0.points.iter().any(|p| p.len() != n) {
        return Err(ContoptError::DimensionMismatch {
            expected: n + 1,
            found: s0.points.len(),
        });
    }
    let c = cfg.coefficients;
    let origin = s0.points[0].as_slice();
    let offsets: Vec<Vec<f64>> = s0
        .points
        .iter()
        .map(|p| p.iter().zip(origin).map(|(v, o)| v - o).collect())
        .collect();
    let mut state = Budgeted {
        f,
        origin,
        max: cfg.max_evals,
        used: 0,
        best: f64::INFINITY,
        best_x: offsets[0].clone(),
        history: Vec::new(),
    };

    let finish = |state: Budgeted<'_, O>, termination| {
        Ok(NMResult {
            best_x: origin.iter().zip(&state.best_x).map(|(o, d)| o + d).collect(),
            best_f: state.best,
            evals_used: state.used,
            termination,
            history: state.history,
        })
    };

    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    for p in &offsets {
        match state.eval(p) {
            Some(v) => vertices.push((p.clone(), v)),
            None => return finish(state, Termination::Budget),
        }
    }

    let mut stall = 0usize;
    loop {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = vertices[0].1;
        let f_worst = vertices[n].1;
        let spread = if f_worst == f_best { 0.0 } else { f_worst - f_best };
        let points: Vec<Vec<f64>> = vertices.iter().map(|v| v.0.clone()).collect();

        if volume(&points) == 0.0 {
            // A flat simplex has not converged; only give up once it also
            // stops producing distinct values.
            if spread == 0.0 {
                stall += 1;
            } else {
                stall = 0;
            }
            if stall >= 2 * n {
                return finish(state, Termination::DegenerateStall);
            }
        } else {
            stall = 0;
            if spread <= cfg.f_tol {
                return finish(state, Termination::FTol);
            }
            if diameter(&points) <= cfg.x_tol {
                return finish(state, Termination::XTol);
            }
        }

        let mut centroid = vec![0.0; n];
        for (p, _) in &vertices[..n] {
            for (acc, v) in centroid.iter_mut().zip(p) {
                *acc += v;
            }
        }
        for v in centroid.iter_mut() {
            *v /= n as f64;
        }
        let worst = vertices[n].0.clone();
        let f_second = vertices[n - 1].1;

        let reflected = along(&centroid, &worst, -c.reflection);
        let Some(f_r) = state.eval(&reflected) else {
            return finish(state, Termination::Budget);
        };

        if f_r < f_best {
            let expanded = along(&centroid, &reflected, c.expansion);
            let Some(f_e) = state.eval(&expanded) else {
                return finish(state, Termination::Budget);
            };
            vertices[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < f_second {
            vertices[n] = (reflected, f_r);
            continue;
        }
        let accepted = if f_r < f_worst {
            let outside = along(&centroid, &reflected, c.contraction);
            let Some(f_c) = state.eval(&outside) else {
                return finish(state, Termination::Budget);
            };
            (f_c <= f_r).then_some((outside, f_c))
        } else {
            let inside = along(&centroid, &worst, c.contraction);
            let Some(f_c) = state.eval(&inside) else {
                return finish(state, Termination::Budget);
            };
            (f_c < f_worst).then_some((inside, f_c))
        };
        if let Some(vertex) = accepted {
            vertices[n] = vertex;
            continue;
        }

        let best = vertices[0].0.clone();
        for vertex in vertices.iter_mut().skip(1) {
            let moved = along(&best, &vertex.0, c.shrink);
            let Some(value) = state.eval(&moved) else {
                return finish(state, Termination::Budget);
            };
            *vertex = (moved, value);
        }
    }
}
