use std::sync::Arc;

use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, SolveOutcome, Variable};

use crate::error::{Error, Result};
use crate::formulation::{Row, Sense};

/// Primal feasibility tolerance, relative to `1 + |rhs|` for rows and
/// `1 + |bound|` for variable bounds.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Residuals above this level are treated as a numerical breakdown.
const BREAKDOWN_TOL: f64 = 1e-6;

/// A continuous minimization problem with finite variable bounds.
#[derive(Clone, Debug, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// Largest scaled row or bound violation of `x`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LpProblem {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension(format!(
                "{n} objective entries but {} lower and {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for row in &self.rows {
            if let Some(&(v, _)) = row.coeffs.iter().find(|&&(v, _)| v >= n) {
                return Err(Error::Dimension(format!("row {} uses variable {v} of {n}", row.name)));
            }
        }
        Ok(())
    }

    /// Largest violation of `x`, scaled per row and per bound.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let rows = self
            .rows
            .iter()
            .map(|r| r.violation(x) / (1.0 + r.rhs.abs()))
            .fold(0.0, f64::max);
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| {
                ((lo - v) / (1.0 + lo.abs())).max((v - hi) / (1.0 + hi.abs())).max(0.0)
            })
            .fold(0.0, f64::max);
        rows.max(bounds)
    }
}

/// Solves `p` by the simplex method. Zero coefficients are dropped and rows
/// with a single variable are folded into its bounds first. Solutions whose residual exceeds
/// the breakdown level are reported as numerical errors; small excesses over
/// [`FEASIBILITY_TOL`] are removed by clipping to the variable bounds.
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome> {
    solve_lp_warm(p).map(|(outcome, _)| outcome)
}

/// Simplex state of a solved LP that can be re-optimized after fixing
/// variables, starting from the optimal basis.
#[derive(Clone)]
pub struct WarmStart {
    solution: Solution,
    vars: Arc<Vec<Variable>>,
}

impl std::fmt::Debug for WarmStart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarmStart").field("vars", &self.vars.len()).finish()
    }
}

/// Like [`solve_lp`], also returning the simplex state when optimal.
pub fn solve_lp_warm(p: &LpProblem) -> Result<(LpOutcome, Option<WarmStart>)> {
    p.validate()?;
    for (v, (&lo, &hi)) in p.lower.iter().zip(&p.upper).enumerate() {
        if lo > hi {
            return Ok((LpOutcome::Infeasible, None));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Numerical(format!("variable {v} has an infinite bound")));
        }
    }
    let mut lower = p.lower.clone();
    let mut upper = p.upper.clone();
    let mut kept = Vec::with_capacity(p.rows.len());
    for row in &p.rows {
        let coeffs: Vec<(usize, f64)> = row.coeffs.iter().copied().filter(|&(_, c)| c != 0.0).collect();
        match coeffs[..] {
            [] => {
                let lhs_violation = match row.sense {
                    Sense::Le => -row.rhs,
                    Sense::Ge => row.rhs,
                    Sense::Eq => row.rhs.abs(),
                };
                if lhs_violation > FEASIBILITY_TOL * (1.0 + row.rhs.abs()) {
                    return Ok((LpOutcome::Infeasible, None));
                }
            }
            [(v, c)] => {
                let t = row.rhs / c;
                let (caps_above, caps_below) = match (row.sense, c > 0.0) {
                    (Sense::Eq, _) => (true, true),
                    (Sense::Le, true) | (Sense::Ge, false) => (true, false),
                    (Sense::Le, false) | (Sense::Ge, true) => (false, true),
                };
                if caps_above {
                    upper[v] = upper[v].min(t);
                }
                if caps_below {
                    lower[v] = lower[v].max(t);
                }
            }
            _ => kept.push((row, coeffs)),
        }
    }
    for v in 0..p.n_vars() {
        if lower[v] > upper[v] {
            if lower[v] - upper[v] > FEASIBILITY_TOL * (1.0 + upper[v].abs()) {
                return Ok((LpOutcome::Infeasible, None));
            }
            upper[v] = lower[v];
        }
    }

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = p
        .objective
        .iter()
        .zip(lower.iter().zip(&upper))
        .map(|(&c, (&lo, &hi))| problem.add_var(c, (lo, hi)))
        .collect();
    for (row, coeffs) in kept {
        let op = match row.sense {
            Sense::Le => ComparisonOp::Le,
            Sense::Ge => ComparisonOp::Ge,
            Sense::Eq => ComparisonOp::Eq,
        };
        let expr: Vec<_> = coeffs.iter().map(|&(v, c)| (vars[v], c)).collect();
        problem.add_constraint(expr, op, row.rhs);
    }
    let vars = Arc::new(vars);
    finish(p, problem.solve(), vars)
}

/// Re-optimizes `warm` after fixing `fixes` (variable, value). `p` must be
/// the problem behind `warm` with those fixings applied; it is used to
/// validate the new point.
pub fn resolve_fixed(
    p: &LpProblem,
    warm: &WarmStart,
    fixes: &[(usize, f64)],
) -> Result<(LpOutcome, Option<WarmStart>)> {
    let mut solution = warm.solution.clone();
    for (k, &(v, value)) in fixes.iter().enumerate() {
        let outcome = solution.fix_var(warm.vars[v], value);
        if k + 1 == fixes.len() {
            return finish(p, outcome, warm.vars.clone());
        }
        solution = match outcome {
            Ok(SolveOutcome::Solution(s)) => s,
            other => return finish(p, other, warm.vars.clone()),
        };
    }
    finish(p, Ok(SolveOutcome::Solution(solution)), warm.vars.clone())
}

fn finish(
    p: &LpProblem,
    outcome: std::result::Result<SolveOutcome, microlp::Error>,
    vars: Arc<Vec<Variable>>,
) -> Result<(LpOutcome, Option<WarmStart>)> {
    let solution = match outcome {
        Ok(SolveOutcome::Solution(s)) => s,
        Ok(SolveOutcome::Interrupted(_)) => {
            return Err(Error::Numerical("LP solve was interrupted".into()));
        }
        Err(microlp::Error::Infeasible) => return Ok((LpOutcome::Infeasible, None)),
        Err(microlp::Error::Unbounded) => return Ok((LpOutcome::Unbounded, None)),
        Err(e) => {
            return Err(Error::Numerical(format!(
                "LP breakdown with {} variables and {} rows: {e}",
                p.n_vars(),
                p.rows.len()
            )));
        }
    };
    let x: Vec<f64> = vars
        .iter()
        .zip(p.lower.iter().zip(&p.upper))
        .map(|(&v, (&lo, &hi))| solution.var_value_raw(v).clamp(lo, hi))
        .collect();
    let residual = p.residual(&x);
    if residual > BREAKDOWN_TOL {
        let worst = p
            .rows
            .iter()
            .max_by(|a, b| a.violation(&x).total_cmp(&b.violation(&x)))
            .map(|r| format!("{} (violation {:.3e})", r.name, r.violation(&x)))
            .unwrap_or_default();
        let coeff_range = p
            .rows
            .iter()
            .flat_map(|r| r.coeffs.iter().map(|&(_, c)| c.abs()))
            .filter(|&c| c > 0.0)
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), c| (lo.min(c), hi.max(c)));
        return Err(Error::Numerical(format!(
            "LP residual {residual:.3e} exceeds {BREAKDOWN_TOL:e}; worst row {worst}; \
             coefficient magnitudes in [{:.3e}, {:.3e}]",
            coeff_range.0, coeff_range.1
        )));
    }
    let value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let warm = WarmStart { solution, vars };
    Ok((LpOutcome::Optimal(LpSolution { value, x, residual }), Some(warm)))
}
