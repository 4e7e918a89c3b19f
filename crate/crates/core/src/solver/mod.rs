//! LP-based branch-and-bound for the design MILP, direct topology
//! evaluation and an exhaustive oracle.
//!
//! Every solver in this module breaks cost ties the same way: costs within
//! a relative `1e-9` of each other count as equal, and among equal costs the
//! lexicographically largest selection vector wins, which favors lines that
//! come first in the candidate list.

mod bnb;
mod brute;
mod design;
mod evaluate;
mod lp;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use bnb::{branch_and_bound, branch_and_bound_with, BnbOptions, NodeRecord};
pub use brute::{brute_force_design, brute_force_design_with, BRUTE_FORCE_LIMIT};
pub use design::{design, BoundsChoice, DesignOptions, DesignRun, ModelSize, SolverChoice};
pub use evaluate::{evaluate_topology, TopologyEvaluation};
pub use lp::{
    resolve_fixed, solve_lp, solve_lp_warm, LpOutcome, LpProblem, LpSolution, WarmStart,
    FEASIBILITY_TOL,
};

use crate::formulation::DesignProblem;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes_explored: usize,
    pub lp_solves: usize,
    pub incumbent_updates: usize,
    pub pruned_by_bound: usize,
    pub pruned_infeasible: usize,
    pub pruned_disconnected: usize,
    /// Nodes whose LP relaxation broke down numerically and were branched
    /// without a bound of their own.
    pub lp_failures: usize,
    pub max_depth: usize,
    pub root_bound: Option<f64>,
    /// Relative distance between the incumbent and the best bound of any
    /// node left unexplored.
    pub final_gap: f64,
    pub proven_optimal: bool,
    pub wall_time_s: f64,
    /// Incumbent values in the order they were found.
    pub incumbent_history: Vec<f64>,
    /// Per-node LP bounds, filled when requested in [`BnbOptions`].
    #[serde(skip)]
    pub node_log: Vec<NodeRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignSolution {
    /// Indices of the selected candidate lines, increasing.
    pub selected: Vec<usize>,
    /// Selection flag per candidate line.
    pub z: Vec<bool>,
    /// `trace(W~ L~(z)^-1)`.
    pub objective: f64,
    /// Full squared H2 norm, available when damping is uniform.
    pub h2_cost: Option<f64>,
    /// `L~(z)^-1` over the reduced rows.
    pub x: DMatrix<f64>,
    pub stats: SolveStats,
}

impl DesignSolution {
    pub(crate) fn new(
        problem: &DesignProblem,
        z: Vec<bool>,
        eval: TopologyEvaluation,
        stats: SolveStats,
    ) -> Self {
        let h2_cost = problem.params().uniform_damping().map(|d| {
            (eval.objective + problem.spec().trace_s_minv(problem.params())) / (2.0 * d)
        });
        Self {
            selected: z.iter().enumerate().filter(|(_, &on)| on).map(|(m, _)| m).collect(),
            z,
            objective: eval.objective,
            h2_cost,
            x: eval.x,
            stats,
        }
    }
}

pub(crate) fn tie_tolerance(cost: f64) -> f64 {
    1e-9 * cost.abs() + 1e-12
}

fn strictly_below(a: f64, b: f64) -> bool {
    a < b - tie_tolerance(b)
}

/// Whether `(cost, z)` should replace `(best_cost, best_z)`.
pub(crate) fn beats(cost: f64, z: &[bool], best_cost: f64, best_z: &[bool]) -> bool {
    if strictly_below(cost, best_cost) {
        true
    } else if strictly_below(best_cost, cost) {
        false
    } else {
        z > best_z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_prefer_lexicographically_larger() {
        assert!(beats(1.0, &[true, false], 1.0, &[false, true]));
        assert!(!beats(1.0, &[false, true], 1.0, &[true, false]));
        assert!(beats(1.0 + 1e-13, &[true, false], 1.0, &[false, true]));
        assert!(!beats(1.001, &[true, true], 1.0, &[false, false]));
        assert!(beats(0.999, &[false, false], 1.0, &[true, true]));
    }
}
