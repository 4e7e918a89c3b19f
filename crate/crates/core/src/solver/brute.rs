use std::time::Instant;

use super::{beats, evaluate_topology, DesignSolution, SolveStats, TopologyEvaluation};
use crate::error::{Error, Result};
use crate::formulation::DesignProblem;

/// Largest number of free candidate lines the oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 25;

/// Exhaustive search over all connected selections within the budget.
pub fn brute_force_design(problem: &DesignProblem) -> Result<DesignSolution> {
    brute_force_design_with(problem, &[])
}

/// Exhaustive search with the lines in `forced` switched on in addition to
/// the problem's fixed lines.
pub fn brute_force_design_with(problem: &DesignProblem, forced: &[usize]) -> Result<DesignSolution> {
    let start = Instant::now();
    let mut base = problem.base_selection();
    for &m in forced {
        if m >= base.len() {
            return Err(Error::Dimension(format!("forced line {m} does not exist")));
        }
        base[m] = true;
    }
    let free: Vec<usize> = (0..base.len()).filter(|&m| !base[m]).collect();
    if free.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded { count: free.len(), limit: BRUTE_FORCE_LIMIT });
    }
    let fixed_count = base.iter().filter(|&&b| b).count();
    let Some(free_budget) = problem.budget().checked_sub(fixed_count) else {
        return Err(Error::NoFeasibleTopology);
    };
    let min_free = (problem.n_buses() - 1).saturating_sub(fixed_count);

    let inc = problem.incidence();
    let w = problem.reduced_w();
    let mut stats = SolveStats::default();
    let mut best: Option<(Vec<bool>, TopologyEvaluation)> = None;
    let mut z = base.clone();
    for mask in 0u64..(1u64 << free.len()) {
        let count = mask.count_ones() as usize;
        if count > free_budget || count < min_free {
            continue;
        }
        for (b, &m) in free.iter().enumerate() {
            z[m] = mask >> b & 1 == 1;
        }
        if !inc.selection_connected(&z) {
            stats.pruned_disconnected += 1;
            continue;
        }
        stats.nodes_explored += 1;
        let eval = match evaluate_topology(&inc, &w, &z) {
            Ok(e) => e,
            Err(Error::Disconnected | Error::SingularLaplacian) => continue,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some((bz, be)) => beats(eval.objective, &z, be.objective, bz),
        };
        if better {
            stats.incumbent_updates += 1;
            stats.incumbent_history.push(eval.objective);
            best = Some((z.clone(), eval));
        }
    }
    let (z, eval) = best.ok_or(Error::NoFeasibleTopology)?;
    stats.proven_optimal = true;
    stats.wall_time_s = start.elapsed().as_secs_f64();
    Ok(DesignSolution::new(problem, z, eval, stats))
}
