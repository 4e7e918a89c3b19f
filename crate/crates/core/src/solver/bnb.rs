use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

use log::{debug, info, warn};

use super::lp::{resolve_fixed, solve_lp_warm, LpOutcome, LpProblem, WarmStart};
use super::{beats, evaluate_topology, tie_tolerance, DesignSolution, SolveStats, TopologyEvaluation};
use crate::error::{Error, Result};
use crate::formulation::{DesignProblem, MilpModel};
use crate::netgraph::UnionFind;

/// Row tolerance for accepting heuristic selections as model solutions.
const ADMIT_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct BnbOptions {
    /// Distance from 0 or 1 below which a binary counts as integral.
    pub integrality_tol: f64,
    /// Progress is logged every this many nodes.
    pub log_every: usize,
    /// Record the LP bound of every solved node in the stats.
    pub record_nodes: bool,
    /// Stop after exploring this many nodes, returning the incumbent
    /// without an optimality proof.
    pub node_limit: Option<usize>,
    /// Re-optimize child relaxations from the parent's simplex basis.
    pub warm_start: bool,
    /// Open nodes beyond this count are solved from scratch, which bounds
    /// the memory held by stored simplex states.
    pub warm_start_limit: usize,
}

impl Default for BnbOptions {
    fn default() -> Self {
        Self {
            integrality_tol: 1e-6,
            log_every: 1000,
            record_nodes: false,
            node_limit: None,
            warm_start: true,
            warm_start_limit: 256,
        }
    }
}

/// A node whose LP relaxation was solved.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    /// Fixing of each candidate line in the subtree (`None` when free).
    pub fixings: Vec<Option<bool>>,
    pub lp_bound: f64,
}

struct Node {
    bound: f64,
    id: u64,
    depth: usize,
    fix: Vec<Option<bool>>,
    /// Parent simplex state and the fixing that distinguishes this node.
    warm: Option<(Arc<WarmStart>, usize)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap pops the maximum: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Incumbent {
    cost: f64,
    binaries: Vec<bool>,
    z: Vec<bool>,
    eval: TopologyEvaluation,
}

fn offer(incumbent: &mut Option<Incumbent>, cand: Incumbent, stats: &mut SolveStats) {
    let better = incumbent
        .as_ref()
        .is_none_or(|inc| beats(cand.cost, &cand.binaries, inc.cost, &inc.binaries));
    if better {
        debug!("incumbent {:.12} at node {}", cand.cost, stats.nodes_explored);
        stats.incumbent_updates += 1;
        stats.incumbent_history.push(cand.cost);
        *incumbent = Some(cand);
    }
}

/// Whether some completion of `fix` is lexicographically larger than `inc`.
fn may_hold_larger(fix: &[Option<bool>], inc: &[bool]) -> bool {
    for (f, &v) in fix.iter().zip(inc) {
        if !v && *f != Some(false) {
            return true;
        }
        if matches!(f, Some(x) if *x != v) {
            return false;
        }
    }
    false
}

/// No completion of `fix` can beat the incumbent given a subtree bound.
fn dominated(bound: f64, fix: &[Option<bool>], inc: &Incumbent) -> bool {
    let tol = tie_tolerance(inc.cost);
    bound > inc.cost + tol || (bound >= inc.cost - tol && !may_hold_larger(fix, &inc.binaries))
}

pub fn branch_and_bound(model: &MilpModel, problem: &DesignProblem) -> Result<DesignSolution> {
    branch_and_bound_with(model, problem, &BnbOptions::default())
}

/// Best-bound branch-and-bound on the LP relaxation of `model`, branching on
/// the most fractional selection variable.
pub fn branch_and_bound_with(
    model: &MilpModel,
    problem: &DesignProblem,
    opts: &BnbOptions,
) -> Result<DesignSolution> {
    let start = Instant::now();
    let nb = model.n_binaries();
    let inc_matrix = problem.incidence();
    let w = problem.reduced_w();
    let base = LpProblem {
        objective: model.objective().to_vec(),
        lower: model.lower().to_vec(),
        upper: model.upper().to_vec(),
        rows: model.rows().to_vec(),
    };

    let mut stats = SolveStats::default();
    let mut incumbent: Option<Incumbent> = None;
    let mut heap = BinaryHeap::new();
    let mut next_id = 1u64;
    // smallest bound among subtrees discarded while tied with the incumbent
    let mut tied_bound = f64::INFINITY;
    heap.push(Node { bound: f64::NEG_INFINITY, id: 0, depth: 0, fix: vec![None; nb], warm: None });

    let mut limit_hit = false;
    while let Some(node) = heap.pop() {
        if let Some(inc) = &incumbent {
            if dominated(node.bound, &node.fix, inc) {
                stats.pruned_by_bound += 1;
                tied_bound = tied_bound.min(node.bound);
                continue;
            }
        }
        if opts.node_limit.is_some_and(|l| stats.nodes_explored >= l) {
            heap.push(node);
            limit_hit = true;
            break;
        }
        stats.nodes_explored += 1;
        stats.max_depth = stats.max_depth.max(node.depth);
        if opts.log_every > 0 && stats.nodes_explored % opts.log_every == 0 {
            let best_open = heap.peek().map_or(node.bound, |n| n.bound.min(node.bound));
            let inc_cost = incumbent.as_ref().map_or(f64::INFINITY, |i| i.cost);
            info!(
                "nodes {} open {} incumbent {:.9} bound {:.9} gap {:.3e}",
                stats.nodes_explored,
                heap.len(),
                inc_cost,
                best_open,
                relative_gap(inc_cost, best_open)
            );
        }

        let forced_on = node.fix.iter().filter(|f| **f == Some(true)).count() as i64;
        if forced_on > model.free_budget() {
            stats.pruned_infeasible += 1;
            continue;
        }
        if !spans_all(model, problem, &node.fix) {
            stats.pruned_disconnected += 1;
            continue;
        }

        let mut lp = base.clone();
        for (p, f) in node.fix.iter().enumerate() {
            if let Some(v) = f {
                let v = if *v { 1.0 } else { 0.0 };
                lp.lower[p] = v;
                lp.upper[p] = v;
            }
        }
        stats.lp_solves += 1;
        let attempt = match &node.warm {
            Some((state, p)) => {
                let v = if node.fix[*p] == Some(true) { 1.0 } else { 0.0 };
                match resolve_fixed(&lp, state, &[(*p, v)]) {
                    Err(Error::Numerical(msg)) => {
                        debug!("warm start failed ({msg}); solving from scratch");
                        solve_lp_warm(&lp)
                    }
                    other => other,
                }
            }
            None => solve_lp_warm(&lp),
        };
        let (outcome, warm) = match attempt {
            Ok(r) => r,
            Err(Error::Numerical(msg)) => {
                warn!("LP at node {} failed ({msg}); branching on the parent bound", stats.nodes_explored);
                stats.lp_failures += 1;
                match node.fix.iter().position(Option::is_none) {
                    Some(p) => {
                        for value in [true, false] {
                            let mut fix = node.fix.clone();
                            fix[p] = Some(value);
                            heap.push(Node { bound: node.bound, id: next_id, depth: node.depth + 1, fix, warm: None });
                            next_id += 1;
                        }
                    }
                    None => {
                        let binaries: Vec<bool> = node.fix.iter().map(|f| *f == Some(true)).collect();
                        let z = model.selection(&binaries);
                        match evaluate_topology(&inc_matrix, &w, &z) {
                            Ok(eval) if model.admits(&z, &eval.x, ADMIT_TOL) => {
                                offer(&mut incumbent, Incumbent { cost: eval.objective, binaries, z, eval }, &mut stats);
                            }
                            Ok(_) | Err(Error::Disconnected | Error::SingularLaplacian) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let sol = match outcome {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible => {
                stats.pruned_infeasible += 1;
                continue;
            }
            LpOutcome::Unbounded => {
                return Err(Error::Numerical("LP relaxation is unbounded despite finite bounds".into()));
            }
        };
        let bound = sol.value.max(node.bound);
        if node.id == 0 {
            stats.root_bound = Some(bound);
        }
        if opts.record_nodes {
            let mut fixings = vec![None; model.n_candidates()];
            for &m in model.fixed_edges() {
                fixings[m] = Some(true);
            }
            for (p, &m) in model.binary_edges().iter().enumerate() {
                fixings[m] = node.fix[p];
            }
            stats.node_log.push(NodeRecord { fixings, lp_bound: sol.value });
        }
        let values = &sol.x[..nb];
        if let Some(binaries) = rounded_selection(model, problem, values, &node.fix) {
            let z = model.selection(&binaries);
            match evaluate_topology(&inc_matrix, &w, &z) {
                Ok(eval) if model.admits(&z, &eval.x, ADMIT_TOL) => {
                    let mut cand = Incumbent { cost: eval.objective, binaries, z, eval };
                    if node.id == 0 {
                        cand = swap_search(model, problem, cand, &node.fix)?;
                    }
                    offer(&mut incumbent, cand, &mut stats);
                }
                Ok(_) | Err(Error::Disconnected | Error::SingularLaplacian) => {}
                Err(e) => return Err(e),
            }
        }
        if let Some(inc) = &incumbent {
            if dominated(bound, &node.fix, inc) {
                stats.pruned_by_bound += 1;
                tied_bound = tied_bound.min(bound);
                continue;
            }
        }

        let fractional = values
            .iter()
            .enumerate()
            .filter(|(p, _)| node.fix[*p].is_none())
            .map(|(p, &v)| (p, (v - v.round()).abs()))
            .filter(|&(_, d)| d > opts.integrality_tol)
            .fold(None, |best: Option<(usize, f64)>, (p, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((p, d)),
            });

        let branch_var = match fractional {
            Some((p, _)) => Some(p),
            None => {
                let binaries: Vec<bool> = values.iter().map(|&v| v > 0.5).collect();
                let z = model.selection(&binaries);
                let mut exact = false;
                match evaluate_topology(&inc_matrix, &w, &z) {
                    Ok(eval) => {
                        exact = eval.objective <= bound + tie_tolerance(bound);
                        offer(&mut incumbent, Incumbent { cost: eval.objective, binaries, z, eval }, &mut stats);
                    }
                    Err(Error::Disconnected | Error::SingularLaplacian) => {}
                    Err(e) => return Err(e),
                }
                let inc = incumbent.as_ref();
                let settled = exact && inc.is_some_and(|i| !may_hold_larger(&node.fix, &i.binaries));
                if settled {
                    None
                } else {
                    node.fix.iter().position(Option::is_none)
                }
            }
        };

        if let Some(p) = branch_var {
            let warm = warm
                .filter(|_| opts.warm_start && heap.len() < opts.warm_start_limit)
                .map(Arc::new);
            for value in [true, false] {
                let mut fix = node.fix.clone();
                fix[p] = Some(value);
                let warm = warm.clone().map(|w| (w, p));
                heap.push(Node { bound, id: next_id, depth: node.depth + 1, fix, warm });
                next_id += 1;
            }
        }
    }

    let inc = incumbent.ok_or(Error::NoFeasibleTopology)?;
    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let lower = open_bound.min(tied_bound);
    stats.final_gap = relative_gap(inc.cost, lower);
    stats.proven_optimal = !limit_hit;
    stats.wall_time_s = start.elapsed().as_secs_f64();
    info!(
        "done: nodes {} lp {} incumbent {:.9} gap {:.3e}",
        stats.nodes_explored, stats.lp_solves, inc.cost, stats.final_gap
    );
    Ok(DesignSolution::new(problem, inc.z, inc.eval, stats))
}

/// Rounds LP scores to a selection honoring `fix`: the highest-scoring
/// lines that join components first, then the best remaining lines up to the
/// budget. `None` when no connected selection fits.
fn rounded_selection(
    model: &MilpModel,
    problem: &DesignProblem,
    scores: &[f64],
    fix: &[Option<bool>],
) -> Option<Vec<bool>> {
    let lines = problem.candidates();
    let budget = usize::try_from(model.free_budget()).ok()?;
    let mut uf = UnionFind::new(problem.n_buses());
    for &m in model.fixed_edges() {
        uf.union(lines[m].from, lines[m].to);
    }
    let mut chosen = vec![false; fix.len()];
    let mut used = 0;
    for (p, &m) in model.binary_edges().iter().enumerate() {
        if fix[p] == Some(true) {
            chosen[p] = true;
            used += 1;
            uf.union(lines[m].from, lines[m].to);
        }
    }
    if used > budget {
        return None;
    }
    let mut order: Vec<usize> = (0..fix.len()).filter(|&p| fix[p].is_none()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    for &p in &order {
        let m = model.binary_edges()[p];
        if used < budget && uf.union(lines[m].from, lines[m].to) {
            chosen[p] = true;
            used += 1;
        }
    }
    if uf.components() > 1 {
        return None;
    }
    for &p in &order {
        if used >= budget {
            break;
        }
        if !chosen[p] {
            chosen[p] = true;
            used += 1;
        }
    }
    Some(chosen)
}

/// First-improvement search over single swaps of unfixed lines.
fn swap_search(
    model: &MilpModel,
    problem: &DesignProblem,
    start: Incumbent,
    fix: &[Option<bool>],
) -> Result<Incumbent> {
    let inc_matrix = problem.incidence();
    let w = problem.reduced_w();
    let mut best = start;
    let free: Vec<usize> = (0..fix.len()).filter(|&p| fix[p].is_none()).collect();
    let mut improved = true;
    while improved {
        improved = false;
        'scan: for &out in &free {
            if !best.binaries[out] {
                continue;
            }
            for &inp in &free {
                if best.binaries[inp] {
                    continue;
                }
                let mut cand = best.binaries.clone();
                cand[out] = false;
                cand[inp] = true;
                let z = model.selection(&cand);
                let eval = match evaluate_topology(&inc_matrix, &w, &z) {
                    Ok(e) if model.admits(&z, &e.x, ADMIT_TOL) => e,
                    Ok(_) | Err(Error::Disconnected | Error::SingularLaplacian) => continue,
                    Err(e) => return Err(e),
                };
                if beats(eval.objective, &cand, best.cost, &best.binaries) {
                    best = Incumbent { cost: eval.objective, binaries: cand, z, eval };
                    improved = true;
                    break 'scan;
                }
            }
        }
    }
    Ok(best)
}

fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    if !incumbent.is_finite() {
        return f64::INFINITY;
    }
    if !bound.is_finite() {
        return if bound > 0.0 { 0.0 } else { f64::INFINITY };
    }
    ((incumbent - bound) / incumbent.abs().max(1e-12)).max(0.0)
}

/// Fixed lines plus every line not forced off must connect the grid.
fn spans_all(model: &MilpModel, problem: &DesignProblem, fix: &[Option<bool>]) -> bool {
    let mut uf = UnionFind::new(problem.n_buses());
    let lines = problem.candidates();
    for &m in model.fixed_edges() {
        uf.union(lines[m].from, lines[m].to);
    }
    for (p, &m) in model.binary_edges().iter().enumerate() {
        if fix[p] != Some(false) {
            uf.union(lines[m].from, lines[m].to);
        }
    }
    uf.components() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::dynamics::{preset_spec, MetricPreset};
    use crate::formulation::{bounds_augment, bounds_radial, build_milp};
    use crate::network::{Line, PowerNetwork};
    use crate::solver::brute_force_design;

    fn pendant_triangle() -> PowerNetwork {
        PowerNetwork::uniform(
            4,
            1.0,
            1.0,
            vec![
                Line::candidate(0, 1, 1.0),
                Line::candidate(0, 2, 1.0),
                Line::candidate(1, 2, 1.0),
                Line::candidate(0, 3, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn radial_matches_oracle_for_every_preset() {
        let net = pendant_triangle();
        for kind in MetricPreset::ALL {
            let p = DesignProblem::radial(&net, preset_spec(kind, &net)).unwrap();
            let model = build_milp(&p, &bounds_radial(&p).unwrap()).unwrap();
            let bnb = branch_and_bound(&model, &p).unwrap();
            let oracle = brute_force_design(&p).unwrap();
            assert_eq!(bnb.z, oracle.z, "{kind}");
            assert!((bnb.objective - oracle.objective).abs() <= 1e-9 * oracle.objective.abs().max(1e-12));
            assert!(bnb.stats.proven_optimal);
            assert!(bnb.stats.final_gap <= 1e-6);
        }
    }

    #[test]
    fn augment_matches_oracle() {
        let net = PowerNetwork::uniform(
            5,
            1.0,
            1.0,
            vec![
                Line::existing(0, 1, 1.0),
                Line::existing(1, 2, 2.0),
                Line::existing(2, 3, 0.5),
                Line::existing(3, 4, 1.5),
                Line::candidate(0, 2, 1.0),
                Line::candidate(1, 3, 1.5),
                Line::candidate(0, 4, 3.0),
                Line::candidate(2, 4, 0.7),
            ],
        )
        .unwrap();
        for extra in 0..=4 {
            let p = DesignProblem::augment_by(&net, preset_spec(MetricPreset::Coherence, &net), extra).unwrap();
            let model = build_milp(&p, &bounds_augment(&p).unwrap()).unwrap();
            let bnb = branch_and_bound(&model, &p).unwrap();
            let oracle = brute_force_design(&p).unwrap();
            assert_eq!(bnb.z, oracle.z, "extra {extra}");
            assert_eq!(bnb.selected.len(), 4 + extra);
        }
    }

    #[test]
    fn bounds_excluding_every_tree_report_no_topology() {
        let net = pendant_triangle();
        let p = DesignProblem::radial(&net, preset_spec(MetricPreset::Coherence, &net)).unwrap();
        // bus 1 sits at least two lines from the reference (bus 3) in every tree
        let mut b = crate::formulation::loose_bounds(&p);
        b.set(1, 1, 0.0, 1.5);
        let model = build_milp(&p, &b).unwrap();
        assert!(matches!(branch_and_bound(&model, &p), Err(Error::NoFeasibleTopology)));
    }

    #[test]
    fn larger_completion_detection() {
        let inc = [true, false, true];
        assert!(may_hold_larger(&[None, None, None], &inc));
        assert!(!may_hold_larger(&[Some(true), Some(false), None], &inc));
        assert!(may_hold_larger(&[Some(true), Some(true), None], &inc));
        assert!(!may_hold_larger(&[Some(false), None, None], &inc));
        assert!(!may_hold_larger(&[None; 3], &[true, true, true]));
    }

    #[test]
    fn heap_order_is_best_bound_then_age() {
        let mut h = BinaryHeap::new();
        for (bound, id) in [(2.0, 0), (1.0, 2), (1.0, 1), (3.0, 3)] {
            h.push(Node { bound, id, depth: 0, fix: vec![], warm: None });
        }
        let order: Vec<u64> = std::iter::from_fn(|| h.pop().map(|n| n.id)).collect();
        assert_eq!(order, vec![1, 2, 0, 3]);
    }

    #[test]
    fn gap_handles_edge_cases() {
        assert_eq!(relative_gap(1.0, f64::INFINITY), 0.0);
        assert_eq!(relative_gap(f64::INFINITY, 0.0), f64::INFINITY);
        assert!((relative_gap(2.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(relative_gap(1.0, 1.5), 0.0);
    }
}
