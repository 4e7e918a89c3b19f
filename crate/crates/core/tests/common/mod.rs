#![allow(dead_code)]

use gridcoh::solver::evaluate_topology;
use gridcoh::{Bus, DesignProblem, Line, PowerNetwork};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn susceptance(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.5..5.0)
}

/// Random spanning tree over `0..n` as unordered pairs.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    (1..n)
        .map(|k| {
            let parent = order[rng.random_range(0..k)];
            let child = order[k];
            (parent.min(child), parent.max(child))
        })
        .collect()
}

/// Up to `extra` distinct pairs over `0..n` absent from `taken`.
pub fn random_extra_pairs(
    rng: &mut ChaCha8Rng,
    n: usize,
    taken: &[(usize, usize)],
    extra: usize,
) -> Vec<(usize, usize)> {
    let mut free: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|p| !taken.contains(p))
        .collect();
    free.shuffle(rng);
    free.truncate(extra);
    free
}

/// Random connected graph with `n` nodes and roughly `n - 1 + extra` edges.
pub fn random_connected_pairs(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<(usize, usize)> {
    let mut pairs = random_tree(rng, n);
    let more = random_extra_pairs(rng, n, &pairs, extra);
    pairs.extend(more);
    pairs
}

pub fn uniform_network(rng: &mut ChaCha8Rng, n: usize, lines: Vec<Line>) -> PowerNetwork {
    let d = rng.random_range(0.1..1.0);
    let buses = (0..n)
        .map(|id| Bus { id, inertia: rng.random_range(0.5..2.0), damping: d })
        .collect();
    PowerNetwork::new(buses, lines, 0).unwrap()
}

/// Existing random spanning tree plus candidate lines, at most
/// `max_lines` lines overall.
pub fn augment_instance(rng: &mut ChaCha8Rng, n: usize, max_lines: usize) -> PowerNetwork {
    let tree = random_tree(rng, n);
    let room = max_lines.saturating_sub(tree.len());
    let extra_count = rng.random_range(1..=room.max(1));
    let extra = random_extra_pairs(rng, n, &tree, extra_count);
    let mut lines: Vec<Line> = tree.iter().map(|&(a, b)| Line::existing(a, b, susceptance(rng))).collect();
    lines.extend(extra.iter().map(|&(a, b)| Line::candidate(a, b, susceptance(rng))));
    uniform_network(rng, n, lines)
}

/// Candidate graph whose bus 0 hangs off a single line, at most
/// `max_lines` lines overall.
pub fn radial_instance(rng: &mut ChaCha8Rng, n: usize, max_lines: usize) -> PowerNetwork {
    let core: Vec<(usize, usize)> = {
        let inner = n - 1;
        let tree = random_tree(rng, inner);
        let room = max_lines.saturating_sub(n - 1);
        let extra_count = rng.random_range(0..=room.min(inner * (inner - 1) / 2 - tree.len()));
        let mut pairs = tree;
        let more = random_extra_pairs(rng, inner, &pairs, extra_count);
        pairs.extend(more);
        pairs.into_iter().map(|(a, b)| (a + 1, b + 1)).collect()
    };
    let hub = rng.random_range(1..n);
    let mut lines = vec![Line::candidate(0, hub, susceptance(rng))];
    lines.extend(core.iter().map(|&(a, b)| Line::candidate(a, b, susceptance(rng))));
    uniform_network(rng, n, lines)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Costs agree within `tol` relative, with an absolute floor for zero costs.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) + 1e-14
}

/// Every budget-feasible connected selection of `problem` with its
/// topology cost, fixed lines always on.
pub fn feasible_selections(problem: &DesignProblem) -> Vec<(Vec<bool>, f64)> {
    let inc = problem.incidence();
    let w = problem.reduced_w();
    let free = problem.free_edges();
    let extra = problem.budget() - problem.fixed().len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        if mask.count_ones() as usize > extra {
            continue;
        }
        let mut z = problem.base_selection();
        for (bit, &m) in free.iter().enumerate() {
            z[m] = mask >> bit & 1 == 1;
        }
        if let Ok(eval) = evaluate_topology(&inc, &w, &z) {
            out.push((z, eval.objective));
        }
    }
    out
}

pub fn selected(z: &[bool]) -> Vec<usize> {
    z.iter().enumerate().filter(|(_, &on)| on).map(|(m, _)| m).collect()
}
