use std::collections::{BTreeSet, VecDeque};

use super::Graph;
use crate::error::{Error, Result};

/// Weight increment applied to edges already known to be critical.
const EPSILON: f64 = 0.5;

/// A bridge of the candidate graph and the two components it separates.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalEdge {
    pub edge: usize,
    pub u: usize,
    pub v: usize,
    /// Component containing `u` once the edge is removed.
    pub u_side: Vec<usize>,
    /// Component containing `v` once the edge is removed.
    pub v_side: Vec<usize>,
}

impl CriticalEdge {
    /// Orients the split around `reference`:
    /// `(near endpoint, far endpoint, near side, far side)`.
    pub fn split_for(&self, reference: usize) -> (usize, usize, &[usize], &[usize]) {
        if self.u_side.contains(&reference) {
            (self.u, self.v, &self.u_side, &self.v_side)
        } else {
            (self.v, self.u, &self.v_side, &self.u_side)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutsetReport {
    /// Size-1 cutsets, sorted by edge index.
    pub critical: Vec<CriticalEdge>,
    /// Size-2 cutsets with no critical member, as sorted index pairs.
    pub pairs: Vec<(usize, usize)>,
}

impl CutsetReport {
    pub fn critical_edges(&self) -> Vec<usize> {
        self.critical.iter().map(|c| c.edge).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinCut {
    pub value: f64,
    /// Membership of each node in the source side.
    pub source_side: Vec<bool>,
    /// Edges with positive weight crossing the cut.
    pub edges: Vec<usize>,
}

/// Edmonds-Karp max flow on an undirected graph with dense capacities.
/// Returns the flow value and the residual-reachable set of `s`.
fn max_flow(cap: &[Vec<f64>], s: usize, t: usize) -> (f64, Vec<bool>) {
    let n = cap.len();
    let mut residual = cap.to_vec();
    let mut flow = 0.0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for w in 0..n {
                if prev[w] == usize::MAX && residual[u][w] > 1e-12 {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            let side = prev.iter().map(|&p| p != usize::MAX).collect();
            return (flow, side);
        }
        let mut push = f64::INFINITY;
        let mut w = t;
        while w != s {
            let u = prev[w];
            push = push.min(residual[u][w]);
            w = u;
        }
        let mut w = t;
        while w != s {
            let u = prev[w];
            residual[u][w] -= push;
            residual[w][u] += push;
            w = u;
        }
        flow += push;
    }
}

/// Global minimum cut with per-edge weights, found as the best `0`-`t`
/// max-flow cut over all sinks `t`. Returns `None` for single-node graphs.
pub fn global_min_cut(g: &Graph, weights: &[f64]) -> Option<MinCut> {
    let n = g.n_nodes();
    if n < 2 {
        return None;
    }
    let mut cap = vec![vec![0.0; n]; n];
    for (e, &w) in g.edges().iter().zip(weights) {
        cap[e.u][e.v] += w;
        cap[e.v][e.u] += w;
    }
    let mut best: Option<(f64, Vec<bool>)> = None;
    for t in 1..n {
        let (value, side) = max_flow(&cap, 0, t);
        if best.as_ref().is_none_or(|(b, _)| value < b - 1e-12) {
            best = Some((value, side));
        }
    }
    let (value, source_side) = best?;
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(m, e)| weights[*m] > 0.0 && source_side[e.u] != source_side[e.v])
        .map(|(m, _)| m)
        .collect();
    Some(MinCut {
        value,
        source_side,
        edges,
    })
}

/// Repeatedly extracts min cuts of value one (a single unit edge), raising
/// each found edge to `1 + EPSILON` so the next round finds a new one.
fn peel_unit_cuts(g: &Graph, weights: &mut [f64]) -> Vec<usize> {
    let mut found = Vec::new();
    while let Some(cut) = global_min_cut(g, weights) {
        if cut.value >= 1.0 + EPSILON / 2.0 {
            break;
        }
        debug_assert_eq!(cut.edges.len(), 1);
        let e = cut.edges[0];
        found.push(e);
        weights[e] = 1.0 + EPSILON;
    }
    found
}

/// Enumerates all size-1 cutsets (critical edges) and all size-2 cutsets
/// without critical members, using min cuts on unit weights.
///
/// Pairs are found edge by edge: with edge `a` removed and the known
/// critical edges weighted `2 + EPSILON`, every remaining unit cut `b`
/// yields the pair `{a, b}`.
pub fn enumerate_critical_edges(g: &Graph) -> Result<CutsetReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let m = g.edges().len();
    let mut weights = vec![1.0; m];
    let mut critical_ids = peel_unit_cuts(g, &mut weights);
    critical_ids.sort_unstable();

    let mut pairs = BTreeSet::new();
    for a in 0..m {
        if critical_ids.binary_search(&a).is_ok() {
            continue;
        }
        let mut w: Vec<f64> = (0..m)
            .map(|e| {
                if critical_ids.binary_search(&e).is_ok() {
                    2.0 + EPSILON
                } else {
                    1.0
                }
            })
            .collect();
        w[a] = 0.0;
        for b in peel_unit_cuts(g, &mut w) {
            pairs.insert((a.min(b), a.max(b)));
        }
    }

    let critical = critical_ids
        .into_iter()
        .map(|edge| {
            let e = g.edges()[edge];
            let reach = g.reachable_without(e.u, &[edge]);
            let (u_side, v_side): (Vec<usize>, Vec<usize>) =
                (0..g.n_nodes()).partition(|&k| reach[k]);
            CriticalEdge {
                edge,
                u: e.u,
                v: e.v,
                u_side,
                v_side,
            }
        })
        .collect();
    Ok(CutsetReport {
        critical,
        pairs: pairs.into_iter().collect(),
    })
}
