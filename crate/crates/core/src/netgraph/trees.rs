use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;

use super::{Graph, ReducedIndex, UnionFind};
use crate::error::{Error, Result};
use crate::network::Line;

#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree {
    /// Edge indices in the order Kruskal accepted them.
    pub edges: Vec<usize>,
    pub weight: f64,
}

/// Maximum-weight spanning tree via Kruskal on negated weights.
///
/// Equal weights are taken in increasing edge index order.
pub fn max_spanning_tree(g: &Graph) -> Result<SpanningTree> {
    let mut order: Vec<usize> = (0..g.edges().len()).collect();
    // stable sort keeps lower indices first among ties
    order.sort_by(|&a, &b| g.edges()[b].weight.total_cmp(&g.edges()[a].weight));
    let mut uf = UnionFind::new(g.n_nodes());
    let mut edges = Vec::with_capacity(g.n_nodes().saturating_sub(1));
    let mut weight = 0.0;
    for m in order {
        let e = g.edges()[m];
        if uf.union(e.u, e.v) {
            edges.push(m);
            weight += e.weight;
        }
    }
    if uf.components() > 1 {
        return Err(Error::Disconnected);
    }
    Ok(SpanningTree { edges, weight })
}

pub fn max_spanning_tree_weight(g: &Graph) -> Result<f64> {
    max_spanning_tree(g).map(|t| t.weight)
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra distances to `reference`; entry `reference` is zero.
pub fn shortest_path_weights(g: &Graph, reference: usize) -> Result<Vec<f64>> {
    let adj = g.adjacency();
    let mut dist = vec![f64::INFINITY; g.n_nodes()];
    let mut heap = BinaryHeap::new();
    dist[reference] = 0.0;
    heap.push(Frontier {
        dist: 0.0,
        node: reference,
    });
    while let Some(Frontier { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, m) in &adj[node] {
            let cand = d + g.edges()[m].weight;
            if cand < dist[next] {
                dist[next] = cand;
                heap.push(Frontier {
                    dist: cand,
                    node: next,
                });
            }
        }
    }
    if let Some(bus) = dist.iter().position(|d| d.is_infinite()) {
        return Err(Error::Unreachable(bus));
    }
    Ok(dist)
}

/// Inverse of a tree's reduced Laplacian from path sums: entry `(i, j)` is
/// the total reactance shared by the paths from `i` and `j` to the
/// reference.
pub fn radial_inverse_by_paths(n: usize, tree: &[Line], reference: usize) -> Result<DMatrix<f64>> {
    if tree.len() + 1 != n {
        return Err(Error::NotRadial(format!(
            "{} lines cannot span {n} buses as a tree",
            tree.len()
        )));
    }
    let g = Graph::inverse_weighted(n, tree);
    if !g.is_connected() {
        return Err(Error::NotRadial("lines do not span all buses".into()));
    }
    let adj = g.adjacency();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut dist = vec![0.0; n];
    let mut order = vec![reference];
    parent[reference] = reference;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &(w, m) in &adj[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                depth[w] = depth[u] + 1;
                dist[w] = dist[u] + g.edges()[m].weight;
                order.push(w);
            }
        }
    }

    let lca = |mut a: usize, mut b: usize| {
        while depth[a] > depth[b] {
            a = parent[a];
        }
        while depth[b] > depth[a] {
            b = parent[b];
        }
        while a != b {
            a = parent[a];
            b = parent[b];
        }
        a
    };

    let idx = ReducedIndex::new(n, reference);
    let dim = idx.dim();
    let mut x = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for q in r..dim {
            let v = dist[lca(idx.bus(r), idx.bus(q))];
            x[(r, q)] = v;
            x[(q, r)] = v;
        }
    }
    Ok(x)
}
