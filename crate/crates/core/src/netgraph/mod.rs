//! Graph representation, Laplacian algebra and the graph algorithms behind
//! the McCormick variable bounds.

mod bridges;
mod cutset;
mod laplacian;
mod trees;

pub use bridges::bridges_oracle;
pub use cutset::{enumerate_critical_edges, global_min_cut, CriticalEdge, CutsetReport, MinCut};
pub use laplacian::{build_laplacian, remove_row_col, EdgeIncidence, LaplacianMatrix, ReducedIndex};
pub use trees::{
    max_spanning_tree, max_spanning_tree_weight, radial_inverse_by_paths, shortest_path_weights,
    SpanningTree,
};

use crate::network::Line;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected simple graph on nodes `0..n` with one weight per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<WeightedEdge>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<WeightedEdge>) -> Self {
        debug_assert!(edges.iter().all(|e| e.u < n && e.v < n && e.u != e.v));
        Self { n, edges }
    }

    /// Unit-weight graph from node pairs.
    pub fn unit(n: usize, pairs: &[(usize, usize)]) -> Self {
        let edges = pairs
            .iter()
            .map(|&(u, v)| WeightedEdge { u, v, weight: 1.0 })
            .collect();
        Self::new(n, edges)
    }

    /// Graph weighted by susceptance.
    pub fn from_lines(n: usize, lines: &[Line]) -> Self {
        let edges = lines
            .iter()
            .map(|l| WeightedEdge {
                u: l.from,
                v: l.to,
                weight: l.susceptance,
            })
            .collect();
        Self::new(n, edges)
    }

    /// Graph weighted by inverse susceptance `x = 1/b`.
    pub fn inverse_weighted(n: usize, lines: &[Line]) -> Self {
        let edges = lines
            .iter()
            .map(|l| WeightedEdge {
                u: l.from,
                v: l.to,
                weight: l.reactance(),
            })
            .collect();
        Self::new(n, edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.u == node || e.v == node)
            .count()
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_without(&[])
    }

    /// Connectivity after deleting the listed edge indices.
    pub fn is_connected_without(&self, removed: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.n);
        for (m, e) in self.edges.iter().enumerate() {
            if !removed.contains(&m) {
                uf.union(e.u, e.v);
            }
        }
        uf.components() <= 1
    }

    /// Nodes reachable from `start` when the listed edges are deleted.
    pub fn reachable_without(&self, start: usize, removed: &[usize]) -> Vec<bool> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &(w, m) in &adj[u] {
                if !seen[w] && !removed.contains(&m) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Neighbor lists as `(neighbor, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (m, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, m));
            adj[e.v].push((e.u, m));
        }
        adj
    }
}

/// True iff the lines join all `n` buses into one component.
pub fn is_connected<'a>(lines: impl IntoIterator<Item = &'a Line>, n: usize) -> bool {
    let mut uf = UnionFind::new(n);
    for l in lines {
        uf.union(l.from, l.to);
    }
    uf.components() <= 1
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}
