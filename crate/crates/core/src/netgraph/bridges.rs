use super::Graph;

/// Bridges by Tarjan's low-link DFS, sorted by edge index. Independent of
/// the min-cut enumeration and used to cross-check it.
pub fn bridges_oracle(g: &Graph) -> Vec<usize> {
    let n = g.n_nodes();
    let adj = g.adjacency();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut bridges = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (node, edge used to enter, next neighbor position)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (u, via, ref mut pos)) = stack.last_mut() {
            if *pos < adj[u].len() {
                let (w, m) = adj[u][*pos];
                *pos += 1;
                if m == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, m, 0));
                } else {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        bridges.push(via);
                    }
                }
            }
        }
    }
    bridges.sort_unstable();
    bridges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        assert_eq!(bridges_oracle(&Graph::unit(3, &[(0, 1), (1, 2)])), vec![0, 1]);
        assert!(bridges_oracle(&Graph::unit(3, &[(0, 1), (1, 2), (0, 2)])).is_empty());
        assert_eq!(
            bridges_oracle(&Graph::unit(4, &[(0, 1), (1, 2), (1, 3), (2, 3)])),
            vec![0]
        );
    }
}
