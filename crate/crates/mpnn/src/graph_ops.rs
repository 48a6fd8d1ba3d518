use ndarray::Array2;

/// Preprocessed message-passing operators for a node set and edge list.
///
/// Directed edges are symmetrized. The GCN operator is the symmetrically
/// normalized adjacency with self-loops; the SAGE operator is the
/// row-normalized neighbor mean without self-loops.
pub struct GraphOps {
    n: usize,
    /// rows of D^{-1/2} (A + I) D^{-1/2}
    norm_rows: Vec<Vec<(usize, f64)>>,
    /// undirected neighbor lists, no self-loops
    neighbors: Vec<Vec<usize>>,
}

impl GraphOps {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(s, d) in edges {
            assert!(s < n && d < n, "edge endpoint out of range");
            if s == d {
                continue;
            }
            neighbors[s].push(d);
            neighbors[d].push(s);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }

        let degree_hat: Vec<f64> = neighbors.iter().map(|l| l.len() as f64 + 1.0).collect();
        let norm_rows = (0..n)
            .map(|v| {
                let mut row = Vec::with_capacity(neighbors[v].len() + 1);
                row.push((v, 1.0 / degree_hat[v]));
                for &u in &neighbors[v] {
                    row.push((u, 1.0 / (degree_hat[v] * degree_hat[u]).sqrt()));
                }
                row
            })
            .collect();

        Self {
            n,
            norm_rows,
            neighbors,
        }
    }

    pub fn from_graph(graph: &tagbench_core::TextAttributedGraph) -> Self {
        Self::from_edges(graph.node_count(), graph.edges())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// `(A_hat X)` with the normalized GCN adjacency (symmetric operator).
    pub fn apply_norm(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::<f64>::zeros(x.raw_dim());
        for (v, row) in self.norm_rows.iter().enumerate() {
            for &(u, w) in row {
                for c in 0..x.ncols() {
                    out[(v, c)] += w * x[(u, c)];
                }
            }
        }
        out
    }

    /// `(M X)` where row v of M averages v's neighbors (zero when isolated).
    pub fn apply_mean(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::<f64>::zeros(x.raw_dim());
        for (v, list) in self.neighbors.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let inv = 1.0 / list.len() as f64;
            for &u in list {
                for c in 0..x.ncols() {
                    out[(v, c)] += inv * x[(u, c)];
                }
            }
        }
        out
    }

    /// `(M^T Y)`: the adjoint of the neighbor mean, needed by backprop.
    pub fn apply_mean_transpose(&self, y: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::<f64>::zeros(y.raw_dim());
        for (v, list) in self.neighbors.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let inv = 1.0 / list.len() as f64;
            for &u in list {
                for c in 0..y.ncols() {
                    out[(u, c)] += inv * y[(v, c)];
                }
            }
        }
        out
    }

    /// Dense `A_hat` for oracle comparisons in tests.
    pub fn dense_norm_adjacency(&self) -> Array2<f64> {
        let mut a = Array2::<f64>::zeros((self.n, self.n));
        for (v, row) in self.norm_rows.iter().enumerate() {
            for &(u, w) in row {
                a[(v, u)] = w;
            }
        }
        a
    }

    /// Dense mean-aggregation matrix for oracle comparisons in tests.
    pub fn dense_mean_matrix(&self) -> Array2<f64> {
        let mut m = Array2::<f64>::zeros((self.n, self.n));
        for (v, list) in self.neighbors.iter().enumerate() {
            for &u in list {
                m[(v, u)] = 1.0 / list.len() as f64;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn isolated_node_self_loop_weight_is_one() {
        let ops = GraphOps::from_edges(1, &[]);
        let x = array![[2.0, -1.0]];
        assert_eq!(ops.apply_norm(&x), x);
        assert_eq!(ops.apply_mean(&x), Array2::<f64>::zeros((1, 2)));
    }

    #[test]
    fn mean_transpose_is_the_adjoint() {
        // <Mx, y> == <x, M^T y> on a small graph
        let ops = GraphOps::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let x = array![[1.0], [2.0], [3.0], [4.0]];
        let y = array![[0.5], [-1.0], [2.0], [1.5]];
        let mx = ops.apply_mean(&x);
        let mty = ops.apply_mean_transpose(&y);
        let lhs: f64 = mx.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(mty.iter()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn norm_rows_match_dense_on_a_ring() {
        let ops = GraphOps::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let x = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.5]];
        let dense = ops.dense_norm_adjacency().dot(&x);
        let sparse = ops.apply_norm(&x);
        for (a, b) in dense.iter().zip(sparse.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        // 2-regular ring: every entry of A_hat rows is 1/3
        for v in 0..4 {
            let row = ops.dense_norm_adjacency();
            assert!((row[(v, v)] - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}
