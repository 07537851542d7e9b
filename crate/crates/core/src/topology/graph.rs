use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::profile::{weight_profile, ProfileParams};
use crate::grid::{Grid2D, ScalarField};

/// Predecessor marker for source and unreached nodes.
pub const NO_PRED: usize = usize::MAX;

/// 8-connected grid graph with node weights `F(u)`.
///
/// The weight of edge `(a, b)` is its Euclidean length times the mean of the
/// two node weights, a first-order quadrature of `∫ F dH¹` along the edge.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    grid: Grid2D,
    node_weight: Vec<f64>,
}

impl WeightedGraph {
    /// Graph over arbitrary non-negative node weights.
    pub fn from_node_weights(grid: Grid2D, node_weight: Vec<f64>) -> Self {
        assert_eq!(node_weight.len(), grid.len());
        debug_assert!(node_weight.iter().all(|&w| w >= 0.0));
        WeightedGraph { grid, node_weight }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weight
    }

    #[inline]
    pub fn edge_weight(&self, a: usize, b: usize, len: f64) -> f64 {
        len * (self.node_weight[a] + self.node_weight[b]) * 0.5
    }

    /// Neighbors of `a` with edge weights.
    pub fn edges(&self, a: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.grid
            .neighbors8(a)
            .map(move |(b, len)| (b, self.edge_weight(a, b, len)))
    }
}

pub fn build_weighted_graph(u: &ScalarField, p: &ProfileParams) -> WeightedGraph {
    WeightedGraph {
        grid: *u.grid(),
        node_weight: u.values().iter().map(|&s| weight_profile(s, p)).collect(),
    }
}

/// Result of a multi-source Dijkstra run. Unreached nodes hold `+∞`.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
}

impl ShortestPaths {
    /// Node path from a source to `target`, source first.
    pub fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = vec![target];
        let mut n = target;
        while self.pred[n] != NO_PRED {
            n = self.pred[n];
            path.push(n);
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on (dist, node): equal distances settle the smaller index first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra seeded with every node of `sources` at distance 0.
///
/// Nodes settle in `(distance, index)` order. `on_settle(node)` is called as
/// each node settles; returning `true` stops the search early.
pub fn multi_source_dijkstra(
    graph: &WeightedGraph,
    sources: &[usize],
    mut on_settle: impl FnMut(usize, f64) -> bool,
) -> ShortestPaths {
    let n = graph.grid.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::with_capacity(sources.len() * 2);
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Entry { dist: 0.0, node: s });
    }
    while let Some(Entry { dist: d, node: a }) = heap.pop() {
        if settled[a] || d > dist[a] {
            continue;
        }
        settled[a] = true;
        if on_settle(a, d) {
            break;
        }
        for (b, w) in graph.edges(a) {
            if settled[b] {
                continue;
            }
            let nd = d + w;
            if nd < dist[b] {
                dist[b] = nd;
                pred[b] = a;
                heap.push(Entry { dist: nd, node: b });
            }
        }
    }
    ShortestPaths { dist, pred }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_weights_from_profile() {
        let p = ProfileParams::new(0.35).unwrap();
        let g = Grid2D::square(11).unwrap();
        let ones = build_weighted_graph(&ScalarField::constant(g, 1.0), &p);
        assert!((0..g.len()).all(|a| ones.edges(a).all(|(_, w)| w == 0.0)));

        let zeros = build_weighted_graph(&ScalarField::zeros(g), &p);
        let a = g.index(4, 4);
        for (b, w) in zeros.edges(a) {
            let (i, j) = g.coords(b);
            let expect = if i != 4 && j != 4 {
                std::f64::consts::SQRT_2 * g.hx() * 0.21125
            } else {
                g.hx() * 0.21125
            };
            assert!((w - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn straight_line_distance() {
        let g = Grid2D::new(21, 5).unwrap();
        let graph = WeightedGraph::from_node_weights(g, vec![1.0; g.len()]);
        let sp = multi_source_dijkstra(&graph, &[g.index(0, 2)], |_, _| false);
        assert!((sp.dist[g.index(20, 2)] - 1.0).abs() < 1e-12);
        let path = sp.path_to(g.index(20, 2));
        assert_eq!(path.len(), 21);
        assert_eq!(path[0], g.index(0, 2));
    }

    #[test]
    fn early_stop() {
        let g = Grid2D::square(30).unwrap();
        let graph = WeightedGraph::from_node_weights(g, vec![1.0; g.len()]);
        let mut seen = 0;
        let sp = multi_source_dijkstra(&graph, &[0], |_, _| {
            seen += 1;
            seen == 5
        });
        assert_eq!(seen, 5);
        assert!(sp.dist.iter().filter(|d| d.is_finite()).count() < g.len());
    }
}
