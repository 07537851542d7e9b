use std::fmt::Write as _;

use super::graph::{multi_source_dijkstra, WeightedGraph};
use super::labeling::ComponentLabeling;
use crate::error::{Error, Result};
use crate::par;

/// Pairwise geodesic distances between components and realizing paths.
///
/// Component indices are 0-based. The path of pair `(i, j)`, `i < j`, starts
/// at a node of component `i` and ends at a node of component `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTable {
    count: usize,
    dist: Vec<f64>,
    paths: Vec<Vec<usize>>,
}

#[inline]
fn pair_slot(count: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < count);
    // row-major upper triangle without diagonal
    i * (2 * count - i - 1) / 2 + (j - i - 1)
}

impl GeodesicTable {
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.count + j]
    }

    /// Path of the unordered pair, oriented from `min(i, j)` to `max(i, j)`.
    pub fn path(&self, i: usize, j: usize) -> &[usize] {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        &self.paths[pair_slot(self.count, a, b)]
    }

    /// Iterates `(i, j, path)` over pairs with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &[usize])> + '_ {
        (0..self.count).flat_map(move |i| (i + 1..self.count).map(move |j| (i, j, self.path(i, j))))
    }

    /// Debug dump: `i,j,distance,path_nodes` per unordered pair (1-based ids).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,distance,path_nodes\n");
        for (i, j, path) in self.pairs() {
            let _ = writeln!(
                out,
                "{},{},{:.17e},{}",
                i + 1,
                j + 1,
                self.dist(i, j),
                path.len()
            );
        }
        out
    }
}

/// One multi-source Dijkstra per component, seeded with all its nodes.
///
/// `D_ij` is the distance of the first node of component `j` to settle in the
/// run from `i`; ties settle the smaller node index first.
pub fn pairwise_geodesics(g: &WeightedGraph, c: &ComponentLabeling) -> Result<GeodesicTable> {
    let k = c.count();
    let mut dist = vec![0.0; k * k];
    let mut paths = vec![Vec::new(); k * k.saturating_sub(1) / 2];
    if k < 2 {
        return Ok(GeodesicTable {
            count: k,
            dist,
            paths,
        });
    }

    let runs = par::map_indices(k - 1, |i| {
        let mut first: Vec<Option<(usize, f64)>> = vec![None; k];
        let mut remaining = k - 1 - i;
        let sp = multi_source_dijkstra(g, c.members(i), |node, d| {
            if let Some(comp) = c.component_of(node) {
                if comp > i && first[comp].is_none() {
                    first[comp] = Some((node, d));
                    remaining -= 1;
                }
            }
            remaining == 0
        });
        let found: Vec<_> = ((i + 1)..k)
            .map(|j| first[j].map(|(node, d)| (j, d, sp.path_to(node))))
            .collect();
        found
    });

    for (i, found) in runs.into_iter().enumerate() {
        for (offset, entry) in found.into_iter().enumerate() {
            let j = i + 1 + offset;
            let (_, d, path) = entry.ok_or(Error::Unreachable { from: i, to: j })?;
            dist[i * k + j] = d;
            dist[j * k + i] = d;
            paths[pair_slot(k, i, j)] = path;
        }
    }
    Ok(GeodesicTable {
        count: k,
        dist,
        paths,
    })
}
