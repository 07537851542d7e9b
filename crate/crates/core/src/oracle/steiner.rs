//! Euclidean Steiner trees for up to four terminals.

use std::f64::consts::FRAC_PI_3;

use super::contour::Point;
use crate::error::{Error, Result};

/// Largest terminal count solved exactly.
pub const MAX_TERMINALS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerResult {
    pub length: f64,
    pub edges: Vec<(Point, Point)>,
    /// Set when the tree is only an upper bound (MST fallback).
    pub upper_bound: bool,
}

impl SteinerResult {
    fn from_edges(edges: Vec<(Point, Point)>, upper_bound: bool) -> Self {
        let edges: Vec<_> = edges.into_iter().filter(|(a, b)| a != b).collect();
        SteinerResult {
            length: edges.iter().map(|&(a, b)| dist(a, b)).sum(),
            edges,
            upper_bound,
        }
    }
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    (b.0 - a.0).hypot(b.1 - a.1)
}

fn angle_at(p: Point, a: Point, b: Point) -> f64 {
    let (ux, uy) = (a.0 - p.0, a.1 - p.1);
    let (vx, vy) = (b.0 - p.0, b.1 - p.1);
    let cross = ux * vy - uy * vx;
    let dot = ux * vx + uy * vy;
    cross.abs().atan2(dot)
}

/// Point minimizing the summed distance to `a`, `b`, `c`.
///
/// If some triangle angle is at least 120° that vertex is optimal; otherwise
/// the first isogonic center, with barycentric weights `side · csc(angle + 60°)`.
pub fn fermat_point(a: Point, b: Point, c: Point) -> Point {
    if a == b || a == c {
        return a;
    }
    if b == c {
        return b;
    }
    let angles = [angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)];
    let pts = [a, b, c];
    for (k, &ang) in angles.iter().enumerate() {
        if ang >= 2.0 * FRAC_PI_3 {
            return pts[k];
        }
    }
    let sides = [dist(b, c), dist(c, a), dist(a, b)];
    let w: Vec<f64> = (0..3)
        .map(|k| sides[k] / (angles[k] + FRAC_PI_3).sin())
        .collect();
    let total: f64 = w.iter().sum();
    (
        (w[0] * a.0 + w[1] * b.0 + w[2] * c.0) / total,
        (w[0] * a.1 + w[1] * b.1 + w[2] * c.1) / total,
    )
}

/// Minimum spanning tree (Prim); an upper bound for the Steiner length.
pub fn mst(terminals: &[Point]) -> SteinerResult {
    let n = terminals.len();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return SteinerResult::from_edges(edges, true);
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    in_tree[0] = true;
    for k in 1..n {
        best[k] = (dist(terminals[0], terminals[k]), 0);
    }
    for _ in 1..n {
        let (next, &(_, from)) = best
            .iter()
            .enumerate()
            .filter(|(k, _)| !in_tree[*k])
            .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .expect("nodes remain");
        in_tree[next] = true;
        edges.push((terminals[from], terminals[next]));
        for k in 0..n {
            if !in_tree[k] {
                let d = dist(terminals[next], terminals[k]);
                if d < best[k].0 {
                    best[k] = (d, next);
                }
            }
        }
    }
    SteinerResult::from_edges(edges, true)
}

fn tree3(a: Point, b: Point, c: Point) -> Vec<(Point, Point)> {
    let f = fermat_point(a, b, c);
    vec![(a, f), (b, f), (c, f)]
}

/// Full topology `{a, b} – {c, d}` with two Steiner points, minimized by
/// alternating exact Fermat-point updates (the objective is convex).
fn full_topology(a: Point, b: Point, c: Point, d: Point) -> Vec<(Point, Point)> {
    let cx = (a.0 + b.0 + c.0 + d.0) / 4.0;
    let cy = (a.1 + b.1 + c.1 + d.1) / 4.0;
    let mut s1 = ((a.0 + b.0 + cx) / 3.0, (a.1 + b.1 + cy) / 3.0);
    let mut s2 = ((c.0 + d.0 + cx) / 3.0, (c.1 + d.1 + cy) / 3.0);
    let scale = dist(a, b) + dist(b, c) + dist(c, d) + dist(d, a);
    let objective =
        |s1: Point, s2: Point| dist(a, s1) + dist(b, s1) + dist(s1, s2) + dist(c, s2) + dist(d, s2);
    let mut prev = objective(s1, s2);
    for _ in 0..20_000 {
        s1 = fermat_point(a, b, s2);
        s2 = fermat_point(c, d, s1);
        let cur = objective(s1, s2);
        if prev - cur <= 1e-16 * scale {
            break;
        }
        prev = cur;
    }
    vec![(a, s1), (b, s1), (s1, s2), (c, s2), (d, s2)]
}

/// Shortest tree connecting 1 to 4 terminals.
pub fn steiner_length(terminals: &[Point]) -> Result<SteinerResult> {
    let t = terminals;
    let candidates: Vec<Vec<(Point, Point)>> = match t.len() {
        1 => vec![vec![]],
        2 => vec![vec![(t[0], t[1])]],
        3 => vec![tree3(t[0], t[1], t[2])],
        4 => {
            let mut c = vec![mst(t).edges];
            // one Steiner point on a triple, the fourth terminal hung on a terminal
            for skip in 0..4 {
                let tri: Vec<Point> = (0..4).filter(|&k| k != skip).map(|k| t[k]).collect();
                let base = tree3(tri[0], tri[1], tri[2]);
                for &anchor in &tri {
                    let mut e = base.clone();
                    e.push((anchor, t[skip]));
                    c.push(e);
                }
            }
            for (p, q, r, s) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
                c.push(full_topology(t[p], t[q], t[r], t[s]));
            }
            c
        }
        n => {
            return Err(Error::UnsupportedCardinality {
                count: n,
                max: MAX_TERMINALS,
            })
        }
    };
    Ok(candidates
        .into_iter()
        .map(|e| SteinerResult::from_edges(e, false))
        .min_by(|x, y| x.length.total_cmp(&y.length))
        .expect("at least one candidate"))
}

/// Exact tree for up to four terminals, MST upper bound beyond.
pub fn steiner_or_mst(terminals: &[Point]) -> SteinerResult {
    if terminals.len() > MAX_TERMINALS {
        mst(terminals)
    } else if terminals.is_empty() {
        SteinerResult::from_edges(vec![], false)
    } else {
        steiner_length(terminals).expect("cardinality checked")
    }
}
