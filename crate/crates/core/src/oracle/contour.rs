//! Marching squares at level 1/2 on a nodal 0/1 field.
//!
//! The mask is framed by one ring of ghost nodes (all `false` unless a
//! `true` frame is requested), so contours always close. Crossings sit at edge
//! midpoints. Saddle cells keep their two `true` corners apart, which matches
//! the 4-adjacency used for component labeling.
//!
//! Midpoint crossings trace 45° chamfers, which overstate curve length by
//! about 5.5% on average over directions. Two rounds of (1/4, 1/2, 1/4)
//! vertex averaging remove most of that: circles of radius 0.1 to 0.35 on a
//! 152² grid come out within 1%.

use std::collections::HashMap;

use crate::grid::BinaryMask;

pub type Point = (f64, f64);

/// Closed polylines; the closing segment from last to first point is implied.
#[derive(Debug, Clone, Default)]
pub struct ContourSet {
    pub polylines: Vec<Vec<Point>>,
}

impl ContourSet {
    pub fn length(&self) -> f64 {
        self.polylines.iter().map(|p| closed_length(p)).sum()
    }

    /// Closed segments of every polyline.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.polylines
            .iter()
            .flat_map(|p| (0..p.len()).map(move |k| (p[k], p[(k + 1) % p.len()])))
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.polylines.iter().flatten().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }
}

fn closed_length(p: &[Point]) -> f64 {
    (0..p.len())
        .map(|k| {
            let (a, b) = (p[k], p[(k + 1) % p.len()]);
            (b.0 - a.0).hypot(b.1 - a.1)
        })
        .sum()
}

/// Crossing point identity: the grid edge it lies on, in padded coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    /// Between `(i, j)` and `(i+1, j)`.
    H(usize, usize),
    /// Between `(i, j)` and `(i, j+1)`.
    V(usize, usize),
}

const SMOOTHING_ROUNDS: usize = 2;

fn smooth(mut p: Vec<Point>, rounds: usize) -> Vec<Point> {
    let n = p.len();
    for _ in 0..rounds {
        p = (0..n)
            .map(|k| {
                let (a, b, c) = (p[(k + n - 1) % n], p[k], p[(k + 1) % n]);
                (
                    0.25 * (a.0 + c.0) + 0.5 * b.0,
                    0.25 * (a.1 + c.1) + 0.5 * b.1,
                )
            })
            .collect();
    }
    p
}

/// Extracts the level-1/2 contours of `mask`, framed by `frame`.
pub fn extract_contours(mask: &BinaryMask, frame: bool) -> ContourSet {
    let g = *mask.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (hx, hy) = (g.hx(), g.hy());
    // padded coordinates: node (i, j) of the mask sits at (i+1, j+1)
    let bit = |pi: usize, pj: usize| -> bool {
        if pi == 0 || pj == 0 || pi > nx || pj > ny {
            frame
        } else {
            mask.get(pi - 1, pj - 1)
        }
    };
    let pos = |e: EdgeId| -> Point {
        let (x, y) = match e {
            EdgeId::H(i, j) => (i as f64 + 0.5, j as f64),
            EdgeId::V(i, j) => (i as f64, j as f64 + 0.5),
        };
        ((x - 1.0) * hx, (y - 1.0) * hy)
    };

    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for pj in 0..=ny {
        for pi in 0..=nx {
            let b0 = bit(pi, pj);
            let b1 = bit(pi + 1, pj);
            let b2 = bit(pi + 1, pj + 1);
            let b3 = bit(pi, pj + 1);
            let bottom = EdgeId::H(pi, pj);
            let right = EdgeId::V(pi + 1, pj);
            let top = EdgeId::H(pi, pj + 1);
            let left = EdgeId::V(pi, pj);
            match (b0, b1, b2, b3) {
                (true, false, true, false) => {
                    segments.push((bottom, left));
                    segments.push((top, right));
                }
                (false, true, false, true) => {
                    segments.push((bottom, right));
                    segments.push((top, left));
                }
                _ => {
                    let mut crossing = Vec::with_capacity(2);
                    if b0 != b1 {
                        crossing.push(bottom);
                    }
                    if b1 != b2 {
                        crossing.push(right);
                    }
                    if b2 != b3 {
                        crossing.push(top);
                    }
                    if b3 != b0 {
                        crossing.push(left);
                    }
                    if let [a, b] = crossing[..] {
                        segments.push((a, b));
                    }
                }
            }
        }
    }

    let mut adjacency: HashMap<EdgeId, Vec<usize>> = HashMap::with_capacity(segments.len() * 2);
    for (s, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(s);
        adjacency.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, mut current) = segments[start];
        let mut line = vec![pos(first)];
        while current != first {
            line.push(pos(current));
            let next = adjacency[&current]
                .iter()
                .copied()
                .find(|&s| !used[s])
                .expect("marching-squares contours are closed");
            used[next] = true;
            let (a, b) = segments[next];
            current = if a == current { b } else { a };
        }
        polylines.push(smooth(line, SMOOTHING_ROUNDS));
    }
    ContourSet { polylines }
}

/// Total length of the level-1/2 contours, outside of the grid counted as 0.
pub fn perimeter_of_mask(m: &BinaryMask) -> f64 {
    extract_contours(m, false).length()
}
