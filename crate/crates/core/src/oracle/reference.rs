use super::contour::{extract_contours, perimeter_of_mask, ContourSet, Point};
use super::steiner::{dist, steiner_length, SteinerResult, MAX_TERMINALS};
use crate::error::{Error, Result};
use crate::grid::BinaryMask;
use crate::topology::mask_components;

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectedPerimeter {
    pub perimeter: f64,
    /// Steiner length over the components as sets.
    pub steiner: f64,
    /// `perimeter + 2·steiner`.
    pub total: f64,
    pub components: usize,
    /// Set when `steiner` is only an upper bound (3+ components or MST mode).
    pub upper_bound: bool,
    pub tree: Vec<(Point, Point)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplyConnectedPerimeter {
    pub perimeter: f64,
    pub steiner: f64,
    pub steiner_complement: f64,
    /// `perimeter + 2·steiner + 2·steiner_complement`.
    pub total: f64,
    pub upper_bound: bool,
}

fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return a;
    }
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    (a.0 + t * dx, a.1 + t * dy)
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient =
        |p: Point, q: Point, r: Point| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Closest pair of points between segments `ab` and `cd`.
fn segment_pair(a: Point, b: Point, c: Point, d: Point) -> (f64, Point, Point) {
    if segments_cross(a, b, c, d) {
        let p = closest_on_segment(c, a, b);
        return (0.0, p, p);
    }
    let candidates = [
        (a, closest_on_segment(a, c, d)),
        (b, closest_on_segment(b, c, d)),
        (closest_on_segment(c, a, b), c),
        (closest_on_segment(d, a, b), d),
    ];
    candidates
        .into_iter()
        .map(|(p, q)| (dist(p, q), p, q))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .expect("four candidates")
}

/// Distance between two contour sets with the realizing points.
pub fn set_distance(a: &ContourSet, b: &ContourSet) -> (f64, Point, Point) {
    let mut best = (f64::INFINITY, (0.0, 0.0), (0.0, 0.0));
    for (p, q) in a.segments() {
        for (r, s) in b.segments() {
            let cand = segment_pair(p, q, r, s);
            if cand.0 < best.0 {
                best = cand;
            }
        }
    }
    best
}

/// Level-1/2 contours of each 4-connected component of `mask`.
///
/// With `merge_boundary`, components touching the grid edge are fused and
/// framed as continuing outside the grid, so the frame itself is not traced.
pub fn component_contours(mask: &BinaryMask, merge_boundary: bool) -> Vec<ContourSet> {
    let grid = *mask.grid();
    let (_, members) = mask_components(mask, merge_boundary);
    members
        .iter()
        .map(|nodes| {
            let mut bits = vec![false; grid.len()];
            for &n in nodes {
                bits[n] = true;
            }
            let touches = merge_boundary && nodes.iter().any(|&n| grid.is_boundary(n));
            extract_contours(&BinaryMask::new(grid, bits).expect("same grid"), touches)
        })
        .collect()
}

/// Steiner length over component sets, terminals restricted to contour points.
fn steiner_over_sets(sets: &[ContourSet]) -> Result<(SteinerResult, bool)> {
    match sets.len() {
        0 | 1 => Ok((
            SteinerResult {
                length: 0.0,
                edges: vec![],
                upper_bound: false,
            },
            false,
        )),
        2 => {
            let (d, p, q) = set_distance(&sets[0], &sets[1]);
            Ok((
                SteinerResult {
                    length: d,
                    edges: vec![(p, q)],
                    upper_bound: false,
                },
                false,
            ))
        }
        n if n <= MAX_TERMINALS => {
            // start each terminal at its component's point closest to the others
            let mut terminals: Vec<Point> = (0..n)
                .map(|i| {
                    (0..n)
                        .filter(|&j| j != i)
                        .map(|j| set_distance(&sets[i], &sets[j]))
                        .min_by(|x, y| x.0.total_cmp(&y.0))
                        .map(|(_, p, _)| p)
                        .expect("other components exist")
                })
                .collect();
            let mut best = steiner_length(&terminals)?;
            loop {
                let before = best.length;
                for i in 0..n {
                    for p in sets[i].points() {
                        let mut trial = terminals.clone();
                        trial[i] = p;
                        let r = steiner_length(&trial)?;
                        if r.length < best.length {
                            best = r;
                            terminals = trial;
                        }
                    }
                }
                if best.length >= before {
                    break;
                }
            }
            Ok((best, true))
        }
        n => Err(Error::UnsupportedCardinality {
            count: n,
            max: MAX_TERMINALS,
        }),
    }
}

/// `P(E) + 2·St(E)` for masks with at most four components.
pub fn connected_perimeter_reference(m: &BinaryMask) -> Result<ConnectedPerimeter> {
    let perimeter = perimeter_of_mask(m);
    let sets = component_contours(m, false);
    let (tree, upper_bound) = steiner_over_sets(&sets)?;
    Ok(ConnectedPerimeter {
        perimeter,
        steiner: tree.length,
        total: perimeter + 2.0 * tree.length,
        components: sets.len(),
        upper_bound,
        tree: tree.edges,
    })
}

/// Upper bound for any component count: MST of pairwise set distances.
pub fn mst_upper_bound(m: &BinaryMask) -> ConnectedPerimeter {
    let perimeter = perimeter_of_mask(m);
    let sets = component_contours(m, false);
    let n = sets.len();
    let mut tree = Vec::new();
    let mut steiner = 0.0;
    if n > 1 {
        let mut pair = vec![(f64::INFINITY, (0.0, 0.0), (0.0, 0.0)); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = set_distance(&sets[i], &sets[j]);
                pair[i * n + j] = d;
                pair[j * n + i] = (d.0, d.2, d.1);
            }
        }
        let mut in_tree = vec![false; n];
        in_tree[0] = true;
        for _ in 1..n {
            let (i, j) = (0..n)
                .filter(|&i| in_tree[i])
                .flat_map(|i| (0..n).filter(|&j| !in_tree[j]).map(move |j| (i, j)))
                .min_by(|a, b| pair[a.0 * n + a.1].0.total_cmp(&pair[b.0 * n + b.1].0))
                .expect("remaining components");
            in_tree[j] = true;
            let (d, p, q) = pair[i * n + j];
            steiner += d;
            tree.push((p, q));
        }
    }
    ConnectedPerimeter {
        perimeter,
        steiner,
        total: perimeter + 2.0 * steiner,
        components: n,
        upper_bound: true,
        tree,
    }
}

/// `P(E) + 2·St(E) + 2·St(E^c)`; complement components touching the grid
/// edge count as the single exterior.
pub fn simply_connected_reference(m: &BinaryMask) -> Result<SimplyConnectedPerimeter> {
    let inner = connected_perimeter_reference(m)?;
    let comp_sets = component_contours(&m.complement(), true);
    let (tree, ub) = steiner_over_sets(&comp_sets)?;
    Ok(SimplyConnectedPerimeter {
        perimeter: inner.perimeter,
        steiner: inner.steiner,
        steiner_complement: tree.length,
        total: inner.perimeter + 2.0 * inner.steiner + 2.0 * tree.length,
        upper_bound: inner.upper_bound || ub,
    })
}
