use std::collections::VecDeque;

use super::profile::{beta_profile, ProfileParams};
use crate::grid::{BinaryMask, Grid2D, ScalarField};

/// 4-connected components of `{u > 1-α}` with their β-masses.
///
/// Labels are 1-based (`0` is background) and numbered in order of each
/// component's first node in row-major scan order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabeling {
    grid: Grid2D,
    labels: Vec<u32>,
    members: Vec<Vec<usize>>,
    masses: Vec<f64>,
}

impl ComponentLabeling {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Label of `idx`, or `None` for background.
    #[inline]
    pub fn component_of(&self, idx: usize) -> Option<usize> {
        match self.labels[idx] {
            0 => None,
            l => Some(l as usize - 1),
        }
    }

    /// Node indices of component `c` (0-based), ascending.
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    /// β-masses `B_i` (0-based component index).
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Re-evaluates the β-masses of the stored node sets on another field.
    pub fn masses_on(&self, u: &ScalarField, p: &ProfileParams) -> Vec<f64> {
        self.members
            .iter()
            .map(|nodes| component_mass(&self.grid, nodes, u, p))
            .collect()
    }
}

fn component_mass(grid: &Grid2D, nodes: &[usize], u: &ScalarField, p: &ProfileParams) -> f64 {
    let v = u.values();
    nodes
        .iter()
        .map(|&n| grid.weight(n) * beta_profile(v[n], p))
        .sum()
}

pub fn label_components(u: &ScalarField, p: &ProfileParams) -> ComponentLabeling {
    label_components_with(u, p, false)
}

/// Labels components; with `merge_boundary`, every component touching the
/// grid boundary is fused into one.
pub fn label_components_with(
    u: &ScalarField,
    p: &ProfileParams,
    merge_boundary: bool,
) -> ComponentLabeling {
    let grid = *u.grid();
    let thr = p.threshold();
    let inside = BinaryMask::threshold(u, thr);
    let (labels, members) = mask_components(&inside, merge_boundary);
    let masses = members
        .iter()
        .map(|nodes| component_mass(&grid, nodes, u, p))
        .collect();
    ComponentLabeling {
        grid,
        labels,
        members,
        masses,
    }
}

/// 4-connected components of a mask: per-node labels (0 = outside) and the
/// ascending node list of each component, numbered in scan order.
///
/// With `merge_boundary`, all components touching the grid boundary are fused.
pub fn mask_components(mask: &BinaryMask, merge_boundary: bool) -> (Vec<u32>, Vec<Vec<usize>>) {
    let grid = *mask.grid();
    let inside = mask.bits();
    let mut labels = vec![0u32; grid.len()];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..grid.len() {
        if !inside[seed] || labels[seed] != 0 {
            continue;
        }
        let label = members.len() as u32 + 1;
        let mut nodes = Vec::new();
        labels[seed] = label;
        queue.push_back(seed);
        while let Some(n) = queue.pop_front() {
            nodes.push(n);
            for m in grid.neighbors4(n) {
                if inside[m] && labels[m] == 0 {
                    labels[m] = label;
                    queue.push_back(m);
                }
            }
        }
        nodes.sort_unstable();
        members.push(nodes);
    }

    if merge_boundary {
        let touching: Vec<bool> = members
            .iter()
            .map(|nodes| nodes.iter().any(|&n| grid.is_boundary(n)))
            .collect();
        if touching.iter().filter(|&&t| t).count() > 1 {
            let mut merged: Vec<Vec<usize>> = Vec::new();
            let mut boundary_slot = None;
            for (nodes, touches) in members.into_iter().zip(touching) {
                match (touches, boundary_slot) {
                    (true, Some(slot)) => {
                        let target: &mut Vec<usize> = &mut merged[slot];
                        target.extend(nodes);
                    }
                    (true, None) => {
                        boundary_slot = Some(merged.len());
                        merged.push(nodes);
                    }
                    (false, _) => merged.push(nodes),
                }
            }
            for (c, nodes) in merged.iter_mut().enumerate() {
                nodes.sort_unstable();
                for &n in nodes.iter() {
                    labels[n] = c as u32 + 1;
                }
            }
            members = merged;
        }
    }
    (labels, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::beta_profile;

    fn p() -> ProfileParams {
        ProfileParams::new(0.35).unwrap()
    }

    fn squares(n: usize) -> ScalarField {
        let g = Grid2D::square(n).unwrap();
        ScalarField::from_fn(g, |x, y| {
            let a = (0.1..0.35).contains(&x) && (0.3..0.7).contains(&y);
            let b = (0.6..0.9).contains(&x) && (0.3..0.7).contains(&y);
            if a || b {
                1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn constant_fields() {
        let g = Grid2D::new(13, 9).unwrap();
        let one = label_components(&ScalarField::constant(g, 1.0), &p());
        assert_eq!(one.count(), 1);
        assert!((one.masses()[0] - 6.0 / 0.7).abs() < 1e-12);
        assert_eq!(label_components(&ScalarField::zeros(g), &p()).count(), 0);
    }

    #[test]
    fn two_squares() {
        let u = squares(40);
        let c = label_components(&u, &p());
        assert_eq!(c.count(), 2);
        let total: f64 = c.masses().iter().sum();
        let direct = u.map(|v| beta_profile(v, &p())).integrate();
        assert!((total - direct).abs() < 1e-12);
    }

    #[test]
    fn diagonal_contact_does_not_connect() {
        let g = Grid2D::square(5).unwrap();
        let mut u = ScalarField::zeros(g);
        u.set(1, 1, 1.0);
        u.set(2, 2, 1.0);
        assert_eq!(label_components(&u, &p()).count(), 2);
    }

    #[test]
    fn boundary_merge() {
        let g = Grid2D::square(9).unwrap();
        let mut u = ScalarField::zeros(g);
        // two blobs on the boundary, one interior
        u.set(0, 4, 1.0);
        u.set(8, 4, 1.0);
        u.set(4, 4, 1.0);
        assert_eq!(label_components(&u, &p()).count(), 3);
        let merged = label_components_with(&u, &p(), true);
        assert_eq!(merged.count(), 2);
        assert_eq!(
            merged.component_of(g.index(0, 4)),
            merged.component_of(g.index(8, 4))
        );
        assert_ne!(
            merged.component_of(g.index(4, 4)),
            merged.component_of(g.index(0, 4))
        );
    }

    #[test]
    fn labels_match_membership() {
        let u = squares(31);
        let c = label_components(&u, &p());
        for idx in 0..u.grid().len() {
            assert_eq!(c.component_of(idx).is_some(), u.values()[idx] > 0.65);
        }
        for comp in 0..c.count() {
            for &n in c.members(comp) {
                assert_eq!(c.component_of(n), Some(comp));
            }
        }
    }
}
