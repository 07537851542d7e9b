use super::geodesic::{pairwise_geodesics, GeodesicTable};
use super::graph::build_weighted_graph;
use super::labeling::{label_components_with, ComponentLabeling};
use super::profile::{beta_prime, weight_prime, weight_profile, ProfileParams};
use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Which phase the penalty keeps connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Components of `{u > 1-α}`.
    High,
    /// Components of `{1-u > 1-α}`; with `merge_boundary` all components that
    /// touch the domain boundary count as one (they connect through the
    /// exterior).
    Low { merge_boundary: bool },
}

impl Phase {
    fn field(self, u: &ScalarField) -> std::borrow::Cow<'_, ScalarField> {
        match self {
            Phase::High => std::borrow::Cow::Borrowed(u),
            Phase::Low { .. } => std::borrow::Cow::Owned(u.map(|v| 1.0 - v)),
        }
    }

    fn sign(self) -> f64 {
        match self {
            Phase::High => 1.0,
            Phase::Low { .. } => -1.0,
        }
    }
}

/// Component structure and geodesics of one phase.
///
/// Besides evaluating the penalty at the field it was computed from, a
/// snapshot can be evaluated on later fields with its node sets and paths held
/// fixed: masses are recomputed on the stored components and distances as the
/// weight of the stored paths. That frozen penalty is smooth, equals the true
/// penalty at the snapshot's own field, and its gradient is the subgradient of
/// the true penalty.
#[derive(Debug, Clone)]
pub struct PhaseTopology {
    pub phase: Phase,
    pub labeling: ComponentLabeling,
    pub table: GeodesicTable,
}

impl PhaseTopology {
    pub fn compute(u: &ScalarField, p: &ProfileParams, phase: Phase) -> Result<Self> {
        let v = phase.field(u);
        let merge = matches!(
            phase,
            Phase::Low {
                merge_boundary: true
            }
        );
        let labeling = label_components_with(&v, p, merge);
        let table = pairwise_geodesics(&build_weighted_graph(&v, p), &labeling)?;
        Ok(PhaseTopology {
            phase,
            labeling,
            table,
        })
    }

    pub fn count(&self) -> usize {
        self.labeling.count()
    }

    /// `Σ_{i≠j} B_i B_j D_ij` from the stored masses and distances.
    pub fn energy(&self) -> f64 {
        pair_energy(self.labeling.masses(), |i, j| self.table.dist(i, j))
    }

    /// Frozen-structure penalty on `u`.
    pub fn frozen_energy(&self, u: &ScalarField, p: &ProfileParams) -> f64 {
        let v = self.phase.field(u);
        let masses = self.labeling.masses_on(&v, p);
        let lengths = self.path_lengths(&v, p);
        pair_energy(&masses, |i, j| lengths[i * self.count() + j])
    }

    /// L² gradient of [`Self::frozen_energy`] with respect to `u`.
    pub fn frozen_gradient(&self, u: &ScalarField, p: &ProfileParams) -> ScalarField {
        let v = self.phase.field(u);
        let grid = *v.grid();
        let k = self.count();
        let mut out = vec![0.0; grid.len()];
        if k < 2 {
            return ScalarField::from_values(grid, out).expect("same grid");
        }
        let vals = v.values();
        let masses = self.labeling.masses_on(&v, p);
        let lengths = self.path_lengths(&v, p);

        // mass term: ∂B_i/∂u(x) = w(x) β'(u(x)) for x ∈ U_i
        for i in 0..k {
            let pull: f64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| masses[j] * lengths[i * k + j])
                .sum();
            let coef = 2.0 * pull;
            for &n in self.labeling.members(i) {
                out[n] += coef * beta_prime(vals[n], p) * grid.weight(n);
            }
        }
        // path term: each edge (a, b) of length ℓ contributes ℓ/2·F'(u) at both ends
        for (i, j, path) in self.table.pairs() {
            let coef = 2.0 * masses[i] * masses[j];
            for w in path.windows(2) {
                let (a, b) = (w[0], w[1]);
                let half = 0.5 * edge_length(&grid, a, b);
                out[a] += coef * half * weight_prime(vals[a], p);
                out[b] += coef * half * weight_prime(vals[b], p);
            }
        }
        let sign = self.phase.sign();
        for (n, o) in out.iter_mut().enumerate() {
            *o *= sign / grid.weight(n);
        }
        ScalarField::from_values(grid, out).expect("same grid")
    }

    /// Weights of the stored paths on `v` (already reflected), as a k×k matrix.
    fn path_lengths(&self, v: &ScalarField, p: &ProfileParams) -> Vec<f64> {
        let grid = *v.grid();
        let k = self.count();
        let vals = v.values();
        let mut out = vec![0.0; k * k];
        for (i, j, path) in self.table.pairs() {
            let mut len = 0.0;
            for w in path.windows(2) {
                let (a, b) = (w[0], w[1]);
                len += edge_length(&grid, a, b)
                    * (weight_profile(vals[a], p) + weight_profile(vals[b], p))
                    * 0.5;
            }
            out[i * k + j] = len;
            out[j * k + i] = len;
        }
        out
    }

    fn check_against(&self, u: &ScalarField, p: &ProfileParams) -> Result<()> {
        u.grid().check_same(self.labeling.grid())?;
        if self.table.count() != self.labeling.count() {
            return Err(Error::Consistency(format!(
                "table has {} components, labeling has {}",
                self.table.count(),
                self.labeling.count()
            )));
        }
        let v = self.phase.field(u);
        let thr = p.threshold();
        if let Some(idx) = v
            .values()
            .iter()
            .enumerate()
            .position(|(n, &s)| (s > thr) != self.labeling.component_of(n).is_some())
        {
            return Err(Error::Consistency(format!(
                "node {idx} changed phase since labeling"
            )));
        }
        Ok(())
    }
}

#[inline]
fn edge_length(grid: &crate::grid::Grid2D, a: usize, b: usize) -> f64 {
    let (ia, ja) = grid.coords(a);
    let (ib, jb) = grid.coords(b);
    match (ia != ib, ja != jb) {
        (true, true) => grid.hx().hypot(grid.hy()),
        (true, false) => grid.hx(),
        _ => grid.hy(),
    }
}

fn pair_energy(masses: &[f64], dist: impl Fn(usize, usize) -> f64) -> f64 {
    let k = masses.len();
    let mut sum = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            sum += masses[i] * masses[j] * dist(i, j);
        }
    }
    2.0 * sum
}

/// Connectedness penalty of the high phase with its geodesics and labeling.
pub fn connectedness_energy(
    u: &ScalarField,
    p: &ProfileParams,
) -> Result<(f64, GeodesicTable, ComponentLabeling)> {
    let topo = PhaseTopology::compute(u, p, Phase::High)?;
    let e = topo.energy();
    Ok((e, topo.table, topo.labeling))
}

/// Subgradient of the high-phase penalty at `u`.
///
/// `t` and `c` must come from this same `u`: a node whose phase disagrees
/// with `c` is reported as a consistency error.
pub fn connectedness_gradient(
    u: &ScalarField,
    p: &ProfileParams,
    t: &GeodesicTable,
    c: &ComponentLabeling,
) -> Result<ScalarField> {
    let topo = PhaseTopology {
        phase: Phase::High,
        labeling: c.clone(),
        table: t.clone(),
    };
    topo.check_against(u, p)?;
    Ok(topo.frozen_gradient(u, p))
}

/// Penalty keeping the low phase `{u < α}` connected, boundary components merged.
pub fn complement_connectedness_energy(
    u: &ScalarField,
    p: &ProfileParams,
) -> Result<PhaseTopology> {
    PhaseTopology::compute(
        u,
        p,
        Phase::Low {
            merge_boundary: true,
        },
    )
}

/// Both penalty terms of the simply-connected constraint.
#[derive(Debug, Clone)]
pub struct SimplyConnectedEnergy {
    pub high: PhaseTopology,
    pub low: PhaseTopology,
}

impl SimplyConnectedEnergy {
    pub fn high_energy(&self) -> f64 {
        self.high.energy()
    }

    pub fn low_energy(&self) -> f64 {
        self.low.energy()
    }

    pub fn total(&self) -> f64 {
        self.high_energy() + self.low_energy()
    }
}

pub fn simply_connected_energy(
    u: &ScalarField,
    p: &ProfileParams,
) -> Result<SimplyConnectedEnergy> {
    Ok(SimplyConnectedEnergy {
        high: PhaseTopology::compute(u, p, Phase::High)?,
        low: complement_connectedness_energy(u, p)?,
    })
}

/// Subgradient of the simply-connected penalty at the field `s` was computed on.
pub fn simply_connected_gradient(
    u: &ScalarField,
    p: &ProfileParams,
    s: &SimplyConnectedEnergy,
) -> Result<ScalarField> {
    s.high.check_against(u, p)?;
    s.low.check_against(u, p)?;
    let a = s.high.frozen_gradient(u, p);
    let b = s.low.frozen_gradient(u, p);
    Ok(a.axpy(1.0, &b))
}
