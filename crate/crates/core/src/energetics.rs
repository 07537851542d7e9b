//! Double-well potential, Modica-Mortola energy and the fidelity term.
//!
//! The Modica-Mortola energy is
//! `(1/c0) ∫ (ε/2)|∇u|² + W(u)/ε`, with `W(u) = u²(u-1)²` and
//! `c0 = ∫₀¹ √(2W)` so that the energy of a sharp interface profile converges
//! to the interface length.
//!
//! The discrete Dirichlet energy is the edge sum `Σ_e c_e (Δ_e u / h_e)²` with
//! edge weights taken from the trapezoidal rule. Its nodal derivative divided
//! by the node weight is exactly the 5-point Laplacian with mirrored ghosts,
//! so [`mm_gradient`] is the exact L² gradient of [`mm_energy`].

use crate::error::{Error, Result};
use crate::grid::{laplacian, BoundaryMode, Grid2D, ScalarField};
use crate::par;

/// `∫₀¹ √(2W(s)) ds` for `W(s) = s²(s-1)²`, i.e. `√2/6`.
pub const MM_C0: f64 = std::f64::consts::SQRT_2 / 6.0;

#[inline]
pub fn double_well(s: f64) -> f64 {
    let t = s * (s - 1.0);
    t * t
}

#[inline]
pub fn double_well_prime(s: f64) -> f64 {
    2.0 * s * (s - 1.0) * (2.0 * s - 1.0)
}

/// `G(z) = ∫₀^z √(2W(s)) ds = √2 (z²/2 - z³/3)` on `[0, 1]`.
pub fn g_primitive(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain {
            value: z,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(std::f64::consts::SQRT_2 * (z * z / 2.0 - z * z * z / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMParams {
    pub epsilon: f64,
    pub c0: f64,
    pub bc: BoundaryMode,
}

impl MMParams {
    pub fn new(epsilon: f64, bc: BoundaryMode) -> Self {
        MMParams {
            epsilon,
            c0: MM_C0,
            bc,
        }
    }
}

/// Edge-sum Dirichlet energy `Σ_e c_e (Δ_e u / h_e)²` (without the ε/2 factor).
pub fn dirichlet_form(u: &ScalarField) -> f64 {
    let g = *u.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let v = u.values();
    par::sum_rows(ny, |j| {
        let row = j * nx;
        let wy = g.weight_y(j);
        let mut horiz = 0.0;
        for i in 0..nx - 1 {
            let d = v[row + i + 1] - v[row + i];
            horiz += d * d;
        }
        let mut s = horiz * wy / g.hx();
        if j + 1 < ny {
            let mut vert = 0.0;
            for i in 0..nx {
                let d = v[row + nx + i] - v[row + i];
                vert += g.weight_x(i) * d * d;
            }
            s += vert / g.hy();
        }
        s
    })
}

/// Modica-Mortola energy of `u`.
pub fn mm_energy(u: &ScalarField, p: &MMParams) -> f64 {
    let eps = p.epsilon;
    let grad = dirichlet_form(u);
    let well = u.map(double_well).integrate();
    (0.5 * eps * grad + well / eps) / p.c0
}

/// Nodal L² gradient `(1/c0)(-εΔu + W'(u)/ε)`.
///
/// Under `Dirichlet0` the boundary nodes are constrained, so the gradient is
/// zero there.
pub fn mm_gradient(u: &ScalarField, p: &MMParams) -> ScalarField {
    let g = *u.grid();
    let lap = laplacian(u, p.bc);
    let (eps, c0) = (p.epsilon, p.c0);
    let uv = u.values();
    let lv = lap.values();
    let mut out = vec![0.0; g.len()];
    let pinned = p.bc == BoundaryMode::Dirichlet0;
    par::for_each_row(&mut out, g.nx(), |j, row| {
        let base = j * g.nx();
        for (i, o) in row.iter_mut().enumerate() {
            let idx = base + i;
            if pinned && g.is_boundary(idx) {
                continue;
            }
            *o = (-eps * lv[idx] + double_well_prime(uv[idx]) / eps) / c0;
        }
    });
    ScalarField::from_values(g, out).expect("same grid")
}

/// Target image `g`, local prefactor `Φ` and weight `δ`.
#[derive(Debug, Clone)]
pub struct FidelityData {
    pub g: ScalarField,
    pub phi: ScalarField,
    pub delta: f64,
}

impl FidelityData {
    pub fn new(g: ScalarField, phi: ScalarField, delta: f64) -> Result<Self> {
        g.grid().check_same(phi.grid())?;
        Ok(FidelityData { g, phi, delta })
    }

    pub fn grid(&self) -> &Grid2D {
        self.g.grid()
    }
}

/// `δ ∫ ½ Φ (u - g)²`.
pub fn fidelity_energy(u: &ScalarField, f: &FidelityData) -> Result<f64> {
    f.grid().check_same(u.grid())?;
    let density: Vec<f64> = u
        .values()
        .iter()
        .zip(f.g.values())
        .zip(f.phi.values())
        .map(|((u, g), phi)| 0.5 * phi * (u - g) * (u - g))
        .collect();
    let density = ScalarField::from_values(*u.grid(), density)?;
    Ok(f.delta * density.integrate())
}

/// `δ Φ (u - g)` per node.
pub fn fidelity_gradient(u: &ScalarField, f: &FidelityData) -> Result<ScalarField> {
    f.grid().check_same(u.grid())?;
    let values = u
        .values()
        .iter()
        .zip(f.g.values())
        .zip(f.phi.values())
        .map(|((u, g), phi)| f.delta * phi * (u - g))
        .collect();
    ScalarField::from_values(*u.grid(), values)
}
