//! Uniform node grid on the unit square, nodal fields and the 5-point stencil.

use crate::error::{Error, Result};
use crate::par;

/// Boundary treatment of the phase field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    /// Boundary nodes are pinned to zero; stencil ghosts read as 0.
    Dirichlet0,
    /// Zero normal derivative; stencil ghosts mirror the first interior node.
    Neumann,
}

impl BoundaryMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryMode::Dirichlet0 => "dirichlet",
            BoundaryMode::Neumann => "neumann",
        }
    }
}

impl std::str::FromStr for BoundaryMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dirichlet" | "dirichlet0" => Ok(BoundaryMode::Dirichlet0),
            "neumann" => Ok(BoundaryMode::Neumann),
            other => Err(format!("unknown boundary mode `{other}`")),
        }
    }
}

/// `nx` by `ny` nodes covering `[0,1]²`, node `(i, j)` at `(i·hx, j·hy)`.
///
/// Nodes are stored row-major: index `j·nx + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid { nx, ny });
        }
        Ok(Grid2D {
            nx,
            ny,
            hx: 1.0 / (nx - 1) as f64,
            hy: 1.0 / (ny - 1) as f64,
        })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.hx
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        self.hy
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    /// Physical position of node `idx`.
    #[inline]
    pub fn position(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.coords(idx);
        (i as f64 * self.hx, j as f64 * self.hy)
    }

    #[inline]
    pub fn is_boundary(&self, idx: usize) -> bool {
        let (i, j) = self.coords(idx);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Trapezoidal factor along x: `hx`, halved on the two end columns.
    #[inline]
    pub fn weight_x(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nx {
            0.5 * self.hx
        } else {
            self.hx
        }
    }

    #[inline]
    pub fn weight_y(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.ny {
            0.5 * self.hy
        } else {
            self.hy
        }
    }

    /// Trapezoidal quadrature weight of node `idx`.
    #[inline]
    pub fn weight(&self, idx: usize) -> f64 {
        let (i, j) = self.coords(idx);
        self.weight_x(i) * self.weight_y(j)
    }

    /// 4-neighbors of `idx` inside the grid.
    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.coords(idx);
        let (nx, ny) = (self.nx, self.ny);
        [
            (i > 0).then(|| idx - 1),
            (i + 1 < nx).then(|| idx + 1),
            (j > 0).then(|| idx - nx),
            (j + 1 < ny).then(|| idx + nx),
        ]
        .into_iter()
        .flatten()
    }

    /// 8-neighbors of `idx` with the Euclidean length of the connecting edge.
    pub fn neighbors8(&self, idx: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (i, j) = (idx % self.nx, idx / self.nx);
        let diag = self.hx.hypot(self.hy);
        const OFFSETS: [(isize, isize); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        OFFSETS.iter().filter_map(move |&(di, dj)| {
            let ni = i.checked_add_signed(di).filter(|&v| v < self.nx)?;
            let nj = j.checked_add_signed(dj).filter(|&v| v < self.ny)?;
            let len = match (di, dj) {
                (0, _) => self.hy,
                (_, 0) => self.hx,
                _ => diag,
            };
            Some((self.index(ni, nj), len))
        })
    }

    pub(crate) fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self.nx != other.nx || self.ny != other.ny {
            return Err(Error::Dimension {
                expected: format!("{}x{}", self.nx, self.ny),
                found: format!("{}x{}", other.nx, other.ny),
            });
        }
        Ok(())
    }
}

/// A real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn constant(grid: Grid2D, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension {
                expected: format!("{} values", grid.len()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(ScalarField { grid, values })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.position(idx);
                f(x, y)
            })
            .collect();
        ScalarField { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.grid.index(i, j);
        self.values[idx] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn clamp01(&mut self) {
        for v in &mut self.values {
            *v = v.clamp(0.0, 1.0);
        }
    }

    pub fn clamped01(&self) -> ScalarField {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &ScalarField) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Trapezoidal integral over the unit square.
    pub fn integrate(&self) -> f64 {
        integrate(self)
    }

    /// Discrete L² inner product `Σ w·a·b` with trapezoidal weights.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        let g = self.grid;
        par::sum_rows(g.ny(), |j| {
            let wy = g.weight_y(j);
            let row = j * g.nx();
            (0..g.nx())
                .map(|i| g.weight_x(i) * wy * self.values[row + i] * other.values[row + i])
                .sum()
        })
    }

    pub fn laplacian(&self, bc: BoundaryMode) -> ScalarField {
        laplacian(self, bc)
    }
}

/// One boolean per node.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    grid: Grid2D,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(grid: Grid2D, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(Error::Dimension {
                expected: format!("{} bits", grid.len()),
                found: format!("{} bits", bits.len()),
            });
        }
        Ok(BinaryMask { grid, bits })
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> bool) -> Self {
        let bits = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.position(idx);
                f(x, y)
            })
            .collect();
        BinaryMask { grid, bits }
    }

    /// Nodes where `field > level`.
    pub fn threshold(field: &ScalarField, level: f64) -> Self {
        BinaryMask {
            grid: *field.grid(),
            bits: field.values().iter().map(|&v| v > level).collect(),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[self.grid.index(i, j)]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            grid: self.grid,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn to_field(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self
                .bits
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

/// 5-point Laplacian.
///
/// `Dirichlet0` reads ghost nodes outside the grid as 0; `Neumann` mirrors the
/// first interior node across the boundary.
pub fn laplacian(u: &ScalarField, bc: BoundaryMode) -> ScalarField {
    let g = *u.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (ihx2, ihy2) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
    let src = u.values();
    let mut out = vec![0.0; g.len()];
    par::for_each_row(&mut out, nx, |j, row| {
        let at = |i: usize, j: usize| src[j * nx + i];
        for (i, o) in row.iter_mut().enumerate() {
            let c = at(i, j);
            let (l, r) = match bc {
                BoundaryMode::Dirichlet0 => (
                    if i > 0 { at(i - 1, j) } else { 0.0 },
                    if i + 1 < nx { at(i + 1, j) } else { 0.0 },
                ),
                BoundaryMode::Neumann => {
                    let l = if i > 0 { at(i - 1, j) } else { at(1, j) };
                    let r = if i + 1 < nx {
                        at(i + 1, j)
                    } else {
                        at(nx - 2, j)
                    };
                    (l, r)
                }
            };
            let (d, t) = match bc {
                BoundaryMode::Dirichlet0 => (
                    if j > 0 { at(i, j - 1) } else { 0.0 },
                    if j + 1 < ny { at(i, j + 1) } else { 0.0 },
                ),
                BoundaryMode::Neumann => {
                    let d = if j > 0 { at(i, j - 1) } else { at(i, 1) };
                    let t = if j + 1 < ny {
                        at(i, j + 1)
                    } else {
                        at(i, ny - 2)
                    };
                    (d, t)
                }
            };
            *o = (l - 2.0 * c + r) * ihx2 + (d - 2.0 * c + t) * ihy2;
        }
    });
    ScalarField {
        grid: g,
        values: out,
    }
}

/// Trapezoidal quadrature: node weights are the cell area, halved on edges
/// and quartered at corners.
pub fn integrate(f: &ScalarField) -> f64 {
    let g = *f.grid();
    let v = f.values();
    par::sum_rows(g.ny(), |j| {
        let row = j * g.nx();
        let s: f64 = (0..g.nx()).map(|i| g.weight_x(i) * v[row + i]).sum();
        s * g.weight_y(j)
    })
}
