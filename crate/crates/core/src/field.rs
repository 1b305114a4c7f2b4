//! Cell-average storage with a ghost frame.

use crate::grid::{BoundaryKind, GridSpec, GHOST};

/// Real-valued cell averages on `nx × ny` interior cells plus a ghost frame of
/// width [`GHOST`].
///
/// Writes to interior cells mark the ghost frame stale; stencil operators refuse
/// to read a field whose ghosts are stale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    nx: usize,
    ny: usize,
    stride: usize,
    data: Vec<f64>,
    ghosts_valid: bool,
}

impl ScalarField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &GridSpec, value: f64) -> Self {
        let stride = grid.nx + 2 * GHOST;
        Self {
            nx: grid.nx,
            ny: grid.ny,
            stride,
            data: vec![value; stride * (grid.ny + 2 * GHOST)],
            ghosts_valid: true,
        }
    }

    /// Samples `f(x, y)` at cell centres and fills the ghost frame.
    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for k in 0..grid.ny {
            let y = grid.y_center(k);
            for j in 0..grid.nx {
                out.set(j, k, f(grid.x_center(j), y));
            }
        }
        out.fill_ghosts(grid);
        out
    }

    /// Builds a field from interior values given in row-major order (`j` fastest).
    pub fn from_interior(grid: &GridSpec, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.cell_count(), "interior length mismatch");
        let mut out = Self::zeros(grid);
        for k in 0..grid.ny {
            for j in 0..grid.nx {
                out.set(j, k, values[j + k * grid.nx]);
            }
        }
        out.fill_ghosts(grid);
        out
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn ghosts_valid(&self) -> bool {
        self.ghosts_valid
    }

    pub fn matches(&self, grid: &GridSpec) -> bool {
        self.nx == grid.nx && self.ny == grid.ny
    }

    #[inline]
    fn index(&self, j: isize, k: isize) -> usize {
        debug_assert!(j >= -(GHOST as isize) && j < (self.nx + GHOST) as isize);
        debug_assert!(k >= -(GHOST as isize) && k < (self.ny + GHOST) as isize);
        (j + GHOST as isize) as usize + (k + GHOST as isize) as usize * self.stride
    }

    /// Value at `(j, k)`, where indices may reach into the ghost frame.
    #[inline]
    pub fn get(&self, j: isize, k: isize) -> f64 {
        self.data[self.index(j, k)]
    }

    /// Interior value.
    #[inline]
    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.data[self.index(j as isize, k as isize)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, value: f64) {
        let i = self.index(j as isize, k as isize);
        self.data[i] = value;
        self.ghosts_valid = false;
    }

    /// Writes a ghost or interior cell without touching the validity flag.
    pub(crate) fn set_raw(&mut self, j: isize, k: isize, value: f64) {
        let i = self.index(j, k);
        self.data[i] = value;
    }

    pub(crate) fn mark_ghosts_valid(&mut self) {
        self.ghosts_valid = true;
    }

    /// Interior values in row-major order (`j` fastest).
    pub fn interior(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for k in 0..self.ny {
            let start = self.index(0, k as isize);
            out.extend_from_slice(&self.data[start..start + self.nx]);
        }
        out
    }

    pub fn interior_row(&self, k: usize) -> &[f64] {
        let start = self.index(0, k as isize);
        &self.data[start..start + self.nx]
    }

    pub fn interior_row_mut(&mut self, k: usize) -> &mut [f64] {
        self.ghosts_valid = false;
        let start = self.index(0, k as isize);
        &mut self.data[start..start + self.nx]
    }

    /// Applies `f` to every interior value; ghosts become stale.
    pub fn map_interior(&mut self, mut f: impl FnMut(usize, usize, f64) -> f64) {
        for k in 0..self.ny {
            for j in 0..self.nx {
                let i = self.index(j as isize, k as isize);
                self.data[i] = f(j, k, self.data[i]);
            }
        }
        self.ghosts_valid = false;
    }

    /// Builds a new field from a cellwise function of interior indices, with
    /// ghosts filled.
    pub fn from_cells(grid: &GridSpec, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for k in 0..grid.ny {
            let row = out.interior_row_mut(k);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(j, k);
            }
        }
        out.fill_ghosts(grid);
        out
    }

    /// Populates the ghost frame from the interior according to the grid's
    /// boundary kinds. Corners are filled consistently (x first, then y).
    pub fn fill_ghosts(&mut self, grid: &GridSpec) {
        assert!(self.matches(grid), "field/grid size mismatch");
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let g = GHOST as isize;
        for k in 0..ny {
            for d in 1..=g {
                let (left, right) = match grid.bc_x {
                    BoundaryKind::Periodic => ((nx - d).rem_euclid(nx), (d - 1).rem_euclid(nx)),
                    BoundaryKind::Extrapolate => (0, nx - 1),
                };
                let lv = self.get(left, k);
                let rv = self.get(right, k);
                self.set_raw(-d, k, lv);
                self.set_raw(nx - 1 + d, k, rv);
            }
        }
        for j in -g..nx + g {
            for d in 1..=g {
                let (bottom, top) = match grid.bc_y {
                    BoundaryKind::Periodic => ((ny - d).rem_euclid(ny), (d - 1).rem_euclid(ny)),
                    BoundaryKind::Extrapolate => (0, ny - 1),
                };
                let bv = self.get(j, bottom);
                let tv = self.get(j, top);
                self.set_raw(j, -d, bv);
                self.set_raw(j, ny - 1 + d, tv);
            }
        }
        self.ghosts_valid = true;
    }

    /// Consuming form of [`fill_ghosts`](Self::fill_ghosts).
    pub fn filled(mut self, grid: &GridSpec) -> Self {
        self.fill_ghosts(grid);
        self
    }

    /// First interior cell holding NaN or ±Inf, scanning `j` fastest.
    pub fn detect_nonfinite(&self) -> Option<(usize, usize)> {
        for k in 0..self.ny {
            for (j, v) in self.interior_row(k).iter().enumerate() {
                if !v.is_finite() {
                    return Some((j, k));
                }
            }
        }
        None
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.ny)
            .flat_map(|k| self.interior_row(k).iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        (0..self.ny)
            .flat_map(|k| self.interior_row(k).iter())
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        (0..self.ny)
            .flat_map(|k| self.interior_row(k).iter())
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Sum of interior values in fixed row-major order.
    pub fn sum(&self) -> f64 {
        (0..self.ny).flat_map(|k| self.interior_row(k).iter()).sum()
    }

    /// `Σ a·b` over the interior.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        assert_eq!((self.nx, self.ny), (other.nx, other.ny));
        let mut acc = 0.0;
        for k in 0..self.ny {
            for (a, b) in self.interior_row(k).iter().zip(other.interior_row(k)) {
                acc += a * b;
            }
        }
        acc
    }

    /// Cellwise `self + scale·other` over the interior, ghosts refilled.
    pub fn axpy(&self, scale: f64, other: &ScalarField, grid: &GridSpec) -> ScalarField {
        ScalarField::from_cells(grid, |j, k| self.at(j, k) + scale * other.at(j, k))
    }

    /// Cellwise linear combination `Σ cᵢ·fᵢ`, ghosts refilled.
    pub fn combine(grid: &GridSpec, terms: &[(f64, &ScalarField)]) -> ScalarField {
        ScalarField::from_cells(grid, |j, k| terms.iter().map(|(c, f)| c * f.at(j, k)).sum::<f64>())
    }
}
