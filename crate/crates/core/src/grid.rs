//! Uniform cell-centred grids.

use crate::error::{Result, SolverError};

/// Ghost ring width carried by every field.
pub const GHOST: usize = 2;

/// How ghost cells are populated along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Indices wrap modulo the cell count.
    Periodic,
    /// Ghosts copy the nearest interior cell (zero-order extrapolation, "free" boundary).
    Extrapolate,
}

impl BoundaryKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::Extrapolate => "extrapolate",
        }
    }
}

/// Uniform 2-D layout of `nx × ny` finite-volume cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
    pub bc_x: BoundaryKind,
    pub bc_y: BoundaryKind,
}

impl GridSpec {
    pub fn new(
        nx: usize,
        ny: usize,
        (x_min, x_max): (f64, f64),
        (y_min, y_max): (f64, f64),
        bc_x: BoundaryKind,
        bc_y: BoundaryKind,
    ) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(SolverError::InvalidGrid(format!(
                "need at least 4 cells per axis, got {nx}×{ny}"
            )));
        }
        if !(x_max > x_min) || !(y_max > y_min) || !x_min.is_finite() || !y_max.is_finite() {
            return Err(SolverError::InvalidGrid(format!(
                "degenerate extents [{x_min}, {x_max}]×[{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            nx,
            ny,
            x_min,
            x_max,
            y_min,
            y_max,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
            bc_x,
            bc_y,
        })
    }

    /// Doubly periodic grid on `[x_min,x_max]×[y_min,y_max]`.
    pub fn periodic(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        Self::new(nx, ny, x, y, BoundaryKind::Periodic, BoundaryKind::Periodic)
    }

    pub fn x_center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx
    }

    pub fn y_center(&self, k: usize) -> f64 {
        self.y_min + (k as f64 + 0.5) * self.dy
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn is_periodic(&self) -> bool {
        self.bc_x == BoundaryKind::Periodic && self.bc_y == BoundaryKind::Periodic
    }

    /// Same extents and boundaries, `factor` times finer along both axes.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(
            self.nx * factor,
            self.ny * factor,
            (self.x_min, self.x_max),
            (self.y_min, self.y_max),
            self.bc_x,
            self.bc_y,
        )
    }

    pub fn same_layout(&self, other: &GridSpec) -> bool {
        self.nx == other.nx && self.ny == other.ny
    }
}
