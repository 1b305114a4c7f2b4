//! Fixed second-order central-difference operators.
//!
//! Every operator reads the ghost frame of its inputs (which must be valid) and
//! returns a field with its own ghosts filled.

use crate::field::ScalarField;
use crate::grid::GridSpec;

/// Sign joining the two products of the central Jacobian stencil.
///
/// `Minus` gives the analytic bracket `a_x b_y − a_y b_x`. `Plus` reproduces
/// the symmetrised variant `a_x b_y + a_y b_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianSign {
    #[default]
    Minus,
    Plus,
}

impl JacobianSign {
    pub fn factor(self) -> f64 {
        match self {
            JacobianSign::Minus => -1.0,
            JacobianSign::Plus => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JacobianSign::Minus => "minus",
            JacobianSign::Plus => "plus",
        }
    }
}

fn require_ghosts(fields: &[&ScalarField], grid: &GridSpec) {
    for f in fields {
        assert!(f.matches(grid), "field/grid size mismatch");
        assert!(f.ghosts_valid(), "stencil applied to a field with stale ghosts");
    }
}

/// `((f_{j+1,k} − f_{j−1,k})/(2Δx), (f_{j,k+1} − f_{j,k−1})/(2Δy))`.
pub fn central_gradient(f: &ScalarField, grid: &GridSpec) -> (ScalarField, ScalarField) {
    require_ghosts(&[f], grid);
    let (ix, iy) = (0.5 / grid.dx, 0.5 / grid.dy);
    let gx = ScalarField::from_cells(grid, |j, k| {
        let (j, k) = (j as isize, k as isize);
        (f.get(j + 1, k) - f.get(j - 1, k)) * ix
    });
    let gy = ScalarField::from_cells(grid, |j, k| {
        let (j, k) = (j as isize, k as isize);
        (f.get(j, k + 1) - f.get(j, k - 1)) * iy
    });
    (gx, gy)
}

/// Five-point Laplacian.
pub fn discrete_laplacian(f: &ScalarField, grid: &GridSpec) -> ScalarField {
    require_ghosts(&[f], grid);
    let (ix2, iy2) = (1.0 / (grid.dx * grid.dx), 1.0 / (grid.dy * grid.dy));
    ScalarField::from_cells(grid, |j, k| laplacian_at(f, j as isize, k as isize, ix2, iy2))
}

#[inline]
pub(crate) fn laplacian_at(f: &ScalarField, j: isize, k: isize, ix2: f64, iy2: f64) -> f64 {
    let c = f.get(j, k);
    (f.get(j - 1, k) - 2.0 * c + f.get(j + 1, k)) * ix2 + (f.get(j, k - 1) - 2.0 * c + f.get(j, k + 1)) * iy2
}

/// `(u_{j+1,k} − u_{j−1,k})/(2Δx) + (v_{j,k+1} − v_{j,k−1})/(2Δy)`.
pub fn central_divergence(u: &ScalarField, v: &ScalarField, grid: &GridSpec) -> ScalarField {
    require_ghosts(&[u, v], grid);
    let (ix, iy) = (0.5 / grid.dx, 0.5 / grid.dy);
    ScalarField::from_cells(grid, |j, k| {
        let (j, k) = (j as isize, k as isize);
        (u.get(j + 1, k) - u.get(j - 1, k)) * ix + (v.get(j, k + 1) - v.get(j, k - 1)) * iy
    })
}

/// Central-difference bracket
/// `[(a_{j+1}−a_{j−1})(b_{k+1}−b_{k−1}) ± (a_{k+1}−a_{k−1})(b_{j+1}−b_{j−1})] / (4ΔxΔy)`.
pub fn jacobian_bracket(a: &ScalarField, b: &ScalarField, grid: &GridSpec, sign: JacobianSign) -> ScalarField {
    require_ghosts(&[a, b], grid);
    let scale = 0.25 / (grid.dx * grid.dy);
    let s = sign.factor();
    ScalarField::from_cells(grid, |j, k| jacobian_at(a, b, j as isize, k as isize, scale, s))
}

#[inline]
pub(crate) fn jacobian_at(a: &ScalarField, b: &ScalarField, j: isize, k: isize, scale: f64, sign: f64) -> f64 {
    let ax = a.get(j + 1, k) - a.get(j - 1, k);
    let ay = a.get(j, k + 1) - a.get(j, k - 1);
    let bx = b.get(j + 1, k) - b.get(j - 1, k);
    let by = b.get(j, k + 1) - b.get(j, k - 1);
    scale * (ax * by + sign * ay * bx)
}

/// Central-difference vorticity `v_x − u_y`.
pub fn vorticity(u: &ScalarField, v: &ScalarField, grid: &GridSpec) -> ScalarField {
    require_ghosts(&[u, v], grid);
    let (ix, iy) = (0.5 / grid.dx, 0.5 / grid.dy);
    ScalarField::from_cells(grid, |j, k| {
        let (j, k) = (j as isize, k as isize);
        (v.get(j + 1, k) - v.get(j - 1, k)) * ix - (u.get(j, k + 1) - u.get(j, k - 1)) * iy
    })
}
