//! Generalized-minmod piecewise-linear reconstruction.
//!
//! Faces are stored per axis. x-face `(i, k)` with `i ∈ 0..=nx` sits at
//! `x_{i−½}` between cells `i−1` (the `minus` side) and `i` (the `plus` side);
//! y-faces are laid out the same way along `k`.

use crate::field::ScalarField;
use crate::grid::GridSpec;

/// Three-argument minmod: the smallest-magnitude argument when all share a
/// sign, zero otherwise.
#[inline]
pub fn minmod(c1: f64, c2: f64, c3: f64) -> f64 {
    if c1 > 0.0 && c2 > 0.0 && c3 > 0.0 {
        c1.min(c2).min(c3)
    } else if c1 < 0.0 && c2 < 0.0 && c3 < 0.0 {
        c1.max(c2).max(c3)
    } else {
        0.0
    }
}

#[inline]
pub fn minmod2(c1: f64, c2: f64) -> f64 {
    if c1 > 0.0 && c2 > 0.0 {
        c1.min(c2)
    } else if c1 < 0.0 && c2 < 0.0 {
        c1.max(c2)
    } else {
        0.0
    }
}

/// Limited slopes `(∂x f, ∂y f)`.
///
/// The x-slope is evaluated on interior rows for `j ∈ −1..=nx`, the y-slope on
/// interior columns for `k ∈ −1..=ny`, which covers every face of the grid.
pub fn compute_slopes(f: &ScalarField, mu: f64, grid: &GridSpec) -> (ScalarField, ScalarField) {
    assert!(f.ghosts_valid(), "reconstruction of a field with stale ghosts");
    let mut sx = ScalarField::zeros(grid);
    let mut sy = ScalarField::zeros(grid);
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let (ix, iy) = (1.0 / grid.dx, 1.0 / grid.dy);
    for k in 0..ny {
        for j in -1..=nx {
            let (l, c, r) = (f.get(j - 1, k), f.get(j, k), f.get(j + 1, k));
            let s = minmod(mu * (c - l) * ix, 0.5 * (r - l) * ix, mu * (r - c) * ix);
            sx.set_raw(j, k, s);
        }
    }
    for k in -1..=ny {
        for j in 0..nx {
            let (b, c, t) = (f.get(j, k - 1), f.get(j, k), f.get(j, k + 1));
            let s = minmod(mu * (c - b) * iy, 0.5 * (t - b) * iy, mu * (t - c) * iy);
            sy.set_raw(j, k, s);
        }
    }
    sx.mark_ghosts_valid();
    sy.mark_ghosts_valid();
    (sx, sy)
}

/// One-sided values on one family of faces.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceValues {
    /// Value from the lower-index cell.
    pub minus: Vec<f64>,
    /// Value from the higher-index cell.
    pub plus: Vec<f64>,
}

/// Reconstructed point values at every face for one scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceValues {
    /// `(nx+1) × ny` faces, index `i + k·(nx+1)`.
    pub x: FaceValues,
    /// `nx × (ny+1)` faces, index `j + k·nx`.
    pub y: FaceValues,
}

impl InterfaceValues {
    pub fn x_index(grid: &GridSpec, i: usize, k: usize) -> usize {
        i + k * (grid.nx + 1)
    }

    pub fn y_index(grid: &GridSpec, j: usize, k: usize) -> usize {
        j + k * grid.nx
    }

    /// Smallest value on any face.
    pub fn min(&self) -> f64 {
        [&self.x.minus, &self.x.plus, &self.y.minus, &self.y.plus]
            .iter()
            .flat_map(|v| v.iter())
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

pub fn interface_values(f: &ScalarField, (sx, sy): (&ScalarField, &ScalarField), grid: &GridSpec) -> InterfaceValues {
    let (nx, ny) = (grid.nx, grid.ny);
    let (hx, hy) = (0.5 * grid.dx, 0.5 * grid.dy);
    let mut x = FaceValues {
        minus: Vec::with_capacity((nx + 1) * ny),
        plus: Vec::with_capacity((nx + 1) * ny),
    };
    for k in 0..ny as isize {
        for i in 0..=nx as isize {
            x.minus.push(f.get(i - 1, k) + hx * sx.get(i - 1, k));
            x.plus.push(f.get(i, k) - hx * sx.get(i, k));
        }
    }
    let mut y = FaceValues {
        minus: Vec::with_capacity(nx * (ny + 1)),
        plus: Vec::with_capacity(nx * (ny + 1)),
    };
    for k in 0..=ny as isize {
        for j in 0..nx as isize {
            y.minus.push(f.get(j, k - 1) + hy * sy.get(j, k - 1));
            y.plus.push(f.get(j, k) - hy * sy.get(j, k));
        }
    }
    InterfaceValues { x, y }
}

/// Slopes and face values in one call.
pub fn reconstruct(f: &ScalarField, mu: f64, grid: &GridSpec) -> InterfaceValues {
    let (sx, sy) = compute_slopes(f, mu, grid);
    interface_values(f, (&sx, &sy), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryKind;

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(1.0, 2.0, 3.0), 1.0);
        assert_eq!(minmod(-1.0, 2.0, -3.0), 0.0);
        assert_eq!(minmod(-1.0, -2.0, -3.0), -1.0);
        assert_eq!(minmod(0.0, 2.0, 3.0), 0.0);
        assert_eq!(minmod2(2.0, 0.5), 0.5);
        assert_eq!(minmod2(-2.0, 0.5), 0.0);
    }

    fn line_grid(n: usize, dx: f64) -> GridSpec {
        GridSpec::new(
            n,
            4,
            (0.0, n as f64 * dx),
            (0.0, 1.0),
            BoundaryKind::Extrapolate,
            BoundaryKind::Periodic,
        )
        .unwrap()
    }

    fn row_field(g: &GridSpec, vals: &[f64]) -> ScalarField {
        ScalarField::from_cells(g, |j, _| vals[j])
    }

    #[test]
    fn linear_data_gives_unit_slope() {
        let g = line_grid(8, 0.25);
        let f = ScalarField::from_fn(&g, |x, _| x);
        let (sx, sy) = compute_slopes(&f, 1.3, &g);
        for j in 1..7 {
            assert!((sx.at(j, 1) - 1.0).abs() < 1e-12);
            assert_eq!(sy.at(j, 1), 0.0);
        }
    }

    #[test]
    fn extremum_has_zero_slope() {
        let g = line_grid(5, 1.0);
        let f = row_field(&g, &[0.0, 1.0, 3.0, 1.0, 0.0]);
        let (sx, _) = compute_slopes(&f, 1.3, &g);
        assert_eq!(sx.at(2, 0), 0.0);
    }

    #[test]
    fn hand_evaluated_slope() {
        // Data (0, 1, 4) with μ = 1.3, Δx = 1: minmod(1.3, 2, 3.9) = 1.3.
        let g = line_grid(5, 1.0);
        let f = row_field(&g, &[-1.0, 0.0, 1.0, 4.0, 9.0]);
        let (sx, _) = compute_slopes(&f, 1.3, &g);
        assert!((sx.at(2, 0) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn zero_slopes_reproduce_averages() {
        let g = GridSpec::periodic(4, 4, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let f = ScalarField::from_cells(&g, |j, k| (j * 3 + k) as f64);
        let z = ScalarField::zeros(&g);
        let iv = interface_values(&f, (&z, &z), &g);
        for k in 0..4 {
            for i in 0..=4 {
                let idx = InterfaceValues::x_index(&g, i, k);
                assert_eq!(iv.x.minus[idx], f.get(i as isize - 1, k as isize));
                assert_eq!(iv.x.plus[idx], f.get(i as isize, k as isize));
            }
        }
    }

    #[test]
    fn linear_reconstruction_is_continuous() {
        let g = line_grid(8, 0.5);
        let f = ScalarField::from_fn(&g, |x, _| x);
        let iv = reconstruct(&f, 1.3, &g);
        for i in 2..7 {
            let idx = InterfaceValues::x_index(&g, i, 0);
            assert!((iv.x.minus[idx] - iv.x.plus[idx]).abs() < 1e-12);
        }
    }
}
