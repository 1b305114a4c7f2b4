//! Derived fields, error norms, convergence orders and 1-D slices.

use crate::config::SchemeConfig;
use crate::convert::u_from_v;
use crate::driver::DualState;
use crate::error::{Result, SolverError};
use crate::field::ScalarField;
use crate::grid::{BoundaryKind, GridSpec};
use crate::stencil::{central_divergence, vorticity};

/// Column names of a snapshot, in file order.
pub const SNAPSHOT_COLUMNS: [&str; 10] = ["x", "y", "h", "u", "v", "Theta", "phi", "theta", "q", "omega"];

/// Every output field at one time. Derived quantities come from the
/// primitive (reported) solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub grid: GridSpec,
    pub scheme: String,
    pub eps: f64,
    pub nu: f64,
    pub beta_bar: f64,
    pub h: ScalarField,
    pub u: ScalarField,
    pub v: ScalarField,
    pub big_theta: ScalarField,
    pub phi: ScalarField,
    pub theta: ScalarField,
    pub q: ScalarField,
    pub omega: ScalarField,
}

impl Snapshot {
    pub fn from_state(state: &DualState, cfg: &SchemeConfig, grid: &GridSpec) -> Self {
        let v = &state.v;
        Self {
            t: state.t,
            grid: *grid,
            scheme: cfg.scheme.name().to_string(),
            eps: cfg.eps,
            nu: cfg.nu,
            beta_bar: cfg.beta_bar,
            h: v.depth(cfg.eps, cfg.nu, grid),
            u: v.u.clone(),
            v: v.v.clone(),
            big_theta: v.buoyancy(cfg.eps, cfg.nu, grid),
            phi: v.phi.clone(),
            theta: v.theta.clone(),
            q: v.q.clone(),
            omega: vorticity(&v.u, &v.v, grid),
        }
    }

    /// The eight stored fields in column order (after `x`, `y`).
    pub fn fields(&self) -> [&ScalarField; 8] {
        [
            &self.h,
            &self.u,
            &self.v,
            &self.big_theta,
            &self.phi,
            &self.theta,
            &self.q,
            &self.omega,
        ]
    }

    pub fn field(&self, name: &str) -> Option<&ScalarField> {
        SNAPSHOT_COLUMNS[2..]
            .iter()
            .position(|c| *c == name)
            .map(|i| self.fields()[i])
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.detect_nonfinite().is_none())
    }
}

/// `(h, hu, hΘ)` of the reported solution, the fields used in accuracy tables.
pub fn conserved_of(state: &DualState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<[ScalarField; 3]> {
    let u = u_from_v(&state.v, cfg, grid)?;
    Ok([u.h, u.hu, u.htheta])
}

fn check_same(f: &ScalarField, g: &ScalarField) -> Result<()> {
    if f.nx() != g.nx() || f.ny() != g.ny() {
        return Err(SolverError::DimensionMismatch(format!(
            "{}×{} versus {}×{}",
            f.nx(),
            f.ny(),
            g.nx(),
            g.ny()
        )));
    }
    Ok(())
}

/// `ΔxΔy·Σ|f − g|` over interior cells.
pub fn l1_error(f: &ScalarField, g: &ScalarField, grid: &GridSpec) -> Result<f64> {
    check_same(f, g)?;
    if !f.matches(grid) {
        return Err(SolverError::DimensionMismatch("fields do not match the grid".into()));
    }
    let mut acc = 0.0;
    for k in 0..grid.ny {
        for (a, b) in f.interior_row(k).iter().zip(g.interior_row(k)) {
            acc += (a - b).abs();
        }
    }
    Ok(acc * grid.cell_area())
}

/// `ΔxΔy·Σ|f|`.
pub fn l1_norm(f: &ScalarField, grid: &GridSpec) -> f64 {
    (0..grid.ny)
        .map(|k| f.interior_row(k).iter().map(|x| x.abs()).sum::<f64>())
        .sum::<f64>()
        * grid.cell_area()
}

/// Block average of a fine field onto `coarse`; the fine mesh must be an
/// integer multiple of the coarse one along both axes, with the same factor.
pub fn restrict(fine: &ScalarField, coarse: &GridSpec) -> Result<ScalarField> {
    let (fx, fy) = (fine.nx(), fine.ny());
    if fx % coarse.nx != 0 || fy % coarse.ny != 0 || fx / coarse.nx != fy / coarse.ny {
        return Err(SolverError::DimensionMismatch(format!(
            "cannot restrict {fx}×{fy} onto {}×{}",
            coarse.nx, coarse.ny
        )));
    }
    let r = fx / coarse.nx;
    let inv = 1.0 / (r * r) as f64;
    Ok(ScalarField::from_cells(coarse, |j, k| {
        let mut s = 0.0;
        for kk in k * r..(k + 1) * r {
            s += fine.interior_row(kk)[j * r..(j + 1) * r].iter().sum::<f64>();
        }
        s * inv
    }))
}

/// `log₂(e_{i−1}/e_i)` for consecutive entries of a halving sequence.
pub fn eoc(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// `log(e_{i−1}/e_i)/log(r_i)` with explicit mesh ratios `r_i = Δx_{i−1}/Δx_i`.
pub fn eoc_with_ratios(errors: &[f64], ratios: &[f64]) -> Result<Vec<f64>> {
    if ratios.len() + 1 != errors.len() {
        return Err(SolverError::DimensionMismatch(format!(
            "{} errors need {} ratios, got {}",
            errors.len(),
            errors.len().saturating_sub(1),
            ratios.len()
        )));
    }
    Ok(errors
        .windows(2)
        .zip(ratios)
        .map(|(w, r)| (w[0] / w[1]).ln() / r.ln())
        .collect())
}

/// Errors and orders for several fields over a sequence of meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub scenario: String,
    pub eps: f64,
    /// Cells per axis of each mesh, coarse to fine.
    pub meshes: Vec<usize>,
    /// Finest mesh solved: the fixed reference, or twice the finest listed
    /// mesh for consecutive comparison.
    pub reference_mesh: usize,
    /// `(field name, error per mesh)`.
    pub fields: Vec<(String, Vec<f64>)>,
}

impl ConvergenceReport {
    pub fn eocs(&self, field: &str) -> Option<Vec<f64>> {
        self.errors(field).map(eoc)
    }

    pub fn errors(&self, field: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(n, _)| n == field).map(|(_, e)| e.as_slice())
    }
}

/// `ΔxΔy·Σ|∇·v|` with the central divergence.
pub fn divergence_l1(u: &ScalarField, v: &ScalarField, grid: &GridSpec) -> f64 {
    l1_norm(&central_divergence(u, v, grid), grid)
}

/// Discrete total variation `Σ|Δ_x f|Δy + Σ|Δ_y f|Δx` over interior
/// neighbours (no wrap-around).
pub fn total_variation(f: &ScalarField, grid: &GridSpec) -> f64 {
    let mut tx = 0.0;
    let mut ty = 0.0;
    for k in 0..grid.ny {
        let row = f.interior_row(k);
        tx += row.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
        if k + 1 < grid.ny {
            let up = f.interior_row(k + 1);
            ty += row.iter().zip(up).map(|(a, b)| (b - a).abs()).sum::<f64>();
        }
    }
    tx * grid.dy + ty * grid.dx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    /// Values along `x` at a fixed `y`.
    AlongX,
    /// Values along `y` at a fixed `x`.
    AlongY,
}

/// Snapshot values along one grid line.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub axis: SliceAxis,
    /// The fixed coordinate.
    pub at: f64,
    pub t: f64,
    /// Coordinates along the line.
    pub positions: Vec<f64>,
    /// `(name, values)` for each snapshot field, in snapshot column order.
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Slice {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Largest one-sided difference quotient of a column along the line.
    pub fn max_abs_derivative(&self, name: &str) -> Option<f64> {
        let vals = self.column(name)?;
        Some(
            vals.windows(2)
                .zip(self.positions.windows(2))
                .map(|(v, p)| ((v[1] - v[0]) / (p[1] - p[0])).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Weights `(i0, i1, w1)` interpolating linearly between the two cell centres
/// around `c`, clamped at the outermost centres.
fn bracket(c: f64, lo: f64, d: f64, n: usize) -> (usize, usize, f64) {
    let s = ((c - lo) / d - 0.5).clamp(0.0, (n - 1) as f64);
    let i0 = (s.floor() as usize).min(n - 1);
    let i1 = (i0 + 1).min(n - 1);
    (i0, i1, s - i0 as f64)
}

/// Slice through `snap` at the fixed coordinate `at`, linearly interpolated
/// between the neighbouring rows or columns of cells.
pub fn slice(snap: &Snapshot, axis: SliceAxis, at: f64) -> Result<Slice> {
    let g = &snap.grid;
    let (lo, hi) = match axis {
        SliceAxis::AlongX => (g.y_min, g.y_max),
        SliceAxis::AlongY => (g.x_min, g.x_max),
    };
    if !(at >= lo && at <= hi) {
        return Err(SolverError::Config(format!(
            "slice coordinate {at} outside [{lo}, {hi}]"
        )));
    }
    type Pick = Box<dyn Fn(&ScalarField, usize) -> f64>;
    let (positions, pick): (Vec<f64>, Pick) = match axis {
        SliceAxis::AlongX => {
            let (k0, k1, w) = bracket(at, g.y_min, g.dy, g.ny);
            (
                (0..g.nx).map(|j| g.x_center(j)).collect(),
                Box::new(move |f, j| (1.0 - w) * f.at(j, k0) + w * f.at(j, k1)),
            )
        }
        SliceAxis::AlongY => {
            let (j0, j1, w) = bracket(at, g.x_min, g.dx, g.nx);
            (
                (0..g.ny).map(|k| g.y_center(k)).collect(),
                Box::new(move |f, k| (1.0 - w) * f.at(j0, k) + w * f.at(j1, k)),
            )
        }
    };
    let columns = SNAPSHOT_COLUMNS[2..]
        .iter()
        .zip(snap.fields())
        .map(|(name, f)| (name.to_string(), (0..positions.len()).map(|i| pick(f, i)).collect()))
        .collect();
    Ok(Slice {
        axis,
        at,
        t: snap.t,
        positions,
        columns,
    })
}

/// Whether `grid` wraps along the slice direction.
pub fn slice_is_periodic(grid: &GridSpec, axis: SliceAxis) -> bool {
    match axis {
        SliceAxis::AlongX => grid.bc_x == BoundaryKind::Periodic,
        SliceAxis::AlongY => grid.bc_y == BoundaryKind::Periodic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::periodic(n, n, (0.0, 1.0), (0.0, 1.0)).unwrap()
    }

    #[test]
    fn l1_of_identical_fields_is_zero() {
        let g = grid(8);
        let f = ScalarField::from_fn(&g, |x, y| x * y);
        assert_eq!(l1_error(&f, &f, &g).unwrap(), 0.0);
        let h = ScalarField::constant(&g, 1.0);
        assert!((l1_error(&f.axpy(1.0, &h, &g), &f, &g).unwrap() - 1.0).abs() < 1e-14);
        assert!(l1_error(&f, &ScalarField::zeros(&grid(4)), &g).is_err());
    }

    #[test]
    fn eoc_of_quartering_errors_is_two() {
        assert_eq!(eoc(&[4e-4, 1e-4]), vec![2.0]);
        let r = eoc_with_ratios(&[9.0, 1.0], &[3.0]).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-15);
        assert!(eoc_with_ratios(&[1.0], &[2.0]).is_err());
    }

    #[test]
    fn restriction_preserves_sums() {
        let (gc, gf) = (grid(4), grid(8));
        let f = ScalarField::from_cells(&gf, |j, k| (j * 7 + k * k) as f64);
        let c = restrict(&f, &gc).unwrap();
        assert_eq!(c.sum() * gc.cell_area(), f.sum() * gf.cell_area());
        assert_eq!(c.at(0, 0), (0.0 + 7.0 + 1.0 + 8.0) / 4.0);
        assert!(restrict(&f, &grid(5)).is_err());
    }

    #[test]
    fn total_variation_of_a_step() {
        let g = grid(4);
        let f = ScalarField::from_cells(&g, |j, _| if j >= 2 { 1.0 } else { 0.0 });
        assert!((total_variation(&f, &g) - 4.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn slice_between_rows_interpolates() {
        let g = grid(4);
        let cfg = SchemeConfig::new(1.0, 1.0, 0.0);
        let mut state = crate::primitive::PrimitiveState::zeros(&g);
        state.u = ScalarField::from_cells(&g, |_, k| k as f64);
        let d = DualState::from_primitive(state, &cfg, &g).unwrap();
        let snap = Snapshot::from_state(&d, &cfg, &g);
        let s = slice(&snap, SliceAxis::AlongX, 0.5).unwrap();
        assert_eq!(s.column("u").unwrap(), &[1.5; 4]);
        let s = slice(&snap, SliceAxis::AlongX, 0.0).unwrap();
        assert_eq!(s.column("u").unwrap(), &[0.0; 4]);
        assert!(slice(&snap, SliceAxis::AlongY, 2.0).is_err());
    }
}
