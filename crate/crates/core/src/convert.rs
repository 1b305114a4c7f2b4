//! Conversions between the primitive variables `(u, v, φ, θ, q)` and the
//! conservative variables `(h, hu, hv, hΘ)`.

use crate::config::SchemeConfig;
use crate::conservative::ConservativeState;
use crate::error::{Result, SolverError};
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::primitive::{buoyancy, depth, PrimitiveState};
use crate::stencil::vorticity;

/// Depths at or below this are treated as dry and rejected.
pub const MIN_DEPTH: f64 = 1e-12;

/// `U(V)` at a single point; `q` is ignored.
#[inline]
pub fn conservative_point(v: &[f64; 5], eps: f64, nu: f64) -> [f64; 4] {
    let h = depth(v[2], eps, nu);
    let th = buoyancy(v[3], eps, nu);
    [h, h * v[0], h * v[1], h * th]
}

fn depth_error(value: f64, j: usize, k: usize) -> SolverError {
    SolverError::NonPositiveDepth {
        quantity: "h",
        value,
        location: format!("cell ({j}, {k})"),
    }
}

/// Primitive state of `U`, with `q = ω + β̄y − φ/ν` from the central vorticity.
pub fn v_from_u(u: &ConservativeState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<PrimitiveState> {
    let (eps, nu) = (cfg.eps, cfg.nu);
    for k in 0..grid.ny {
        for (j, &h) in u.h.interior_row(k).iter().enumerate() {
            if !(h > MIN_DEPTH) {
                return Err(depth_error(h, j, k));
            }
        }
    }
    let vel_u = ScalarField::from_cells(grid, |j, k| u.hu.at(j, k) / u.h.at(j, k));
    let vel_v = ScalarField::from_cells(grid, |j, k| u.hv.at(j, k) / u.h.at(j, k));
    let phi = ScalarField::from_cells(grid, |j, k| nu * (u.h.at(j, k) - 1.0) / eps);
    let theta = ScalarField::from_cells(grid, |j, k| {
        let th = u.htheta.at(j, k) / u.h.at(j, k);
        nu * (th - 1.0) / (2.0 * eps)
    });
    let omega = vorticity(&vel_u, &vel_v, grid);
    let q = ScalarField::from_cells(grid, |j, k| {
        omega.at(j, k) + cfg.beta_bar * grid.y_center(k) - phi.at(j, k) / nu
    });
    Ok(PrimitiveState {
        u: vel_u,
        v: vel_v,
        phi,
        theta,
        q,
        t: u.t,
    })
}

/// Conservative state of `V` (the potential vorticity is not needed).
pub fn u_from_v(v: &PrimitiveState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<ConservativeState> {
    let (eps, nu) = (cfg.eps, cfg.nu);
    let h = v.depth(eps, nu, grid);
    for k in 0..grid.ny {
        for (j, &d) in h.interior_row(k).iter().enumerate() {
            if !(d > MIN_DEPTH) {
                return Err(depth_error(d, j, k));
            }
        }
    }
    let th = v.buoyancy(eps, nu, grid);
    Ok(ConservativeState {
        hu: ScalarField::from_cells(grid, |j, k| h.at(j, k) * v.u.at(j, k)),
        hv: ScalarField::from_cells(grid, |j, k| h.at(j, k) * v.v.at(j, k)),
        htheta: ScalarField::from_cells(grid, |j, k| h.at(j, k) * th.at(j, k)),
        h,
        t: v.t,
    })
}
