use super::splitting::SplitCoefficients;
use super::PrimitiveState;
use crate::config::SchemeConfig;
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::stencil::{jacobian_at, laplacian_at};

/// Discrete divergence of the velocity residual, `∇·𝓡ᵛ = R1 + R2 + R3`.
///
/// * `R1` collects the Coriolis and beta terms written through `q`,
/// * `R2` is the central discretization of `∇·(v·∇v)`,
/// * `R3` uses compact two-point averages for `∇·((Θ−b)/ε ∇φ + (h−b)/ε ∇θ)`.
///
/// The bracket in `R2` follows `cfg.jacobian_sign`, like the one in the PV
/// source.
pub fn div_velocity_residual(
    state: &PrimitiveState,
    coeffs: SplitCoefficients,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> ScalarField {
    let (eps, nu, bb) = (cfg.eps, cfg.nu, cfg.beta_bar);
    let b = coeffs.b;
    let h = state.depth(eps, nu, grid);
    let th = state.buoyancy(eps, nu, grid);
    let (u, v, phi, theta, q) = (&state.u, &state.v, &state.phi, &state.theta, &state.q);

    let (dx2, dy2) = (grid.dx * grid.dx, grid.dy * grid.dy);
    let (ix2, iy2) = (1.0 / dx2, 1.0 / dy2);
    let cross = 0.25 / (grid.dx * grid.dy);
    let sign = cfg.jacobian_sign.factor();

    ScalarField::from_cells(grid, |j, k| {
        let (j, k) = (j as isize, k as isize);
        let y = grid.y_center(k as usize);

        let r1 = bb * u.get(j, k) - (1.0 + eps * bb * y - b) / eps * (q.get(j, k) - bb * y + phi.get(j, k) / nu);

        let sq = |f: &ScalarField, a: isize, c: isize| f.get(a, c) * f.get(a, c);
        let uv = |a: isize, c: isize| u.get(a, c) * v.get(a, c);
        let r2 = (sq(u, j - 1, k) - 2.0 * sq(u, j, k) + sq(u, j + 1, k)) / (2.0 * dx2)
            + (sq(v, j, k - 1) - 2.0 * sq(v, j, k) + sq(v, j, k + 1)) / (2.0 * dy2)
            - jacobian_at(u, v, j, k, cross, sign)
            + cross * (uv(j + 1, k + 1) - uv(j - 1, k + 1) - uv(j + 1, k - 1) + uv(j - 1, k - 1));

        let compact = |coef: &ScalarField, f: &ScalarField| {
            let xs = (coef.get(j, k) + coef.get(j + 1, k)) * (f.get(j + 1, k) - f.get(j, k))
                - (coef.get(j - 1, k) + coef.get(j, k)) * (f.get(j, k) - f.get(j - 1, k));
            let ys = (coef.get(j, k) + coef.get(j, k + 1)) * (f.get(j, k + 1) - f.get(j, k))
                - (coef.get(j, k - 1) + coef.get(j, k)) * (f.get(j, k) - f.get(j, k - 1));
            xs / (2.0 * eps * dx2) + ys / (2.0 * eps * dy2)
        };
        let r3 = compact(&th, phi) - b / eps * laplacian_at(phi, j, k, ix2, iy2) + compact(&h, theta)
            - b / eps * laplacian_at(theta, j, k, ix2, iy2);

        r1 + r2 + r3
    })
}
