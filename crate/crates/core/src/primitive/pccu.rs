use super::splitting::{FaceSpeeds, PrimitiveFaces, SplitCoefficients};
use super::{buoyancy, depth, PrimitiveState};
use crate::config::SchemeConfig;
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::reconstruction::minmod2;
use crate::stencil::jacobian_at;

/// Nonstiff residual components `(𝓡ᵘ, 𝓡ᵛ, 𝓡^φ, 𝓡^θ, 𝓡^q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonstiffResidual {
    pub u: ScalarField,
    pub v: ScalarField,
    pub phi: ScalarField,
    pub theta: ScalarField,
    pub q: ScalarField,
}

impl NonstiffResidual {
    pub fn components(&self) -> [&ScalarField; 5] {
        [&self.u, &self.v, &self.phi, &self.theta, &self.q]
    }

    /// `𝓡^ψ = 𝓡^φ + 𝓡^θ`.
    pub fn psi(&self, grid: &GridSpec) -> ScalarField {
        ScalarField::combine(grid, &[(1.0, &self.phi), (1.0, &self.theta)])
    }
}

/// `B̃(V)·dV` for the x-direction nonstiff matrix.
#[inline]
pub fn btilde_apply(v: &[f64; 5], dv: &[f64; 5], c: SplitCoefficients, eps: f64, nu: f64) -> [f64; 5] {
    let h = depth(v[2], eps, nu);
    let th = buoyancy(v[3], eps, nu);
    let u = v[0];
    [
        u * dv[0] + (th - c.b) / eps * dv[2] + (h - c.b) / eps * dv[3],
        u * dv[1],
        nu * (h - c.a) / eps * dv[0] + u * dv[2],
        u * dv[3],
        v[4] * dv[0] + u * dv[4],
    ]
}

/// `C̃(V)·dV` for the y-direction nonstiff matrix.
#[inline]
pub fn ctilde_apply(v: &[f64; 5], dv: &[f64; 5], c: SplitCoefficients, eps: f64, nu: f64) -> [f64; 5] {
    let h = depth(v[2], eps, nu);
    let th = buoyancy(v[3], eps, nu);
    let w = v[1];
    [
        w * dv[0],
        w * dv[1] + (th - c.b) / eps * dv[2] + (h - c.b) / eps * dv[3],
        nu * (h - c.a) / eps * dv[1] + w * dv[2],
        w * dv[3],
        v[4] * dv[1] + w * dv[4],
    ]
}

#[inline]
fn mid(a: &[f64; 5], b: &[f64; 5]) -> [f64; 5] {
    std::array::from_fn(|i| 0.5 * (a[i] + b[i]))
}

#[inline]
fn diff(a: &[f64; 5], b: &[f64; 5]) -> [f64; 5] {
    std::array::from_fn(|i| a[i] - b[i])
}

/// Per-face quantities: anti-diffusion `𝓓̃`, jump term `B̃_Ψ` (or `C̃_Ψ`) and
/// the weights `s⁺/(s⁺−s⁻)`, `s⁻/(s⁺−s⁻)`.
struct FaceTerms {
    diffusion: Vec<[f64; 5]>,
    jump: Vec<[f64; 5]>,
    w_plus: Vec<f64>,
    w_minus: Vec<f64>,
}

fn face_terms(
    minus: &[[f64; 5]],
    plus: &[[f64; 5]],
    sp: &[f64],
    sm: &[f64],
    apply: impl Fn(&[f64; 5], &[f64; 5]) -> [f64; 5],
    jump_terms: bool,
) -> FaceTerms {
    let n = minus.len();
    let mut out = FaceTerms {
        diffusion: Vec::with_capacity(n),
        jump: Vec::with_capacity(n),
        w_plus: Vec::with_capacity(n),
        w_minus: Vec::with_capacity(n),
    };
    for i in 0..n {
        let (vm, vp, p, m) = (&minus[i], &plus[i], sp[i], sm[i]);
        let gap = p - m;
        let jump = diff(vp, vm);
        out.jump.push(if jump_terms {
            apply(&mid(vm, vp), &jump)
        } else {
            [0.0; 5]
        });
        if gap < 1e-12 * 1f64.max(p.abs()).max(m.abs()) {
            out.diffusion.push([0.0; 5]);
            out.w_plus.push(0.0);
            out.w_minus.push(0.0);
            continue;
        }
        let inv = 1.0 / gap;
        let coef = p * m * inv;
        let d: [f64; 5] = std::array::from_fn(|c| {
            let star = (p * vp[c] - m * vm[c]) * inv;
            let dv = minmod2(vp[c] - star, star - vm[c]);
            coef * (vp[c] - vm[c] - dv)
        });
        out.diffusion.push(d);
        out.w_plus.push(p * inv);
        out.w_minus.push(m * inv);
    }
    out
}

/// Path-conservative central-upwind residual of the nonstiff subsystem.
///
/// `faces` must come from `state` (same level), `speeds` from
/// [`super::split_speeds`] with the same `coeffs`.
pub fn pccu_residual(
    state: &PrimitiveState,
    faces: &PrimitiveFaces,
    coeffs: SplitCoefficients,
    speeds: &FaceSpeeds,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> NonstiffResidual {
    let (eps, nu) = (cfg.eps, cfg.nu);
    let jumps = cfg.jump_terms();
    let bx = |v: &[f64; 5], dv: &[f64; 5]| btilde_apply(v, dv, coeffs, eps, nu);
    let cy = |v: &[f64; 5], dv: &[f64; 5]| ctilde_apply(v, dv, coeffs, eps, nu);
    let fx = face_terms(
        &faces.x_minus,
        &faces.x_plus,
        &speeds.x_plus,
        &speeds.x_minus,
        bx,
        jumps,
    );
    let fy = face_terms(
        &faces.y_minus,
        &faces.y_plus,
        &speeds.y_plus,
        &speeds.y_minus,
        cy,
        jumps,
    );

    let (nx, ny) = (grid.nx, grid.ny);
    let (ix, iy) = (1.0 / grid.dx, 1.0 / grid.dy);
    let jac_scale = 0.25 / (grid.dx * grid.dy);
    let sign = cfg.jacobian_sign.factor();
    let rot0 = (1.0 - coeffs.b) / eps;

    let mut out: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(nx * ny));
    for k in 0..ny {
        let rot = rot0 + cfg.beta_bar * grid.y_center(k);
        for j in 0..nx {
            // x-faces j (west, j−½) and j+1 (east, j+½) of cell j.
            let w = j + k * (nx + 1);
            let e = w + 1;
            let inner_x = bx(
                &mid(&faces.x_minus[e], &faces.x_plus[w]),
                &diff(&faces.x_minus[e], &faces.x_plus[w]),
            );
            // y-faces j + k·nx (south) and j + (k+1)·nx (north).
            let s = j + k * nx;
            let n = s + nx;
            let inner_y = cy(
                &mid(&faces.y_minus[n], &faces.y_plus[s]),
                &diff(&faces.y_minus[n], &faces.y_plus[s]),
            );

            let (jk, kk) = (j as isize, k as isize);
            let bracket = jacobian_at(&state.phi, &state.theta, jk, kk, jac_scale, sign);
            let source = [-rot * state.v.at(j, k), rot * state.u.at(j, k), 0.0, 0.0, -bracket / nu];
            for c in 0..5 {
                let xr = fx.diffusion[e][c] - fx.diffusion[w][c] + inner_x[c] + fx.w_plus[w] * fx.jump[w][c]
                    - fx.w_minus[e] * fx.jump[e][c];
                let yr = fy.diffusion[n][c] - fy.diffusion[s][c] + inner_y[c] + fy.w_plus[s] * fy.jump[s][c]
                    - fy.w_minus[n] * fy.jump[n][c];
                out[c].push(ix * xr + iy * yr + source[c]);
            }
        }
    }
    let [u, v, phi, theta, q] = out.map(|vals| ScalarField::from_interior(grid, &vals));
    NonstiffResidual { u, v, phi, theta, q }
}
