//! Central-upwind finite-volume scheme for `(h, hu, hv, hΘ)` and its explicit
//! time integrators.

use crate::config::SchemeConfig;
use crate::convert::{conservative_point, v_from_u, MIN_DEPTH};
use crate::error::{Result, SolverError};
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::primitive::{FaceSpeeds, PrimitiveFaces};

/// Cell averages of the conservative variables. Also used to hold the
/// semi-discrete right-hand side `𝓛`, in which case `t` is meaningless.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservativeState {
    pub h: ScalarField,
    pub hu: ScalarField,
    pub hv: ScalarField,
    pub htheta: ScalarField,
    pub t: f64,
}

impl ConservativeState {
    pub fn from_fields(h: ScalarField, hu: ScalarField, hv: ScalarField, htheta: ScalarField) -> Self {
        Self {
            h,
            hu,
            hv,
            htheta,
            t: 0.0,
        }
    }

    pub fn components(&self) -> [&ScalarField; 4] {
        [&self.h, &self.hu, &self.hv, &self.htheta]
    }

    /// `Σ cᵢ·Uᵢ` componentwise with ghosts refilled; `t` is taken from the
    /// first term.
    pub fn combine(grid: &GridSpec, terms: &[(f64, &ConservativeState)]) -> Self {
        let pick =
            |c: usize| -> Vec<(f64, &ScalarField)> { terms.iter().map(|(s, u)| (*s, u.components()[c])).collect() };
        Self {
            h: ScalarField::combine(grid, &pick(0)),
            hu: ScalarField::combine(grid, &pick(1)),
            hv: ScalarField::combine(grid, &pick(2)),
            htheta: ScalarField::combine(grid, &pick(3)),
            t: terms.first().map_or(0.0, |(_, u)| u.t),
        }
    }

    pub fn detect_nonfinite(&self) -> Option<(&'static str, (usize, usize))> {
        const NAMES: [&str; 4] = ["h", "hu", "hv", "hTheta"];
        self.components()
            .iter()
            .zip(NAMES)
            .find_map(|(f, n)| f.detect_nonfinite().map(|c| (n, c)))
    }
}

/// Physical flux in x.
pub fn physical_flux_x(u: &[f64; 4], eps: f64, nu: f64) -> Result<[f64; 4]> {
    let h = checked_depth(u[0])?;
    let (vx, vy, th) = (u[1] / h, u[2] / h, u[3] / h);
    Ok([
        u[1],
        u[1] * vx + nu / (2.0 * eps * eps) * th * h * h,
        u[1] * vy,
        u[1] * th,
    ])
}

/// Physical flux in y.
pub fn physical_flux_y(u: &[f64; 4], eps: f64, nu: f64) -> Result<[f64; 4]> {
    let h = checked_depth(u[0])?;
    let (vx, vy, th) = (u[1] / h, u[2] / h, u[3] / h);
    Ok([
        u[2],
        u[2] * vx,
        u[2] * vy + nu / (2.0 * eps * eps) * th * h * h,
        u[2] * th,
    ])
}

fn checked_depth(h: f64) -> Result<f64> {
    if h > MIN_DEPTH {
        Ok(h)
    } else {
        Err(SolverError::NonPositiveDepth {
            quantity: "h",
            value: h,
            location: "interface".into(),
        })
    }
}

/// Conservative point values on every face, obtained from reconstructed
/// primitive values.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservativeFaces {
    pub x_minus: Vec<[f64; 4]>,
    pub x_plus: Vec<[f64; 4]>,
    pub y_minus: Vec<[f64; 4]>,
    pub y_plus: Vec<[f64; 4]>,
}

impl ConservativeFaces {
    pub fn from_primitive(faces: &PrimitiveFaces, eps: f64, nu: f64) -> Self {
        let map = |f: &[[f64; 5]]| f.iter().map(|v| conservative_point(v, eps, nu)).collect();
        Self {
            x_minus: map(&faces.x_minus),
            x_plus: map(&faces.x_plus),
            y_minus: map(&faces.y_minus),
            y_plus: map(&faces.y_plus),
        }
    }
}

fn sound(u: &[f64; 4], eps: f64, nu: f64) -> Result<f64> {
    let rad = nu * u[3];
    if rad >= 0.0 {
        Ok(rad.sqrt() / eps)
    } else if rad >= -1e-14 {
        Ok(0.0)
    } else {
        Err(SolverError::NegativeRadicand {
            value: rad,
            location: "conservative interface".into(),
        })
    }
}

/// One-sided speeds `σ±` from the largest and smallest flux-Jacobian
/// eigenvalues on either side of each face.
pub fn cu_speeds(faces: &ConservativeFaces, eps: f64, nu: f64) -> Result<FaceSpeeds> {
    let family = |minus: &[[f64; 4]], plus: &[[f64; 4]], comp: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut sp = Vec::with_capacity(minus.len());
        let mut sm = Vec::with_capacity(minus.len());
        for (um, up) in minus.iter().zip(plus) {
            let (hm, hp) = (checked_depth(um[0])?, checked_depth(up[0])?);
            let (cm, cp) = (sound(um, eps, nu)?, sound(up, eps, nu)?);
            let (wm, wp) = (um[comp] / hm, up[comp] / hp);
            sp.push((wm + cm).max(wp + cp).max(0.0));
            sm.push((wm - cm).min(wp - cp).min(0.0));
        }
        Ok((sp, sm))
    };
    let (x_plus, x_minus) = family(&faces.x_minus, &faces.x_plus, 1)?;
    let (y_plus, y_minus) = family(&faces.y_minus, &faces.y_plus, 2)?;
    Ok(FaceSpeeds {
        x_plus,
        x_minus,
        y_plus,
        y_minus,
    })
}

/// Central-upwind numerical flux through one face.
pub fn cu_flux(
    um: &[f64; 4],
    up: &[f64; 4],
    sp: f64,
    sm: f64,
    flux: impl Fn(&[f64; 4]) -> Result<[f64; 4]>,
) -> Result<[f64; 4]> {
    if um == up {
        return flux(um);
    }
    let (fm, fp) = (flux(um)?, flux(up)?);
    let gap = sp - sm;
    if gap <= 0.0 {
        return Ok(std::array::from_fn(|c| 0.5 * (fm[c] + fp[c])));
    }
    let inv = 1.0 / gap;
    Ok(std::array::from_fn(|c| {
        (sp * fm[c] - sm * fp[c]) * inv + sp * sm * inv * (up[c] - um[c])
    }))
}

/// Semi-discrete right-hand side `𝓛(U)` with face values in `faces` and
/// speeds in `speeds`; the Coriolis source uses the cell averages of `u`.
pub fn cu_rhs_with(
    u: &ConservativeState,
    faces: &ConservativeFaces,
    speeds: &FaceSpeeds,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> Result<ConservativeState> {
    let (eps, nu) = (cfg.eps, cfg.nu);
    let fx = |v: &[f64; 4]| physical_flux_x(v, eps, nu);
    let fy = |v: &[f64; 4]| physical_flux_y(v, eps, nu);
    let xf = (0..faces.x_minus.len())
        .map(|i| {
            cu_flux(
                &faces.x_minus[i],
                &faces.x_plus[i],
                speeds.x_plus[i],
                speeds.x_minus[i],
                fx,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let yf = (0..faces.y_minus.len())
        .map(|i| {
            cu_flux(
                &faces.y_minus[i],
                &faces.y_plus[i],
                speeds.y_plus[i],
                speeds.y_minus[i],
                fy,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let (nx, ny) = (grid.nx, grid.ny);
    let (ix, iy) = (1.0 / grid.dx, 1.0 / grid.dy);
    let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(nx * ny));
    for k in 0..ny {
        let rot = (1.0 + eps * cfg.beta_bar * grid.y_center(k)) / eps;
        for j in 0..nx {
            let (w, e) = (j + k * (nx + 1), j + 1 + k * (nx + 1));
            let (s, n) = (j + k * nx, j + (k + 1) * nx);
            let src = [0.0, rot * u.hv.at(j, k), -rot * u.hu.at(j, k), 0.0];
            for c in 0..4 {
                out[c].push(-(xf[e][c] - xf[w][c]) * ix - (yf[n][c] - yf[s][c]) * iy + src[c]);
            }
        }
    }
    let [h, hu, hv, htheta] = out.map(|v| ScalarField::from_interior(grid, &v));
    Ok(ConservativeState {
        h,
        hu,
        hv,
        htheta,
        t: u.t,
    })
}

/// `𝓛(U)` from reconstructed primitive face values.
pub fn cu_rhs(
    u: &ConservativeState,
    faces: &PrimitiveFaces,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> Result<ConservativeState> {
    let cf = ConservativeFaces::from_primitive(faces, cfg.eps, cfg.nu);
    let sp = cu_speeds(&cf, cfg.eps, cfg.nu)?;
    cu_rhs_with(u, &cf, &sp, cfg, grid)
}

/// `𝓛(U)` for the standalone conservative scheme: faces are reconstructed
/// from `V(U)`.
pub fn explicit_rhs(u: &ConservativeState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<ConservativeState> {
    let v = v_from_u(u, cfg, grid)?;
    let faces = PrimitiveFaces::reconstruct(&v, cfg.mu, grid);
    cu_rhs(u, &faces, cfg, grid)
}

/// `U* = Uⁿ + γΔt 𝓛ⁿ`.
pub fn ars_stage_one(
    un: &ConservativeState,
    ln: &ConservativeState,
    gamma: f64,
    dt: f64,
    grid: &GridSpec,
) -> ConservativeState {
    let mut out = ConservativeState::combine(grid, &[(1.0, un), (gamma * dt, ln)]);
    out.t = un.t + gamma * dt;
    out
}

/// `Uⁿ⁺¹ = Uⁿ + (1 − 1/(2γ))Δt 𝓛ⁿ + (1/(2γ))Δt 𝓛*`.
pub fn ars_stage_two(
    un: &ConservativeState,
    ln: &ConservativeState,
    ls: &ConservativeState,
    gamma: f64,
    dt: f64,
    grid: &GridSpec,
) -> ConservativeState {
    let c = 0.5 / gamma;
    let mut out = ConservativeState::combine(grid, &[(1.0, un), ((1.0 - c) * dt, ln), (c * dt, ls)]);
    out.t = un.t + dt;
    out
}

/// Both explicit ARS(2,2,2) stages with a caller-supplied right-hand side.
/// Returns `(U*, Uⁿ⁺¹)`.
pub fn explicit_ars_stages(
    un: &ConservativeState,
    mut rhs: impl FnMut(&ConservativeState) -> Result<ConservativeState>,
    dt: f64,
    gamma: f64,
    grid: &GridSpec,
) -> Result<(ConservativeState, ConservativeState)> {
    let ln = rhs(un)?;
    let us = ars_stage_one(un, &ln, gamma, dt, grid);
    let ls = rhs(&us)?;
    let un1 = ars_stage_two(un, &ln, &ls, gamma, dt, grid);
    Ok((us, un1))
}

/// Heun form of SSP-RK2.
pub fn ssp_rk2_step(
    un: &ConservativeState,
    mut rhs: impl FnMut(&ConservativeState) -> Result<ConservativeState>,
    dt: f64,
    grid: &GridSpec,
) -> Result<ConservativeState> {
    let l0 = rhs(un)?;
    let u1 = ConservativeState::combine(grid, &[(1.0, un), (dt, &l0)]);
    let l1 = rhs(&u1)?;
    let mut out = ConservativeState::combine(grid, &[(0.5, un), (0.5, &u1), (0.5 * dt, &l1)]);
    out.t = un.t + dt;
    Ok(out)
}
