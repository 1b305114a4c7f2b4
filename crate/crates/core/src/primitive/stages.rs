//! Semi-implicit stages of the primitive branch.
//!
//! Each stage updates `θ` and `q` explicitly, solves one Helmholtz problem for
//! `ψ = φ + θ`, recovers `φ = ψ − θ`, and updates the velocity in closed form.
//! [`stage_one`] with `γ = 1` is the first-order scheme; [`first_order_step`]
//! is an independent transcription of that scheme kept as a cross-check.

use super::divergence::div_velocity_residual;
use super::pccu::{pccu_residual, NonstiffResidual};
use super::splitting::{split_coefficients, split_speeds, FaceSpeeds, PrimitiveFaces, SplitCoefficients};
use super::PrimitiveState;
use crate::config::SchemeConfig;
use crate::elliptic::{HelmholtzProblem, HelmholtzSolver};
use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::stencil::{central_divergence, central_gradient, discrete_laplacian};

/// Everything the stages need from one evaluation of the nonstiff operator.
#[derive(Debug, Clone)]
pub struct NonstiffTerms {
    pub faces: PrimitiveFaces,
    pub coeffs: SplitCoefficients,
    pub speeds: FaceSpeeds,
    pub residual: NonstiffResidual,
    /// `∇·𝓡ᵛ`.
    pub div_residual: ScalarField,
    /// Central `∇·v`.
    pub div_v: ScalarField,
}

/// Reconstructs `state`, computes `a`, `b`, the split speeds, the residual and
/// the two divergence fields. Ghosts of `state` must be valid.
pub fn evaluate_nonstiff(state: &PrimitiveState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<NonstiffTerms> {
    evaluate_nonstiff_with(state, None, cfg, grid)
}

/// As [`evaluate_nonstiff`], but reusing `previous` splitting parameters when
/// they are still admissible for `state` (`a ≤ min h`, `b ≤ min Θ` over the
/// face values).
pub fn evaluate_nonstiff_with(
    state: &PrimitiveState,
    previous: Option<SplitCoefficients>,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> Result<NonstiffTerms> {
    let faces = PrimitiveFaces::reconstruct(state, cfg.mu, grid);
    let fresh = split_coefficients(&faces, cfg.eps, cfg.nu)?;
    let keep = 1.0 - cfg.eps;
    let coeffs = match previous {
        Some(p) if p.a * keep <= fresh.a && p.b * keep <= fresh.b => p,
        _ => fresh,
    };
    let speeds = split_speeds(&faces, coeffs, cfg.eps, cfg.nu)?;
    let residual = pccu_residual(state, &faces, coeffs, &speeds, cfg, grid);
    let div_residual = div_velocity_residual(state, coeffs, cfg, grid);
    let div_v = central_divergence(&state.u, &state.v, grid);
    Ok(NonstiffTerms {
        faces,
        coeffs,
        speeds,
        residual,
        div_residual,
        div_v,
    })
}

/// Right-hand side and coefficients of the first-stage elliptic problem.
pub fn assemble_stage_one(
    vn: &PrimitiveState,
    tn: &NonstiffTerms,
    theta_star: &ScalarField,
    q_star: &ScalarField,
    gdt: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> HelmholtzProblem {
    let (eps, nu, bb) = (cfg.eps, cfg.nu, cfg.beta_bar);
    let SplitCoefficients { a, b } = tn.coeffs;
    let ab = a * b * gdt * gdt;
    let r = &tn.residual;
    let rhs = ScalarField::from_cells(grid, |j, k| {
        let y = grid.y_center(k);
        let psi_n = vn.phi.at(j, k) + vn.theta.at(j, k);
        let r_psi = r.phi.at(j, k) + r.theta.at(j, k);
        -ab * (nu * q_star.at(j, k) - nu * bb * y - theta_star.at(j, k))
            - eps * nu * a * gdt * (tn.div_v.at(j, k) - gdt * tn.div_residual.at(j, k))
            + eps * eps * (psi_n - gdt * r_psi)
    });
    HelmholtzProblem {
        alpha: eps * eps + ab,
        delta: nu * ab,
        rhs,
        tol: cfg.elliptic_tol,
    }
}

/// Closed-form solution of `ε v* + bγΔt (v*)⊥ = ε vⁿ − εγΔt 𝓡ᵛ − bγΔt ∇ψ*`.
pub fn velocity_stage_one(
    vn: &PrimitiveState,
    tn: &NonstiffTerms,
    psi_star: &ScalarField,
    gdt: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> (ScalarField, ScalarField) {
    let eps = cfg.eps;
    let bg = tn.coeffs.b * gdt;
    let denom = eps * eps + bg * bg;
    let (px, py) = central_gradient(psi_star, grid);
    let (ru, rv) = (&tn.residual.u, &tn.residual.v);
    let u = ScalarField::from_cells(grid, |j, k| {
        (-eps * eps * gdt * ru.at(j, k) + eps * bg * gdt * (-rv.at(j, k)) + eps * eps * vn.u.at(j, k)
            - eps * bg * (-vn.v.at(j, k) + px.at(j, k))
            + bg * bg * (-py.at(j, k)))
            / denom
    });
    let v = ScalarField::from_cells(grid, |j, k| {
        (-eps * eps * gdt * rv.at(j, k) + eps * bg * gdt * ru.at(j, k) + eps * eps * vn.v.at(j, k)
            - eps * bg * (vn.u.at(j, k) + py.at(j, k))
            + bg * bg * px.at(j, k))
            / denom
    });
    (u, v)
}

/// First stage of the two-stage scheme (`γ = 1` gives the first-order scheme).
pub fn stage_one(
    vn: &PrimitiveState,
    tn: &NonstiffTerms,
    gamma: f64,
    dt: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
    solver: &mut HelmholtzSolver,
) -> Result<PrimitiveState> {
    let gdt = gamma * dt;
    let theta = vn.theta.axpy(-gdt, &tn.residual.theta, grid);
    let q = vn.q.axpy(-gdt, &tn.residual.q, grid);
    let problem = assemble_stage_one(vn, tn, &theta, &q, gdt, cfg, grid);
    let psi = solver.solve(&problem, grid, Some(&vn.psi(grid)))?;
    let phi = psi.axpy(-1.0, &theta, grid);
    let (u, v) = velocity_stage_one(vn, tn, &psi, gdt, cfg, grid);
    Ok(PrimitiveState {
        u,
        v,
        phi,
        theta,
        q,
        t: vn.t + gdt,
    })
}

/// Right-hand side and coefficients of the second-stage elliptic problem.
#[allow(clippy::too_many_arguments)]
pub fn assemble_stage_two(
    vn: &PrimitiveState,
    tn: &NonstiffTerms,
    vs: &PrimitiveState,
    ts: &NonstiffTerms,
    theta_new: &ScalarField,
    q_new: &ScalarField,
    gamma: f64,
    dt: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> HelmholtzProblem {
    let (eps, nu, bb) = (cfg.eps, cfg.nu, cfg.beta_bar);
    let (an, bn) = (tn.coeffs.a, tn.coeffs.b);
    let (a_s, b_s) = (ts.coeffs.a, ts.coeffs.b);
    let gdt = gamma * dt;
    let c = 0.5 / gamma;
    let abs = a_s * b_s * gdt * gdt;
    let cross = a_s * bn * gamma * (1.0 - gamma) * dt * dt;
    let lap_psi_s = discrete_laplacian(&vs.psi(grid), grid);
    let div_v_s = central_divergence(&vs.u, &vs.v, grid);
    let rhs = ScalarField::from_cells(grid, |j, k| {
        let y = grid.y_center(k);
        let psi_n = vn.phi.at(j, k) + vn.theta.at(j, k);
        let rpsi_n = tn.residual.phi.at(j, k) + tn.residual.theta.at(j, k);
        let rpsi_s = ts.residual.phi.at(j, k) + ts.residual.theta.at(j, k);
        -abs * (nu * q_new.at(j, k) - nu * bb * y - theta_new.at(j, k))
            - eps * nu * a_s * gdt * (tn.div_v.at(j, k) - (1.0 - c) * dt * tn.div_residual.at(j, k))
            - eps * nu * (an * (1.0 - gamma) * dt * div_v_s.at(j, k) - a_s * gdt * c * dt * ts.div_residual.at(j, k))
            + eps * eps * (psi_n - (1.0 - c) * dt * rpsi_n - c * dt * rpsi_s)
            - cross * (nu * vs.q.at(j, k) - nu * bb * y + vs.phi.at(j, k) - nu * lap_psi_s.at(j, k))
    });
    HelmholtzProblem {
        alpha: eps * eps + abs,
        delta: nu * abs,
        rhs,
        tol: cfg.elliptic_tol,
    }
}

/// Closed-form velocity of the second stage.
#[allow(clippy::too_many_arguments)]
pub fn velocity_stage_two(
    vn: &PrimitiveState,
    tn: &NonstiffTerms,
    vs: &PrimitiveState,
    ts: &NonstiffTerms,
    psi_new: &ScalarField,
    gamma: f64,
    dt: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> (ScalarField, ScalarField) {
    let eps = cfg.eps;
    let (bn, b_s) = (tn.coeffs.b, ts.coeffs.b);
    let c = 0.5 / gamma;
    let bg = b_s * gamma * dt;
    let denom = eps * eps + bg * bg;
    let cross = bn * b_s * gamma * (1.0 - gamma) * dt * dt;
    let (psx, psy) = central_gradient(&vs.psi(grid), grid);
    let (pnx, pny) = central_gradient(psi_new, grid);
    let (rnu, rnv) = (&tn.residual.u, &tn.residual.v);
    let (rsu, rsv) = (&ts.residual.u, &ts.residual.v);

    // Components are written for a generic vector w with w⊥ = (−w_y, w_x).
    let component = |j: usize, k: usize, x: bool| -> f64 {
        let pick = |ax: f64, ay: f64| if x { ax } else { ay };
        let perp = |ax: f64, ay: f64| if x { -ay } else { ax };
        let rs = pick(rsu.at(j, k), rsv.at(j, k));
        let rs_p = perp(rsu.at(j, k), rsv.at(j, k));
        let rn = pick(rnu.at(j, k), rnv.at(j, k));
        let rn_p = perp(rnu.at(j, k), rnv.at(j, k));
        let vs_c = pick(vs.u.at(j, k), vs.v.at(j, k));
        let vs_p = perp(vs.u.at(j, k), vs.v.at(j, k));
        let vn_c = pick(vn.u.at(j, k), vn.v.at(j, k));
        let vn_p = perp(vn.u.at(j, k), vn.v.at(j, k));
        let gs = pick(psx.at(j, k), psy.at(j, k));
        let gs_p = perp(psx.at(j, k), psy.at(j, k));
        let gn = pick(pnx.at(j, k), pny.at(j, k));
        let gn_p = perp(pnx.at(j, k), pny.at(j, k));
        (-eps * c * dt * (eps * rs - bg * rs_p) - eps * (1.0 - c) * dt * (eps * rn - bg * rn_p) - cross * (vs_c - gs_p)
            + eps * eps * vn_c
            - eps * bn * (1.0 - gamma) * dt * (vs_p + gs)
            - eps * bg * (vn_p + gn)
            + bg * bg * gn_p)
            / denom
    };
    let u = ScalarField::from_cells(grid, |j, k| component(j, k, true));
    let v = ScalarField::from_cells(grid, |j, k| component(j, k, false));
    (u, v)
}

/// Second stage. `vs` and `ts` are the (possibly blended) first-stage state
/// and its nonstiff terms.
#[allow(clippy::too_many_arguments)]
pub fn stage_two(
    vn: &PrimitiveState,
    tn: &NonstiffTerms,
    vs: &PrimitiveState,
    ts: &NonstiffTerms,
    gamma: f64,
    dt: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
    solver: &mut HelmholtzSolver,
) -> Result<PrimitiveState> {
    let c = 0.5 / gamma;
    let theta = ScalarField::combine(
        grid,
        &[
            (1.0, &vn.theta),
            (-(1.0 - c) * dt, &tn.residual.theta),
            (-c * dt, &ts.residual.theta),
        ],
    );
    let q = ScalarField::combine(
        grid,
        &[
            (1.0, &vn.q),
            (-(1.0 - c) * dt, &tn.residual.q),
            (-c * dt, &ts.residual.q),
        ],
    );
    let problem = assemble_stage_two(vn, tn, vs, ts, &theta, &q, gamma, dt, cfg, grid);
    let psi = solver.solve(&problem, grid, Some(&vs.psi(grid)))?;
    let phi = psi.axpy(-1.0, &theta, grid);
    let (u, v) = velocity_stage_two(vn, tn, vs, ts, &psi, gamma, dt, cfg, grid);
    Ok(PrimitiveState {
        u,
        v,
        phi,
        theta,
        q,
        t: vn.t + dt,
    })
}

/// The first-order semi-implicit step written out directly with `Δt`.
pub fn first_order_step(
    vn: &PrimitiveState,
    tn: &NonstiffTerms,
    dt: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
    solver: &mut HelmholtzSolver,
) -> Result<PrimitiveState> {
    let (eps, nu, bb) = (cfg.eps, cfg.nu, cfg.beta_bar);
    let SplitCoefficients { a, b } = tn.coeffs;
    let r = &tn.residual;

    let theta = vn.theta.axpy(-dt, &r.theta, grid);
    let q = vn.q.axpy(-dt, &r.q, grid);

    let psi_n = vn.psi(grid);
    let r_psi = r.psi(grid);
    let rhs = ScalarField::from_cells(grid, |j, k| {
        let y = grid.y_center(k);
        -a * b * dt * dt * (nu * q.at(j, k) - nu * bb * y - theta.at(j, k))
            - eps * nu * a * dt * (tn.div_v.at(j, k) - dt * tn.div_residual.at(j, k))
            + eps * eps * (psi_n.at(j, k) - dt * r_psi.at(j, k))
    });
    let problem = HelmholtzProblem {
        alpha: eps * eps + a * b * dt * dt,
        delta: nu * a * b * dt * dt,
        rhs,
        tol: cfg.elliptic_tol,
    };
    let psi = solver.solve(&problem, grid, Some(&psi_n))?;
    let phi = psi.axpy(-1.0, &theta, grid);

    let (px, py) = central_gradient(&psi, grid);
    let bdt = b * dt;
    let denom = eps * eps + bdt * bdt;
    let u = ScalarField::from_cells(grid, |j, k| {
        let (ru, rv) = (r.u.at(j, k), r.v.at(j, k));
        (-eps * eps * dt * ru - eps * b * dt * dt * rv + eps * eps * vn.u.at(j, k)
            - eps * bdt * (px.at(j, k) - vn.v.at(j, k))
            - bdt * bdt * py.at(j, k))
            / denom
    });
    let v = ScalarField::from_cells(grid, |j, k| {
        let (ru, rv) = (r.u.at(j, k), r.v.at(j, k));
        (-eps * eps * dt * rv + eps * b * dt * dt * ru + eps * eps * vn.v.at(j, k)
            - eps * bdt * (py.at(j, k) + vn.u.at(j, k))
            + bdt * bdt * px.at(j, k))
            / denom
    });
    Ok(PrimitiveState {
        u,
        v,
        phi,
        theta,
        q,
        t: vn.t + dt,
    })
}
