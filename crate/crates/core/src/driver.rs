//! Dual-formulation time stepping: both branches advance together and the
//! primitive state is blended with `V(U)` after every stage.

use crate::config::{QBlend, SchemeConfig, SchemeKind, SplitRefresh, ARS_GAMMA};
use crate::conservative::{
    ars_stage_one, ars_stage_two, cu_rhs, cu_speeds, explicit_rhs, ssp_rk2_step, ConservativeFaces, ConservativeState,
};
use crate::convert::{u_from_v, v_from_u};
use crate::elliptic::HelmholtzSolver;
use crate::error::{Result, SolverError};
use crate::field::ScalarField;
use crate::grid::GridSpec;
use crate::primitive::stages::{stage_one, stage_two};
use crate::primitive::{evaluate_nonstiff, evaluate_nonstiff_with, FaceSpeeds, PrimitiveFaces, PrimitiveState};

/// `exp(−c·ε^p)`.
pub fn switching_weight(eps: f64, c: f64, p: i32) -> f64 {
    (-c * eps.powi(p)).exp()
}

/// `(1−w)·V(U) + w·candidate`, componentwise. With [`QBlend::Unblended`] the
/// candidate's `q` is kept as is.
pub fn blend(
    candidate: &PrimitiveState,
    u: &ConservativeState,
    w: f64,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> Result<PrimitiveState> {
    if !(0.0..=1.0).contains(&w) {
        return Err(SolverError::Config(format!("blend weight {w} outside [0, 1]")));
    }
    // At w = 1 the conservative branch is not consulted at all; at small ε it
    // may have overflowed, and 0·∞ would poison the result.
    if w == 1.0 {
        return Ok(candidate.clone());
    }
    let mut out = v_from_u(u, cfg, grid)?;
    out.t = candidate.t;
    if w > 0.0 {
        let c = 1.0 - w;
        let mix = |a: &ScalarField, b: &ScalarField| ScalarField::combine(grid, &[(c, a), (w, b)]);
        out.u = mix(&out.u, &candidate.u);
        out.v = mix(&out.v, &candidate.v);
        out.phi = mix(&out.phi, &candidate.phi);
        out.theta = mix(&out.theta, &candidate.theta);
        out.q = mix(&out.q, &candidate.q);
    }
    if cfg.q_blend == QBlend::Unblended {
        out.q = candidate.q.clone();
    }
    Ok(out)
}

fn default_dt(cfg: &SchemeConfig, grid: &GridSpec) -> f64 {
    cfg.dt_max.unwrap_or(10.0 * cfg.cfl * grid.dx.min(grid.dy))
}

/// `CFL·min(Δx/max|s_x|, Δy/max|s_y|)`; axes with vanishing speeds are
/// ignored, and if every speed is zero the fallback step is returned.
pub fn dt_from_speeds(speeds: &FaceSpeeds, cfg: &SchemeConfig, grid: &GridSpec) -> f64 {
    let (sx, sy) = speeds.max_abs();
    let mut dt = f64::INFINITY;
    if sx > 0.0 {
        dt = dt.min(grid.dx / sx);
    }
    if sy > 0.0 {
        dt = dt.min(grid.dy / sy);
    }
    if dt.is_finite() {
        cfg.cfl * dt
    } else {
        default_dt(cfg, grid)
    }
}

/// Time step of the primitive branch, limited by the split (slow) speeds.
pub fn dt_ap(v: &PrimitiveState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<f64> {
    let terms = evaluate_nonstiff(v, cfg, grid)?;
    Ok(dt_from_speeds(&terms.speeds, cfg, grid))
}

/// Time step of the standalone conservative scheme.
pub fn dt_ex(u: &ConservativeState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<f64> {
    let v = v_from_u(u, cfg, grid)?;
    let faces = PrimitiveFaces::reconstruct(&v, cfg.mu, grid);
    let cf = ConservativeFaces::from_primitive(&faces, cfg.eps, cfg.nu);
    Ok(dt_from_speeds(&cu_speeds(&cf, cfg.eps, cfg.nu)?, cfg, grid))
}

/// Primitive and conservative solutions at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub v: PrimitiveState,
    pub u: ConservativeState,
    pub t: f64,
}

impl DualState {
    /// Both branches from conservative data, `V = V(U)`.
    pub fn from_conservative(u: ConservativeState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<Self> {
        let v = v_from_u(&u, cfg, grid)?;
        let t = u.t;
        Ok(Self { v, u, t })
    }

    /// Both branches from primitive data, `U = U(V)`.
    pub fn from_primitive(mut v: PrimitiveState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<Self> {
        v.fill_ghosts(grid);
        let u = u_from_v(&v, cfg, grid)?;
        let t = v.t;
        Ok(Self { v, u, t })
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
        self.v.t = t;
        self.u.t = t;
    }
}

/// State handed to a stage observer once a stage is complete.
#[derive(Debug)]
pub struct StageRecord<'a> {
    /// 1 or 2.
    pub stage: u8,
    /// Primitive stage result before blending (equal to `v` for the
    /// explicit scheme).
    pub candidate: &'a PrimitiveState,
    /// Blended primitive state.
    pub v: &'a PrimitiveState,
    pub u: &'a ConservativeState,
    pub weight: f64,
}

/// Summary of one completed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    /// Elliptic iterations summed over both stages (0 for the explicit scheme
    /// and for FFT solves).
    pub elliptic_iterations: usize,
}

/// Numerical breakdown detected during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp {
    /// Time level the failing step started from.
    pub t: f64,
    pub step: usize,
    pub stage: &'static str,
    /// First offending cell, when one can be named.
    pub cell: Option<(usize, usize)>,
    pub reason: String,
}

impl std::fmt::Display for BlowUp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "blow-up at t = {} (step {}, {})", self.t, self.step, self.stage)?;
        if let Some((j, k)) = self.cell {
            write!(f, " in cell ({j}, {k})")?;
        }
        write!(f, ": {}", self.reason)
    }
}

/// One simulation: grid, configuration, current dual state and the reusable
/// elliptic solver.
#[derive(Debug)]
pub struct Simulation {
    pub grid: GridSpec,
    pub cfg: SchemeConfig,
    pub state: DualState,
    pub steps: usize,
    weight: f64,
    solver: HelmholtzSolver,
}

fn check_finite(v: &PrimitiveState, t: f64, stage: &'static str) -> Result<()> {
    match v.detect_nonfinite() {
        None => Ok(()),
        Some((field, (j, k))) => Err(SolverError::NonFinite { field, j, k, t, stage }),
    }
}

impl Simulation {
    pub fn new(grid: GridSpec, cfg: SchemeConfig, state: DualState) -> Result<Self> {
        cfg.validate()?;
        if !state.v.u.matches(&grid) || !state.u.h.matches(&grid) {
            return Err(SolverError::DimensionMismatch(
                "initial state does not match the grid".into(),
            ));
        }
        let weight = match cfg.scheme {
            SchemeKind::Explicit => 0.0,
            _ => switching_weight(cfg.eps, cfg.switch_c, cfg.switch_p),
        };
        let solver = HelmholtzSolver::new(&grid);
        Ok(Self {
            grid,
            cfg,
            state,
            steps: 0,
            weight,
            solver,
        })
    }

    /// Blend weight in use (0 for the explicit scheme).
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Stable step from the current state for the configured scheme.
    pub fn stable_dt(&self) -> Result<f64> {
        match self.cfg.scheme {
            SchemeKind::Explicit => dt_ex(&self.state.u, &self.cfg, &self.grid),
            _ => dt_ap(&self.state.v, &self.cfg, &self.grid),
        }
    }

    /// Advances by the stable step, shortened so as not to pass `t_stop`.
    pub fn step_until(&mut self, t_stop: f64) -> Result<StepInfo> {
        self.advance(Some(t_stop), &mut |_| {})
    }

    /// Advances by the stable step.
    pub fn step(&mut self) -> Result<StepInfo> {
        self.advance(None, &mut |_| {})
    }

    /// Advances by the stable step, calling `observer` after each stage.
    pub fn step_observed(&mut self, observer: &mut dyn FnMut(&StageRecord<'_>)) -> Result<StepInfo> {
        self.advance(None, observer)
    }

    fn advance(&mut self, t_stop: Option<f64>, observer: &mut dyn FnMut(&StageRecord<'_>)) -> Result<StepInfo> {
        let info = match self.cfg.scheme {
            SchemeKind::Explicit => self.explicit_step(t_stop, observer)?,
            _ => self.dffv_step(t_stop, observer)?,
        };
        self.steps += 1;
        Ok(info)
    }

    fn clip(&self, dt: f64, t_stop: Option<f64>) -> (f64, Option<f64>) {
        match t_stop {
            Some(ts) if self.state.t + dt >= ts * (1.0 - 1e-14) - 1e-300 => (ts - self.state.t, Some(ts)),
            _ => (dt, None),
        }
    }

    fn dffv_step(&mut self, t_stop: Option<f64>, observer: &mut dyn FnMut(&StageRecord<'_>)) -> Result<StepInfo> {
        let (cfg, grid) = (&self.cfg, &self.grid);
        let (vn, un) = (&self.state.v, &self.state.u);
        let t0 = self.state.t;
        let gamma = ARS_GAMMA;
        let w = self.weight;

        let tn = evaluate_nonstiff(vn, cfg, grid)?;
        let (dt, landing) = self.clip(dt_from_speeds(&tn.speeds, cfg, grid), t_stop);

        let v_cand = stage_one(vn, &tn, gamma, dt, cfg, grid, &mut self.solver)?;
        let mut iterations = self.solver.last_iterations;
        let ln = cu_rhs(un, &tn.faces, cfg, grid)?;
        let us = ars_stage_one(un, &ln, gamma, dt, grid);
        let vs = blend(&v_cand, &us, w, cfg, grid)?;
        check_finite(&vs, t0, "stage 1")?;
        observer(&StageRecord {
            stage: 1,
            candidate: &v_cand,
            v: &vs,
            u: &us,
            weight: w,
        });

        let previous = (cfg.split_refresh == SplitRefresh::PerStep).then_some(tn.coeffs);
        let ts = evaluate_nonstiff_with(&vs, previous, cfg, grid)?;
        let v_cand = stage_two(vn, &tn, &vs, &ts, gamma, dt, cfg, grid, &mut self.solver)?;
        iterations += self.solver.last_iterations;
        let ls = cu_rhs(&us, &ts.faces, cfg, grid)?;
        let un1 = ars_stage_two(un, &ln, &ls, gamma, dt, grid);
        let vn1 = blend(&v_cand, &un1, w, cfg, grid)?;
        check_finite(&vn1, t0, "stage 2")?;
        observer(&StageRecord {
            stage: 2,
            candidate: &v_cand,
            v: &vn1,
            u: &un1,
            weight: w,
        });

        self.state.v = vn1;
        self.state.u = un1;
        self.state.set_time(landing.unwrap_or(t0 + dt));
        Ok(StepInfo {
            dt,
            elliptic_iterations: iterations,
        })
    }

    fn explicit_step(&mut self, t_stop: Option<f64>, observer: &mut dyn FnMut(&StageRecord<'_>)) -> Result<StepInfo> {
        let (cfg, grid) = (&self.cfg, &self.grid);
        let t0 = self.state.t;
        let (dt, landing) = self.clip(dt_ex(&self.state.u, cfg, grid)?, t_stop);
        let un1 = ssp_rk2_step(&self.state.u, |u| explicit_rhs(u, cfg, grid), dt, grid)?;
        if let Some((field, (j, k))) = un1.detect_nonfinite() {
            return Err(SolverError::NonFinite {
                field,
                j,
                k,
                t: t0,
                stage: "explicit step",
            });
        }
        let vn1 = v_from_u(&un1, cfg, grid)?;
        check_finite(&vn1, t0, "explicit step")?;
        observer(&StageRecord {
            stage: 2,
            candidate: &vn1,
            v: &vn1,
            u: &un1,
            weight: 0.0,
        });
        self.state.v = vn1;
        self.state.u = un1;
        self.state.set_time(landing.unwrap_or(t0 + dt));
        Ok(StepInfo {
            dt,
            elliptic_iterations: 0,
        })
    }
}

/// Result of [`run_simulation`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// States at the requested output times, in increasing order. The first
    /// entry is the initial state when `0` is among the requested times.
    pub snapshots: Vec<DualState>,
    pub blow_up: Option<BlowUp>,
    pub steps: usize,
    pub final_state: DualState,
}

/// Sorted, deduplicated output times within `[t0, t_final]`, always ending
/// with `t_final`.
pub fn output_times(t0: f64, t_final: f64, requested: &[f64]) -> Vec<f64> {
    let mut times: Vec<f64> = requested
        .iter()
        .copied()
        .filter(|t| t.is_finite() && *t >= t0 && *t <= t_final)
        .collect();
    times.push(t_final);
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

fn is_breakdown(e: &SolverError) -> Option<Option<(usize, usize)>> {
    match e {
        SolverError::NonFinite { j, k, .. } => Some(Some((*j, *k))),
        SolverError::NonPositiveDepth { .. }
        | SolverError::NegativeRadicand { .. }
        | SolverError::EllipticNoConvergence { .. } => Some(None),
        _ => None,
    }
}

/// Runs from `initial` to `t_final`, landing exactly on every requested
/// output time. Numerical breakdown ends the run early and is reported in
/// [`RunOutcome::blow_up`]; configuration errors are returned as `Err`.
pub fn run_simulation(
    grid: GridSpec,
    cfg: SchemeConfig,
    initial: DualState,
    t_final: f64,
    snapshot_times: &[f64],
) -> Result<RunOutcome> {
    let t0 = initial.t;
    if !(t_final >= t0) || !t_final.is_finite() {
        return Err(SolverError::Config(format!(
            "t_final {t_final} precedes the initial time {t0}"
        )));
    }
    let mut sim = Simulation::new(grid, cfg, initial)?;
    let times = output_times(t0, t_final, snapshot_times);
    let mut snapshots = Vec::with_capacity(times.len());
    let mut blow_up = None;
    'outer: for &target in &times {
        while sim.state.t < target {
            let (t, step) = (sim.state.t, sim.steps);
            match sim.step_until(target) {
                Ok(info) if info.dt > 0.0 && info.dt.is_finite() => {}
                Ok(info) => {
                    blow_up = Some(BlowUp {
                        t,
                        step,
                        stage: "time step",
                        cell: None,
                        reason: format!("time step collapsed to {:e}", info.dt),
                    });
                    break 'outer;
                }
                Err(e) => match is_breakdown(&e) {
                    Some(cell) => {
                        let stage = match &e {
                            SolverError::NonFinite { stage, .. } => *stage,
                            _ => "step",
                        };
                        blow_up = Some(BlowUp {
                            t,
                            step,
                            stage,
                            cell,
                            reason: e.to_string(),
                        });
                        break 'outer;
                    }
                    None => return Err(e),
                },
            }
        }
        snapshots.push(sim.state.clone());
    }
    Ok(RunOutcome {
        snapshots,
        blow_up,
        steps: sim.steps,
        final_state: sim.state,
    })
}
