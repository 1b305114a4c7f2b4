//! Initial data for the test problems, with the reference scales that turn
//! the dimensional setups into nondimensional ones.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::config::SchemeConfig;
use crate::conservative::ConservativeState;
use crate::convert::u_from_v;
use crate::diagnostics::{conserved_of, l1_error, restrict, ConvergenceReport};
use crate::driver::{run_simulation, DualState};
use crate::error::{Result, SolverError};
use crate::field::ScalarField;
use crate::grid::{BoundaryKind, GridSpec};
use crate::primitive::PrimitiveState;
use crate::stencil::{central_gradient, discrete_laplacian, vorticity};

const HOUR: f64 = 3600.0;
const DAY: f64 = 86400.0;

/// Reference scales of a dimensional setup (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub l0: f64,
    pub v0: f64,
    pub theta0: f64,
    pub h0: f64,
    pub f0: f64,
    pub beta: f64,
}

impl Reference {
    /// Rossby number `V₀/(L₀f₀)`.
    pub fn eps(&self) -> f64 {
        self.v0 / (self.l0 * self.f0)
    }

    /// Burger number `Θ₀H₀/(L₀f₀)²`.
    pub fn nu(&self) -> f64 {
        self.theta0 * self.h0 / (self.l0 * self.f0).powi(2)
    }

    /// `β·L₀·T₀`.
    pub fn beta_bar(&self) -> f64 {
        self.beta * self.l0 * self.time_scale()
    }

    /// `T₀ = L₀/V₀` in seconds.
    pub fn time_scale(&self) -> f64 {
        self.l0 / self.v0
    }

    pub fn config(&self) -> SchemeConfig {
        SchemeConfig::new(self.eps(), self.nu(), self.beta_bar())
    }
}

pub mod constants {
    pub const G_VORTEX: f64 = 9.80616;
    pub const F0_VORTEX: f64 = 6.147e-5;
    pub const VORTEX_H0: f64 = 750.0;
    pub const VORTEX_PHI0: f64 = 75.0;
    pub const VORTEX_L: f64 = 5.0e6;

    pub const SHEAR_H0: f64 = 1076.0;
    pub const SHEAR_PHI0: f64 = 30.0;
    pub const SHEAR_L: f64 = 5.0e6;

    pub const ANTI_G: f64 = 9.81;
    pub const ANTI_F0: f64 = 6.1635e-5;
    pub const ANTI_BETA: f64 = 2.0746e-11;
    pub const ANTI_H0: f64 = 163.1;
    pub const ANTI_A: f64 = 0.95;
    pub const ANTI_D: f64 = 1.3e5;
    pub const ANTI_LX: f64 = 1.0e6;
    pub const ANTI_LY: f64 = 6.0e5;
}
use constants::*;

pub fn vortex_pair_reference() -> Reference {
    let l0 = 3.0 * (VORTEX_L + VORTEX_L) / 20.0;
    Reference {
        l0,
        v0: G_VORTEX * VORTEX_PHI0 / (l0 * F0_VORTEX),
        theta0: G_VORTEX,
        h0: VORTEX_H0,
        f0: F0_VORTEX,
        beta: 0.0,
    }
}

pub fn shear_flow_reference() -> Reference {
    let l0 = SHEAR_L / 3.0;
    Reference {
        l0,
        v0: G_VORTEX * SHEAR_PHI0 / (l0 * F0_VORTEX),
        theta0: G_VORTEX,
        h0: SHEAR_H0,
        f0: F0_VORTEX,
        beta: 0.0,
    }
}

pub fn anticyclone_reference() -> Reference {
    Reference {
        l0: 1.0e6,
        v0: 1.0,
        theta0: ANTI_G,
        h0: ANTI_H0,
        f0: ANTI_F0,
        beta: ANTI_BETA,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Accuracy,
    WavetrainRsw,
    WavetrainTrsw,
    VortexPair,
    ShearFlow,
    ShearFlowRsw,
    Anticyclone,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Accuracy,
        ScenarioKind::WavetrainRsw,
        ScenarioKind::WavetrainTrsw,
        ScenarioKind::VortexPair,
        ScenarioKind::ShearFlow,
        ScenarioKind::ShearFlowRsw,
        ScenarioKind::Anticyclone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Accuracy => "accuracy",
            ScenarioKind::WavetrainRsw => "wavetrain_rsw",
            ScenarioKind::WavetrainTrsw => "wavetrain_trsw",
            ScenarioKind::VortexPair => "vortex_pair",
            ScenarioKind::ShearFlow => "shear_flow",
            ScenarioKind::ShearFlowRsw => "shear_flow_rsw",
            ScenarioKind::Anticyclone => "anticyclone",
        }
    }

    /// Mesh used when none is requested.
    pub fn default_mesh(self) -> (usize, usize) {
        match self {
            ScenarioKind::Accuracy => (64, 64),
            ScenarioKind::WavetrainRsw | ScenarioKind::WavetrainTrsw => (126, 162),
            ScenarioKind::VortexPair => (150, 150),
            ScenarioKind::ShearFlow | ScenarioKind::ShearFlowRsw => (100, 100),
            ScenarioKind::Anticyclone => (100, 60),
        }
    }

    /// Domain and boundary kinds in nondimensional units.
    pub fn domain(self) -> ((f64, f64), (f64, f64), BoundaryKind, BoundaryKind) {
        use BoundaryKind::*;
        match self {
            ScenarioKind::Accuracy => ((0.0, 1.0), (0.0, 1.0), Periodic, Periodic),
            ScenarioKind::WavetrainRsw | ScenarioKind::WavetrainTrsw => {
                ((0.0, 2.0 * PI), (0.0, 320.0), Periodic, Extrapolate)
            }
            ScenarioKind::VortexPair => {
                let l = VORTEX_L / vortex_pair_reference().l0;
                ((0.0, l), (0.0, l), Periodic, Periodic)
            }
            ScenarioKind::ShearFlow | ScenarioKind::ShearFlowRsw => {
                let l = SHEAR_L / shear_flow_reference().l0;
                ((0.0, l), (0.0, l), Periodic, Periodic)
            }
            ScenarioKind::Anticyclone => {
                let r = anticyclone_reference();
                let (lx, ly) = (ANTI_LX / r.l0, ANTI_LY / r.l0);
                ((-lx, lx), (-ly, ly), Extrapolate, Extrapolate)
            }
        }
    }

    pub fn grid(self, nx: usize, ny: usize) -> Result<GridSpec> {
        let (x, y, bx, by) = self.domain();
        GridSpec::new(nx, ny, x, y, bx, by)
    }

    /// Reference scales, for the dimensional setups.
    pub fn reference(self) -> Option<Reference> {
        match self {
            ScenarioKind::VortexPair => Some(vortex_pair_reference()),
            ScenarioKind::ShearFlow | ScenarioKind::ShearFlowRsw => Some(shear_flow_reference()),
            ScenarioKind::Anticyclone => Some(anticyclone_reference()),
            _ => None,
        }
    }

    /// Nondimensional final time and intermediate output times.
    pub fn default_times(self) -> (f64, Vec<f64>) {
        let nd = |seconds: f64| seconds / self.reference().map_or(1.0, |r| r.time_scale());
        match self {
            ScenarioKind::Accuracy => (0.01, vec![]),
            ScenarioKind::WavetrainRsw | ScenarioKind::WavetrainTrsw => (20.0 * PI, vec![1.4 * PI, 2.8 * PI]),
            ScenarioKind::VortexPair => (nd(20.0 * HOUR), vec![]),
            ScenarioKind::ShearFlow | ScenarioKind::ShearFlowRsw => (nd(10.0 * DAY), vec![]),
            ScenarioKind::Anticyclone => (nd(30.0 * DAY), vec![nd(20.0 * DAY)]),
        }
    }

    /// Parameters of the default configuration (`ε`, `ν`, `β̄`).
    pub fn default_config(self) -> SchemeConfig {
        match self.reference() {
            Some(r) => r.config(),
            None => SchemeConfig::new(if self == ScenarioKind::Accuracy { 1e-2 } else { 1.0 }, 1.0, 0.0),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SolverError::Config(format!("unknown scenario '{s}'")))
    }
}

/// A ready-to-run problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub grid: GridSpec,
    pub cfg: SchemeConfig,
    pub initial: DualState,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
}

impl Scenario {
    /// Builds `kind` on an `nx × ny` mesh with its default parameters.
    pub fn new(kind: ScenarioKind, nx: usize, ny: usize) -> Result<Self> {
        Self::with_config(kind, nx, ny, kind.default_config())
    }

    /// Builds `kind` with a caller-supplied configuration. For the accuracy
    /// test `cfg.eps` selects the data; elsewhere the data are fixed and the
    /// parameters only change the equations they are evolved with.
    pub fn with_config(kind: ScenarioKind, nx: usize, ny: usize, cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = kind.grid(nx, ny)?;
        let initial = match kind {
            ScenarioKind::Accuracy => init_accuracy(&grid, &cfg)?,
            ScenarioKind::WavetrainRsw => init_wavetrain(&grid, false, &cfg)?,
            ScenarioKind::WavetrainTrsw => init_wavetrain(&grid, true, &cfg)?,
            ScenarioKind::VortexPair => init_vortex_pair(&grid, &cfg)?,
            ScenarioKind::ShearFlow => init_shear_flow(&grid, true, &cfg)?,
            ScenarioKind::ShearFlowRsw => init_shear_flow(&grid, false, &cfg)?,
            ScenarioKind::Anticyclone => init_anticyclone(&grid, &cfg)?,
        };
        let (t_final, snapshot_times) = kind.default_times();
        Ok(Self {
            kind,
            grid,
            cfg,
            initial,
            t_final,
            snapshot_times,
        })
    }
}

/// Conservative data sampled at cell centres: `fields(x, y) = (h, u, v, Θ)`.
fn sample(grid: &GridSpec, cfg: &SchemeConfig, fields: impl Fn(f64, f64) -> [f64; 4]) -> Result<DualState> {
    let n = grid.cell_count();
    let mut cols: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
    for k in 0..grid.ny {
        for j in 0..grid.nx {
            let [h, u, v, th] = fields(grid.x_center(j), grid.y_center(k));
            for (c, val) in cols.iter_mut().zip([h, h * u, h * v, h * th]) {
                c.push(val);
            }
        }
    }
    let [h, hu, hv, ht] = cols.map(|c| ScalarField::from_interior(grid, &c));
    DualState::from_conservative(ConservativeState::from_fields(h, hu, hv, ht), cfg, grid)
}

/// Accuracy test on `[0,1]²`. Built from the perturbations `φ`, `θ` directly
/// so that tiny `ε` does not cancel `h − 1` to round-off.
pub fn init_accuracy(grid: &GridSpec, cfg: &SchemeConfig) -> Result<DualState> {
    let (eps, nu) = (cfg.eps, cfg.nu);
    let tp = 2.0 * PI;
    let mut v = PrimitiveState::zeros(grid);
    v.u = ScalarField::from_fn(grid, |x, y| PI * (tp * x).sin() * (tp * y).cos());
    v.v = ScalarField::from_fn(grid, |x, y| PI * (tp * x).cos() * (tp * y).sin());
    // h − 1 = 0.9ε²cos(2π(x+y)) and Θ − 1 = 0.9ε sin sin.
    v.phi = ScalarField::from_fn(grid, |x, y| nu * 0.9 * eps * (tp * (x + y)).cos());
    v.theta = ScalarField::from_fn(grid, |x, y| nu * 0.45 * (tp * x).sin() * (tp * y).sin());
    with_vorticity_q(v, cfg, grid)
}

/// Sets `q = ω + β̄y − φ/ν` from the discrete vorticity and pairs `V` with
/// `U(V)`.
fn with_vorticity_q(mut v: PrimitiveState, cfg: &SchemeConfig, grid: &GridSpec) -> Result<DualState> {
    v.fill_ghosts(grid);
    let omega = vorticity(&v.u, &v.v, grid);
    v.q = ScalarField::from_cells(grid, |j, k| {
        omega.at(j, k) + cfg.beta_bar * grid.y_center(k) - v.phi.at(j, k) / cfg.nu
    });
    let u = u_from_v(&v, cfg, grid)?;
    Ok(DualState { t: 0.0, v, u })
}

/// Gaussian-enveloped gravity-wave train on `[0,2π]×[0,320]`.
pub fn init_wavetrain(grid: &GridSpec, thermal: bool, cfg: &SchemeConfig) -> Result<DualState> {
    const D: f64 = 40.0;
    let d2 = D * D;
    sample(grid, cfg, |x, y| {
        let yc = y - 160.0;
        let env = (-yc * yc / d2).exp();
        let shape = (1.0 + (2.0 - 4.0 * yc * yc / d2) / d2) * env;
        let h = 1.0 + 0.2 * x.sin() * shape;
        let u = 0.2 * x.sin() * (2f64.sqrt() - 2.0 * yc / d2) * env;
        let v = 0.2 * x.cos() * (2.0 * 2f64.sqrt() * yc / d2 - 1.0) * env;
        let th = if thermal { 1.0 + 0.5 * x.cos() * shape } else { 1.0 };
        [h, u, v, th]
    })
}

/// Vortex pair in the intermediate regime on the periodic `[0, 5000 km]²`.
pub fn init_vortex_pair(grid: &GridSpec, cfg: &SchemeConfig) -> Result<DualState> {
    let r = vortex_pair_reference();
    let (g, f0, h0, p0, lx, ly) = (G_VORTEX, F0_VORTEX, VORTEX_H0, VORTEX_PHI0, VORTEX_L, VORTEX_L);
    let centres = [(0.4 * lx, 0.4 * ly), (0.6 * lx, 0.6 * ly)];
    sample(grid, cfg, |xn, yn| {
        let (x, y) = (xn * r.l0, yn * r.l0);
        let (mut bump, mut su, mut sv) = (0.0, 0.0, 0.0);
        for (xc, yc) in centres {
            let xt = 40.0 / (3.0 * PI) * (PI / lx * (x - xc)).sin();
            let yt = 40.0 / (3.0 * PI) * (PI / ly * (y - yc)).sin();
            let xtt = 20.0 / (3.0 * PI) * (2.0 * PI / lx * (x - xc)).sin();
            let ytt = 20.0 / (3.0 * PI) * (2.0 * PI / ly * (y - yc)).sin();
            let e = (-(xt * xt + yt * yt) / 2.0).exp();
            bump += e;
            su += ytt * e;
            sv += xtt * e;
        }
        let h = h0 - p0 * (bump - 9.0 * PI / 400.0);
        let u = -40.0 * g * p0 / (3.0 * f0 * ly) * su;
        let v = 40.0 * g * p0 / (3.0 * f0 * lx) * sv;
        let th = g * (1.0 - 0.05 * (2.0 * PI * x / lx).sin());
        [h / r.h0, u / r.v0, v / r.v0, th / r.theta0]
    })
}

/// Perturbed zonal jet on the periodic `[0, 5000 km]²`; `thermal = false`
/// replaces the buoyancy by the constant `g`.
pub fn init_shear_flow(grid: &GridSpec, thermal: bool, cfg: &SchemeConfig) -> Result<DualState> {
    let r = shear_flow_reference();
    let (g, f, p0, l) = (G_VORTEX, F0_VORTEX, SHEAR_PHI0, SHEAR_L);
    sample(grid, cfg, |xn, yn| {
        let (xt, yt) = (xn * r.l0 / l, yn * r.l0 / l);
        let [dh, u, v, dth] = shear_profile(xt, yt);
        let h = SHEAR_H0 + p0 * dh;
        let u = g * p0 / (f * l) * u;
        let v = g * p0 / (f * l) * v;
        let th = if thermal { g * (1.0 + dth) } else { g };
        [h / r.h0, u / r.v0, v / r.v0, th / r.theta0]
    })
}

/// Shape functions of the shear flow at `(x/L, y/L)`: `(h−H₀)/Φ₀`, `u·fL/(gΦ₀)`,
/// `v·fL/(gΦ₀)`, `Θ/g − 1`.
fn shear_profile(xt: f64, yt: f64) -> [f64; 4] {
    let mod_x = 1.0 + 0.1 * (4.0 * PI * xt).sin();
    let e = (0.5 - 72.0 / (PI * PI) * (PI * yt).cos().powi(2)).exp();
    let s2 = (2.0 * PI * yt).sin();
    [
        6.0 / PI * mod_x * s2 * e,
        -12.0 * mod_x * ((2.0 * PI * yt).cos() + 36.0 / (PI * PI) * s2 * s2) * e,
        12.0 / 5.0 * (4.0 * PI * xt).cos() * s2 * e,
        0.05 * (2.0 * PI * xt).cos() * s2,
    ]
}

/// Shear-flow data in exact discrete geostrophic balance for any `ε`.
///
/// `φ` and `θ` keep the nondimensional profiles of the shear-flow setup at its
/// own Rossby number; the velocity is the central-difference `∇⊥ψ`, so the
/// discrete divergence vanishes initially. The potential vorticity is
/// `Δψ − φ/ν` with the 5-point Laplacian of the elliptic solve, which is the
/// balance the scheme relaxes to as `ε → 0`.
pub fn well_prepared_shear_flow(grid: &GridSpec, eps: f64) -> Result<(DualState, SchemeConfig)> {
    let r = shear_flow_reference();
    let (eps0, nu) = (r.eps(), r.nu());
    let cfg = SchemeConfig::new(eps, nu, 0.0);
    cfg.validate()?;
    let scale = r.l0 / SHEAR_L;
    let mut v = PrimitiveState::zeros(grid);
    // φ' = (h/H₀ − 1)·ν/ε₀ and θ' = (Θ/Θ₀ − 1)·ν/(2ε₀) at the reference scales.
    v.phi = ScalarField::from_fn(grid, |x, y| {
        shear_profile(x * scale, y * scale)[0] * SHEAR_PHI0 / SHEAR_H0 * nu / eps0
    });
    v.theta = ScalarField::from_fn(grid, |x, y| shear_profile(x * scale, y * scale)[3] * nu / (2.0 * eps0));
    let psi = v.psi(grid);
    let (px, py) = central_gradient(&psi, grid);
    v.u = ScalarField::from_cells(grid, |j, k| -py.at(j, k));
    v.v = px;
    let lap = discrete_laplacian(&psi, grid);
    v.q = ScalarField::from_cells(grid, |j, k| lap.at(j, k) - v.phi.at(j, k) / nu);
    Ok((DualState::from_primitive(v, &cfg, grid)?, cfg))
}

/// Westward-drifting anticyclone on the `β`-plane, free boundaries.
pub fn init_anticyclone(grid: &GridSpec, cfg: &SchemeConfig) -> Result<DualState> {
    let r = anticyclone_reference();
    let (a, d, g, h0) = (ANTI_A, ANTI_D, ANTI_G, ANTI_H0);
    sample(grid, cfg, |xn, yn| {
        let (x, y) = (xn * r.l0, yn * r.l0);
        let e = (-(x * x + y * y) / (d * d)).exp();
        let f = ANTI_F0 + ANTI_BETA * y;
        let h = h0 + a * e;
        let u = 2.0 * a * g / f * y / (d * d) * e;
        let v = -2.0 * a * g / f * x / (d * d) * e;
        let th = g * (1.0 - a / h0 * e);
        [h / r.h0, u / r.v0, v / r.v0, th / r.theta0]
    })
}

/// What each mesh's solution is compared with in [`convergence_study`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorReference {
    /// Mesh `n` against mesh `2n` (one extra solve past the finest mesh).
    #[default]
    Consecutive,
    /// Every mesh against one solution on the given mesh.
    Fixed(usize),
}

/// Errors of `(h, hu, hΘ)` at `t_final` on each `n × n` mesh in `meshes`.
/// Finer solutions are restricted to the coarse mesh by block averaging.
pub fn convergence_study(
    kind: ScenarioKind,
    cfg: &SchemeConfig,
    meshes: &[usize],
    reference: ErrorReference,
    t_final: f64,
) -> Result<ConvergenceReport> {
    if meshes.is_empty() {
        return Err(SolverError::Config("convergence study needs at least one mesh".into()));
    }
    let solve = |n: usize| -> Result<[ScalarField; 3]> {
        let sc = Scenario::with_config(kind, n, n, cfg.clone())?;
        let out = run_simulation(sc.grid, sc.cfg.clone(), sc.initial, t_final, &[])?;
        if let Some(b) = out.blow_up {
            return Err(SolverError::BlowUp(format!("{n}×{n}: {b}")));
        }
        conserved_of(&out.final_state, &sc.cfg, &sc.grid)
    };
    let grid_of = |n: usize| kind.grid(n, n);
    let mut errors: [Vec<f64>; 3] = Default::default();
    let mut push = |coarse: &[ScalarField; 3], fine: &[ScalarField; 3], grid: &GridSpec| -> Result<()> {
        for c in 0..3 {
            let r = restrict(&fine[c], grid)?;
            errors[c].push(l1_error(&coarse[c], &r, grid)?);
        }
        Ok(())
    };
    let reference_mesh = match reference {
        ErrorReference::Fixed(m) => {
            let fine = solve(m)?;
            for &n in meshes {
                push(&solve(n)?, &fine, &grid_of(n)?)?;
            }
            m
        }
        ErrorReference::Consecutive => {
            let mut sorted = meshes.to_vec();
            sorted.sort_unstable();
            if sorted != meshes || sorted.windows(2).any(|w| w[1] != 2 * w[0]) {
                return Err(SolverError::Config(
                    "consecutive convergence needs meshes that double at each step".into(),
                ));
            }
            let mut coarse = solve(meshes[0])?;
            for &n in meshes {
                let fine = solve(2 * n)?;
                push(&coarse, &fine, &grid_of(n)?)?;
                coarse = fine;
            }
            2 * meshes[meshes.len() - 1]
        }
    };
    let [eh, ehu, eht] = errors;
    Ok(ConvergenceReport {
        scenario: kind.name().to_string(),
        eps: cfg.eps,
        meshes: meshes.to_vec(),
        reference_mesh,
        fields: vec![("h".into(), eh), ("hu".into(), ehu), ("hTheta".into(), eht)],
    })
}
