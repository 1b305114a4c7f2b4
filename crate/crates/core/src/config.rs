//! Scheme parameters shared by every solver component.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SolverError};
use crate::stencil::JacobianSign;

/// `γ = 1 − 1/√2` of the two-stage ARS(2,2,2) tableau.
pub const ARS_GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// Which time integrator the driver runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemeKind {
    /// Asymptotic-preserving dual formulation (primitive + conservative, blended).
    #[default]
    ApDffv,
    /// Conservative central-upwind fluxes with SSP-RK2, no primitive branch.
    Explicit,
    /// [`SchemeKind::ApDffv`] with the interface jump terms of the primitive
    /// residual switched off.
    SimplifiedDffv,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ApDffv => "apdffv",
            SchemeKind::Explicit => "explicit",
            SchemeKind::SimplifiedDffv => "simplified",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "apdffv" | "ap-dffv" | "dffv" => Ok(SchemeKind::ApDffv),
            "explicit" => Ok(SchemeKind::Explicit),
            "simplified" | "simplified-dffv" => Ok(SchemeKind::SimplifiedDffv),
            other => Err(SolverError::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

impl FromStr for JacobianSign {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minus" | "-" | "analytic" => Ok(JacobianSign::Minus),
            "plus" | "+" => Ok(JacobianSign::Plus),
            other => Err(SolverError::Config(format!("unknown jacobian sign '{other}'"))),
        }
    }
}

/// Where the potential vorticity of the blended primitive state comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QBlend {
    /// Blend `q` like every other component, with the conservative side
    /// supplying `ω + β̄y − φ/ν` from the discrete vorticity of `U`.
    #[default]
    Vorticity,
    /// Keep the primitive-branch `q` untouched by the blend.
    Unblended,
}

/// When the splitting parameters `a`, `b` are recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitRefresh {
    /// Computed once per step from `Vⁿ` and reused at the first stage, which
    /// keeps the explicit and implicit parts of every stage summing to the
    /// same operator. Falls back to fresh values if the stage state makes the
    /// old ones inadmissible.
    #[default]
    PerStep,
    /// Recomputed from every stage state (`a*`, `b*` at the first stage).
    PerStage,
}

impl FromStr for SplitRefresh {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "step" | "per-step" | "per_step" => Ok(SplitRefresh::PerStep),
            "stage" | "per-stage" | "per_stage" => Ok(SplitRefresh::PerStage),
            other => Err(SolverError::Config(format!("unknown split refresh '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Rossby number.
    pub eps: f64,
    /// Burger number.
    pub nu: f64,
    /// Nondimensional beta-plane parameter.
    pub beta_bar: f64,
    /// Generalized-minmod sharpness.
    pub mu: f64,
    pub cfl: f64,
    pub switch_c: f64,
    pub switch_p: i32,
    pub elliptic_tol: f64,
    pub jacobian_sign: JacobianSign,
    pub scheme: SchemeKind,
    pub q_blend: QBlend,
    pub split_refresh: SplitRefresh,
    /// Step used when every wave speed vanishes; `None` means
    /// `10·cfl·min(Δx, Δy)`.
    pub dt_max: Option<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            eps: 1.0,
            nu: 1.0,
            beta_bar: 0.0,
            mu: 1.3,
            cfl: 0.25,
            switch_c: 2000.0,
            switch_p: 6,
            elliptic_tol: 1e-12,
            jacobian_sign: JacobianSign::Minus,
            scheme: SchemeKind::ApDffv,
            q_blend: QBlend::Vorticity,
            split_refresh: SplitRefresh::PerStep,
            dt_max: None,
        }
    }
}

impl SchemeConfig {
    pub fn new(eps: f64, nu: f64, beta_bar: f64) -> Self {
        Self {
            eps,
            nu,
            beta_bar,
            ..Self::default()
        }
    }

    pub fn with_scheme(mut self, scheme: SchemeKind) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SolverError::Config(msg));
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad(format!("eps must lie in (0, 1], got {}", self.eps));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad(format!("nu must be positive, got {}", self.nu));
        }
        if !self.beta_bar.is_finite() {
            return bad("beta_bar must be finite".into());
        }
        if !(1.0..=2.0).contains(&self.mu) {
            return bad(format!("mu must lie in [1, 2], got {}", self.mu));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.switch_c >= 0.0 && self.switch_c.is_finite()) {
            return bad(format!("switch_c must be non-negative, got {}", self.switch_c));
        }
        if !(self.elliptic_tol > 0.0 && self.elliptic_tol < 1.0) {
            return bad(format!("elliptic_tol must lie in (0, 1), got {}", self.elliptic_tol));
        }
        if let Some(dt) = self.dt_max {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt_max must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    /// Whether the primitive residual keeps its interface jump terms.
    pub fn jump_terms(&self) -> bool {
        self.scheme != SchemeKind::SimplifiedDffv
    }
}
