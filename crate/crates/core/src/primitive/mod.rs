//! Semi-implicit asymptotic-preserving scheme for the augmented primitive
//! system in `(u, v, φ, θ, q)`.
//!
//! The nonstiff part is discretized with a path-conservative central-upwind
//! residual ([`pccu_residual`]); the stiff pressure and Coriolis coupling is
//! handled through one Helmholtz solve per stage ([`stages`]).

mod divergence;
mod pccu;
mod splitting;
pub mod stages;

pub use divergence::div_velocity_residual;
pub use pccu::{btilde_apply, ctilde_apply, pccu_residual, NonstiffResidual};
pub use splitting::{split_coefficients, split_speeds, FaceSpeeds, PrimitiveFaces, SplitCoefficients};
pub use stages::{evaluate_nonstiff, evaluate_nonstiff_with, NonstiffTerms};

use crate::field::ScalarField;
use crate::grid::GridSpec;

/// Depth `h = 1 + (ε/ν)φ`.
#[inline]
pub fn depth(phi: f64, eps: f64, nu: f64) -> f64 {
    1.0 + eps / nu * phi
}

/// Buoyancy `Θ = 1 + (2ε/ν)θ`.
#[inline]
pub fn buoyancy(theta: f64, eps: f64, nu: f64) -> f64 {
    1.0 + 2.0 * eps / nu * theta
}

/// Cell averages of the augmented primitive variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveState {
    pub u: ScalarField,
    pub v: ScalarField,
    pub phi: ScalarField,
    pub theta: ScalarField,
    pub q: ScalarField,
    pub t: f64,
}

impl PrimitiveState {
    pub fn zeros(grid: &GridSpec) -> Self {
        let z = ScalarField::zeros(grid);
        Self {
            u: z.clone(),
            v: z.clone(),
            phi: z.clone(),
            theta: z.clone(),
            q: z,
            t: 0.0,
        }
    }

    /// Components in the order `(u, v, φ, θ, q)`.
    pub fn components(&self) -> [&ScalarField; 5] {
        [&self.u, &self.v, &self.phi, &self.theta, &self.q]
    }

    pub fn components_mut(&mut self) -> [&mut ScalarField; 5] {
        [&mut self.u, &mut self.v, &mut self.phi, &mut self.theta, &mut self.q]
    }

    pub fn fill_ghosts(&mut self, grid: &GridSpec) {
        for f in self.components_mut() {
            f.fill_ghosts(grid);
        }
    }

    /// `ψ = φ + θ`.
    pub fn psi(&self, grid: &GridSpec) -> ScalarField {
        ScalarField::combine(grid, &[(1.0, &self.phi), (1.0, &self.theta)])
    }

    pub fn depth(&self, eps: f64, nu: f64, grid: &GridSpec) -> ScalarField {
        ScalarField::from_cells(grid, |j, k| depth(self.phi.at(j, k), eps, nu))
    }

    pub fn buoyancy(&self, eps: f64, nu: f64, grid: &GridSpec) -> ScalarField {
        ScalarField::from_cells(grid, |j, k| buoyancy(self.theta.at(j, k), eps, nu))
    }

    /// First non-finite cell over all components, with the component name.
    pub fn detect_nonfinite(&self) -> Option<(&'static str, (usize, usize))> {
        const NAMES: [&str; 5] = ["u", "v", "phi", "theta", "q"];
        self.components()
            .iter()
            .zip(NAMES)
            .find_map(|(f, n)| f.detect_nonfinite().map(|c| (n, c)))
    }

    /// Largest absolute componentwise difference to `other`.
    pub fn max_abs_diff(&self, other: &PrimitiveState) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| {
                a.interior()
                    .iter()
                    .zip(b.interior())
                    .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
            })
            .fold(0.0, f64::max)
    }
}
