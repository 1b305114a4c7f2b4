use super::{buoyancy, depth, PrimitiveState};
use crate::error::{Result, SolverError};
use crate::grid::GridSpec;
use crate::reconstruction::reconstruct;

/// Reconstructed one-sided values of `(u, v, φ, θ, q)` on every face.
///
/// Layout follows [`crate::reconstruction::InterfaceValues`]: x-face
/// `i + k·(nx+1)` separates cells `i−1` and `i`; y-face `j + k·nx` separates
/// cells `k−1` and `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveFaces {
    pub x_minus: Vec<[f64; 5]>,
    pub x_plus: Vec<[f64; 5]>,
    pub y_minus: Vec<[f64; 5]>,
    pub y_plus: Vec<[f64; 5]>,
}

impl PrimitiveFaces {
    /// Reconstructs every component of `state` (ghosts must be valid).
    pub fn reconstruct(state: &PrimitiveState, mu: f64, grid: &GridSpec) -> Self {
        let ivs = state.components().map(|f| reconstruct(f, mu, grid));
        let zip = |pick: fn(&crate::reconstruction::InterfaceValues) -> &Vec<f64>| -> Vec<[f64; 5]> {
            let cols: [&Vec<f64>; 5] = std::array::from_fn(|c| pick(&ivs[c]));
            (0..cols[0].len())
                .map(|i| std::array::from_fn(|c| cols[c][i]))
                .collect()
        };
        Self {
            x_minus: zip(|iv| &iv.x.minus),
            x_plus: zip(|iv| &iv.x.plus),
            y_minus: zip(|iv| &iv.y.minus),
            y_plus: zip(|iv| &iv.y.plus),
        }
    }

    fn all(&self) -> impl Iterator<Item = &[f64; 5]> {
        self.x_minus
            .iter()
            .chain(&self.x_plus)
            .chain(&self.y_minus)
            .chain(&self.y_plus)
    }
}

/// Splitting parameters `a` and `b` of one time level or stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCoefficients {
    pub a: f64,
    pub b: f64,
}

/// `a = (1−ε)·min h`, `b = (1−ε)·min Θ` over every reconstructed face value.
pub fn split_coefficients(faces: &PrimitiveFaces, eps: f64, nu: f64) -> Result<SplitCoefficients> {
    let mut hmin = f64::INFINITY;
    let mut tmin = f64::INFINITY;
    for (n, s) in faces.all().enumerate() {
        let h = depth(s[2], eps, nu);
        let th = buoyancy(s[3], eps, nu);
        if !(h > 0.0) {
            return Err(SolverError::NonPositiveDepth {
                quantity: "h",
                value: h,
                location: format!("face value #{n}"),
            });
        }
        if !(th > 0.0) {
            return Err(SolverError::NonPositiveDepth {
                quantity: "Theta",
                value: th,
                location: format!("face value #{n}"),
            });
        }
        hmin = hmin.min(h);
        tmin = tmin.min(th);
    }
    Ok(SplitCoefficients {
        a: (1.0 - eps) * hmin,
        b: (1.0 - eps) * tmin,
    })
}

/// One-sided speeds `s⁺ ≥ 0 ≥ s⁻` on both face families.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSpeeds {
    pub x_plus: Vec<f64>,
    pub x_minus: Vec<f64>,
    pub y_plus: Vec<f64>,
    pub y_minus: Vec<f64>,
}

impl FaceSpeeds {
    /// `(max |s±| on x-faces, max |s±| on y-faces)`.
    pub fn max_abs(&self) -> (f64, f64) {
        let m = |a: &[f64], b: &[f64]| a.iter().chain(b).fold(0.0_f64, |acc, s| acc.max(s.abs()));
        (m(&self.x_plus, &self.x_minus), m(&self.y_plus, &self.y_minus))
    }
}

/// `Λ = (1/ε)·√(ν(h−a)(Θ−b))`, clamping round-off negatives.
pub(crate) fn lambda(s: &[f64; 5], c: SplitCoefficients, eps: f64, nu: f64, face: usize) -> Result<f64> {
    let rad = nu * (depth(s[2], eps, nu) - c.a) * (buoyancy(s[3], eps, nu) - c.b);
    if rad >= 0.0 {
        Ok(rad.sqrt() / eps)
    } else if rad >= -1e-14 {
        Ok(0.0)
    } else {
        Err(SolverError::NegativeRadicand {
            value: rad,
            location: format!("face #{face}"),
        })
    }
}

pub fn split_speeds(faces: &PrimitiveFaces, c: SplitCoefficients, eps: f64, nu: f64) -> Result<FaceSpeeds> {
    let family = |minus: &[[f64; 5]], plus: &[[f64; 5]], comp: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut sp = Vec::with_capacity(minus.len());
        let mut sm = Vec::with_capacity(minus.len());
        for (i, (vm, vp)) in minus.iter().zip(plus).enumerate() {
            let lm = lambda(vm, c, eps, nu, i)?;
            let lp = lambda(vp, c, eps, nu, i)?;
            sp.push((vm[comp] + lm).max(vp[comp] + lp).max(0.0));
            sm.push((vm[comp] - lm).min(vp[comp] - lp).min(0.0));
        }
        Ok((sp, sm))
    };
    let (x_plus, x_minus) = family(&faces.x_minus, &faces.x_plus, 0)?;
    let (y_plus, y_minus) = family(&faces.y_minus, &faces.y_plus, 1)?;
    Ok(FaceSpeeds {
        x_plus,
        x_minus,
        y_plus,
        y_minus,
    })
}
