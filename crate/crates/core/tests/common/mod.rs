//! Naive, test-side transcriptions of the spatial residuals.
//!
//! Everything here works on plain `Vec`s with wrapped indices, so it only
//! covers doubly periodic grids. The matrices are built in full and
//! multiplied densely; nothing is shared with the library except the input
//! containers.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use trsw::config::{SchemeConfig, SchemeKind};
use trsw::conservative::cu_rhs;
use trsw::convert::u_from_v;
use trsw::field::ScalarField;
use trsw::grid::GridSpec;
use trsw::primitive::{pccu_residual, split_coefficients, split_speeds, PrimitiveFaces, PrimitiveState};

pub type Cell5 = [f64; 5];

/// Cell values of a primitive state, indexed `[k][j]`.
pub struct Cells {
    pub nx: usize,
    pub ny: usize,
    pub v: Vec<Vec<Cell5>>,
}

impl Cells {
    pub fn of(state: &PrimitiveState, grid: &GridSpec) -> Self {
        let v = (0..grid.ny)
            .map(|k| {
                (0..grid.nx)
                    .map(|j| {
                        [
                            state.u.at(j, k),
                            state.v.at(j, k),
                            state.phi.at(j, k),
                            state.theta.at(j, k),
                            state.q.at(j, k),
                        ]
                    })
                    .collect()
            })
            .collect();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            v,
        }
    }

    /// Periodic access.
    pub fn get(&self, j: isize, k: isize) -> Cell5 {
        let j = j.rem_euclid(self.nx as isize) as usize;
        let k = k.rem_euclid(self.ny as isize) as usize;
        self.v[k][j]
    }
}

pub fn minmod(args: &[f64]) -> f64 {
    if args.iter().all(|&c| c > 0.0) {
        args.iter().cloned().fold(f64::INFINITY, f64::min)
    } else if args.iter().all(|&c| c < 0.0) {
        args.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    }
}

/// Limited slope of one component in one direction.
fn slope(l: f64, c: f64, r: f64, mu: f64, d: f64) -> f64 {
    minmod(&[mu * (c - l) / d, (r - l) / (2.0 * d), mu * (r - c) / d])
}

/// The four one-sided values at the faces of cell `(j, k)`:
/// `(east⁻, west⁺, north⁻, south⁺)`.
pub fn cell_faces(c: &Cells, j: isize, k: isize, mu: f64, dx: f64, dy: f64) -> [Cell5; 4] {
    let (w, m, e) = (c.get(j - 1, k), c.get(j, k), c.get(j + 1, k));
    let (s, n) = (c.get(j, k - 1), c.get(j, k + 1));
    let mut out = [[0.0; 5]; 4];
    for i in 0..5 {
        let sx = slope(w[i], m[i], e[i], mu, dx);
        let sy = slope(s[i], m[i], n[i], mu, dy);
        out[0][i] = m[i] + 0.5 * dx * sx;
        out[1][i] = m[i] - 0.5 * dx * sx;
        out[2][i] = m[i] + 0.5 * dy * sy;
        out[3][i] = m[i] - 0.5 * dy * sy;
    }
    out
}

/// Values on both sides of the x-face east of cell `(j, k)`: `(V⁻, V⁺)`.
pub fn east_face(c: &Cells, j: isize, k: isize, mu: f64, dx: f64, dy: f64) -> (Cell5, Cell5) {
    (
        cell_faces(c, j, k, mu, dx, dy)[0],
        cell_faces(c, j + 1, k, mu, dx, dy)[1],
    )
}

/// Values on both sides of the y-face north of cell `(j, k)`: `(V⁻, V⁺)`.
pub fn north_face(c: &Cells, j: isize, k: isize, mu: f64, dx: f64, dy: f64) -> (Cell5, Cell5) {
    (
        cell_faces(c, j, k, mu, dx, dy)[2],
        cell_faces(c, j, k + 1, mu, dx, dy)[3],
    )
}

pub fn h_of(v: &Cell5, eps: f64, nu: f64) -> f64 {
    1.0 + eps / nu * v[2]
}

pub fn big_theta_of(v: &Cell5, eps: f64, nu: f64) -> f64 {
    1.0 + 2.0 * eps / nu * v[3]
}

type Mat5 = [[f64; 5]; 5];

pub fn b_matrix(v: &Cell5, a: f64, b: f64, eps: f64, nu: f64) -> Mat5 {
    let (u, h, th, q) = (v[0], h_of(v, eps, nu), big_theta_of(v, eps, nu), v[4]);
    [
        [u, 0.0, (th - b) / eps, (h - b) / eps, 0.0],
        [0.0, u, 0.0, 0.0, 0.0],
        [nu * (h - a) / eps, 0.0, u, 0.0, 0.0],
        [0.0, 0.0, 0.0, u, 0.0],
        [q, 0.0, 0.0, 0.0, u],
    ]
}

pub fn c_matrix(v: &Cell5, a: f64, b: f64, eps: f64, nu: f64) -> Mat5 {
    let (w, h, th, q) = (v[1], h_of(v, eps, nu), big_theta_of(v, eps, nu), v[4]);
    [
        [w, 0.0, 0.0, 0.0, 0.0],
        [0.0, w, (th - b) / eps, (h - b) / eps, 0.0],
        [0.0, nu * (h - a) / eps, w, 0.0, 0.0],
        [0.0, 0.0, 0.0, w, 0.0],
        [0.0, q, 0.0, 0.0, w],
    ]
}

fn avg_times(m1: &Mat5, m2: &Mat5, d: &Cell5) -> Cell5 {
    let mut out = [0.0; 5];
    for r in 0..5 {
        for c in 0..5 {
            out[r] += 0.5 * (m1[r][c] + m2[r][c]) * d[c];
        }
    }
    out
}

fn sub(a: &Cell5, b: &Cell5) -> Cell5 {
    std::array::from_fn(|i| a[i] - b[i])
}

/// Everything needed at one face: speeds, anti-diffusion, jump term.
struct Face {
    sp: f64,
    sm: f64,
    d: Cell5,
    jump: Cell5,
}

fn lambda(v: &Cell5, a: f64, b: f64, eps: f64, nu: f64) -> f64 {
    let r = nu * (h_of(v, eps, nu) - a) * (big_theta_of(v, eps, nu) - b);
    r.max(0.0).sqrt() / eps
}

#[allow(clippy::too_many_arguments)]
fn face(
    vm: Cell5,
    vp: Cell5,
    normal: usize,
    a: f64,
    b: f64,
    eps: f64,
    nu: f64,
    matrix: fn(&Cell5, f64, f64, f64, f64) -> Mat5,
) -> Face {
    let (lm, lp) = (lambda(&vm, a, b, eps, nu), lambda(&vp, a, b, eps, nu));
    let sp = (vm[normal] + lm).max(vp[normal] + lp).max(0.0);
    let sm = (vm[normal] - lm).min(vp[normal] - lp).min(0.0);
    let mut d = [0.0; 5];
    for i in 0..5 {
        let star = (sp * vp[i] - sm * vm[i]) / (sp - sm);
        let dv = minmod(&[vp[i] - star, star - vm[i]]);
        d[i] = sp * sm / (sp - sm) * (vp[i] - vm[i] - dv);
    }
    let jump = avg_times(&matrix(&vm, a, b, eps, nu), &matrix(&vp, a, b, eps, nu), &sub(&vp, &vm));
    Face { sp, sm, d, jump }
}

/// Splitting parameters from the minimum over every face value.
pub fn naive_coefficients(c: &Cells, eps: f64, nu: f64, mu: f64, dx: f64, dy: f64) -> (f64, f64) {
    let (mut hmin, mut tmin) = (f64::INFINITY, f64::INFINITY);
    for k in 0..c.ny as isize {
        for j in 0..c.nx as isize {
            for v in cell_faces(c, j, k, mu, dx, dy) {
                hmin = hmin.min(h_of(&v, eps, nu));
                tmin = tmin.min(big_theta_of(&v, eps, nu));
            }
        }
    }
    ((1.0 - eps) * hmin, (1.0 - eps) * tmin)
}

/// Term-by-term path-conservative residual on a periodic grid, returned as
/// `[k][j]` cell vectors `(𝓡ᵘ, 𝓡ᵛ, 𝓡^φ, 𝓡^θ, 𝓡^q)`.
pub fn naive_pccu(state: &PrimitiveState, cfg: &SchemeConfig, grid: &GridSpec, jumps: bool) -> Vec<Vec<Cell5>> {
    let c = Cells::of(state, grid);
    let (eps, nu, mu) = (cfg.eps, cfg.nu, cfg.mu);
    let (dx, dy) = (grid.dx, grid.dy);
    let (a, b) = naive_coefficients(&c, eps, nu, mu, dx, dy);
    let sign = cfg.jacobian_sign.factor();
    let mut out = vec![vec![[0.0; 5]; c.nx]; c.ny];
    for k in 0..c.ny as isize {
        for j in 0..c.nx as isize {
            let (em, ep) = east_face(&c, j, k, mu, dx, dy);
            let (wm, wp) = east_face(&c, j - 1, k, mu, dx, dy);
            let (nm, np) = north_face(&c, j, k, mu, dx, dy);
            let (sm_, sp_) = north_face(&c, j, k - 1, mu, dx, dy);
            let e = face(em, ep, 0, a, b, eps, nu, b_matrix);
            let w = face(wm, wp, 0, a, b, eps, nu, b_matrix);
            let n = face(nm, np, 1, a, b, eps, nu, c_matrix);
            let s = face(sm_, sp_, 1, a, b, eps, nu, c_matrix);

            // Inside the cell: east⁻ and west⁺ of this cell.
            let b_cell = avg_times(
                &b_matrix(&em, a, b, eps, nu),
                &b_matrix(&wp, a, b, eps, nu),
                &sub(&em, &wp),
            );
            let c_cell = avg_times(
                &c_matrix(&nm, a, b, eps, nu),
                &c_matrix(&sp_, a, b, eps, nu),
                &sub(&nm, &sp_),
            );

            let m = c.get(j, k);
            let y = grid.y_center(k as usize);
            let rot = (1.0 - b) / eps + cfg.beta_bar * y;
            let (phi_e, phi_w) = (c.get(j + 1, k)[2], c.get(j - 1, k)[2]);
            let (phi_n, phi_s) = (c.get(j, k + 1)[2], c.get(j, k - 1)[2]);
            let (th_e, th_w) = (c.get(j + 1, k)[3], c.get(j - 1, k)[3]);
            let (th_n, th_s) = (c.get(j, k + 1)[3], c.get(j, k - 1)[3]);
            let bracket = ((phi_e - phi_w) * (th_n - th_s) + sign * (phi_n - phi_s) * (th_e - th_w)) / (4.0 * dx * dy);
            let src = [-rot * m[1], rot * m[0], 0.0, 0.0, -bracket / nu];

            let cell = &mut out[k as usize][j as usize];
            for i in 0..5 {
                let mut xs = e.d[i] - w.d[i] + b_cell[i];
                let mut ys = n.d[i] - s.d[i] + c_cell[i];
                if jumps {
                    xs += w.sp * w.jump[i] / (w.sp - w.sm) - e.sm * e.jump[i] / (e.sp - e.sm);
                    ys += s.sp * s.jump[i] / (s.sp - s.sm) - n.sm * n.jump[i] / (n.sp - n.sm);
                }
                cell[i] = xs / dx + ys / dy + src[i];
            }
        }
    }
    out
}

fn conservative(v: &Cell5, eps: f64, nu: f64) -> [f64; 4] {
    let h = h_of(v, eps, nu);
    [h, h * v[0], h * v[1], h * big_theta_of(v, eps, nu)]
}

fn flux(u: &[f64; 4], dir: usize, eps: f64, nu: f64) -> [f64; 4] {
    let h = u[0];
    let (vx, vy, th) = (u[1] / h, u[2] / h, u[3] / h);
    let p = nu / (2.0 * eps * eps) * th * h * h;
    if dir == 0 {
        [h * vx, h * vx * vx + p, h * vx * vy, h * vx * th]
    } else {
        [h * vy, h * vx * vy, h * vy * vy + p, h * vy * th]
    }
}

fn cu_face(vm: &Cell5, vp: &Cell5, dir: usize, eps: f64, nu: f64) -> [f64; 4] {
    let (um, up) = (conservative(vm, eps, nu), conservative(vp, eps, nu));
    let cm = (nu * um[3]).sqrt() / eps;
    let cp = (nu * up[3]).sqrt() / eps;
    let (wm, wp) = (um[1 + dir] / um[0], up[1 + dir] / up[0]);
    let sp = (wm + cm).max(wp + cp).max(0.0);
    let sm = (wm - cm).min(wp - cp).min(0.0);
    let (fm, fp) = (flux(&um, dir, eps, nu), flux(&up, dir, eps, nu));
    std::array::from_fn(|i| (sp * fm[i] - sm * fp[i]) / (sp - sm) + sp * sm / (sp - sm) * (up[i] - um[i]))
}

/// Central-upwind right-hand side with faces reconstructed from `state`
/// and the source taken from the conservative cell averages `hu`, `hv`.
pub fn naive_cu(
    state: &PrimitiveState,
    hu: &ScalarField,
    hv: &ScalarField,
    cfg: &SchemeConfig,
    grid: &GridSpec,
) -> Vec<Vec<[f64; 4]>> {
    let c = Cells::of(state, grid);
    let (eps, nu, mu) = (cfg.eps, cfg.nu, cfg.mu);
    let (dx, dy) = (grid.dx, grid.dy);
    let mut out = vec![vec![[0.0; 4]; c.nx]; c.ny];
    for k in 0..c.ny as isize {
        for j in 0..c.nx as isize {
            let (em, ep) = east_face(&c, j, k, mu, dx, dy);
            let (wm, wp) = east_face(&c, j - 1, k, mu, dx, dy);
            let (nm, np) = north_face(&c, j, k, mu, dx, dy);
            let (sm, sp) = north_face(&c, j, k - 1, mu, dx, dy);
            let fe = cu_face(&em, &ep, 0, eps, nu);
            let fw = cu_face(&wm, &wp, 0, eps, nu);
            let gn = cu_face(&nm, &np, 1, eps, nu);
            let gs = cu_face(&sm, &sp, 1, eps, nu);
            let (ju, ku) = (j as usize, k as usize);
            let rot = (1.0 + eps * cfg.beta_bar * grid.y_center(ku)) / eps;
            let src = [0.0, rot * hv.at(ju, ku), -rot * hu.at(ju, ku), 0.0];
            for i in 0..4 {
                out[ku][ju][i] = -(fe[i] - fw[i]) / dx - (gn[i] - gs[i]) / dy + src[i];
            }
        }
    }
    out
}

/// A random primitive state on `grid` with `h` and `Θ` in `[0.6, 1.4]`.
pub fn random_state(rng: &mut impl Rng, grid: &GridSpec, eps: f64, nu: f64) -> PrimitiveState {
    let mut cell = |scale: f64| {
        let vals: Vec<f64> = (0..grid.nx * grid.ny)
            .map(|_| scale * rng.gen_range(-1.0..1.0))
            .collect();
        ScalarField::from_interior(grid, &vals)
    };
    let mut s = PrimitiveState {
        u: cell(1.0),
        v: cell(1.0),
        phi: cell(0.4 * nu / eps),
        theta: cell(0.2 * nu / eps),
        q: cell(1.0),
        t: 0.0,
    };
    s.fill_ghosts(grid);
    s
}

/// `|x − y| / max(1, |y|)` maximized over a grid of values.
pub fn max_rel_diff(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> f64 {
    a.zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs() / y.abs().max(1.0)))
}

/// Cell-by-cell divergence of the velocity residual, `[k][j]`.
pub fn naive_div_residual(state: &PrimitiveState, b: f64, cfg: &SchemeConfig, grid: &GridSpec) -> Vec<Vec<f64>> {
    let c = Cells::of(state, grid);
    let (eps, nu, bb) = (cfg.eps, cfg.nu, cfg.beta_bar);
    let (dx, dy) = (grid.dx, grid.dy);
    let sign = cfg.jacobian_sign.factor();
    let mut out = vec![vec![0.0; c.nx]; c.ny];
    for k in 0..c.ny as isize {
        for j in 0..c.nx as isize {
            let at = |dj: isize, dk: isize| c.get(j + dj, k + dk);
            let y = grid.y_center(k as usize);
            let m = at(0, 0);
            let r1 = bb * m[0] - (1.0 + eps * bb * y - b) / eps * (m[4] - bb * y + m[2] / nu);

            let u = |dj, dk| at(dj, dk)[0];
            let v = |dj, dk| at(dj, dk)[1];
            let r2 = (u(-1, 0).powi(2) - 2.0 * u(0, 0).powi(2) + u(1, 0).powi(2)) / (2.0 * dx * dx)
                + (v(0, -1).powi(2) - 2.0 * v(0, 0).powi(2) + v(0, 1).powi(2)) / (2.0 * dy * dy)
                - ((u(1, 0) - u(-1, 0)) * (v(0, 1) - v(0, -1)) + sign * (u(0, 1) - u(0, -1)) * (v(1, 0) - v(-1, 0)))
                    / (4.0 * dx * dy)
                + (u(1, 1) * v(1, 1) - u(-1, 1) * v(-1, 1) - u(1, -1) * v(1, -1) + u(-1, -1) * v(-1, -1))
                    / (4.0 * dx * dy);

            let th = |dj, dk| big_theta_of(&at(dj, dk), eps, nu);
            let h = |dj, dk| h_of(&at(dj, dk), eps, nu);
            let phi = |dj, dk| at(dj, dk)[2];
            let tt = |dj, dk| at(dj, dk)[3];
            let compact = |co: &dyn Fn(isize, isize) -> f64, f: &dyn Fn(isize, isize) -> f64| {
                ((co(0, 0) + co(1, 0)) * (f(1, 0) - f(0, 0)) - (co(-1, 0) + co(0, 0)) * (f(0, 0) - f(-1, 0)))
                    / (2.0 * eps * dx * dx)
                    + ((co(0, 0) + co(0, 1)) * (f(0, 1) - f(0, 0)) - (co(0, -1) + co(0, 0)) * (f(0, 0) - f(0, -1)))
                        / (2.0 * eps * dy * dy)
            };
            let lap = |f: &dyn Fn(isize, isize) -> f64| {
                (f(-1, 0) - 2.0 * f(0, 0) + f(1, 0)) / (dx * dx) + (f(0, -1) - 2.0 * f(0, 0) + f(0, 1)) / (dy * dy)
            };
            let r3 = compact(&th, &phi) - b / eps * lap(&phi) + compact(&h, &tt) - b / eps * lap(&tt);
            out[k as usize][j as usize] = r1 + r2 + r3;
        }
    }
    out
}

/// Largest componentwise difference, scaled by the largest magnitude of that
/// component over the grid.
pub fn scaled_diff(lib: &[Vec<f64>], naive: &[Vec<f64>]) -> f64 {
    lib.iter()
        .zip(naive)
        .map(|(l, n)| {
            let scale = n.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
            l.iter().zip(n).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())) / scale
        })
        .fold(0.0, f64::max)
}

pub fn random_config(rng: &mut StdRng) -> SchemeConfig {
    let eps = 10f64.powf(rng.gen_range(-4.0..0.0));
    let mut cfg = SchemeConfig::new(eps, rng.gen_range(0.4..1.5), rng.gen_range(-2.0..2.0));
    cfg.mu = rng.gen_range(1.0..2.0);
    cfg
}

/// Worst scaled difference between the library and the naive residual over
/// `cases` random 4×4 periodic states.
pub fn pccu_worst(seed: u64, cases: usize, simplified: bool) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let grid = GridSpec::periodic(4, 4, (0.0, rng.gen_range(0.5..2.0)), (-1.0, 1.0)).unwrap();
        let mut cfg = random_config(&mut rng);
        if simplified {
            cfg = cfg.with_scheme(SchemeKind::SimplifiedDffv);
        }
        let s = random_state(&mut rng, &grid, cfg.eps, cfg.nu);
        let faces = PrimitiveFaces::reconstruct(&s, cfg.mu, &grid);
        let c = split_coefficients(&faces, cfg.eps, cfg.nu).unwrap();
        let sp = split_speeds(&faces, c, cfg.eps, cfg.nu).unwrap();
        let r = pccu_residual(&s, &faces, c, &sp, &cfg, &grid);
        let naive = naive_pccu(&s, &cfg, &grid, !simplified);
        let lib: Vec<Vec<f64>> = r.components().iter().map(|f| f.interior()).collect();
        let nv: Vec<Vec<f64>> = (0..5)
            .map(|i| naive.iter().flat_map(|row| row.iter().map(move |v| v[i])).collect())
            .collect();
        worst = worst.max(scaled_diff(&lib, &nv));
    }
    worst
}

/// Same as [`pccu_worst`] for the conservative right-hand side.
pub fn cu_worst(seed: u64, cases: usize) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let grid = GridSpec::periodic(4, 4, (0.0, rng.gen_range(0.5..2.0)), (-1.0, 1.0)).unwrap();
        let cfg = random_config(&mut rng);
        let s = random_state(&mut rng, &grid, cfg.eps, cfg.nu);
        let u = u_from_v(&s, &cfg, &grid).unwrap();
        let faces = PrimitiveFaces::reconstruct(&s, cfg.mu, &grid);
        let r = cu_rhs(&u, &faces, &cfg, &grid).unwrap();
        let naive = naive_cu(&s, &u.hu, &u.hv, &cfg, &grid);
        let lib: Vec<Vec<f64>> = r.components().iter().map(|f| f.interior()).collect();
        let nv: Vec<Vec<f64>> = (0..4)
            .map(|i| naive.iter().flat_map(|row| row.iter().map(move |v| v[i])).collect())
            .collect();
        worst = worst.max(scaled_diff(&lib, &nv));
    }
    worst
}
