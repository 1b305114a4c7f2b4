//! Acceptance criteria, one line each.
//!
//! Runs without the libtest harness so every line is printed whether or not
//! the criterion holds. Positional arguments filter by criterion id
//! (`c1`, `c7`, ...); `--ignored` or `--include-ignored` adds the slow
//! supplementary runs. Failing criteria are reported but only fail the
//! target under `--strict` or with `TRSW_ACCEPTANCE_STRICT` set.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use trsw::config::{SchemeConfig, SchemeKind};
use trsw::convert::v_from_u;
use trsw::diagnostics::{divergence_l1, slice, total_variation, SliceAxis, Snapshot};
use trsw::driver::{dt_ap, dt_ex, run_simulation, RunOutcome, Simulation, StageRecord};
use trsw::elliptic::{solve_helmholtz, HelmholtzProblem};
use trsw::field::ScalarField;
use trsw::grid::{BoundaryKind, GridSpec};
use trsw::scenarios::{
    anticyclone_reference, convergence_study, shear_flow_reference, vortex_pair_reference, well_prepared_shear_flow,
    ErrorReference, Scenario, ScenarioKind,
};

type Res<T> = Result<T, Box<dyn std::error::Error>>;

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn with(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    slow_extra: bool,
    run: fn() -> Res<Verdict>,
}

const HOUR: f64 = 3600.0;

// Errors (h, hu, hΘ) on meshes 1/16 … 1/256 for ε = 1e-4 and 1e-6.
const EXPECTED_EPS: [f64; 2] = [1e-4, 1e-6];
const EXPECTED: [[[f64; 5]; 3]; 2] = [
    [
        [2.94e-7, 7.56e-8, 1.91e-8, 4.23e-9, 8.23e-10],
        [5.28e-2, 1.29e-2, 3.10e-3, 7.25e-4, 1.44e-4],
        [3.24e-7, 7.36e-8, 1.86e-8, 4.46e-9, 9.29e-10],
    ],
    [
        [2.93e-9, 7.54e-10, 1.91e-10, 4.21e-11, 8.07e-12],
        [1.30e-1, 3.22e-2, 7.67e-3, 1.79e-3, 3.54e-4],
        [3.19e-9, 7.27e-10, 1.84e-10, 4.38e-11, 8.52e-12],
    ],
];
const EXPECTED_EOC: [[[f64; 4]; 3]; 2] = [
    [
        [1.96, 1.98, 2.18, 2.36],
        [2.04, 2.05, 2.09, 2.33],
        [2.14, 1.98, 2.06, 2.26],
    ],
    [
        [1.96, 1.98, 2.18, 2.38],
        [2.04, 2.05, 2.10, 2.33],
        [2.13, 1.98, 2.07, 2.36],
    ],
];

fn fmt_list(v: &[f64], prec: usize) -> String {
    v.iter().map(|x| format!("{x:.prec$}")).collect::<Vec<_>>().join(", ")
}

fn fmt_sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn c1_convergence() -> Res<Verdict> {
    let meshes = [16, 32, 64, 128, 256];
    let mut pass = true;
    let mut details = Vec::new();
    let mut failures = Vec::new();
    for eps in [1.0, 1e-2, 1e-4, 1e-6] {
        let cfg = SchemeConfig::new(eps, 1.0, 0.0);
        let report = convergence_study(ScenarioKind::Accuracy, &cfg, &meshes, ErrorReference::Consecutive, 0.01)?;
        let table = EXPECTED_EPS.iter().position(|&e| e == eps);
        for (f, (name, errs)) in report.fields.iter().enumerate() {
            let eocs = report.eocs(name).unwrap_or_default();
            details.push(format!(
                "eps={eps:e} {name}: errors [{}], EOC [{}]",
                fmt_sci(errs),
                fmt_list(&eocs, 2)
            ));
            let finest = *eocs.last().unwrap_or(&f64::NAN);
            if !(finest >= 1.7) {
                pass = false;
                failures.push(format!("eps={eps:e} {name} finest EOC {finest:.2}"));
            }
            if let Some(t) = table {
                let off = eocs
                    .iter()
                    .zip(&EXPECTED_EOC[t][f])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if !(off <= 0.4) {
                    pass = false;
                    failures.push(format!("eps={eps:e} {name} EOC off expected by {off:.2}"));
                }
                let ratio = errs
                    .iter()
                    .zip(&EXPECTED[t][f])
                    .map(|(a, b)| (a / b).max(b / a))
                    .fold(0.0, f64::max);
                if !(ratio <= 5.0) {
                    pass = false;
                    failures.push(format!("eps={eps:e} {name} error off expected by x{ratio:.1}"));
                }
            }
        }
    }
    let summary = if failures.is_empty() {
        "finest EOC >= 1.7 for every eps and field; table EOCs within 0.4, errors within x5".to_string()
    } else {
        format!("{} checks failed: {}", failures.len(), failures.join("; "))
    };
    Ok(Verdict::new(pass, summary).with(details))
}

fn c2_uniform_step() -> Res<Verdict> {
    let mut ap = Vec::new();
    let mut ex = Vec::new();
    for eps in [1e-2, 1e-6] {
        let sc = Scenario::with_config(ScenarioKind::Accuracy, 64, 64, SchemeConfig::new(eps, 1.0, 0.0))?;
        ap.push(dt_ap(&sc.initial.v, &sc.cfg, &sc.grid)?);
        ex.push(dt_ex(&sc.initial.u, &sc.cfg, &sc.grid)?);
    }
    let (r_ap, r_ex) = (ap[1] / ap[0], ex[1] / ex[0]);
    let pass = (0.8..=1.25).contains(&r_ap) && r_ex <= 1e-3;
    Ok(Verdict::new(
        pass,
        format!("dt_ap ratio {r_ap:.4} (need [0.8, 1.25]), dt_ex ratio {r_ex:.3e} (need <= 1e-3)"),
    ))
}

fn c3_divergence_scaling() -> Res<Verdict> {
    let mut maxima = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let grid = ScenarioKind::ShearFlow.grid(100, 100)?;
        let (init, cfg) = well_prepared_shear_flow(&grid, eps)?;
        let mut sim = Simulation::new(grid, cfg, init)?;
        let mut worst: f64 = 0.0;
        let mut observe = |r: &StageRecord<'_>| worst = worst.max(divergence_l1(&r.v.u, &r.v.v, &grid));
        for _ in 0..100 {
            sim.step_observed(&mut observe)?;
        }
        maxima.push(worst);
    }
    let ratios: Vec<f64> = maxima.windows(2).map(|w| w[0] / w[1]).collect();
    let pass = ratios.iter().all(|r| (5.0..=20.0).contains(r));
    Ok(Verdict::new(
        pass,
        format!(
            "max ||div v||_1 = [{}], ratios [{}] (need [5, 20])",
            fmt_sci(&maxima),
            fmt_list(&ratios, 2)
        ),
    ))
}

fn c4_high_rossby() -> Res<Verdict> {
    let (nx, ny) = ScenarioKind::WavetrainRsw.default_mesh();
    let sc = Scenario::new(ScenarioKind::WavetrainRsw, nx, ny)?;
    let (cfg, grid) = (sc.cfg.clone(), sc.grid);
    let mut sim = Simulation::new(sc.grid, sc.cfg, sc.initial)?;
    let mut worst: f64 = 0.0;
    let mut stages = 0;
    let mut err = None;
    let mut observe = |r: &StageRecord<'_>| {
        stages += 1;
        match v_from_u(r.u, &cfg, &grid) {
            Ok(v) => worst = worst.max(r.v.max_abs_diff(&v)),
            Err(e) => err = Some(e),
        }
    };
    for _ in 0..50 {
        sim.step_observed(&mut observe)?;
    }
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(Verdict::new(
        worst == 0.0,
        format!(
            "eps = {}, {stages} stages, max |V - V(U)| = {worst:e} (need exactly 0)",
            cfg.eps
        ),
    ))
}

fn c5_conservation() -> Res<Verdict> {
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for eps in [1.0, 1e-2, 1e-4, 1e-6] {
        let sc = Scenario::with_config(ScenarioKind::Accuracy, 64, 64, SchemeConfig::new(eps, 1.0, 0.0))?;
        let mut sim = Simulation::new(sc.grid, sc.cfg, sc.initial)?;
        let totals = |s: &Simulation| [s.state.u.h.sum(), s.state.u.htheta.sum()];
        let start = totals(&sim);
        let mut drift: f64 = 0.0;
        for _ in 0..200 {
            sim.step()?;
            for (a, b) in totals(&sim).iter().zip(&start) {
                drift = drift.max((a - b).abs() / b.abs());
            }
        }
        details.push(format!("eps={eps:e}: max relative drift {drift:.2e}"));
        worst = worst.max(drift);
    }
    Ok(Verdict::new(
        worst <= 1e-12,
        format!("worst relative drift of sum h, sum hTheta over 200 steps = {worst:.2e} (need <= 1e-12)"),
    )
    .with(details))
}

fn c6_oracles() -> Res<Verdict> {
    let p = common::pccu_worst(601, 100, false);
    let c = common::cu_worst(602, 100);
    Ok(Verdict::new(
        p <= 1e-13 && c <= 1e-13,
        format!("100 random 4x4 states: PCCU {p:.2e}, CU {c:.2e} (need <= 1e-13)"),
    ))
}

fn tv_theta(out: &RunOutcome, cfg: &SchemeConfig, grid: &GridSpec) -> Option<f64> {
    out.snapshots
        .first()
        .map(|s| total_variation(&s.v.buoyancy(cfg.eps, cfg.nu, grid), grid))
}

fn simplified_instability(n: usize) -> Res<Verdict> {
    let t_scale = vortex_pair_reference().time_scale();
    let (t20, t60) = (20.0 * HOUR / t_scale, 60.0 * HOUR / t_scale);

    let sc = Scenario::new(ScenarioKind::VortexPair, n, n)?;
    let ap = run_simulation(sc.grid, sc.cfg.clone(), sc.initial.clone(), t20, &[t20])?;
    let ap_ok = ap.blow_up.is_none() && ap.final_state.v.detect_nonfinite().is_none();
    let ap_tv = tv_theta(&ap, &sc.cfg, &sc.grid).unwrap_or(f64::NAN);

    let cfg = sc.cfg.clone().with_scheme(SchemeKind::SimplifiedDffv);
    let simp = run_simulation(sc.grid, cfg.clone(), sc.initial.clone(), t60, &[t20])?;
    let simp_tv = tv_theta(&simp, &cfg, &sc.grid);
    let ratio = simp_tv.map_or(f64::NAN, |t| t / ap_tv);
    let blew = simp.blow_up.as_ref().map(|b| b.t * t_scale / HOUR);

    let pass = ap_ok && (blew.is_some_and(|h| h < 60.0) || ratio >= 2.0);
    let simp_text = match blew {
        Some(h) => format!("simplified blows up at {h:.2} h"),
        None => "simplified reaches 60 h".to_string(),
    };
    Ok(Verdict::new(
        pass,
        format!(
            "{n}x{n}: AP DF-FV {} to 20 h (TV(Theta) {ap_tv:.4}), {simp_text}, TV ratio at 20 h {ratio:.3} (need blow-up or >= 2)",
            if ap_ok { "finite" } else { "NOT finite" }
        ),
    ))
}

fn c7_simplified() -> Res<Verdict> {
    simplified_instability(150)
}

fn c7_simplified_fine() -> Res<Verdict> {
    simplified_instability(300)
}

fn c8_wavetrain() -> Res<Verdict> {
    let kind = ScenarioKind::WavetrainRsw;
    let (nx, ny) = (126, 162);
    let sc = Scenario::new(kind, nx, ny)?;
    let times = [1.4 * PI];
    let out = run_simulation(sc.grid, sc.cfg.clone(), sc.initial.clone(), 20.0 * PI, &times)?;
    if let Some(b) = &out.blow_up {
        return Ok(Verdict::new(false, format!("run broke down: {b}")));
    }
    let slope = |state| -> Res<f64> {
        let snap = Snapshot::from_state(state, &sc.cfg, &sc.grid);
        Ok(slice(&snap, SliceAxis::AlongX, 160.0)?
            .max_abs_derivative("h")
            .unwrap_or(f64::NAN))
    };
    let s0 = slope(&sc.initial)?;
    let s1 = slope(&out.snapshots[0])?;
    let s2 = slope(&out.final_state)?;
    let pass = s1 >= 5.0 * s0 && s2 < s1;
    Ok(Verdict::new(
        pass,
        format!(
            "max|dh/dx| on y=160: t=0 {s0:.3}, t=1.4pi {s1:.3} (x{:.1}, need >= 5), t=20pi {s2:.3} (need < t=1.4pi); {} steps",
            s1 / s0,
            out.steps
        ),
    ))
}

fn c9_parameters() -> Res<Verdict> {
    let refs = [
        ("vortex pair", vortex_pair_reference(), 0.087, 0.865, None),
        ("shear flow", shear_flow_reference(), 0.028, 1.005, None),
        ("anticyclone", anticyclone_reference(), 0.016, 0.421, Some(20.746)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, r, eps, nu, beta) in refs {
        pass &= (r.eps() - eps).abs() <= 1e-3 && (r.nu() - nu).abs() <= 1e-3;
        if let Some(b) = beta {
            pass &= (r.beta_bar() - b).abs() <= 1e-3;
        }
        parts.push(format!(
            "{name}: eps {:.4}, nu {:.4}, beta {:.4}",
            r.eps(),
            r.nu(),
            r.beta_bar()
        ));
    }
    Ok(Verdict::new(pass, parts.join("; ")))
}

fn c10_elliptic() -> Res<Verdict> {
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    let tol = 1e-12;
    for bc in [BoundaryKind::Periodic, BoundaryKind::Extrapolate] {
        for n in [32, 64, 128, 256] {
            let grid = GridSpec::new(n, n, (0.0, 1.0), (0.0, 1.0), bc, bc)?;
            let exact = ScalarField::from_fn(&grid, |x, y| {
                (2.0 * PI * x).sin() * (2.0 * PI * y).cos()
                    + 0.3 * (4.0 * PI * (x + y)).cos()
                    + (-20.0 * ((x - 0.4).powi(2) + (y - 0.6).powi(2))).exp()
            })
            .filled(&grid);
            // Coefficients of a stage at ε = 1e-2 with a ≈ b ≈ 1 and a
            // quarter-cell step.
            let gdt = (1.0 - 0.5_f64.sqrt()) * 0.25 * grid.dx;
            let mut p = HelmholtzProblem {
                alpha: 1e-4 + gdt * gdt,
                delta: gdt * gdt,
                rhs: ScalarField::zeros(&grid),
                tol,
            };
            p.rhs = p.apply(&exact, &grid).filled(&grid);
            let got = solve_helmholtz(&p, &grid)?;
            let err = got
                .interior()
                .iter()
                .zip(exact.interior())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
                / exact.max_abs().max(1.0);
            details.push(format!("{} {n}x{n}: relative error {err:.2e}", bc.name()));
            worst = worst.max(err);
        }
    }
    Ok(Verdict::new(
        worst <= 10.0 * tol,
        format!(
            "worst relative error {worst:.2e} over 32..256, periodic and extrapolate (need <= {:.0e})",
            10.0 * tol
        ),
    )
    .with(details))
}

fn cost_relative() -> Res<Verdict> {
    let t_end = 6.0 * HOUR / shear_flow_reference().time_scale();
    let mut rows = Vec::new();
    for scheme in [SchemeKind::ApDffv, SchemeKind::Explicit] {
        let mut sc = Scenario::new(ScenarioKind::ShearFlow, 100, 100)?;
        sc.cfg.scheme = scheme;
        let start = Instant::now();
        let out = run_simulation(sc.grid, sc.cfg.clone(), sc.initial.clone(), t_end, &[])?;
        let secs = start.elapsed().as_secs_f64();
        if let Some(b) = out.blow_up {
            return Ok(Verdict::new(false, format!("{scheme} broke down: {b}")));
        }
        rows.push((out.steps as f64, secs / out.steps as f64));
    }
    let (steps, per_step) = (rows[0].0 / rows[1].0, rows[0].1 / rows[1].1);
    Ok(Verdict::new(
        steps <= 0.5 && per_step <= 5.0,
        format!(
            "shear flow 100x100 to 6 h: steps AP/explicit {steps:.3} ({} vs {}, need <= 0.5), per-step cost ratio {per_step:.2} (need <= 5)",
            rows[0].0, rows[1].0
        ),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: "c1",
            title: "second-order convergence",
            slow_extra: false,
            run: c1_convergence,
        },
        Criterion {
            id: "c2",
            title: "eps-uniform time step",
            slow_extra: false,
            run: c2_uniform_step,
        },
        Criterion {
            id: "c3",
            title: "divergence scales with eps",
            slow_extra: false,
            run: c3_divergence_scaling,
        },
        Criterion {
            id: "c4",
            title: "high-Rossby degeneracy",
            slow_extra: false,
            run: c4_high_rossby,
        },
        Criterion {
            id: "c5",
            title: "conservation",
            slow_extra: false,
            run: c5_conservation,
        },
        Criterion {
            id: "c6",
            title: "residual oracle equivalence",
            slow_extra: false,
            run: c6_oracles,
        },
        Criterion {
            id: "c7",
            title: "simplified-scheme instability",
            slow_extra: false,
            run: c7_simplified,
        },
        Criterion {
            id: "c7-300",
            title: "simplified-scheme instability at 300x300",
            slow_extra: true,
            run: c7_simplified_fine,
        },
        Criterion {
            id: "c8",
            title: "wavetrain steepening and decay",
            slow_extra: false,
            run: c8_wavetrain,
        },
        Criterion {
            id: "c9",
            title: "nondimensional parameters",
            slow_extra: false,
            run: c9_parameters,
        },
        Criterion {
            id: "c10",
            title: "elliptic manufactured solutions",
            slow_extra: false,
            run: c10_elliptic,
        },
        Criterion {
            id: "cost",
            title: "relative cost",
            slow_extra: false,
            run: cost_relative,
        },
    ];

    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for c in &criteria {
            println!("{}: test", c.id);
        }
        return ExitCode::SUCCESS;
    }
    let extras = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let strict = args.iter().any(|a| a == "--strict") || std::env::var_os("TRSW_ACCEPTANCE_STRICT").is_some();
    let filters: Vec<&str> = args
        .iter()
        .filter(|a| !a.starts_with('-'))
        .map(String::as_str)
        .collect();

    let mut failed = Vec::new();
    let mut ran = 0;
    for c in &criteria {
        if c.slow_extra && !extras {
            continue;
        }
        if !filters.is_empty() && !filters.iter().any(|f| c.id == *f || c.title.contains(f)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let verdict = (c.run)().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let tag = if verdict.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {}: {} [{secs:.1} s]", c.id, c.title, verdict.summary);
        for d in &verdict.details {
            println!("       {d}");
        }
        if !verdict.pass {
            failed.push(c.id);
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else if strict {
        ExitCode::FAILURE
    } else {
        println!(
            "acceptance: failing criteria {}; pass --strict to turn them into a test failure",
            failed.join(", ")
        );
        ExitCode::SUCCESS
    }
}
