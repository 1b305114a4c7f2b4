//! Command-line front end: `run`, `convergence` and `compare`.
//!
//! Exit codes: 0 on success, 2 when a simulation broke down (the blow-up
//! report is still written), 1 for usage, configuration and IO errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{SchemeConfig, SchemeKind};
use crate::diagnostics::{eoc, l1_error, slice, SliceAxis, Snapshot};
use crate::driver::{run_simulation, BlowUp, RunOutcome};
use crate::error::{Result, SolverError};
use crate::io::{write_convergence, write_slice, write_snapshot, write_snapshot_binary, RunFile};
use crate::scenarios::{convergence_study, ErrorReference, Scenario, ScenarioKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BLOW_UP: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "trsw", version, about = "Thermal rotating shallow water solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write snapshots and slices.
    Run(RunArgs),
    /// Mesh-refinement study of the accuracy test.
    Convergence(ConvergenceArgs),
    /// Run the AP scheme and the explicit scheme on the same scenario.
    Compare(RunArgs),
}

#[derive(Debug, Args, Clone)]
struct RunArgs {
    /// Run file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long = "beta-bar")]
    beta_bar: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    /// apdffv, explicit or simplified.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    snap: Option<Vec<f64>>,
    #[arg(long = "elliptic-tol")]
    elliptic_tol: Option<f64>,
    /// minus (analytic) or plus.
    #[arg(long = "jacobian-sign")]
    jacobian_sign: Option<String>,
    /// Also write raw binary snapshots with a sidecar header.
    #[arg(long)]
    binary: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    #[arg(long, default_value = "accuracy")]
    scenario: String,
    #[arg(long, default_value = "16,32,64,128,256", value_delimiter = ',')]
    meshes: Vec<usize>,
    #[arg(long = "eps-list", default_value = "1,1e-2,1e-4,1e-6", value_delimiter = ',')]
    eps_list: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    tfinal: f64,
    /// `consecutive`, or a mesh size to compare every mesh against.
    #[arg(long, default_value = "consecutive")]
    reference: String,
    #[arg(long)]
    out: PathBuf,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
struct RunPlan {
    scenario: Scenario,
    out: PathBuf,
    binary: bool,
}

fn resolve(args: &RunArgs) -> Result<RunPlan> {
    let file = match &args.config {
        Some(p) => RunFile::read(p)?,
        None => RunFile::default(),
    };
    let name = args
        .scenario
        .clone()
        .or(file.scenario)
        .ok_or_else(|| SolverError::Config("--scenario is required".into()))?;
    let kind: ScenarioKind = name.parse()?;
    let (dnx, dny) = kind.default_mesh();
    let nx = args.nx.or(file.nx).unwrap_or(dnx);
    let ny = args.ny.or(file.ny).unwrap_or(dny);

    let mut cfg: SchemeConfig = kind.default_config();
    if let Some(e) = args.eps.or(file.eps) {
        cfg.eps = e;
    }
    if let Some(v) = args.nu.or(file.nu) {
        cfg.nu = v;
    }
    if let Some(v) = args.beta_bar.or(file.beta_bar) {
        cfg.beta_bar = v;
    }
    if let Some(v) = args.mu.or(file.mu) {
        cfg.mu = v;
    }
    if let Some(v) = args.cfl.or(file.cfl) {
        cfg.cfl = v;
    }
    if let Some(v) = args.elliptic_tol.or(file.elliptic_tol) {
        cfg.elliptic_tol = v;
    }
    if let Some(s) = args.scheme.as_deref().or(file.scheme.as_deref()) {
        cfg.scheme = s.parse()?;
    }
    if let Some(s) = args.jacobian_sign.as_deref().or(file.jacobian_sign.as_deref()) {
        cfg.jacobian_sign = s.parse()?;
    }

    let mut scenario = Scenario::with_config(kind, nx, ny, cfg)?;
    if let Some(t) = args.tfinal.or(file.tfinal) {
        scenario.t_final = t;
    }
    if let Some(s) = args.snap.clone().or(file.snapshots) {
        scenario.snapshot_times = s;
    }
    let out = args
        .out
        .clone()
        .or(file.out_dir)
        .ok_or_else(|| SolverError::Config("--out is required".into()))?;
    Ok(RunPlan {
        scenario,
        out,
        binary: args.binary || file.binary.unwrap_or(false),
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| SolverError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| SolverError::io(path, e))
}

fn blow_up_report(b: &BlowUp) -> String {
    let cell = b
        .cell
        .map_or_else(|| "unknown".to_string(), |(j, k)| format!("{j},{k}"));
    format!(
        "status = blow-up\nt = {}\nstep = {}\nstage = {}\ncell = {cell}\nreason = {}\n",
        b.t, b.step, b.stage, b.reason
    )
}

/// Writes snapshots, mid-line slices, a summary and (if needed) the blow-up
/// report of one finished run into `dir`.
fn write_run(plan: &RunPlan, outcome: &RunOutcome, dir: &Path) -> Result<Vec<Snapshot>> {
    let sc = &plan.scenario;
    let (g, cfg) = (&sc.grid, &sc.cfg);
    fs::create_dir_all(dir).map_err(|e| SolverError::io(dir, e))?;
    let mut summary = format!(
        "scenario = {}\nscheme = {}\nnx = {}\nny = {}\neps = {}\nnu = {}\nbeta_bar = {}\nsteps = {}\n",
        sc.kind.name(),
        cfg.scheme,
        g.nx,
        g.ny,
        cfg.eps,
        cfg.nu,
        cfg.beta_bar,
        outcome.steps
    );
    let mut snaps = Vec::new();
    for (i, state) in outcome.snapshots.iter().enumerate() {
        let snap = Snapshot::from_state(state, cfg, g);
        let name = format!("snapshot_{i:03}");
        write_snapshot(&snap, dir.join(format!("{name}.csv")))?;
        if plan.binary {
            write_snapshot_binary(&snap, dir.join(format!("{name}.bin")))?;
        }
        let mid_y = 0.5 * (g.y_min + g.y_max);
        let mid_x = 0.5 * (g.x_min + g.x_max);
        write_slice(
            &slice(&snap, SliceAxis::AlongX, mid_y)?,
            dir.join(format!("slice_{i:03}_x.csv")),
        )?;
        write_slice(
            &slice(&snap, SliceAxis::AlongY, mid_x)?,
            dir.join(format!("slice_{i:03}_y.csv")),
        )?;
        summary.push_str(&format!("snapshot = {name}.csv t = {}\n", snap.t));
        snaps.push(snap);
    }
    match &outcome.blow_up {
        Some(b) => {
            write_text(&dir.join("blowup.txt"), &blow_up_report(b))?;
            summary.push_str(&format!("status = blow-up at t = {}\n", b.t));
        }
        None => summary.push_str("status = ok\n"),
    }
    write_text(&dir.join("summary.txt"), &summary)?;
    Ok(snaps)
}

fn execute(plan: &RunPlan) -> Result<RunOutcome> {
    let sc = &plan.scenario;
    run_simulation(
        sc.grid,
        sc.cfg.clone(),
        sc.initial.clone(),
        sc.t_final,
        &sc.snapshot_times,
    )
}

fn cmd_run(args: &RunArgs) -> Result<i32> {
    let plan = resolve(args)?;
    let outcome = execute(&plan)?;
    write_run(&plan, &outcome, &plan.out)?;
    Ok(match &outcome.blow_up {
        Some(b) => {
            eprintln!("blow-up: {b}");
            EXIT_BLOW_UP
        }
        None => {
            println!(
                "{} steps, {} snapshots written to {}",
                outcome.steps,
                outcome.snapshots.len(),
                plan.out.display()
            );
            EXIT_OK
        }
    })
}

fn cmd_compare(args: &RunArgs) -> Result<i32> {
    let base = resolve(args)?;
    let mut code = EXIT_OK;
    let mut runs = Vec::new();
    for scheme in [SchemeKind::ApDffv, SchemeKind::Explicit] {
        let mut plan = base.clone();
        plan.scenario.cfg.scheme = scheme;
        let outcome = execute(&plan)?;
        let snaps = write_run(&plan, &outcome, &base.out.join(scheme.name()))?;
        if let Some(b) = &outcome.blow_up {
            eprintln!("{scheme}: blow-up: {b}");
            code = EXIT_BLOW_UP;
        }
        runs.push(snaps);
    }
    let g = base.scenario.grid;
    let names = ["h", "u", "v", "Theta"];
    let mut report = format!("t,{}\n", names.map(|n| format!("{n}_l1_difference")).join(","));
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        let diffs = names
            .iter()
            .map(|n| {
                let (fa, fb) = (a.field(n).expect("known column"), b.field(n).expect("known column"));
                l1_error(fa, fb, &g).map(|d| format!("{d:.16e}"))
            })
            .collect::<Result<Vec<_>>>()?;
        report.push_str(&format!("{},{}\n", a.t, diffs.join(",")));
    }
    write_text(&base.out.join("difference.csv"), &report)?;
    print!("{report}");
    Ok(code)
}

fn cmd_convergence(args: &ConvergenceArgs) -> Result<i32> {
    let kind: ScenarioKind = args.scenario.parse()?;
    let reference =
        match args.reference.as_str() {
            "consecutive" => ErrorReference::Consecutive,
            n => ErrorReference::Fixed(n.parse().map_err(|_| {
                SolverError::Config(format!("--reference: expected 'consecutive' or a mesh, got '{n}'"))
            })?),
        };
    for &eps in &args.eps_list {
        let mut cfg = kind.default_config();
        cfg.eps = eps;
        let report = match convergence_study(kind, &cfg, &args.meshes, reference, args.tfinal) {
            Ok(r) => r,
            Err(SolverError::BlowUp(msg)) => {
                write_text(
                    &args.out.join(format!("blowup_eps_{eps:e}.txt")),
                    &format!("status = blow-up\neps = {eps}\nreason = {msg}\n"),
                )?;
                eprintln!("eps = {eps:e}: blow-up: {msg}");
                return Ok(EXIT_BLOW_UP);
            }
            Err(e) => return Err(e),
        };
        write_convergence(&report, args.out.join(format!("convergence_eps_{eps:e}.csv")))?;
        println!("eps = {eps:e}");
        for (name, errs) in &report.fields {
            let orders = eoc(errs);
            let cells: Vec<String> = errs
                .iter()
                .enumerate()
                .map(|(i, e)| match i.checked_sub(1) {
                    Some(p) => format!("{e:.2e} ({:.2})", orders[p]),
                    None => format!("{e:.2e}"),
                })
                .collect();
            println!("  {name:>6}: {}", cells.join("  "));
        }
    }
    Ok(EXIT_OK)
}

/// Parses `argv` (program name first) and runs the chosen subcommand.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Convergence(a) => cmd_convergence(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_FAILURE
    })
}
