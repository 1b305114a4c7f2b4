//! Work needed by the AP scheme and the explicit scheme to advance the shear
//! flow (ε ≈ 0.028) over the same interval.

use std::time::Instant;

use trsw::config::SchemeKind;
use trsw::driver::run_simulation;
use trsw::scenarios::{shear_flow_reference, Scenario, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(100), |s| s.parse())?;
    let t_end = 6.0 * 3600.0 / shear_flow_reference().time_scale();
    let mut rows = Vec::new();
    for scheme in [SchemeKind::ApDffv, SchemeKind::Explicit] {
        let mut sc = Scenario::new(ScenarioKind::ShearFlow, n, n)?;
        sc.cfg.scheme = scheme;
        let start = Instant::now();
        let out = run_simulation(sc.grid, sc.cfg.clone(), sc.initial.clone(), t_end, &[])?;
        let secs = start.elapsed().as_secs_f64();
        if let Some(b) = out.blow_up {
            return Err(format!("{scheme}: {b}").into());
        }
        println!(
            "{scheme:>9}: {:6} steps, {secs:8.3} s, {:.3e} s/step",
            out.steps,
            secs / out.steps as f64
        );
        rows.push((out.steps as f64, secs / out.steps as f64));
    }
    println!(
        "step ratio (AP/explicit) = {:.3}, per-step cost ratio = {:.2}",
        rows[0].0 / rows[1].0,
        rows[0].1 / rows[1].1
    );
    Ok(())
}
