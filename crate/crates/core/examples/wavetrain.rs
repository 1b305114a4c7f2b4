//! Freely decaying gravity-wave train: the front steepens into a shock and
//! then decays. Prints the steepest slope of `h` along the centre line.

use std::f64::consts::PI;

use trsw::diagnostics::{slice, SliceAxis, Snapshot};
use trsw::driver::run_simulation;
use trsw::scenarios::{Scenario, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let thermal = std::env::args().nth(1).is_some_and(|a| a == "thermal");
    let kind = if thermal {
        ScenarioKind::WavetrainTrsw
    } else {
        ScenarioKind::WavetrainRsw
    };
    let (nx, ny) = kind.default_mesh();
    let sc = Scenario::new(kind, nx, ny)?;
    let times = [1.4 * PI, 2.8 * PI];
    let out = run_simulation(sc.grid, sc.cfg.clone(), sc.initial.clone(), 20.0 * PI, &times)?;
    if let Some(b) = &out.blow_up {
        return Err(format!("run broke down: {b}").into());
    }
    let slope = |state| -> Result<f64, Box<dyn std::error::Error>> {
        let snap = Snapshot::from_state(state, &sc.cfg, &sc.grid);
        Ok(slice(&snap, SliceAxis::AlongX, 160.0)?
            .max_abs_derivative("h")
            .expect("h column"))
    };
    println!("{} on {nx}×{ny}, {} steps", kind.name(), out.steps);
    println!("t = 0      max|dh/dx| = {:.4e}", slope(&sc.initial)?);
    for state in &out.snapshots {
        println!("t = {:6.3}π max|dh/dx| = {:.4e}", state.t / PI, slope(state)?);
    }
    Ok(())
}
