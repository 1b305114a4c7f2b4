//! Well-prepared shear-flow data approach geostrophic balance as ε → 0:
//! the largest divergence over 100 steps shrinks in proportion to ε.

use trsw::diagnostics::divergence_l1;
use trsw::driver::{DualState, Simulation};
use trsw::scenarios::{well_prepared_shear_flow, ScenarioKind};

fn max_divergence(eps: f64, n: usize, steps: usize) -> Result<f64, Box<dyn std::error::Error>> {
    let grid = ScenarioKind::ShearFlow.grid(n, n)?;
    let (init, cfg): (DualState, _) = well_prepared_shear_flow(&grid, eps)?;
    let mut sim = Simulation::new(grid, cfg, init)?;
    let mut worst: f64 = 0.0;
    let mut observe = |r: &trsw::driver::StageRecord<'_>| {
        worst = worst.max(divergence_l1(&r.v.u, &r.v.v, &grid));
    };
    for _ in 0..steps {
        sim.step_observed(&mut observe)?;
    }
    Ok(worst)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut previous: Option<f64> = None;
    for eps in [1e-2, 1e-3, 1e-4] {
        let d = max_divergence(eps, 100, 100)?;
        match previous {
            Some(p) => println!("eps = {eps:e}: max ||div v||_1 = {d:.4e}  (ratio {:.2})", p / d),
            None => println!("eps = {eps:e}: max ||div v||_1 = {d:.4e}"),
        }
        previous = Some(d);
    }
    Ok(())
}
