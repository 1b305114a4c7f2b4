//! Stable step sizes on the accuracy data as the Rossby number shrinks: the
//! AP step stays put while the explicit step follows the fast waves.

use trsw::config::SchemeConfig;
use trsw::driver::{dt_ap, dt_ex};
use trsw::scenarios::{Scenario, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>12} {:>12}", "eps", "dt_ap", "dt_ex");
    for eps in [1.0, 1e-2, 1e-4, 1e-6] {
        let sc = Scenario::with_config(ScenarioKind::Accuracy, 64, 64, SchemeConfig::new(eps, 1.0, 0.0))?;
        let ap = dt_ap(&sc.initial.v, &sc.cfg, &sc.grid)?;
        let ex = dt_ex(&sc.initial.u, &sc.cfg, &sc.grid)?;
        println!("{eps:>8.0e} {ap:>12.4e} {ex:>12.4e}");
    }
    Ok(())
}
