use trsw::config::SchemeConfig;
use trsw::diagnostics::eoc;
use trsw::scenarios::{convergence_study, ErrorReference, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps_list: Vec<f64> = std::env::args()
        .nth(1)
        .map(|s| s.split(',').map(|e| e.parse().unwrap()).collect())
        .unwrap_or_else(|| vec![1.0, 1e-2, 1e-4, 1e-6]);
    let meshes = [16, 32, 64, 128, 256];
    for eps in eps_list {
        let cfg = SchemeConfig::new(eps, 1.0, 0.0);
        let report = convergence_study(ScenarioKind::Accuracy, &cfg, &meshes, ErrorReference::Consecutive, 0.01)?;
        println!("eps = {eps:e}");
        for (name, errs) in &report.fields {
            let orders = eoc(errs);
            print!("  {name:>6}:");
            for (i, e) in errs.iter().enumerate() {
                match i.checked_sub(1).map(|p| orders[p]) {
                    Some(o) => print!("  {e:.2e} ({o:.2})"),
                    None => print!("  {e:.2e}"),
                }
            }
            println!();
        }
    }
    Ok(())
}
