//! The per-stage elliptic problem on its own: manufactured solutions on a
//! periodic grid (FFT) and on a closed grid (preconditioned CG).

use std::f64::consts::PI;

use trsw::elliptic::{HelmholtzProblem, HelmholtzSolver};
use trsw::field::ScalarField;
use trsw::grid::{BoundaryKind, GridSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for bc in [BoundaryKind::Periodic, BoundaryKind::Extrapolate] {
        for n in [32, 64, 128, 256] {
            let grid = GridSpec::new(n, n, (0.0, 1.0), (0.0, 1.0), bc, bc)?;
            let exact = ScalarField::from_fn(&grid, |x, y| (2.0 * PI * x).sin() * (2.0 * PI * y).cos()).filled(&grid);
            let gdt = 0.25 * grid.dx;
            let mut p = HelmholtzProblem {
                alpha: 1e-4 + gdt * gdt,
                delta: gdt * gdt,
                rhs: ScalarField::zeros(&grid),
                tol: 1e-12,
            };
            p.rhs = p.apply(&exact, &grid).filled(&grid);
            let mut solver = HelmholtzSolver::new(&grid);
            let psi = solver.solve(&p, &grid, None)?;
            let err = psi
                .interior()
                .iter()
                .zip(exact.interior())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            println!(
                "{:>11} {n:>4}²: max error {err:.2e}, {} iterations",
                bc.name(),
                solver.last_iterations
            );
        }
    }
    Ok(())
}
