//! Assembles the implicit radial pencil `I + (tau/2) D_r` and measures the
//! truncation error of the explicit operators on the manufactured solution.
//!
//! `cargo run --example pencil_operators`

use std::sync::Arc;

use shellflow::boundary::BoundaryConditions;
use shellflow::grid::{Direction, MacGrid, Variable};
use shellflow::operators::{apply_explicit_d, apply_explicit_dm, assemble_pencil, CoefficientState, PencilBlocks};
use shellflow::verification::ManufacturedCase;

/// RMS error of `D U + D_M U` against the exact spatial terms, away from the walls.
fn operator_error(case: &ManufacturedCase, n: usize) -> shellflow::Result<f64> {
    let grid = MacGrid::cube(ManufacturedCase::sector(), n)?;
    let env = ManufacturedCase::environment();
    let u = case.sample(&grid, 0.2);
    let cs = CoefficientState::new(&u, &grid, &case.gas)?;
    let mut op = apply_explicit_d(&cs, &u, &grid, &case.gas);
    op.axpy(1.0, &apply_explicit_dm(&cs, &u, &grid, &case.gas, &env));
    let f = op.get(Variable::Pressure);
    let (mut sum, mut count) = (0.0f64, 0usize);
    f.for_each_interior(|i, j, k| {
        if [i, j, k].iter().zip(grid.n).any(|(&x, m)| x < 2 || x > m as isize - 3) {
            return;
        }
        let x = grid.coords(Variable::Pressure.location(), i, j, k);
        let exact = case.residual(&env, x, 0.2).spatial[0];
        sum += (f.get(i, j, k) - exact).powi(2);
        count += 1;
    });
    Ok((sum / count as f64).sqrt())
}

pub fn run_example() -> shellflow::Result<()> {
    let case = ManufacturedCase::with_mach(1e-2);
    let grid = MacGrid::cube(ManufacturedCase::sector(), 8)?;
    let mut u = case.sample(&grid, 0.0);
    let bc = BoundaryConditions::no_slip(Arc::new(case));
    bc.apply(&grid, &mut u, 0.0);
    let cs = CoefficientState::new(&u, &grid, &case.gas)?;
    let mut pb = PencilBlocks::default();
    assemble_pencil(Direction::R, 3, 3, &cs, 1e-3, &grid, &case.gas, &bc, &mut pb);
    println!("radial pencil (3, 3): {} blocks; diagonal block of cell 4:", pb.diag.len());
    for row in &pb.diag[4] {
        println!("  {}", row.iter().map(|v| format!("{v:11.3e}")).collect::<Vec<_>>().join(" "));
    }

    // The pressure row is pre-asymptotic on coarse grids; the order climbs toward 2.
    let mut prev: Option<f64> = None;
    for n in [16, 32, 64] {
        let e = operator_error(&case, n)?;
        match prev {
            Some(p) => println!("pressure-row truncation error n={n:>3}: {e:.3e}, order {:.2}", (p / e).log2()),
            None => println!("pressure-row truncation error n={n:>3}: {e:.3e}"),
        }
        prev = Some(e);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
