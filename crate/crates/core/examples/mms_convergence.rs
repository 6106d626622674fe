//! Grid-refinement study on the manufactured solution, written as a
//! convergence table with columns (d, tau, variable, l2_error, order).
//!
//! `cargo run --example mms_convergence -- [n1 n2 n3 ...]`

use shellflow::grid::{MacGrid, Variable};
use shellflow::io::{Cell, Table};
use shellflow::timestepper::PicardConfig;
use shellflow::verification::{convergence_study, ManufacturedCase};

pub fn run_with(cells: &[usize]) -> shellflow::Result<Table> {
    let case = ManufacturedCase::with_mach(1e-2);
    let grids: Vec<MacGrid> = cells
        .iter()
        .map(|&n| MacGrid::cube(ManufacturedCase::sector(), n))
        .collect::<shellflow::Result<_>>()?;
    let cfg = PicardConfig::new(1e-5);
    let reports = convergence_study(&case, &grids, &cfg, 1e-4)?;
    let mut table = Table::new(&["d", "tau", "variable", "l2_error", "order"]);
    for r in &reports {
        for v in Variable::ALL {
            let order = r.order.map(|o| o[v as usize]);
            table.push(vec![r.d.into(), r.tau.into(), v.name().into(), r.errors.l2[v as usize].into(), order.map_or(Cell::Missing, Cell::Num)]);
        }
    }
    Ok(table)
}

pub fn run_example() -> shellflow::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cells = if args.len() >= 3 { args } else { vec![8, 12, 16] };
    print!("{}", run_with(&cells)?.render());
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
