//! Time convergence rate from solutions at tau, tau/2 and tau/4 on one grid.
//!
//! `cargo run --example temporal_convergence`

use shellflow::grid::{MacGrid, Variable};
use shellflow::timestepper::PicardConfig;
use shellflow::verification::{tcr_study, ManufacturedCase};

pub fn run_example() -> shellflow::Result<()> {
    let case = ManufacturedCase::with_mach(1e-2);
    let grid = MacGrid::cube(ManufacturedCase::sector(), 8)?;
    let rows = tcr_study(&case, &grid, &PicardConfig::new(2e-3), &[2e-3, 1e-3], 8e-3)?;
    print!("tau     ");
    for v in Variable::ALL {
        print!("{:>9}", v.name());
    }
    println!();
    for r in rows {
        print!("{:<8e}", r.tau);
        for x in r.tcr {
            print!("{:>9.3}", x.unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
