//! Low-Mach scaling: the pressure fluctuation of well-prepared data shrinks
//! with the square of the Mach number.
//!
//! `cargo run --example mach_sweep -- [steps]`

use shellflow::grid::MacGrid;
use shellflow::timestepper::PicardConfig;
use shellflow::verification::{mach_sweep, ManufacturedCase};

pub fn run_steps(steps: usize) -> shellflow::Result<()> {
    let grid = MacGrid::new(ManufacturedCase::sector(), 9, 14, 40)?;
    let p0 = ManufacturedCase::with_mach(1e-2).p0;
    let machs = [1e-2, 1e-3, 1e-4];
    let rows = mach_sweep(&machs, p0, &grid, &PicardConfig::new(1e-3), &[1, steps])?;
    println!("grid {:?}, d = {:.4}", grid.n, grid.diameter());
    println!("{:>8} {:>6} {:>12}", "M0", "n", "max dp");
    for r in &rows {
        for (n, dp) in &r.dp {
            println!("{:>8e} {n:>6} {dp:>12.4e}", r.m0);
        }
    }
    for w in rows.windows(2) {
        let ratio = w[0].dp.last().map_or(f64::NAN, |x| x.1) / w[1].dp.last().map_or(f64::NAN, |x| x.1);
        println!("dp({:e}) / dp({:e}) = {ratio:.1}", w[0].m0, w[1].m0);
    }
    Ok(())
}

pub fn run_example() -> shellflow::Result<()> {
    let steps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    run_steps(steps)
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
