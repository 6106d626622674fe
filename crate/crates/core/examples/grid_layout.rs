//! Builds a MAC grid on a shell sector and prints where each variable lives.
//!
//! `cargo run --example grid_layout`

use shellflow::grid::{Location, MacGrid, ShellSector, Variable};

pub fn run_example() -> shellflow::Result<()> {
    let sector = ShellSector::new([1.0, 2.0], [0.6, 2.2], [0.0, 1.5])?;
    let grid = MacGrid::new(sector, 4, 6, 8)?;
    println!("cells {:?}, spacing (dr, dtheta, dphi) = {:?}", grid.n, grid.h);
    println!("grid size d = {:.4}", grid.diameter());
    for v in Variable::ALL {
        let loc = v.location();
        println!(
            "{:8} on {:10} extents {:?}, first point {:?}",
            v.name(),
            loc.tag(),
            grid.extents(loc),
            grid.coords(loc, 0, 0, 0)
        );
    }
    // Normal velocity faces include both walls; centers do not.
    assert_eq!(grid.extents(Location::RFace)[0], grid.n[0] + 1);
    assert_eq!(grid.extents(Location::Center), grid.n);
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
