//! Independent check against the conservative form: the residual of exact
//! manufactured samples decays at second order.
//!
//! `cargo run --example conservative_oracle`

use shellflow::grid::MacGrid;
use shellflow::verification::{manufactured_conservative_residual, ManufacturedCase};

pub fn run_example() -> shellflow::Result<()> {
    let case = ManufacturedCase::with_mach(1e-2);
    let mut prev: Option<(f64, [f64; 5])> = None;
    println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}", "n", "mass", "mom_r", "mom_theta", "mom_phi", "energy");
    for n in [12, 24, 48] {
        let grid = MacGrid::cube(ManufacturedCase::sector(), n)?;
        let r = manufactured_conservative_residual(&case, &grid, 0.3, 1e-4).as_array();
        println!("{n:>4} {}", r.iter().map(|x| format!("{x:>10.3e}")).collect::<Vec<_>>().join(" "));
        if let Some((d, p)) = prev {
            let orders: Vec<String> = (0..5).map(|e| format!("{:.2}", (p[e] / r[e]).ln() / (d / grid.diameter()).ln())).collect();
            println!("     orders {}", orders.join(" "));
        }
        prev = Some((grid.diameter(), r));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
