//! Equation of state, potential temperature and the hydrostatic base state of
//! the bubble benchmarks.
//!
//! `cargo run --example gas_and_base_state`

use shellflow::cases::build_thermal2;
use shellflow::thermo::{eos_density, exner, potential_temperature, sound_speed, GasParams};

pub fn run_example() -> shellflow::Result<()> {
    let air = GasParams::dry_air();
    let rho = eos_density(&air, 1e5, 300.0)?;
    println!("dry air: gamma = {:.5}, rho(1e5 Pa, 300 K) = {rho:.4} kg/m^3", air.gamma);
    println!("sound speed at the surface: {:.2} m/s", sound_speed(&air, 1e5, rho));
    println!("exner(8e4 Pa) = {:.4}", exner(&air, 8e4, 1e5));
    println!("theta(8e4 Pa, 280 K) = {:.2} K", potential_temperature(&air, 8e4, 280.0, 1e5));

    let case = build_thermal2();
    println!("\n{}: constant theta base state", case.name);
    for h in [0.0, 250.0, 500.0, 1000.0] {
        let s = case.base.at(h)?;
        println!("  h = {h:6.1} m  p = {:9.2} Pa  T = {:7.3} K  rho = {:.5}", s.p, s.t, s.rho);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
