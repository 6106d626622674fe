//! Rising warm bubble (Thermal 2) on a coarse grid: diagnostics per output
//! step and a potential-temperature slice through the mid-plane.
//!
//! `cargo run --example thermal_bubble -- [cells] [steps] [out_dir]`

use std::path::PathBuf;

use shellflow::cases::{build_thermal2, run_case};
use shellflow::io::{write_slice, SliceSpec};
use shellflow::timestepper::PicardConfig;

pub fn run_with(cells: usize, steps: usize, out: Option<PathBuf>) -> shellflow::Result<()> {
    let case = build_thermal2();
    let grid = case.grid([cells; 3])?;
    let cfg = PicardConfig::new(0.25);
    let run = run_case(&case, &grid, &cfg, steps, (steps / 5).max(1), |d, _| {
        println!(
            "t = {:6.2} s  center height {:7.2} m  dTheta in [{:+.4}, {:+.4}] K  max|u| {:.3e} m/s",
            d.time, d.center_height, d.min_dtheta, d.max_dtheta, d.max_speed
        );
        Ok(())
    })?;
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).map_err(|e| shellflow::Error::Io { path: dir.clone(), source: e })?;
        let path = dir.join("dtheta_mid_phi.txt");
        let dth = case.theta_perturbation(&run.state);
        let slice = write_slice(&dth, &grid, SliceSpec::MID_PHI, "dtheta", steps as f64 * cfg.tau, &path)?;
        println!("wrote {} ({} rows, max {:.4} K)", path.display(), slice.rows.len(), slice.max());
    }
    Ok(())
}

pub fn run_example() -> shellflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let cells = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let steps = args.next().and_then(|s| s.parse().ok()).unwrap_or(40);
    run_with(cells, steps, args.next().map(PathBuf::from))
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
