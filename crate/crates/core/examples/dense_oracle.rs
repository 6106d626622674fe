//! Split Picard iteration against the unsplit Crank-Nicolson step solved
//! densely: extra iterations remove the splitting error.
//!
//! `cargo run --example dense_oracle`

use shellflow::grid::{FieldSet, MacGrid};
use shellflow::timestepper::{picard_step, PicardConfig};
use shellflow::verification::{dense_picard_step, mms_model, ManufacturedCase};

pub fn run_example() -> shellflow::Result<()> {
    let case = ManufacturedCase::with_mach(1e-2);
    let grid = MacGrid::cube(ManufacturedCase::sector(), 4)?;
    let model = mms_model(&case, grid.clone());
    let tau = 1e-3;
    let u0 = case.sample(&grid, 0.0);
    let s_bar = match (model.source(0.0), model.source(tau)) {
        (Some(a), Some(b)) => Some(FieldSet::midpoint(&a, &b)),
        _ => None,
    };
    let dense = dense_picard_step(&model, &PicardConfig::new(tau).with_iterations(20), &u0, 0.0, s_bar.as_ref())?;
    let scale = dense.max_norms();
    for k in [1, 2, 4, 8] {
        let (split, _) = picard_step(&model, &PicardConfig::new(tau).with_iterations(k), &u0, 0.0, 0, s_bar.as_ref())?;
        let d = FieldSet::difference(&split, &dense).max_norms();
        let rel = (0..5).map(|v| d[v] / scale[v]).fold(0.0, f64::max);
        println!("K = {k}: max relative difference from the dense step {rel:.2e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
