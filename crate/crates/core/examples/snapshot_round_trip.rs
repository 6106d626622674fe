//! Writes the hydrostatic Thermal 2 base state as a structured snapshot and
//! reads it back bit for bit.
//!
//! `cargo run --example snapshot_round_trip -- [path]`

use std::path::PathBuf;

use shellflow::cases::build_thermal2;
use shellflow::io::{read_structured_snapshot, write_structured_snapshot};

pub fn run_to(path: PathBuf) -> shellflow::Result<()> {
    let case = build_thermal2();
    let grid = case.grid([6, 5, 4])?;
    let base = case.base_state(&grid)?;
    write_structured_snapshot(&base, &grid, 0.0, &path)?;
    let back = read_structured_snapshot(&path)?;
    let same = base
        .fields
        .iter()
        .zip(&back.state.fields)
        .all(|(a, b)| a.interior_values().eq(b.interior_values()));
    println!("wrote {} ({} bytes); lossless: {same}", path.display(), std::fs::metadata(&path).map_or(0, |m| m.len()));
    assert!(same);
    Ok(())
}

pub fn run_example() -> shellflow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("shellflow_snapshot.txt"));
    run_to(path)
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
