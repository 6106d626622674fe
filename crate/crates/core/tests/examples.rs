//! Runs every example on small inputs so they cannot rot.

#[path = "../examples/grid_layout.rs"]
#[allow(dead_code)]
mod grid_layout;
#[path = "../examples/gas_and_base_state.rs"]
#[allow(dead_code)]
mod gas_and_base_state;
#[path = "../examples/block_tridiagonal.rs"]
#[allow(dead_code)]
mod block_tridiagonal;
#[path = "../examples/pencil_operators.rs"]
#[allow(dead_code)]
mod pencil_operators;
#[path = "../examples/config_and_tables.rs"]
#[allow(dead_code)]
mod config_and_tables;
#[path = "../examples/snapshot_round_trip.rs"]
#[allow(dead_code)]
mod snapshot_round_trip;
#[path = "../examples/dense_oracle.rs"]
#[allow(dead_code)]
mod dense_oracle;
#[path = "../examples/conservative_oracle.rs"]
#[allow(dead_code)]
mod conservative_oracle;
#[path = "../examples/temporal_convergence.rs"]
#[allow(dead_code)]
mod temporal_convergence;
#[path = "../examples/mach_sweep.rs"]
#[allow(dead_code)]
mod mach_sweep;
#[path = "../examples/mms_convergence.rs"]
#[allow(dead_code)]
mod mms_convergence;
#[path = "../examples/thermal_bubble.rs"]
#[allow(dead_code)]
mod thermal_bubble;

#[test]
fn grid_layout_runs() {
    grid_layout::run_example().unwrap();
}

#[test]
fn gas_and_base_state_runs() {
    gas_and_base_state::run_example().unwrap();
}

#[test]
fn block_tridiagonal_runs() {
    block_tridiagonal::run_example().unwrap();
}

#[test]
fn pencil_operators_runs() {
    pencil_operators::run_example().unwrap();
}

#[test]
fn config_and_tables_runs() {
    config_and_tables::run_example().unwrap();
}

#[test]
fn snapshot_round_trip_runs() {
    let dir = tempfile::tempdir().unwrap();
    snapshot_round_trip::run_to(dir.path().join("snap.txt")).unwrap();
}

#[test]
fn dense_oracle_runs() {
    dense_oracle::run_example().unwrap();
}

#[test]
fn conservative_oracle_runs() {
    conservative_oracle::run_example().unwrap();
}

#[test]
fn temporal_convergence_runs() {
    temporal_convergence::run_example().unwrap();
}

#[test]
fn mach_sweep_runs() {
    mach_sweep::run_steps(2).unwrap();
}

#[test]
fn mms_convergence_runs() {
    let t = mms_convergence::run_with(&[4, 6, 8]).unwrap();
    assert_eq!(t.rows.len(), 15);
}

#[test]
fn thermal_bubble_runs() {
    let dir = tempfile::tempdir().unwrap();
    thermal_bubble::run_with(8, 4, Some(dir.path().to_path_buf())).unwrap();
    assert!(dir.path().join("dtheta_mid_phi.txt").exists());
}
