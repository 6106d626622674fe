use std::path::Path;
use std::process::{Command, Output};

use shellflow::cases::build_thermal2;
use shellflow::grid::{Direction, Variable};
use shellflow::io::{
    extract_slice, read_slice, read_structured_snapshot, write_slice, write_structured_snapshot, Cell, SliceSpec,
    Table,
};

fn solver(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_solver"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_mode_prints_usage_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = solver(dir.path(), "mode=spin\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("unknown mode 'spin'") && e.contains("Usage"), "{e}");
}

#[test]
fn negative_tau_is_a_config_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = solver(dir.path(), "mode=thermal2\n# comment\ntau=-1\nsteps=1\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("tau must be > 0"), "{e}");
}

#[test]
fn tcr_without_ladder_lists_required_steps() {
    let dir = tempfile::tempdir().unwrap();
    let o = solver(dir.path(), "mode=mms_tcr\nn=4\nt_end=0.01\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("2e-3") && e.contains("1e-3") && e.contains("5e-4"), "{e}");
}

#[test]
fn unknown_flag_and_missing_config_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(solver(dir.path(), "mode=thermal2\n", &["--bogus", "1"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_solver"))
        .args(["--config", "/nonexistent/run.cfg"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = solver(dir.path(), "mode=mms_mach_sweep\nn=6\ntau=1\nmachs=0.3\nrecord_steps=20\n", &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn thermal2_desk_run_writes_slices_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    // The flag overrides the file's step count.
    let o = solver(dir.path(), "mode=thermal2\nn=6\ntau=0.25\nsteps=40\nsnapshot_every=2\n", &["--steps", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    let slices: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("slice_"))
        .collect();
    assert_eq!(slices.len(), 3);
    let s = read_slice(&out.join("slice_dtheta_000004.txt")).unwrap();
    assert_eq!(s.rows.len(), 36);
    assert_eq!(s.variable, "dtheta");
    let diag = Table::read(&out.join("diagnostics.tsv")).unwrap();
    assert_eq!(diag.rows.len(), 3);
    assert_eq!(diag.get(2, "step"), Some(&Cell::Int(4)));
    let snap = read_structured_snapshot(&out.join("final_state.txt")).unwrap();
    assert_eq!(snap.time, 1.0);
    assert_eq!(snap.grid.n, [6, 6, 6]);
}

#[test]
fn mach_sweep_table_has_step_mach_dp_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = solver(
        dir.path(),
        "mode=mms_mach_sweep\nnr=9\nntheta=14\nnphi=40\ntau=1e-3\nmachs=1e-2,1e-3\nrecord_steps=1,2\n",
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS max dp at M0 = 1e-2"), "{stdout}");
    let t = Table::read(&dir.path().join("out/mach_sweep.tsv")).unwrap();
    assert_eq!(t.columns, ["n", "M0", "max_dp"]);
    assert_eq!(t.rows.len(), 4);
    assert_eq!(t.get(0, "n"), Some(&Cell::Int(1)));
    assert_eq!(t.get(3, "M0").and_then(Cell::as_f64), Some(1e-3));
}

#[test]
fn convergence_table_reparses_and_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = solver(dir.path(), "mode=mms_convergence\ngrids=4,6,8\ntau=1e-3\nsteps=1\n", &[]);
    // Coarse grids miss the order bracket; the run still writes its table.
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let t = Table::read(&dir.path().join("out/convergence.tsv")).unwrap();
    assert_eq!(t.columns, ["d", "tau", "variable", "l2_error", "order"]);
    assert_eq!(t.rows.len(), 15);
    assert_eq!(t.get(0, "order"), Some(&Cell::Missing));
    assert!(t.get(5, "order").and_then(Cell::as_f64).is_some());
    assert_eq!(t.get(4, "variable").and_then(Cell::as_str), Some("T"));
}

#[test]
fn tcr_table_has_one_row_per_base_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = solver(dir.path(), "mode=mms_tcr\nn=4\ntau_ladder=2e-3,1e-3,5e-4\nt_end=4e-3\n", &[]);
    assert!(matches!(o.status.code(), Some(0 | 4)), "{}", stderr(&o));
    let t = Table::read(&dir.path().join("out/tcr.tsv")).unwrap();
    assert_eq!(t.columns, ["tau", "p", "u_r", "u_theta", "u_phi", "T"]);
    assert_eq!(t.rows.len(), 3);
    let pass_lines = String::from_utf8_lossy(&o.stdout).lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count();
    assert_eq!(pass_lines, 15);
}

#[test]
fn thermal2_initial_slice_peaks_at_amplitude() {
    let case = build_thermal2();
    let grid = case.grid([51; 3]).unwrap();
    let base = case.base_state(&grid).unwrap();
    let s0 = case.initial_state(&grid, &base);
    let dth = case.theta_perturbation(&s0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("slice.txt");
    let slice = write_slice(&dth, &grid, SliceSpec::MID_PHI, "dtheta", 0.0, &path).unwrap();
    assert!((slice.max() - 0.5).abs() < 2e-3, "{}", slice.max());
    assert_eq!(read_slice(&path).unwrap(), slice);
}

#[test]
fn slice_rows_vary_phi_fastest_for_radial_normal() {
    let case = build_thermal2();
    let grid = case.grid([3, 4, 5]).unwrap();
    let base = case.base_state(&grid).unwrap();
    let spec = SliceSpec {
        normal: Direction::R,
        position: shellflow::io::SlicePosition::Index(1),
    };
    let s = extract_slice(base.p(), &grid, spec, "p", 0.0).unwrap();
    assert_eq!(s.axes, ["theta", "phi"]);
    assert!(s.rows[1][1] > s.rows[0][1] && s.rows[1][0] == s.rows[0][0]);
}

#[test]
fn hydrostatic_snapshot_has_zero_velocity_and_round_trips() {
    let case = build_thermal2();
    let grid = case.grid([4, 5, 6]).unwrap();
    let base = case.base_state(&grid).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.txt");
    write_structured_snapshot(&base, &grid, 0.0, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    for tag in ["field p center", "field u_r r_face", "field u_theta theta_face", "field u_phi phi_face", "field T center"] {
        assert!(text.contains(tag), "missing {tag}");
    }
    let snap = read_structured_snapshot(&path).unwrap();
    for d in Direction::ALL {
        assert_eq!(snap.state.get(Variable::velocity(d)).max_abs(), 0.0);
    }
    let a: Vec<f64> = base.p().interior_values().collect();
    let b: Vec<f64> = snap.state.p().interior_values().collect();
    assert_eq!(a, b);
}
