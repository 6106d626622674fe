//! Parses a run configuration, shows how errors point at the offending line,
//! and round-trips a result table through its text form.
//!
//! `cargo run --example config_and_tables`

use std::path::Path;

use shellflow::io::{parse_config, Table};

pub fn run_example() -> shellflow::Result<()> {
    let text = "# low-Mach sweep on a 9 x 14 x 40 grid\nmode = mms_mach_sweep\nnr = 9\nntheta = 14\nnphi = 40\ntau = 1e-3\nmachs = 1e-2, 1e-3, 1e-4\nrecord_steps = 1, 100\n";
    let cfg = parse_config(text)?;
    println!("mode {} on {:?}, tau {:?}, machs {:?}", cfg.mode.name(), cfg.cells, cfg.tau, cfg.machs);

    for bad in ["mode = thermal2\ntau = 0.25\nspeed = 3\n", "mode = mms_tcr\nn = 24\n"] {
        match parse_config(bad) {
            Ok(_) => println!("unexpectedly accepted"),
            Err(e) => println!("rejected: {e}"),
        }
    }

    let mut t = Table::new(&["d", "tau", "variable", "l2_error", "order"]).comment("example table");
    t.push(vec![0.1.into(), 1e-5.into(), "p".into(), 3.2e-6.into(), None::<f64>.into()]);
    t.push(vec![0.05.into(), 1e-5.into(), "p".into(), 8.1e-7.into(), Some(1.98).into()]);
    let text = t.render();
    print!("{text}");
    let back = Table::parse(&text, Path::new("<memory>"))?;
    assert_eq!(back, t);
    println!("table re-parsed with {} rows", back.rows.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> shellflow::Result<()> {
    run_example()
}
