use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};
use shellflow::io::config::{Mode, RawConfig, KEYS};
use shellflow::io::driver::run;
use shellflow::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

fn command() -> Command {
    let modes: Vec<&str> = Mode::ALL.iter().map(|m| m.name()).collect();
    let mut cmd = Command::new("solver")
        .about("Implicit direction-splitting solver for weakly compressible flow in a spherical-shell sector")
        .after_help(format!(
            "Every config key is also a flag (--key value); flags override the file.\nModes: {}\nExit codes: 0 success, 2 config error, 3 numerical failure, 4 acceptance failure.",
            modes.join(", ")
        ))
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .required(true)
                .help("key=value configuration file"),
        );
    for &(key, help) in KEYS {
        cmd = cmd.arg(Arg::new(key).long(key).value_name("VALUE").help(help).action(ArgAction::Set));
    }
    cmd
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut cmd = command();
    let matches = match cmd.try_get_matches_from_mut(std::env::args_os()) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };

    let path = PathBuf::from(matches.get_one::<String>("config").expect("required"));
    let cfg = std::fs::read_to_string(&path)
        .map_err(|e| Error::Io { path: path.clone(), source: e })
        .and_then(|text| RawConfig::parse(&text))
        .and_then(|mut raw| {
            for &(key, _) in KEYS {
                if let Some(v) = matches.get_one::<String>(key) {
                    raw.set_flag(key, v)?;
                }
            }
            raw.build()
        });
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            if e.to_string().contains("unknown mode") {
                eprintln!("\n{}", cmd.render_usage());
            }
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    match run(&cfg) {
        Ok(summary) => {
            for p in &summary.outputs {
                println!("wrote {}", p.display());
            }
            for c in &summary.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if summary.all_passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: acceptance thresholds not met");
                ExitCode::from(EXIT_ACCEPTANCE)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG })
        }
    }
}
