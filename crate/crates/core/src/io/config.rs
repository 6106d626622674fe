//! `key=value` run configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::blocktri::LineSolver;
use crate::error::{Error, Result};

/// Driver selected by `mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    MmsConvergence,
    MmsTcr,
    MmsMachSweep,
    Thermal1,
    Thermal2,
    /// Bubble in a user-sized sector.
    Custom,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::MmsConvergence,
        Mode::MmsTcr,
        Mode::MmsMachSweep,
        Mode::Thermal1,
        Mode::Thermal2,
        Mode::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::MmsConvergence => "mms_convergence",
            Mode::MmsTcr => "mms_tcr",
            Mode::MmsMachSweep => "mms_mach_sweep",
            Mode::Thermal1 => "thermal1",
            Mode::Thermal2 => "thermal2",
            Mode::Custom => "custom",
        }
    }

    pub fn is_bubble(self) -> bool {
        matches!(self, Mode::Thermal1 | Mode::Thermal2 | Mode::Custom)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Mode::ALL.iter().map(|m| m.name()).collect();
            format!("unknown mode '{s}'; expected one of {}", names.join(", "))
        })
    }
}

/// Time-step ladder required by `mms_tcr`.
pub const DEFAULT_TCR_LADDER: [f64; 3] = [2e-3, 1e-3, 5e-4];

/// Every accepted key with a one-line description, in documentation order.
pub const KEYS: &[(&str, &str)] = &[
    ("mode", "mms_convergence | mms_tcr | mms_mach_sweep | thermal1 | thermal2 | custom"),
    ("n", "cells per direction (sets nr, ntheta, nphi)"),
    ("nr", "radial cells"),
    ("ntheta", "colatitude cells"),
    ("nphi", "longitude cells"),
    ("grids", "comma-separated cells-per-direction ladder for mms_convergence"),
    ("tau", "time step (s)"),
    ("tau_ladder", "comma-separated base time steps for mms_tcr"),
    ("k_iters", "Picard iterations per step"),
    ("tol", "early-exit tolerance on the relative Picard increment"),
    ("m0", "Mach number of the manufactured solution"),
    ("machs", "comma-separated Mach numbers for mms_mach_sweep"),
    ("record_steps", "comma-separated steps at which mms_mach_sweep records max dp"),
    ("p0", "pressure scale of the manufactured solution (Pa)"),
    ("t_end", "final time (s)"),
    ("steps", "number of steps (alternative to t_end)"),
    ("out", "output directory"),
    ("snapshot_every", "steps between slice outputs for bubble modes"),
    ("threads", "worker threads"),
    ("solver", "thomas | schur"),
    ("segments", "Schur segments per line (default: threads)"),
    ("mu", "dynamic viscosity override for bubble modes"),
    ("height", "sector height for custom mode (m)"),
    ("half_width", "sector lateral half-width for custom mode (m)"),
    ("bubble_radius", "bubble radius for custom mode (m)"),
    ("bubble_height", "bubble center height for custom mode (m)"),
    ("bubble_amplitude", "bubble peak potential-temperature perturbation for custom mode (K)"),
    ("bubble_profile", "cos2 | half_cos for custom mode"),
];

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub cells: Option<[usize; 3]>,
    pub grids: Vec<usize>,
    pub tau: Option<f64>,
    pub tau_ladder: Vec<f64>,
    pub k_iters: usize,
    pub tol: Option<f64>,
    pub m0: f64,
    pub machs: Vec<f64>,
    pub record_steps: Vec<usize>,
    pub p0: f64,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub out: PathBuf,
    pub snapshot_every: usize,
    pub threads: usize,
    pub solver: SolverKind,
    pub segments: Option<usize>,
    pub mu: Option<f64>,
    pub height: f64,
    pub half_width: f64,
    pub bubble_radius: f64,
    pub bubble_height: f64,
    pub bubble_amplitude: f64,
    pub bubble_profile: crate::cases::BubbleProfile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Thomas,
    Schur,
}

impl RunConfig {
    /// Line solver implied by `solver`, `segments` and `threads`.
    pub fn line_solver(&self) -> LineSolver {
        match self.solver {
            SolverKind::Thomas => LineSolver::Thomas,
            SolverKind::Schur => LineSolver::Schur {
                segments: self.segments.unwrap_or(self.threads).max(1),
            },
        }
    }
}

/// Raw entries with the line each came from; line 0 marks command-line flags.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    /// Parses `key=value` lines; rejects unknown and repeated keys.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line_no = no + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("expected key=value, got '{content}'"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            check_key(k, line_no)?;
            if let Some((prev, _)) = raw.entries.get(k) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("key '{k}' repeated (first set on line {prev})"),
                });
            }
            raw.entries.insert(k.to_string(), (line_no, v.to_string()));
        }
        Ok(raw)
    }

    /// Sets `key` from a command-line flag, replacing any file value.
    pub fn set_flag(&mut self, key: &str, value: &str) -> Result<()> {
        check_key(key, 0)?;
        self.entries.insert(key.to_string(), (0, value.to_string()));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |(l, _)| *l)
    }

    fn value<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| Error::Config {
                line,
                message: format!("{key}: cannot parse '{v}': {e}"),
            }),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    s.trim().parse::<T>().map_err(|e| Error::Config {
                        line,
                        message: format!("{key}: cannot parse '{}': {e}", s.trim()),
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        let v: Option<f64> = self.value(key)?;
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Config {
                    line: self.line_of(key),
                    message: format!("{key} must be > 0, got {x}"),
                });
            }
        }
        Ok(v)
    }

    fn count(&self, key: &str, min: usize) -> Result<Option<usize>> {
        let v: Option<usize> = self.value(key)?;
        if let Some(x) = v {
            if x < min {
                return Err(Error::Config {
                    line: self.line_of(key),
                    message: format!("{key} must be >= {min}, got {x}"),
                });
            }
        }
        Ok(v)
    }

    /// Validates into a [`RunConfig`].
    pub fn build(&self) -> Result<RunConfig> {
        let (mode_line, mode) = match self.get("mode") {
            Some((line, v)) => (line, v.parse::<Mode>().map_err(|message| Error::Config { line, message })?),
            None => {
                return Err(Error::Config {
                    line: 0,
                    message: "missing required key 'mode'".into(),
                })
            }
        };
        let missing = |key: &str, hint: &str| Error::Config {
            line: mode_line,
            message: format!("mode={mode} requires '{key}'{hint}"),
        };

        let n = self.count("n", 2)?;
        let per = [self.count("nr", 2)?, self.count("ntheta", 2)?, self.count("nphi", 2)?];
        let cells = match (n, per) {
            (_, [Some(a), Some(b), Some(c)]) => Some([a, b, c]),
            (Some(n), p) => Some([p[0].unwrap_or(n), p[1].unwrap_or(n), p[2].unwrap_or(n)]),
            (None, [None, None, None]) => None,
            (None, _) => {
                return Err(Error::Config {
                    line: self.line_of("nr").max(self.line_of("ntheta")).max(self.line_of("nphi")),
                    message: "set all of nr, ntheta, nphi, or n".into(),
                })
            }
        };
        let grids: Vec<usize> = self.list("grids")?.unwrap_or_default();
        if let Some(&g) = grids.iter().find(|&&g| g < 2) {
            return Err(Error::Config {
                line: self.line_of("grids"),
                message: format!("grids entries must be >= 2, got {g}"),
            });
        }
        let tau = self.positive("tau")?;
        let tau_ladder: Vec<f64> = self.list("tau_ladder")?.unwrap_or_default();
        if tau_ladder.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config {
                line: self.line_of("tau_ladder"),
                message: "tau_ladder entries must be > 0".into(),
            });
        }
        let k_iters = self.count("k_iters", 1)?.unwrap_or(2);
        let threads = self.count("threads", 1)?.unwrap_or(1);
        let solver = match self.get("solver") {
            None | Some((_, "thomas")) => SolverKind::Thomas,
            Some((_, "schur")) => SolverKind::Schur,
            Some((line, v)) => {
                return Err(Error::Config {
                    line,
                    message: format!("solver must be thomas or schur, got '{v}'"),
                })
            }
        };
        let bubble_profile = match self.get("bubble_profile") {
            None | Some((_, "half_cos")) => crate::cases::BubbleProfile::HalfCos,
            Some((_, "cos2")) => crate::cases::BubbleProfile::Cos2,
            Some((line, v)) => {
                return Err(Error::Config {
                    line,
                    message: format!("bubble_profile must be cos2 or half_cos, got '{v}'"),
                })
            }
        };
        let cfg = RunConfig {
            mode,
            cells,
            grids,
            tau,
            tau_ladder,
            k_iters,
            tol: self.positive("tol")?,
            m0: self.positive("m0")?.unwrap_or(1e-2),
            machs: self.list("machs")?.unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6]),
            record_steps: self.list("record_steps")?.unwrap_or_else(|| vec![1, 50, 100]),
            p0: self.positive("p0")?.unwrap_or(crate::verification::manufactured::MMS_P0),
            t_end: self.positive("t_end")?,
            steps: self.value("steps")?,
            out: self.value::<PathBuf>("out")?.unwrap_or_else(|| PathBuf::from("out")),
            snapshot_every: self.count("snapshot_every", 1)?.unwrap_or(100),
            threads,
            solver,
            segments: self.count("segments", 1)?,
            mu: match self.value::<f64>("mu")? {
                Some(m) if m < 0.0 => {
                    return Err(Error::Config {
                        line: self.line_of("mu"),
                        message: format!("mu must be >= 0, got {m}"),
                    })
                }
                m => m,
            },
            height: self.positive("height")?.unwrap_or(1000.0),
            half_width: self.positive("half_width")?.unwrap_or(500.0),
            bubble_radius: self.positive("bubble_radius")?.unwrap_or(250.0),
            bubble_height: self.positive("bubble_height")?.unwrap_or(260.0),
            bubble_amplitude: self.positive("bubble_amplitude")?.unwrap_or(0.5),
            bubble_profile,
        };

        match mode {
            Mode::MmsConvergence => {
                if cfg.grids.len() < 3 {
                    return Err(missing("grids", " with at least 3 entries, e.g. grids=12,24,48"));
                }
                if cfg.tau.is_none() {
                    return Err(missing("tau", ""));
                }
                if cfg.t_end.is_none() && cfg.steps.is_none() {
                    return Err(missing("t_end", " or 'steps'"));
                }
            }
            Mode::MmsTcr => {
                if cfg.tau_ladder.len() != 3 {
                    let l: Vec<String> = DEFAULT_TCR_LADDER.iter().map(|t| format!("{t:e}")).collect();
                    return Err(Error::Config {
                        line: if self.get("tau_ladder").is_some() { self.line_of("tau_ladder") } else { mode_line },
                        message: format!(
                            "mode=mms_tcr requires tau_ladder with three base time steps, e.g. tau_ladder={}",
                            l.join(",")
                        ),
                    });
                }
                if cfg.cells.is_none() {
                    return Err(missing("n", " (or nr, ntheta, nphi)"));
                }
                if cfg.t_end.is_none() {
                    return Err(missing("t_end", ""));
                }
            }
            Mode::MmsMachSweep => {
                if cfg.cells.is_none() {
                    return Err(missing("n", " (or nr, ntheta, nphi)"));
                }
                if cfg.tau.is_none() {
                    return Err(missing("tau", ""));
                }
            }
            Mode::Thermal1 | Mode::Thermal2 | Mode::Custom => {
                if cfg.tau.is_none() {
                    return Err(missing("tau", ""));
                }
                if cfg.t_end.is_none() && cfg.steps.is_none() {
                    return Err(missing("t_end", " or 'steps'"));
                }
                if mode == Mode::Custom && cfg.cells.is_none() {
                    return Err(missing("n", " (or nr, ntheta, nphi)"));
                }
            }
        }
        Ok(cfg)
    }
}

fn check_key(k: &str, line: usize) -> Result<()> {
    if KEYS.iter().any(|(name, _)| *name == k) {
        Ok(())
    } else {
        Err(Error::Config {
            line,
            message: format!("unknown key '{k}'"),
        })
    }
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    RawConfig::parse(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal2_minimal() {
        let c = parse_config("mode=thermal2\nn=50 # cells\ntau=0.25\nsteps=4\n").unwrap();
        assert_eq!(c.mode, Mode::Thermal2);
        assert_eq!(c.cells, Some([50, 50, 50]));
        assert_eq!(c.k_iters, 2);
    }

    #[test]
    fn negative_tau_rejected_with_line() {
        let e = parse_config("mode=thermal2\ntau=-1\n").unwrap_err();
        match e {
            Error::Config { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("tau must be > 0"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_named() {
        let e = parse_config("mode=thermal2\nfoo=1\n").unwrap_err();
        assert!(e.to_string().contains("unknown key 'foo'"));
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn tcr_without_ladder_lists_three_steps() {
        let e = parse_config("mode=mms_tcr\nn=24\nt_end=0.02\n").unwrap_err().to_string();
        assert!(e.contains("2e-3") && e.contains("1e-3") && e.contains("5e-4"), "{e}");
        assert!(e.contains("line 1"));
    }

    #[test]
    fn flag_overrides_file() {
        let mut raw = RawConfig::parse("mode=thermal2\ntau=1\nsteps=3\n").unwrap();
        raw.set_flag("tau", "0.5").unwrap();
        assert_eq!(raw.build().unwrap().tau, Some(0.5));
        assert!(raw.set_flag("bogus", "1").is_err());
    }

    #[test]
    fn repeated_key_rejected() {
        let e = parse_config("mode=thermal2\ntau=1\ntau=2\n").unwrap_err().to_string();
        assert!(e.contains("repeated"));
    }
}
