//! Full-state text snapshots.
//!
//! The file lists the sector, cell counts, origin and spacings in spherical
//! coordinates, then every variable's interior values with its staggering tag.
//! Values use 17 significant digits, so reading back is lossless. A point
//! `(r, θ, φ)` maps to Cartesian coordinates as
//! `x = r sinθ cosφ, y = r sinθ sinφ, z = r cosθ`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{FieldSet, Location, MacGrid, ShellSector, Variable};

const MAGIC: &str = "# shellflow snapshot v1";

/// Renders `state` at `time`. Ghost values are not stored.
pub fn render_snapshot(state: &FieldSet, grid: &MacGrid, time: f64) -> String {
    let mut s = String::new();
    let sec = &grid.sector;
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "# spherical coordinates (r, theta, phi); x = r sin(theta) cos(phi), y = r sin(theta) sin(phi), z = r cos(theta)");
    let _ = writeln!(s, "# arrays list interior entries with phi fastest, then theta, then r");
    let _ = writeln!(s, "time {time:.16e}");
    let _ = writeln!(
        s,
        "sector {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
        sec.r[0], sec.r[1], sec.theta[0], sec.theta[1], sec.phi[0], sec.phi[1]
    );
    let _ = writeln!(s, "dimensions {} {} {}", grid.n[0], grid.n[1], grid.n[2]);
    let _ = writeln!(s, "origin {:.16e} {:.16e} {:.16e}", sec.r[0], sec.theta[0], sec.phi[0]);
    let _ = writeln!(s, "spacing {:.16e} {:.16e} {:.16e}", grid.h[0], grid.h[1], grid.h[2]);
    for v in Variable::ALL {
        let f = state.get(v);
        let _ = writeln!(s, "field {} {} {} {} {}", v.name(), f.loc.tag(), f.n[0], f.n[1], f.n[2]);
        for (c, x) in f.interior_values().enumerate() {
            if c > 0 {
                s.push(if c % f.n[2] == 0 { '\n' } else { ' ' });
            }
            let _ = write!(s, "{x:.16e}");
        }
        s.push('\n');
    }
    s.push_str("end\n");
    s
}

pub fn write_structured_snapshot(state: &FieldSet, grid: &MacGrid, time: f64, path: &Path) -> Result<()> {
    std::fs::write(path, render_snapshot(state, grid, time)).map_err(|e| Error::io(path, e))
}

/// A snapshot read back from text.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub grid: MacGrid,
    pub time: f64,
    /// Interior values as written; ghosts are zero.
    pub state: FieldSet,
}

pub fn parse_snapshot(text: &str, origin: &Path) -> Result<Snapshot> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().peekable();
    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return Err(err(1, "not a snapshot file".into())),
    }
    let mut time = None;
    let mut sector = None;
    let mut dims = None;
    let mut state: Option<FieldSet> = None;
    let mut grid: Option<MacGrid> = None;
    let mut seen = [false; 5];
    while let Some((no, line)) = lines.next() {
        let ln = no + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let key = it.next().unwrap_or("");
        let rest: Vec<&str> = it.collect();
        let nums = |v: &[&str]| -> Result<Vec<f64>> {
            v.iter()
                .map(|s| s.parse::<f64>().map_err(|e| err(ln, format!("{key}: {e}"))))
                .collect()
        };
        match key {
            "time" => time = Some(nums(&rest)?.first().copied().ok_or_else(|| err(ln, "missing time".into()))?),
            "sector" => {
                let v = nums(&rest)?;
                if v.len() != 6 {
                    return Err(err(ln, "sector needs 6 values".into()));
                }
                sector = Some(ShellSector::new([v[0], v[1]], [v[2], v[3]], [v[4], v[5]])?);
            }
            "dimensions" => {
                let v: Vec<usize> = rest
                    .iter()
                    .map(|s| s.parse::<usize>().map_err(|e| err(ln, format!("dimensions: {e}"))))
                    .collect::<Result<_>>()?;
                if v.len() != 3 {
                    return Err(err(ln, "dimensions needs 3 values".into()));
                }
                dims = Some([v[0], v[1], v[2]]);
            }
            "origin" | "spacing" => {}
            "field" => {
                if grid.is_none() {
                    let (s, d) = sector.zip(dims).ok_or_else(|| err(ln, "field before sector and dimensions".into()))?;
                    let g = MacGrid::new(s, d[0], d[1], d[2])?;
                    state = Some(FieldSet::zeros(&g));
                    grid = Some(g);
                }
                let (name, tag) = match rest.as_slice() {
                    [n, t, _, _, _] => (*n, *t),
                    _ => return Err(err(ln, "field line needs name, tag and 3 extents".into())),
                };
                let var = Variable::from_name(name).ok_or_else(|| err(ln, format!("unknown variable '{name}'")))?;
                let loc = Location::from_tag(tag).ok_or_else(|| err(ln, format!("unknown staggering '{tag}'")))?;
                if loc != var.location() {
                    return Err(err(ln, format!("{name} must be stored at {}, file says {tag}", var.location().tag())));
                }
                let st = state.as_mut().expect("state allocated with grid");
                let f = st.get_mut(var);
                let n = f.n;
                let mut values = Vec::with_capacity(n[0] * n[1] * n[2]);
                while values.len() < n[0] * n[1] * n[2] {
                    let (no2, l2) = lines.next().ok_or_else(|| err(ln, format!("{name}: data ended early")))?;
                    for s in l2.split_whitespace() {
                        values.push(s.parse::<f64>().map_err(|e| err(no2 + 1, format!("{name}: {e}")))?);
                    }
                }
                if values.len() != n[0] * n[1] * n[2] {
                    return Err(err(ln, format!("{name}: expected {} values, found {}", n[0] * n[1] * n[2], values.len())));
                }
                let mut it = values.into_iter();
                for i in 0..n[0] as isize {
                    for j in 0..n[1] as isize {
                        for k in 0..n[2] as isize {
                            f.set(i, j, k, it.next().expect("length checked"));
                        }
                    }
                }
                seen[var as usize] = true;
            }
            "end" => break,
            other => return Err(err(ln, format!("unknown entry '{other}'"))),
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(err(0, format!("missing field {}", Variable::ALL[v].name())));
    }
    Ok(Snapshot {
        grid: grid.expect("fields imply a grid"),
        time: time.ok_or_else(|| err(0, "missing time".into()))?,
        state: state.expect("fields imply a state"),
    })
}

pub fn read_structured_snapshot(path: &Path) -> Result<Snapshot> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let g = MacGrid::new(ShellSector::new([1.0, 2.0], [0.7, 2.1], [0.1, 3.0]).unwrap(), 3, 4, 5).unwrap();
        let s = FieldSet::from_fn(&g, |v, r, t, p| (v as usize as f64 + 1.0) * (r * t).sin() / 7.0 + p.exp());
        let text = render_snapshot(&s, &g, 0.1 + 0.2);
        let back = parse_snapshot(&text, Path::new("mem")).unwrap();
        assert_eq!(back.time, 0.1 + 0.2);
        assert_eq!(back.grid, g);
        for v in Variable::ALL {
            let a: Vec<f64> = s.get(v).interior_values().collect();
            let b: Vec<f64> = back.state.get(v).interior_values().collect();
            assert_eq!(a, b);
        }
        for tag in ["center", "r_face", "theta_face", "phi_face"] {
            assert!(text.contains(tag));
        }
    }
}
