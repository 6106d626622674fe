//! Two-dimensional slices of cell-centered fields.
//!
//! Layout: `#` header lines giving grid, time, variable and slice plane, a
//! column header, then one `coord1 coord2 value` row per cell with the later
//! coordinate varying fastest.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Direction, Field, Location, MacGrid};

/// Where a slice cuts its normal direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlicePosition {
    /// Mid-plane of the sector; averages the two central planes when the count is even.
    Mid,
    Index(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceSpec {
    pub normal: Direction,
    pub position: SlicePosition,
}

impl SliceSpec {
    /// The mid-plane with normal along φ.
    pub const MID_PHI: SliceSpec = SliceSpec {
        normal: Direction::Phi,
        position: SlicePosition::Mid,
    };
}

/// A sampled slice.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub variable: String,
    pub time: f64,
    pub grid_cells: [usize; 3],
    pub normal: Direction,
    /// Coordinate of the plane along the normal.
    pub plane: f64,
    /// Names of the in-plane coordinates.
    pub axes: [&'static str; 2],
    pub rows: Vec<[f64; 3]>,
}

const AXES: [&str; 3] = ["r", "theta", "phi"];

/// Samples a cell-centered `field` on the plane given by `spec`.
pub fn extract_slice(field: &Field, grid: &MacGrid, spec: SliceSpec, variable: &str, time: f64) -> Result<Slice> {
    if field.loc != Location::Center {
        return Err(Error::InvalidParameter(format!(
            "slices take cell-centered fields, got {}",
            field.loc.tag()
        )));
    }
    let d = spec.normal.index();
    let nd = grid.n[d];
    let (planes, plane): (Vec<usize>, f64) = match spec.position {
        SlicePosition::Mid if nd % 2 == 0 => {
            let lo = [grid.sector.r, grid.sector.theta, grid.sector.phi][d];
            (vec![nd / 2 - 1, nd / 2], 0.5 * (lo[0] + lo[1]))
        }
        SlicePosition::Mid => (vec![nd / 2], grid.coords(Location::Center, 0, 0, 0)[d] + (nd / 2) as f64 * grid.h[d]),
        SlicePosition::Index(i) if i < nd => {
            let mut idx = [0isize; 3];
            idx[d] = i as isize;
            (vec![i], grid.coords(Location::Center, idx[0], idx[1], idx[2])[d])
        }
        SlicePosition::Index(i) => {
            return Err(Error::InvalidParameter(format!(
                "slice index {i} out of range 0..{nd} along {}",
                AXES[d]
            )))
        }
    };
    let (a, b) = match spec.normal {
        Direction::R => (1, 2),
        Direction::Theta => (0, 2),
        Direction::Phi => (0, 1),
    };
    let mut rows = Vec::with_capacity(grid.n[a] * grid.n[b]);
    for x in 0..grid.n[a] {
        for y in 0..grid.n[b] {
            let mut idx = [0isize; 3];
            idx[a] = x as isize;
            idx[b] = y as isize;
            let mut v = 0.0;
            for &p in &planes {
                idx[d] = p as isize;
                v += field.get(idx[0], idx[1], idx[2]);
            }
            v /= planes.len() as f64;
            let c = grid.coords(Location::Center, idx[0], idx[1], idx[2]);
            rows.push([c[a], c[b], v]);
        }
    }
    Ok(Slice {
        variable: variable.to_string(),
        time,
        grid_cells: grid.n,
        normal: spec.normal,
        plane,
        axes: [AXES[a], AXES[b]],
        rows,
    })
}

impl Slice {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let [nr, nt, np] = self.grid_cells;
        let _ = writeln!(s, "# grid {nr} {nt} {np}");
        let _ = writeln!(s, "# time {:e}", self.time);
        let _ = writeln!(s, "# variable {}", self.variable);
        let _ = writeln!(s, "# normal {} {:e}", AXES[self.normal.index()], self.plane);
        let _ = writeln!(s, "{}\t{}\tvalue", self.axes[0], self.axes[1]);
        for r in &self.rows {
            let _ = writeln!(s, "{:e}\t{:e}\t{:e}", r[0], r[1], r[2]);
        }
        s
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Slice> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut grid_cells = None;
        let mut time = None;
        let mut variable = None;
        let mut normal = None;
        let mut axes = None;
        let mut rows = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let ln = no + 1;
            if let Some(h) = line.strip_prefix("# ") {
                let mut it = h.split_whitespace();
                let key = it.next().unwrap_or("");
                let vals: Vec<&str> = it.collect();
                let num = |s: &str| s.parse::<f64>().map_err(|e| err(ln, format!("{key}: {e}")));
                match (key, vals.as_slice()) {
                    ("grid", [a, b, c]) => {
                        let p = |s: &str| s.parse::<usize>().map_err(|e| err(ln, format!("grid: {e}")));
                        grid_cells = Some([p(a)?, p(b)?, p(c)?]);
                    }
                    ("time", [t]) => time = Some(num(t)?),
                    ("variable", [v]) => variable = Some(v.to_string()),
                    ("normal", [d, x]) => {
                        let dir = AXES
                            .iter()
                            .position(|a| a == d)
                            .ok_or_else(|| err(ln, format!("unknown axis '{d}'")))?;
                        normal = Some((Direction::from_index(dir), num(x)?));
                    }
                    _ => return Err(err(ln, format!("unrecognised header line '{line}'"))),
                }
                continue;
            }
            if axes.is_none() {
                let cols: Vec<&str> = line.split('\t').collect();
                let find = |s: &str| AXES.iter().copied().find(|a| *a == s);
                match cols.as_slice() {
                    [a, b, "value"] => {
                        axes = Some([
                            find(a).ok_or_else(|| err(ln, format!("unknown axis '{a}'")))?,
                            find(b).ok_or_else(|| err(ln, format!("unknown axis '{b}'")))?,
                        ])
                    }
                    _ => return Err(err(ln, "expected column header 'axis axis value'".into())),
                }
                continue;
            }
            let v: Vec<f64> = line
                .split('\t')
                .map(|s| s.parse::<f64>().map_err(|e| err(ln, e.to_string())))
                .collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(err(ln, format!("expected 3 values, found {}", v.len())));
            }
            rows.push([v[0], v[1], v[2]]);
        }
        let (normal, plane) = normal.ok_or_else(|| err(0, "missing normal".into()))?;
        Ok(Slice {
            variable: variable.ok_or_else(|| err(0, "missing variable".into()))?,
            time: time.ok_or_else(|| err(0, "missing time".into()))?,
            grid_cells: grid_cells.ok_or_else(|| err(0, "missing grid".into()))?,
            normal,
            plane,
            axes: axes.ok_or_else(|| err(0, "missing column header".into()))?,
            rows,
        })
    }

    pub fn max(&self) -> f64 {
        self.rows.iter().map(|r| r[2]).fold(f64::MIN, f64::max)
    }
}

/// Extracts and writes a slice in one call.
pub fn write_slice(field: &Field, grid: &MacGrid, spec: SliceSpec, variable: &str, time: f64, path: &Path) -> Result<Slice> {
    let s = extract_slice(field, grid, spec, variable, time)?;
    std::fs::write(path, s.render()).map_err(|e| Error::io(path, e))?;
    Ok(s)
}

pub fn read_slice(path: &Path) -> Result<Slice> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Slice::parse(&text, path)
}
