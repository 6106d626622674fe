//! Spherical-shell sector, MAC staggering and ghosted field storage.
//!
//! Index order is `(r, θ, φ)` with φ varying fastest. Every field carries one
//! ghost layer on each side; interior index ranges start at 0.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Coordinate direction, also used as a velocity component index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    R = 0,
    Theta = 1,
    Phi = 2,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::R, Direction::Theta, Direction::Phi];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(d: usize) -> Direction {
        Direction::ALL[d]
    }
}

/// Storage location of a variable on the staggered grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Center,
    RFace,
    ThetaFace,
    PhiFace,
}

impl Location {
    pub fn face(d: Direction) -> Location {
        match d {
            Direction::R => Location::RFace,
            Direction::Theta => Location::ThetaFace,
            Direction::Phi => Location::PhiFace,
        }
    }

    /// Direction along which this location is staggered, if any.
    pub fn staggered(self) -> Option<Direction> {
        match self {
            Location::Center => None,
            Location::RFace => Some(Direction::R),
            Location::ThetaFace => Some(Direction::Theta),
            Location::PhiFace => Some(Direction::Phi),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Location::Center => "center",
            Location::RFace => "r_face",
            Location::ThetaFace => "theta_face",
            Location::PhiFace => "phi_face",
        }
    }

    pub fn from_tag(s: &str) -> Option<Location> {
        Some(match s {
            "center" => Location::Center,
            "r_face" => Location::RFace,
            "theta_face" => Location::ThetaFace,
            "phi_face" => Location::PhiFace,
            _ => return None,
        })
    }
}

/// Sector `[r1,r2] × [θ1,θ2] × [φ1,φ2]`, θ the colatitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellSector {
    pub r: [f64; 2],
    pub theta: [f64; 2],
    pub phi: [f64; 2],
}

impl ShellSector {
    pub fn new(r: [f64; 2], theta: [f64; 2], phi: [f64; 2]) -> Result<Self> {
        let s = ShellSector { r, theta, phi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |a: [f64; 2]| a[0].is_finite() && a[1].is_finite() && a[0] < a[1];
        if !ok(self.r) || !ok(self.theta) || !ok(self.phi) {
            return Err(Error::InvalidGrid(format!(
                "empty or non-finite extent: r {:?}, theta {:?}, phi {:?}",
                self.r, self.theta, self.phi
            )));
        }
        if self.r[0] <= 0.0 {
            return Err(Error::InvalidGrid(format!("r1 = {} must be positive", self.r[0])));
        }
        if self.theta[0] <= 0.0 || self.theta[1] >= PI {
            return Err(Error::InvalidGrid(format!(
                "theta range {:?} must stay inside (0, π)",
                self.theta
            )));
        }
        if self.phi[1] - self.phi[0] > 2.0 * PI {
            return Err(Error::InvalidGrid(format!(
                "phi range {:?} exceeds 2π",
                self.phi
            )));
        }
        Ok(())
    }

    /// Exact volume of the sector.
    pub fn volume(&self) -> f64 {
        (self.r[1].powi(3) - self.r[0].powi(3)) / 3.0
            * (self.theta[0].cos() - self.theta[1].cos())
            * (self.phi[1] - self.phi[0])
    }
}

/// Uniform MAC grid on a [`ShellSector`].
#[derive(Clone, Debug, PartialEq)]
pub struct MacGrid {
    pub sector: ShellSector,
    /// Cell counts `(nr, nθ, nφ)`.
    pub n: [usize; 3],
    /// Coordinate spacings `(dr, dθ, dφ)`.
    pub h: [f64; 3],
    sin_c: Vec<f64>,
    cot_c: Vec<f64>,
    sin_f: Vec<f64>,
    cot_f: Vec<f64>,
}

impl MacGrid {
    pub fn new(sector: ShellSector, nr: usize, ntheta: usize, nphi: usize) -> Result<Self> {
        sector.validate()?;
        if nr < 2 || ntheta < 2 || nphi < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells per direction, got ({nr}, {ntheta}, {nphi})"
            )));
        }
        let n = [nr, ntheta, nphi];
        let lo = [sector.r[0], sector.theta[0], sector.phi[0]];
        let hi = [sector.r[1], sector.theta[1], sector.phi[1]];
        let h: [f64; 3] = std::array::from_fn(|d| (hi[d] - lo[d]) / n[d] as f64);
        let mut g = MacGrid {
            sector,
            n,
            h,
            sin_c: Vec::new(),
            cot_c: Vec::new(),
            sin_f: Vec::new(),
            cot_f: Vec::new(),
        };
        // θ tables cover ghost cells: centers -1..=nθ, faces -1..=nθ+1.
        g.sin_c = (-1..=ntheta as isize).map(|j| g.theta_c(j).sin()).collect();
        g.cot_c = (-1..=ntheta as isize)
            .map(|j| 1.0 / g.theta_c(j).tan())
            .collect();
        g.sin_f = (-1..=ntheta as isize + 1)
            .map(|j| g.theta_f(j).sin())
            .collect();
        g.cot_f = (-1..=ntheta as isize + 1)
            .map(|j| 1.0 / g.theta_f(j).tan())
            .collect();
        Ok(g)
    }

    /// Grid with `n` cells in every direction.
    pub fn cube(sector: ShellSector, n: usize) -> Result<Self> {
        MacGrid::new(sector, n, n, n)
    }

    pub fn nr(&self) -> usize {
        self.n[0]
    }
    pub fn ntheta(&self) -> usize {
        self.n[1]
    }
    pub fn nphi(&self) -> usize {
        self.n[2]
    }
    pub fn cells(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    /// Largest coordinate spacing.
    pub fn diameter(&self) -> f64 {
        self.h.iter().cloned().fold(0.0, f64::max)
    }

    #[inline]
    pub fn r_c(&self, i: isize) -> f64 {
        self.sector.r[0] + (i as f64 + 0.5) * self.h[0]
    }
    #[inline]
    pub fn r_f(&self, i: isize) -> f64 {
        self.sector.r[0] + i as f64 * self.h[0]
    }
    #[inline]
    pub fn theta_c(&self, j: isize) -> f64 {
        self.sector.theta[0] + (j as f64 + 0.5) * self.h[1]
    }
    #[inline]
    pub fn theta_f(&self, j: isize) -> f64 {
        self.sector.theta[0] + j as f64 * self.h[1]
    }
    #[inline]
    pub fn phi_c(&self, k: isize) -> f64 {
        self.sector.phi[0] + (k as f64 + 0.5) * self.h[2]
    }
    #[inline]
    pub fn phi_f(&self, k: isize) -> f64 {
        self.sector.phi[0] + k as f64 * self.h[2]
    }

    /// `sin θ` at center row `j`, valid for `-1 ≤ j ≤ nθ`.
    #[inline]
    pub fn sin_c(&self, j: isize) -> f64 {
        self.sin_c[(j + 1) as usize]
    }
    #[inline]
    pub fn cot_c(&self, j: isize) -> f64 {
        self.cot_c[(j + 1) as usize]
    }
    /// `sin θ` at θ-face `j`, valid for `-1 ≤ j ≤ nθ+1`.
    #[inline]
    pub fn sin_f(&self, j: isize) -> f64 {
        self.sin_f[(j + 1) as usize]
    }
    #[inline]
    pub fn cot_f(&self, j: isize) -> f64 {
        self.cot_f[(j + 1) as usize]
    }

    /// Interior extents of a variable stored at `loc`.
    pub fn extents(&self, loc: Location) -> [usize; 3] {
        let mut e = self.n;
        if let Some(d) = loc.staggered() {
            e[d.index()] += 1;
        }
        e
    }

    /// Physical coordinates `(r, θ, φ)` of index `(i, j, k)` at `loc`.
    pub fn coords(&self, loc: Location, i: isize, j: isize, k: isize) -> [f64; 3] {
        match loc {
            Location::Center => [self.r_c(i), self.theta_c(j), self.phi_c(k)],
            Location::RFace => [self.r_f(i), self.theta_c(j), self.phi_c(k)],
            Location::ThetaFace => [self.r_c(i), self.theta_f(j), self.phi_c(k)],
            Location::PhiFace => [self.r_c(i), self.theta_c(j), self.phi_f(k)],
        }
    }

    /// Midpoint volume weight `r² sin θ dr dθ dφ` at a location.
    #[inline]
    pub fn volume_weight(&self, loc: Location, i: isize, j: isize, k: isize) -> f64 {
        let [r, _, _] = self.coords(loc, i, j, k);
        let s = match loc {
            Location::ThetaFace => self.sin_f(j),
            _ => self.sin_c(j),
        };
        r * r * s * self.h[0] * self.h[1] * self.h[2]
    }
}

/// Scalar array with one ghost layer per side.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub loc: Location,
    /// Interior extents.
    pub n: [usize; 3],
    s0: usize,
    s1: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &MacGrid, loc: Location) -> Self {
        let n = grid.extents(loc);
        let s1 = n[2] + 2;
        let s0 = (n[1] + 2) * s1;
        Field {
            loc,
            n,
            s0,
            s1,
            data: vec![0.0; (n[0] + 2) * s0],
        }
    }

    /// Field sampled from `f(r, θ, φ)` at interior and ghost positions.
    pub fn from_fn(grid: &MacGrid, loc: Location, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut fld = Field::zeros(grid, loc);
        let n = fld.n;
        for i in -1..=n[0] as isize {
            for j in -1..=n[1] as isize {
                for k in -1..=n[2] as isize {
                    let [r, t, p] = grid.coords(loc, i, j, k);
                    fld.set(i, j, k, f(r, t, p));
                }
            }
        }
        fld
    }

    #[inline(always)]
    pub fn idx(&self, i: isize, j: isize, k: isize) -> usize {
        debug_assert!(i >= -1 && j >= -1 && k >= -1);
        debug_assert!(i <= self.n[0] as isize && j <= self.n[1] as isize && k <= self.n[2] as isize);
        (i + 1) as usize * self.s0 + (j + 1) as usize * self.s1 + (k + 1) as usize
    }

    /// Flat-index strides along `(r, θ, φ)`.
    #[inline(always)]
    pub fn strides(&self) -> [usize; 3] {
        [self.s0, self.s1, 1]
    }

    #[inline(always)]
    pub fn get(&self, i: isize, j: isize, k: isize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline(always)]
    pub fn set(&mut self, i: isize, j: isize, k: isize, v: f64) {
        let id = self.idx(i, j, k);
        self.data[id] = v;
    }

    #[inline(always)]
    pub fn add(&mut self, i: isize, j: isize, k: isize, v: f64) {
        let id = self.idx(i, j, k);
        self.data[id] += v;
    }

    /// Visits every interior index.
    pub fn for_each_interior(&self, mut f: impl FnMut(isize, isize, isize)) {
        for i in 0..self.n[0] as isize {
            for j in 0..self.n[1] as isize {
                for k in 0..self.n[2] as isize {
                    f(i, j, k);
                }
            }
        }
    }

    /// Overwrites interior entries with `f(i, j, k)`, in parallel over `i`.
    pub fn par_fill_interior(&mut self, f: impl Fn(isize, isize, isize) -> f64 + Sync) {
        use rayon::prelude::*;
        let n = self.n;
        let (s0, s1) = (self.s0, self.s1);
        self.data
            .par_chunks_mut(s0)
            .enumerate()
            .filter(|(p, _)| *p >= 1 && *p <= n[0])
            .for_each(|(p, plane)| {
                let i = p as isize - 1;
                for j in 0..n[1] {
                    let row = &mut plane[(j + 1) * s1 + 1..(j + 1) * s1 + 1 + n[2]];
                    for (k, v) in row.iter_mut().enumerate() {
                        *v = f(i, j as isize, k as isize);
                    }
                }
            });
    }

    /// Iterator over interior values.
    pub fn interior_values(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n;
        (0..n[0] as isize).flat_map(move |i| {
            (0..n[1] as isize).flat_map(move |j| {
                let base = self.idx(i, j, 0);
                self.data[base..base + n[2]].iter().copied()
            })
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.interior_values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.interior_values().all(f64::is_finite)
    }

    /// `self += a * other` over all storage, ghosts included.
    pub fn axpy(&mut self, a: f64, other: &Field) {
        debug_assert_eq!(self.n, other.n);
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for x in &mut self.data {
            *x *= a;
        }
    }

    /// Interior-weighted l2 norm `sqrt(Σ v² ΔV)`.
    pub fn l2_norm(&self, grid: &MacGrid) -> f64 {
        let mut s = 0.0;
        self.for_each_interior(|i, j, k| {
            let v = self.get(i, j, k);
            s += v * v * grid.volume_weight(self.loc, i, j, k);
        });
        s.sqrt()
    }
}

/// Solution variables in pencil-block order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variable {
    Pressure = 0,
    VelR = 1,
    VelTheta = 2,
    VelPhi = 3,
    Temperature = 4,
}

impl Variable {
    pub const ALL: [Variable; 5] = [
        Variable::Pressure,
        Variable::VelR,
        Variable::VelTheta,
        Variable::VelPhi,
        Variable::Temperature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::Pressure => "p",
            Variable::VelR => "u_r",
            Variable::VelTheta => "u_theta",
            Variable::VelPhi => "u_phi",
            Variable::Temperature => "T",
        }
    }

    pub fn from_name(s: &str) -> Option<Variable> {
        Variable::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn location(self) -> Location {
        match self {
            Variable::Pressure | Variable::Temperature => Location::Center,
            Variable::VelR => Location::RFace,
            Variable::VelTheta => Location::ThetaFace,
            Variable::VelPhi => Location::PhiFace,
        }
    }

    /// Velocity component of direction `d`.
    pub fn velocity(d: Direction) -> Variable {
        Variable::ALL[1 + d.index()]
    }
}

/// The five primitive fields `(p, u_r, u_θ, u_φ, T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSet {
    pub fields: [Field; 5],
}

impl FieldSet {
    pub fn zeros(grid: &MacGrid) -> Self {
        FieldSet {
            fields: Variable::ALL.map(|v| Field::zeros(grid, v.location())),
        }
    }

    /// Samples `f(var, r, θ, φ)` at every stored position, ghosts included.
    pub fn from_fn(grid: &MacGrid, f: impl Fn(Variable, f64, f64, f64) -> f64) -> Self {
        FieldSet {
            fields: Variable::ALL.map(|v| Field::from_fn(grid, v.location(), |r, t, p| f(v, r, t, p))),
        }
    }

    #[inline(always)]
    pub fn get(&self, v: Variable) -> &Field {
        &self.fields[v as usize]
    }

    #[inline(always)]
    pub fn get_mut(&mut self, v: Variable) -> &mut Field {
        &mut self.fields[v as usize]
    }

    pub fn p(&self) -> &Field {
        &self.fields[0]
    }
    pub fn vel(&self, d: Direction) -> &Field {
        &self.fields[1 + d.index()]
    }
    pub fn temp(&self) -> &Field {
        &self.fields[4]
    }

    pub fn axpy(&mut self, a: f64, other: &FieldSet) {
        for (x, y) in self.fields.iter_mut().zip(&other.fields) {
            x.axpy(a, y);
        }
    }

    pub fn scale(&mut self, a: f64) {
        for f in &mut self.fields {
            f.scale(a);
        }
    }

    /// `(a + b) / 2` over all storage.
    pub fn midpoint(a: &FieldSet, b: &FieldSet) -> FieldSet {
        let mut m = a.clone();
        for (x, y) in m.fields.iter_mut().zip(&b.fields) {
            for (u, v) in x.data.iter_mut().zip(&y.data) {
                *u = 0.5 * (*u + v);
            }
        }
        m
    }

    /// `a - b` over all storage.
    pub fn difference(a: &FieldSet, b: &FieldSet) -> FieldSet {
        let mut d = a.clone();
        d.axpy(-1.0, b);
        d
    }

    /// First non-finite interior field, if any.
    pub fn first_non_finite(&self) -> Option<Variable> {
        Variable::ALL
            .into_iter()
            .find(|&v| !self.get(v).all_finite())
    }

    pub fn l2_norms(&self, grid: &MacGrid) -> [f64; 5] {
        Variable::ALL.map(|v| self.get(v).l2_norm(grid))
    }

    pub fn max_norms(&self) -> [f64; 5] {
        Variable::ALL.map(|v| self.get(v).max_abs())
    }
}

/// Weighted l2 norm `sqrt(Σ v² r² sin θ dr dθ dφ)` over interior entries.
pub fn l2_norm(field: &Field, grid: &MacGrid) -> f64 {
    field.l2_norm(grid)
}

/// Max-norm over interior entries.
pub fn max_norm(field: &Field) -> f64 {
    field.max_abs()
}

/// Interpolates `field` to `to` by two-point averages, or four-point averages
/// between faces of different directions. Only interior targets are written;
/// source ghosts must be valid wherever the stencil reaches them.
pub fn interpolate(field: &Field, grid: &MacGrid, to: Location) -> Field {
    let mut out = Field::zeros(grid, to);
    let from = field.loc;
    if from == to {
        out.data.copy_from_slice(&field.data);
        return out;
    }
    // Offsets along each direction to average over, relative to the target index.
    let mut offs: [[isize; 2]; 3] = [[0, 0]; 3];
    if let Some(d) = from.staggered() {
        offs[d.index()] = [0, 1];
    }
    if let Some(d) = to.staggered() {
        offs[d.index()] = [-1, 0];
    }
    let n = out.n;
    for i in 0..n[0] as isize {
        for j in 0..n[1] as isize {
            for k in 0..n[2] as isize {
                let mut s = 0.0;
                let mut c = 0.0;
                for a in uniq(offs[0]) {
                    for b in uniq(offs[1]) {
                        for e in uniq(offs[2]) {
                            s += field.get(i + a, j + b, k + e);
                            c += 1.0;
                        }
                    }
                }
                out.set(i, j, k, s / c);
            }
        }
    }
    out
}

fn uniq(o: [isize; 2]) -> impl Iterator<Item = isize> {
    let second = (o[1] != o[0]).then_some(o[1]);
    std::iter::once(o[0]).chain(second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_shell() -> ShellSector {
        ShellSector::new([1.0, 2.0], [PI / 4.0, 3.0 * PI / 4.0], [PI / 4.0, 7.0 * PI / 4.0]).unwrap()
    }

    #[test]
    fn faces_use_exact_formula() {
        let g = MacGrid::new(unit_shell(), 10, 4, 4).unwrap();
        for k in 0..=10 {
            assert_eq!(g.r_f(k), 1.0 + k as f64 * 0.1);
        }
        assert_eq!(g.r_f(10), 2.0);
    }

    #[test]
    fn centers_sit_between_faces() {
        let g = MacGrid::new(unit_shell(), 10, 4, 4).unwrap();
        assert!((g.r_c(0) - 1.05).abs() < 1e-15);
        assert!((g.theta_c(0) - (PI / 4.0 + PI / 16.0)).abs() < 1e-15);
    }

    #[test]
    fn extents_follow_staggering() {
        let g = MacGrid::new(unit_shell(), 3, 4, 5).unwrap();
        assert_eq!(g.extents(Location::Center), [3, 4, 5]);
        assert_eq!(g.extents(Location::RFace), [4, 4, 5]);
        assert_eq!(g.extents(Location::ThetaFace), [3, 5, 5]);
        assert_eq!(g.extents(Location::PhiFace), [3, 4, 6]);
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(MacGrid::new(unit_shell(), 1, 4, 4).is_err());
        assert!(ShellSector::new([1.0, 1.0], [0.5, 1.0], [0.0, 1.0]).is_err());
        assert!(ShellSector::new([1.0, 2.0], [0.0, 1.0], [0.0, 1.0]).is_err());
        assert!(ShellSector::new([-1.0, 2.0], [0.5, 1.0], [0.0, 1.0]).is_err());
    }

    #[test]
    fn l2_of_one_is_sqrt_discrete_volume() {
        let g = MacGrid::cube(unit_shell(), 8).unwrap();
        let one = Field::from_fn(&g, Location::Center, |_, _, _| 1.0);
        let l2 = l2_norm(&one, &g);
        let v = g.sector.volume();
        assert!((l2 * l2 / v - 1.0).abs() < 1e-2);
    }

    #[test]
    fn l2_of_r_matches_direct_quadrature() {
        let g = MacGrid::cube(unit_shell(), 8).unwrap();
        let f = Field::from_fn(&g, Location::Center, |r, _, _| r);
        let mut s = 0.0;
        for i in 0..8 {
            let r = 1.0 + (i as f64 + 0.5) / 8.0;
            for j in 0..8 {
                let t = PI / 4.0 + (j as f64 + 0.5) * (PI / 2.0) / 8.0;
                s += 8.0 * r.powi(4) * t.sin() / 8.0 * (PI / 2.0 / 8.0) * (1.5 * PI / 8.0);
            }
        }
        assert!((l2_norm(&f, &g) - s.sqrt()).abs() < 1e-12 * s.sqrt());
    }

    #[test]
    fn round_trip_center_face_center_is_quarter_half_quarter() {
        let g = MacGrid::new(unit_shell(), 6, 3, 3).unwrap();
        let f = Field::from_fn(&g, Location::Center, |r, _, _| r * r);
        let back = interpolate(&interpolate(&f, &g, Location::RFace), &g, Location::Center);
        for i in 1..5isize {
            let want = 0.25 * f.get(i - 1, 1, 1) + 0.5 * f.get(i, 1, 1) + 0.25 * f.get(i + 1, 1, 1);
            assert!((back.get(i, 1, 1) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolation_is_exact_for_linear_fields() {
        let g = MacGrid::new(unit_shell(), 5, 4, 6).unwrap();
        let lin = |r: f64, t: f64, p: f64| 2.0 * r - 3.0 * t + 0.5 * p + 1.0;
        for from in [Location::Center, Location::RFace, Location::ThetaFace, Location::PhiFace] {
            let f = Field::from_fn(&g, from, lin);
            for to in [Location::Center, Location::RFace, Location::ThetaFace, Location::PhiFace] {
                let o = interpolate(&f, &g, to);
                o.for_each_interior(|i, j, k| {
                    let [r, t, p] = g.coords(to, i, j, k);
                    assert!((o.get(i, j, k) - lin(r, t, p)).abs() < 1e-12, "{from:?}->{to:?}");
                });
            }
        }
    }
}
