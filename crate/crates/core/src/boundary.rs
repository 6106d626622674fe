//! Wall conditions and ghost-cell filling.
//!
//! Normal velocity lives on boundary faces and is prescribed. Tangential
//! velocity uses a ghost value: `2 g - u` for no-slip, `u` for free-slip.
//! Pressure and temperature ghosts mirror the interior, optionally relative
//! to a base state so that only the perturbation has zero gradient.
//! Ghosts in two directions at once (edges, corners) are never read.

use std::sync::Arc;

use crate::grid::{Direction, FieldSet, Location, MacGrid, Variable};

/// Prescribed wall velocity.
pub trait BoundaryData: Send + Sync {
    /// Velocity component `comp` at `(r, θ, φ)` and time `t`.
    fn velocity(&self, comp: Direction, x: [f64; 3], t: f64) -> f64;
}

/// Walls at rest.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroVelocity;

impl BoundaryData for ZeroVelocity {
    fn velocity(&self, _: Direction, _: [f64; 3], _: f64) -> f64 {
        0.0
    }
}

/// Treatment of tangential velocity at the walls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tangential {
    NoSlip,
    FreeSlip,
}

#[derive(Clone)]
pub struct BoundaryConditions {
    pub tangential: Tangential,
    pub data: Arc<dyn BoundaryData>,
    /// If set, pressure and temperature ghosts copy the interior deviation from this state.
    pub scalar_base: Option<Arc<FieldSet>>,
}

impl std::fmt::Debug for BoundaryConditions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryConditions")
            .field("tangential", &self.tangential)
            .field("scalar_base", &self.scalar_base.is_some())
            .finish()
    }
}

impl BoundaryConditions {
    /// Closed box at rest with free-slip walls.
    pub fn free_slip(scalar_base: Option<Arc<FieldSet>>) -> Self {
        BoundaryConditions {
            tangential: Tangential::FreeSlip,
            data: Arc::new(ZeroVelocity),
            scalar_base,
        }
    }

    /// No-slip walls with prescribed velocity.
    pub fn no_slip(data: Arc<dyn BoundaryData>) -> Self {
        BoundaryConditions {
            tangential: Tangential::NoSlip,
            data,
            scalar_base: None,
        }
    }

    /// Ghost coefficient of `var` across a wall normal to `dir`, for homogeneous data.
    /// Zero marks the normal velocity, whose wall value is a boundary face.
    pub fn ghost_factor(&self, dir: Direction, var: Variable) -> f64 {
        match var {
            Variable::Pressure | Variable::Temperature => 1.0,
            v if v == Variable::velocity(dir) => 0.0,
            _ => match self.tangential {
                Tangential::NoSlip => -1.0,
                Tangential::FreeSlip => 1.0,
            },
        }
    }

    /// Sets boundary faces and all ghosts of `state` for time `t`.
    pub fn apply(&self, grid: &MacGrid, state: &mut FieldSet, t: f64) {
        self.fill(grid, state, Some(t));
    }

    /// Same as [`apply`](Self::apply) with all data and offsets zero, for increments.
    pub fn apply_homogeneous(&self, grid: &MacGrid, inc: &mut FieldSet) {
        self.fill(grid, inc, None);
    }

    fn fill(&self, grid: &MacGrid, s: &mut FieldSet, t: Option<f64>) {
        let n = grid.n;
        // Normal velocity on boundary faces.
        for d in Direction::ALL {
            let var = Variable::velocity(d);
            let loc = Location::face(d);
            let fld = s.get_mut(var);
            let e = fld.n;
            for wall in [0, n[d.index()]] {
                each_plane(e, d, |a, b| {
                    let idx = compose(d, wall as isize, a, b);
                    let v = match t {
                        Some(t) => self.data.velocity(d, grid.coords(loc, idx[0], idx[1], idx[2]), t),
                        None => 0.0,
                    };
                    fld.set(idx[0], idx[1], idx[2], v);
                });
            }
        }
        // Scalars.
        for var in [Variable::Pressure, Variable::Temperature] {
            let base = match (&self.scalar_base, t) {
                (Some(b), Some(_)) => Some(b.get(var)),
                _ => None,
            };
            let fld = s.get_mut(var);
            let e = fld.n;
            for d in Direction::ALL {
                let nd = e[d.index()] as isize;
                for (ghost, inner) in [(-1, 0), (nd, nd - 1)] {
                    each_plane(e, d, |a, b| {
                        let g = compose(d, ghost, a, b);
                        let m = compose(d, inner, a, b);
                        let mut v = fld.get(m[0], m[1], m[2]);
                        if let Some(bs) = base {
                            v += bs.get(g[0], g[1], g[2]) - bs.get(m[0], m[1], m[2]);
                        }
                        fld.set(g[0], g[1], g[2], v);
                    });
                }
            }
        }
        // Tangential velocity.
        for c in Direction::ALL {
            let var = Variable::velocity(c);
            let loc = Location::face(c);
            let fld = s.get_mut(var);
            let e = fld.n;
            for d in Direction::ALL {
                if d == c {
                    continue;
                }
                let nd = e[d.index()] as isize;
                for (ghost, inner) in [(-1, 0), (nd, nd - 1)] {
                    each_plane(e, d, |a, b| {
                        let g = compose(d, ghost, a, b);
                        let m = compose(d, inner, a, b);
                        let u = fld.get(m[0], m[1], m[2]);
                        let v = match self.tangential {
                            Tangential::FreeSlip => u,
                            Tangential::NoSlip => {
                                let wall = match t {
                                    Some(t) => {
                                        let mut x = grid.coords(loc, m[0], m[1], m[2]);
                                        x[d.index()] = wall_coord(grid, d, ghost < 0);
                                        self.data.velocity(c, x, t)
                                    }
                                    None => 0.0,
                                };
                                2.0 * wall - u
                            }
                        };
                        fld.set(g[0], g[1], g[2], v);
                    });
                }
            }
        }
    }
}

fn wall_coord(grid: &MacGrid, d: Direction, low: bool) -> f64 {
    let s = &grid.sector;
    let pair = match d {
        Direction::R => s.r,
        Direction::Theta => s.theta,
        Direction::Phi => s.phi,
    };
    if low {
        pair[0]
    } else {
        pair[1]
    }
}

/// Visits interior indices of the two directions other than `d`.
fn each_plane(e: [usize; 3], d: Direction, mut f: impl FnMut(isize, isize)) {
    let (p, q) = others(d);
    for a in 0..e[p] as isize {
        for b in 0..e[q] as isize {
            f(a, b);
        }
    }
}

/// The two directions other than `d`, in increasing order.
#[inline]
pub(crate) fn others(d: Direction) -> (usize, usize) {
    match d {
        Direction::R => (1, 2),
        Direction::Theta => (0, 2),
        Direction::Phi => (0, 1),
    }
}

/// Full index from the coordinate `m` along `d` and the other two `(a, b)`.
#[inline]
pub(crate) fn compose(d: Direction, m: isize, a: isize, b: isize) -> [isize; 3] {
    match d {
        Direction::R => [m, a, b],
        Direction::Theta => [a, m, b],
        Direction::Phi => [a, b, m],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ShellSector;

    struct Linear;
    impl BoundaryData for Linear {
        fn velocity(&self, c: Direction, x: [f64; 3], t: f64) -> f64 {
            (c.index() as f64 + 1.0) * (x[0] + 2.0 * x[1] - x[2]) + t
        }
    }

    fn grid() -> MacGrid {
        let s = ShellSector::new([1.0, 2.0], [0.5, 2.0], [0.0, 3.0]).unwrap();
        MacGrid::new(s, 4, 5, 6).unwrap()
    }

    #[test]
    fn no_slip_ghost_average_equals_wall_value() {
        let g = grid();
        let bc = BoundaryConditions::no_slip(Arc::new(Linear));
        let mut s = FieldSet::from_fn(&g, |v, r, t, p| v as usize as f64 + r * t + p);
        bc.apply(&g, &mut s, 0.3);
        let ut = s.vel(Direction::Theta);
        for j in 0..=5 {
            let avg = 0.5 * (ut.get(-1, j, 2) + ut.get(0, j, 2));
            let want = Linear.velocity(Direction::Theta, [1.0, g.theta_f(j), g.phi_c(2)], 0.3);
            assert!((avg - want).abs() < 1e-13);
        }
        let ur = s.vel(Direction::R);
        assert_eq!(ur.get(4, 1, 1), Linear.velocity(Direction::R, [2.0, g.theta_c(1), g.phi_c(1)], 0.3));
    }

    #[test]
    fn scalar_ghosts_mirror_relative_to_base() {
        let g = grid();
        let base = FieldSet::from_fn(&g, |_, r, _, _| 10.0 * r);
        let bc = BoundaryConditions::free_slip(Some(Arc::new(base.clone())));
        let mut s = base.clone();
        bc.apply(&g, &mut s, 0.0);
        for var in [Variable::Pressure, Variable::Temperature] {
            let f = s.get(var);
            let b = base.get(var);
            assert!((f.get(-1, 2, 2) - b.get(-1, 2, 2)).abs() < 1e-12);
            assert!((f.get(4, 2, 2) - b.get(4, 2, 2)).abs() < 1e-12);
            assert_eq!(f.get(1, -1, 1), f.get(1, 0, 1));
        }
    }

    #[test]
    fn homogeneous_fill_uses_ghost_factors() {
        let g = grid();
        let bc = BoundaryConditions::no_slip(Arc::new(Linear));
        let mut s = FieldSet::from_fn(&g, |v, r, t, p| 1.0 + v as usize as f64 + r * t * p);
        bc.apply_homogeneous(&g, &mut s);
        for d in Direction::ALL {
            for var in Variable::ALL {
                let f = bc.ghost_factor(d, var);
                let fld = s.get(var);
                if f == 0.0 {
                    let w = compose(d, 0, 1, 1);
                    assert_eq!(fld.get(w[0], w[1], w[2]), 0.0);
                    continue;
                }
                let gi = compose(d, -1, 1, 1);
                let mi = compose(d, 0, 1, 1);
                assert_eq!(fld.get(gi[0], gi[1], gi[2]), f * fld.get(mi[0], mi[1], mi[2]));
            }
        }
    }
}
