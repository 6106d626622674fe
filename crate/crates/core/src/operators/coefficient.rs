use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Direction, Field, FieldSet, Location, MacGrid};
use crate::thermo::{density, GasParams};

/// Components of the symmetric stress `σ̂`, stored at cell centers.
pub const S_RR: usize = 0;
pub const S_TT: usize = 1;
pub const S_PP: usize = 2;
pub const S_RT: usize = 3;
pub const S_RP: usize = 4;
pub const S_TP: usize = 5;

/// Velocity gradient `G̃_ab` in physical spherical components at cell centers,
/// `a` the derivative direction and `b` the velocity component.
/// Its trace equals the discrete divergence.
#[derive(Clone, Debug)]
pub struct GradTensor {
    pub g: [[Field; 3]; 3],
}

/// Coordinate derivatives `[∂r uθ, ∂r uφ, ∂θ ur, ∂θ uφ, ∂φ ur, ∂φ uθ]` at a center,
/// by central differences of center-interpolated neighbours.
#[inline(always)]
pub(crate) fn cross_derivs(v: &FieldSet, grid: &MacGrid, i: isize, j: isize, k: isize) -> [f64; 6] {
    let ur = v.vel(Direction::R);
    let ut = v.vel(Direction::Theta);
    let up = v.vel(Direction::Phi);
    let [dr, dt, dp] = grid.h;
    let utc = |i: isize, j: isize, k: isize| 0.5 * (ut.get(i, j, k) + ut.get(i, j + 1, k));
    let upc = |i: isize, j: isize, k: isize| 0.5 * (up.get(i, j, k) + up.get(i, j, k + 1));
    let urc = |i: isize, j: isize, k: isize| 0.5 * (ur.get(i, j, k) + ur.get(i + 1, j, k));
    [
        (utc(i + 1, j, k) - utc(i - 1, j, k)) / (2.0 * dr),
        (upc(i + 1, j, k) - upc(i - 1, j, k)) / (2.0 * dr),
        (urc(i, j + 1, k) - urc(i, j - 1, k)) / (2.0 * dt),
        (upc(i, j + 1, k) - upc(i, j - 1, k)) / (2.0 * dt),
        (urc(i, j, k + 1) - urc(i, j, k - 1)) / (2.0 * dp),
        (utc(i, j, k + 1) - utc(i, j, k - 1)) / (2.0 * dp),
    ]
}

/// Discrete divergence pieces `[div_r, div_θ, div_φ]` at a center.
#[inline(always)]
pub(crate) fn div_parts(v: &FieldSet, grid: &MacGrid, i: isize, j: isize, k: isize) -> [f64; 3] {
    let ur = v.vel(Direction::R);
    let ut = v.vel(Direction::Theta);
    let up = v.vel(Direction::Phi);
    let [dr, dt, dp] = grid.h;
    let r = grid.r_c(i);
    let s = grid.sin_c(j);
    let ct = grid.cot_c(j);
    let (a, b) = (ur.get(i, j, k), ur.get(i + 1, j, k));
    let (c, d) = (ut.get(i, j, k), ut.get(i, j + 1, k));
    let (e, f) = (up.get(i, j, k), up.get(i, j, k + 1));
    [
        (b - a) / dr + (a + b) / r,
        (d - c) / (r * dt) + (c + d) * ct / (2.0 * r),
        (f - e) / (r * s * dp),
    ]
}

/// Velocity gradient at one center as `g[a][b]`.
#[inline(always)]
pub(crate) fn gradient_at(v: &FieldSet, grid: &MacGrid, i: isize, j: isize, k: isize) -> [[f64; 3]; 3] {
    let ur = v.vel(Direction::R);
    let ut = v.vel(Direction::Theta);
    let up = v.vel(Direction::Phi);
    let [dr, dt, dp] = grid.h;
    let r = grid.r_c(i);
    let s = grid.sin_c(j);
    let ct = grid.cot_c(j);
    let urc = 0.5 * (ur.get(i, j, k) + ur.get(i + 1, j, k));
    let utc = 0.5 * (ut.get(i, j, k) + ut.get(i, j + 1, k));
    let upc = 0.5 * (up.get(i, j, k) + up.get(i, j, k + 1));
    let [dr_t, dr_p, dt_r, dt_p, dp_r, dp_t] = cross_derivs(v, grid, i, j, k);
    [
        [(ur.get(i + 1, j, k) - ur.get(i, j, k)) / dr, dr_t, dr_p],
        [
            dt_r / r - utc / r,
            (ut.get(i, j + 1, k) - ut.get(i, j, k)) / (r * dt) + urc / r,
            dt_p / r,
        ],
        [
            dp_r / (r * s) - upc / r,
            dp_t / (r * s) - upc * ct / r,
            (up.get(i, j, k + 1) - up.get(i, j, k)) / (r * s * dp) + urc / r + utc * ct / r,
        ],
    ]
}

/// Velocity gradient of `state`; velocity ghosts must be filled.
pub fn velocity_gradient(state: &FieldSet, grid: &MacGrid) -> GradTensor {
    let mut g: [[Field; 3]; 3] =
        std::array::from_fn(|_| std::array::from_fn(|_| Field::zeros(grid, Location::Center)));
    for i in 0..grid.nr() as isize {
        for j in 0..grid.ntheta() as isize {
            for k in 0..grid.nphi() as isize {
                let t = gradient_at(state, grid, i, j, k);
                for a in 0..3 {
                    for b in 0..3 {
                        g[a][b].set(i, j, k, t[a][b]);
                    }
                }
            }
        }
    }
    GradTensor { g }
}

/// `σ̂ = μ (G + Gᵀ) - (2/3) μ tr(G) I` packed as `[rr, θθ, φφ, rθ, rφ, θφ]`.
#[inline(always)]
pub fn stress_from_gradient(mu: f64, g: &[[f64; 3]; 3]) -> [f64; 6] {
    let tr = g[0][0] + g[1][1] + g[2][2];
    let iso = 2.0 / 3.0 * mu * tr;
    [
        2.0 * mu * g[0][0] - iso,
        2.0 * mu * g[1][1] - iso,
        2.0 * mu * g[2][2] - iso,
        mu * (g[0][1] + g[1][0]),
        mu * (g[0][2] + g[2][0]),
        mu * (g[1][2] + g[2][1]),
    ]
}

/// Viscous heating `σ̂(u) : G(u)` at every center.
pub fn viscous_heating(state: &FieldSet, grid: &MacGrid, gas: &GasParams) -> Field {
    let mut out = Field::zeros(grid, Location::Center);
    out.clone().for_each_interior(|i, j, k| {
        let g = gradient_at(state, grid, i, j, k);
        let s = stress_from_gradient(gas.mu, &g);
        let v = s[S_RR] * g[0][0]
            + s[S_TT] * g[1][1]
            + s[S_PP] * g[2][2]
            + s[S_RT] * (g[0][1] + g[1][0])
            + s[S_RP] * (g[0][2] + g[2][0])
            + s[S_TP] * (g[1][2] + g[2][1]);
        out.set(i, j, k, v);
    });
    out
}

/// Coefficients frozen at the Picard midpoint state `ū`.
#[derive(Clone, Debug)]
pub struct CoefficientState {
    /// Midpoint state, ghosts filled.
    pub state: FieldSet,
    /// Density at centers.
    pub rho: Field,
    /// Velocity interpolated to centers.
    pub vel_c: [Field; 3],
    /// Stress `σ̂(ū)` at centers.
    pub sigma: [Field; 6],
    /// Density on `d`-faces.
    pub rho_face: [Field; 3],
    /// `vel_face[d][c]`: velocity component `c` on `d`-faces.
    pub vel_face: [[Field; 3]; 3],
}

impl CoefficientState {
    /// Freezes coefficients at `state`, whose ghosts must be filled.
    pub fn new(state: &FieldSet, grid: &MacGrid, gas: &GasParams) -> Result<Self> {
        let p = state.p();
        let t = state.temp();
        let mut rho = Field::zeros(grid, Location::Center);
        let n = grid.n;
        for i in -1..=n[0] as isize {
            for j in -1..=n[1] as isize {
                for k in -1..=n[2] as isize {
                    rho.set(i, j, k, density(gas, p.get(i, j, k), t.get(i, j, k)));
                }
            }
        }
        let mut bad = None;
        rho.for_each_interior(|i, j, k| {
            let r = rho.get(i, j, k);
            if bad.is_none() && !(r > 0.0 && r.is_finite()) {
                bad = Some((i, j, k, r));
            }
        });
        if let Some((i, j, k, r)) = bad {
            return Err(Error::NonPhysical(format!(
                "density {r} at cell ({i}, {j}, {k}) from p = {}, T = {}",
                p.get(i, j, k),
                t.get(i, j, k)
            )));
        }

        let vel_c: [Field; 3] =
            std::array::from_fn(|c| crate::grid::interpolate(state.vel(Direction::from_index(c)), grid, Location::Center));

        let sigma_planes: Vec<Vec<[f64; 6]>> = (0..n[0] as isize)
            .into_par_iter()
            .map(|i| {
                let mut plane = Vec::with_capacity(n[1] * n[2]);
                for j in 0..n[1] as isize {
                    for k in 0..n[2] as isize {
                        plane.push(stress_from_gradient(gas.mu, &gradient_at(state, grid, i, j, k)));
                    }
                }
                plane
            })
            .collect();
        let mut sigma: [Field; 6] = std::array::from_fn(|_| Field::zeros(grid, Location::Center));
        for (i, plane) in sigma_planes.iter().enumerate() {
            for j in 0..n[1] {
                for k in 0..n[2] {
                    let s = plane[j * n[2] + k];
                    for (c, f) in sigma.iter_mut().enumerate() {
                        f.set(i as isize, j as isize, k as isize, s[c]);
                    }
                }
            }
        }

        let rho_face: [Field; 3] = std::array::from_fn(|d| {
            let mut f = Field::zeros(grid, Location::face(Direction::from_index(d)));
            f.clone().for_each_interior(|i, j, k| {
                let mut o = [i, j, k];
                o[d] -= 1;
                f.set(i, j, k, 0.5 * (rho.get(i, j, k) + rho.get(o[0], o[1], o[2])));
            });
            f
        });
        let vel_face: [[Field; 3]; 3] = std::array::from_fn(|d| {
            std::array::from_fn(|c| {
                let src = state.vel(Direction::from_index(c));
                if c == d {
                    src.clone()
                } else {
                    crate::grid::interpolate(src, grid, Location::face(Direction::from_index(d)))
                }
            })
        });
        Ok(CoefficientState {
            state: state.clone(),
            rho,
            vel_c,
            sigma,
            rho_face,
            vel_face,
        })
    }
}
