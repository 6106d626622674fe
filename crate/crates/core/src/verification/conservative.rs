//! Independent check against the conservative equations for mass, momentum
//! and total energy `E = ρ c_v T + π_∞ + ½ρ|u|² + ρ g r`.
//!
//! All quantities are collocated at cell centers and differenced centrally in
//! space and time, so the residual of a solution of the primitive system is
//! `O(h² + τ²)`. Norms are taken over a fixed physical core of the sector so
//! that grids of different resolution are compared on the same region.

use crate::grid::{interpolate, Direction, Field, FieldSet, Location, MacGrid};
use crate::thermo::{density, Environment, GasParams};

/// l2 norms of the conservative residuals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservativeResidual {
    pub mass: f64,
    pub momentum: [f64; 3],
    pub energy: f64,
}

impl ConservativeResidual {
    /// The five norms in the order mass, momentum r/θ/φ, energy.
    pub fn as_array(&self) -> [f64; 5] {
        [self.mass, self.momentum[0], self.momentum[1], self.momentum[2], self.energy]
    }
}

/// Primitive-equation sources `(R_p, R_ur, R_uθ, R_uφ, R_T)` at `(x, t)`.
pub type PrimitiveSource<'a> = &'a (dyn Fn([f64; 3], f64) -> [f64; 5] + Sync);

/// Collocated primitive fields at interior centers, flattened with φ fastest.
struct Collocated {
    p: Vec<f64>,
    t: Vec<f64>,
    u: [Vec<f64>; 3],
}

impl Collocated {
    fn new(s: &FieldSet, grid: &MacGrid) -> Self {
        let flat = |f: &Field| f.interior_values().collect::<Vec<_>>();
        Collocated {
            p: flat(s.p()),
            t: flat(s.temp()),
            u: std::array::from_fn(|d| flat(&interpolate(s.vel(Direction::from_index(d)), grid, Location::Center))),
        }
    }
}

#[inline]
fn at(n: [usize; 3], i: usize, j: usize, k: usize) -> usize {
    (i * n[1] + j) * n[2] + k
}

/// Fraction of each coordinate extent excluded next to every wall by default.
pub const DEFAULT_MARGIN: f64 = 1.0 / 6.0;

/// Conservative residual at time `t` from states at `t - τ`, `t`, `t + τ`.
///
/// Cells whose centers lie within `margin` (fraction of the extent) of a wall
/// are skipped, as are cells closer than two cells to a wall. `source` gives the primitive sources the states were forced with, which are
/// mapped to the matching conservative sources before subtraction.
pub fn conservative_residual(
    states: [&FieldSet; 3],
    t: f64,
    tau: f64,
    grid: &MacGrid,
    gas: &GasParams,
    env: &Environment,
    source: Option<PrimitiveSource<'_>>,
    margin: f64,
) -> ConservativeResidual {
    let n = grid.n;
    let inside = |d: usize, i: usize| {
        let s = (i as f64 + 0.5) / n[d] as f64;
        i >= 2 && i + 2 < n[d] && s > margin && s < 1.0 - margin
    };
    let cells = n[0] * n[1] * n[2];
    let cols: Vec<Collocated> = states.iter().map(|s| Collocated::new(s, grid)).collect();
    let g = env.gravity;
    let cv = gas.cv;
    let pi = gas.pi_inf;

    // Conserved variables [ρ, ρu_r, ρu_θ, ρu_φ, E] of one collocated state.
    let conserved = |c: &Collocated, id: usize, r: f64| -> [f64; 5] {
        let rho = density(gas, c.p[id], c.t[id]);
        let u = [c.u[0][id], c.u[1][id], c.u[2][id]];
        let ke = 0.5 * rho * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        [rho, rho * u[0], rho * u[1], rho * u[2], rho * cv * c.t[id] + pi + ke + rho * g * r]
    };

    let mid = &cols[1];
    let [dr, dth, dph] = grid.h;
    let idx = |i: usize, j: usize, k: usize| at(n, i, j, k);

    // Velocity gradient and stress at the middle state, valid for cells with both neighbours.
    let mut sigma = vec![[0.0f64; 6]; cells];
    let mut grad_t = vec![[0.0f64; 3]; cells];
    for i in 1..n[0] - 1 {
        for j in 1..n[1] - 1 {
            for k in 1..n[2] - 1 {
                let id = idx(i, j, k);
                let r = grid.r_c(i as isize);
                let s = grid.sin_c(j as isize);
                let ct = grid.cot_c(j as isize);
                let d = |f: &[f64], dir: usize| -> f64 {
                    let (a, b, h) = match dir {
                        0 => (idx(i + 1, j, k), idx(i - 1, j, k), dr),
                        1 => (idx(i, j + 1, k), idx(i, j - 1, k), dth),
                        _ => (idx(i, j, k + 1), idx(i, j, k - 1), dph),
                    };
                    (f[a] - f[b]) / (2.0 * h)
                };
                let (ur, ut, up) = (&mid.u[0], &mid.u[1], &mid.u[2]);
                let gm = [
                    [d(ur, 0), d(ut, 0), d(up, 0)],
                    [
                        d(ur, 1) / r - ut[id] / r,
                        d(ut, 1) / r + ur[id] / r,
                        d(up, 1) / r,
                    ],
                    [
                        d(ur, 2) / (r * s) - up[id] / r,
                        d(ut, 2) / (r * s) - up[id] * ct / r,
                        d(up, 2) / (r * s) + ur[id] / r + ut[id] * ct / r,
                    ],
                ];
                sigma[id] = crate::operators::stress_from_gradient(gas.mu, &gm);
                grad_t[id] = [d(&mid.t, 0), d(&mid.t, 1) / r, d(&mid.t, 2) / (r * s)];
            }
        }
    }

    // Flux tensor rows F[eq][dir] at the middle state for every cell with stress.
    // Momentum rows carry the symmetric tensor ρu⊗u + pI - σ; the energy row
    // the vector (E + p)u - κ∇T - u·σ; the mass row ρu.
    let kappa = gas.kappa();
    let sym = |a: &[f64; 6], x: usize, y: usize| -> f64 {
        match (x.min(y), x.max(y)) {
            (0, 0) => a[0],
            (1, 1) => a[1],
            (2, 2) => a[2],
            (0, 1) => a[3],
            (0, 2) => a[4],
            _ => a[5],
        }
    };
    let mut mass_flux = vec![[0.0f64; 3]; cells];
    let mut mom_tensor = vec![[0.0f64; 6]; cells];
    let mut energy_flux = vec![[0.0f64; 3]; cells];
    for i in 1..n[0] - 1 {
        for j in 1..n[1] - 1 {
            for k in 1..n[2] - 1 {
                let id = idx(i, j, k);
                let r = grid.r_c(i as isize);
                let q = conserved(mid, id, r);
                let rho = q[0];
                let u = [mid.u[0][id], mid.u[1][id], mid.u[2][id]];
                let p = mid.p[id];
                let sg = &sigma[id];
                mass_flux[id] = [rho * u[0], rho * u[1], rho * u[2]];
                let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
                for (c, &(a, b)) in pairs.iter().enumerate() {
                    let pres = if a == b { p } else { 0.0 };
                    mom_tensor[id][c] = rho * u[a] * u[b] + pres - sg[c];
                }
                for b in 0..3 {
                    let us: f64 = (0..3).map(|a| u[a] * sym(sg, a, b)).sum();
                    energy_flux[id][b] = (q[4] + p) * u[b] - kappa * grad_t[id][b] - us;
                }
            }
        }
    }

    let mut sums = [0.0f64; 5];
    for i in 2..n[0] - 2 {
        for j in 2..n[1] - 2 {
            for k in 2..n[2] - 2 {
                if !(inside(0, i) && inside(1, j) && inside(2, k)) {
                    continue;
                }
                let id = idx(i, j, k);
                let r = grid.r_c(i as isize);
                let th = grid.theta_c(j as isize);
                let ph = grid.phi_c(k as isize);
                let s = th.sin();
                let ct = th.cos() / s;
                let nb = |dir: usize, off: isize| -> (usize, f64, f64) {
                    let (ii, jj, kk) = match dir {
                        0 => ((i as isize + off) as usize, j, k),
                        1 => (i, (j as isize + off) as usize, k),
                        _ => (i, j, (k as isize + off) as usize),
                    };
                    (idx(ii, jj, kk), grid.r_c(ii as isize), grid.sin_c(jj as isize))
                };
                // ∇·F for a vector field given per cell.
                let vdiv = |f: &dyn Fn(usize) -> [f64; 3]| -> f64 {
                    let (a, ra, _) = nb(0, 1);
                    let (b, rb, _) = nb(0, -1);
                    let dr_term = (ra * ra * f(a)[0] - rb * rb * f(b)[0]) / (2.0 * dr * r * r);
                    let (a, _, sa) = nb(1, 1);
                    let (b, _, sb) = nb(1, -1);
                    let dt_term = (sa * f(a)[1] - sb * f(b)[1]) / (2.0 * dth * r * s);
                    let (a, _, _) = nb(2, 1);
                    let (b, _, _) = nb(2, -1);
                    let dp_term = (f(a)[2] - f(b)[2]) / (2.0 * dph * r * s);
                    dr_term + dt_term + dp_term
                };
                let ten = |c: usize, x: usize, y: usize| sym(&mom_tensor[c], x, y);
                let row = |b: usize| move |c: usize| [ten(c, 0, b), ten(c, 1, b), ten(c, 2, b)];
                // Divergence of the symmetric momentum tensor with curvature terms.
                let a_here = |x: usize, y: usize| ten(id, x, y);
                let mut tdiv = [vdiv(&row(0)), vdiv(&row(1)), vdiv(&row(2))];
                tdiv[0] -= (a_here(1, 1) + a_here(2, 2)) / r;
                tdiv[1] += (a_here(0, 1) - ct * a_here(2, 2)) / r;
                tdiv[2] += (a_here(0, 2) + ct * a_here(1, 2)) / r;

                let qm = conserved(&cols[0], id, r);
                let q0 = conserved(mid, id, r);
                let qp = conserved(&cols[2], id, r);
                let dq: [f64; 5] = std::array::from_fn(|e| (qp[e] - qm[e]) / (2.0 * tau));
                let rho = q0[0];
                let u = [mid.u[0][id], mid.u[1][id], mid.u[2][id]];
                let w = env.omega_spherical(th, ph);
                let cor = [
                    w[1] * u[2] - w[2] * u[1],
                    w[2] * u[0] - w[0] * u[2],
                    w[0] * u[1] - w[1] * u[0],
                ];
                let mut res = [
                    dq[0] + vdiv(&|c| mass_flux[c]),
                    dq[1] + tdiv[0] + 2.0 * rho * cor[0] + rho * g,
                    dq[2] + tdiv[1] + 2.0 * rho * cor[1],
                    dq[3] + tdiv[2] + 2.0 * rho * cor[2],
                    dq[4] + vdiv(&|c| energy_flux[c]),
                ];
                if let Some(src) = source {
                    let rp = src([r, th, ph], t);
                    let p = mid.p[id];
                    let tt = mid.t[id];
                    let s_rho = rho * (rp[0] / (p + gas.pi_inf) - rp[4] / tt);
                    let ru = [rp[1], rp[2], rp[3]];
                    let u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
                    let udr: f64 = (0..3).map(|a| u[a] * ru[a]).sum();
                    res[0] -= s_rho;
                    for a in 0..3 {
                        res[1 + a] -= rho * ru[a] + u[a] * s_rho;
                    }
                    res[4] -= rp[0] / (gas.gamma - 1.0) + rho * udr + (0.5 * u2 + g * r) * s_rho;
                }
                let wgt = grid.volume_weight(Location::Center, i as isize, j as isize, k as isize);
                for e in 0..5 {
                    sums[e] += res[e] * res[e] * wgt;
                }
            }
        }
    }
    let s = sums.map(f64::sqrt);
    ConservativeResidual {
        mass: s[0],
        momentum: [s[1], s[2], s[3]],
        energy: s[4],
    }
}

/// Residual of the exactly sampled manufactured solution at time `t`.
pub fn manufactured_conservative_residual(
    case: &super::ManufacturedCase,
    grid: &MacGrid,
    t: f64,
    tau: f64,
) -> ConservativeResidual {
    let env = super::ManufacturedCase::environment();
    let states = [t - tau, t, t + tau].map(|tt| case.sample(grid, tt));
    let src = |x: [f64; 3], tt: f64| case.residual(&env, x, tt).total();
    conservative_residual(
        [&states[0], &states[1], &states[2]],
        t,
        tau,
        grid,
        &case.gas,
        &env,
        Some(&src),
        DEFAULT_MARGIN,
    )
}
