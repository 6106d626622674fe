//! Mixed operator `D_M`: off-diagonal derivatives, metric terms, cross
//! grad-div and Coriolis. Applied explicitly only.

use super::coefficient::{cross_derivs, div_parts, CoefficientState, S_RP, S_RT, S_TP};
use crate::grid::{Direction, FieldSet, MacGrid, Variable};
use crate::thermo::{Environment, GasParams};

/// Mixed viscous-heating contraction `σ̄_rθ(∂r vθ + ∂θ vr / r) + ...` at a center.
#[inline(always)]
fn mixed_heating(cs: &CoefficientState, v: &FieldSet, grid: &MacGrid, i: isize, j: isize, k: isize) -> f64 {
    let [dr_t, dr_p, dt_r, dt_p, dp_r, dp_t] = cross_derivs(v, grid, i, j, k);
    let r = grid.r_c(i);
    let rs = r * grid.sin_c(j);
    cs.sigma[S_RT].get(i, j, k) * (dr_t + dt_r / r)
        + cs.sigma[S_RP].get(i, j, k) * (dr_p + dp_r / rs)
        + cs.sigma[S_TP].get(i, j, k) * (dt_p / r + dp_t / rs)
}

/// Adds `D_M · v` into `out`; `v` ghosts must be filled.
pub fn apply_mixed(
    cs: &CoefficientState,
    v: &FieldSet,
    grid: &MacGrid,
    gas: &GasParams,
    env: &Environment,
    out: &mut FieldSet,
) {
    let mu = gas.mu;
    let g1 = gas.gamma - 1.0;
    let [dr, dt, dp] = grid.h;
    let [nr, nt, np] = grid.n.map(|x| x as isize);
    let ur = v.vel(Direction::R);
    let ut = v.vel(Direction::Theta);
    let up = v.vel(Direction::Phi);
    let rotating = env.is_rotating();

    let mut tmp = FieldSet::zeros(grid);
    tmp.get_mut(Variable::Pressure).par_fill_interior(|i, j, k| {
        -g1 * mixed_heating(cs, v, grid, i, j, k)
    });
    tmp.get_mut(Variable::Temperature).par_fill_interior(|i, j, k| {
        let p = cs.state.p().get(i, j, k) + gas.pi_inf;
        let t = cs.state.temp().get(i, j, k);
        -g1 * t / p * mixed_heating(cs, v, grid, i, j, k)
    });

    tmp.get_mut(Variable::VelR).par_fill_interior(|i, j, k| {
        if i == 0 || i == nr {
            return 0.0;
        }
        let r = grid.r_f(i);
        let nu = mu / cs.rho_face[0].get(i, j, k);
        let vt = 0.25 * (ut.get(i - 1, j, k) + ut.get(i - 1, j + 1, k) + ut.get(i, j, k) + ut.get(i, j + 1, k));
        let vp = 0.25 * (up.get(i - 1, j, k) + up.get(i - 1, j, k + 1) + up.get(i, j, k) + up.get(i, j, k + 1));
        let q = |c: isize| {
            let d = div_parts(v, grid, c, j, k);
            d[1] + d[2]
        };
        let (qm, qp) = (q(i - 1), q(i));
        let mut s = -(cs.vel_face[0][1].get(i, j, k) * vt + cs.vel_face[0][2].get(i, j, k) * vp) / r
            + nu * (2.0 * ur.get(i, j, k) / (r * r) + (qm + qp) / r)
            - nu / 3.0 * (qp - qm) / dr;
        if rotating {
            let w = env.omega_spherical(grid.theta_c(j), grid.phi_c(k));
            s += 2.0 * (w[1] * vp - w[2] * vt);
        }
        s
    });

    tmp.get_mut(Variable::VelTheta).par_fill_interior(|i, j, k| {
        if j == 0 || j == nt {
            return 0.0;
        }
        let r = grid.r_c(i);
        let s = grid.sin_f(j);
        let ct = grid.cot_f(j);
        let nu = mu / cs.rho_face[1].get(i, j, k);
        let (a0, a1) = (ur.get(i, j - 1, k) + ur.get(i + 1, j - 1, k), ur.get(i, j, k) + ur.get(i + 1, j, k));
        let vr = 0.25 * (a0 + a1);
        let (b0, b1) = (up.get(i, j - 1, k + 1) - up.get(i, j - 1, k), up.get(i, j, k + 1) - up.get(i, j, k));
        let vp = 0.25 * (up.get(i, j - 1, k) + up.get(i, j - 1, k + 1) + up.get(i, j, k) + up.get(i, j, k + 1));
        let dt_r = (a1 - a0) / (2.0 * dt);
        let dp_p = (b0 + b1) / (2.0 * dp);
        let q = |c: isize| {
            let d = div_parts(v, grid, i, c, k);
            d[0] + d[2]
        };
        let (qm, qp) = (q(j - 1), q(j));
        let ub_t = cs.vel_face[1][1].get(i, j, k);
        let ub_p = cs.vel_face[1][2].get(i, j, k);
        let mut out = ub_t * vr / r - ub_p * vp * ct / r
            - nu * (-ut.get(i, j, k) / (r * r * s * s) + 2.0 / (r * r) * dt_r - 2.0 * ct / (r * r * s) * dp_p)
            - nu / (3.0 * r) * (qp - qm) / dt;
        if rotating {
            let w = env.omega_spherical(grid.theta_f(j), grid.phi_c(k));
            out += 2.0 * (w[2] * vr - w[0] * vp);
        }
        out
    });

    tmp.get_mut(Variable::VelPhi).par_fill_interior(|i, j, k| {
        if k == 0 || k == np {
            return 0.0;
        }
        let r = grid.r_c(i);
        let s = grid.sin_c(j);
        let ct = grid.cot_c(j);
        let nu = mu / cs.rho_face[2].get(i, j, k);
        let (a0, a1) = (ur.get(i, j, k - 1) + ur.get(i + 1, j, k - 1), ur.get(i, j, k) + ur.get(i + 1, j, k));
        let (b0, b1) = (ut.get(i, j, k - 1) + ut.get(i, j + 1, k - 1), ut.get(i, j, k) + ut.get(i, j + 1, k));
        let vr = 0.25 * (a0 + a1);
        let vt = 0.25 * (b0 + b1);
        let dp_r = (a1 - a0) / (2.0 * dp);
        let dp_t = (b1 - b0) / (2.0 * dp);
        let q = |c: isize| {
            let d = div_parts(v, grid, i, j, c);
            d[0] + d[1]
        };
        let (qm, qp) = (q(k - 1), q(k));
        let ub_p = cs.vel_face[2][2].get(i, j, k);
        let mut out = ub_p * vt * ct / r + ub_p * vr / r
            - nu * (-up.get(i, j, k) / (r * r * s * s) + 2.0 / (r * r * s) * dp_r + 2.0 * ct / (r * r * s) * dp_t)
            - nu / (3.0 * r * s) * (qp - qm) / dp;
        if rotating {
            let w = env.omega_spherical(grid.theta_c(j), grid.phi_f(k));
            out += 2.0 * (w[0] * vt - w[1] * vr);
        }
        out
    });
    out.axpy(1.0, &tmp);
}
