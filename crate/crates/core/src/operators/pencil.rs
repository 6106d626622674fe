//! Directional operators `D_r`, `D_θ`, `D_φ` as 5×5 block rows along pencils.
//!
//! Block `m` of a pencil along `d` holds `p` and `T` of cell `m`, the
//! `d`-velocity on face `m+1`, and each other velocity on the face with
//! index `+1` in its own direction. Row `m` couples raw pencil values at
//! `m-1, m, m+1`, where `m = -1` and `m = n` are ghost or boundary values.

use rayon::prelude::*;

use super::coefficient::{CoefficientState, S_PP, S_RP, S_RR, S_RT, S_TP, S_TT};
use crate::blocktri::{BVec, Block, LineSolver, NB, ZERO_BLOCK};
use crate::boundary::{compose, others, BoundaryConditions};
use crate::error::Result;
use crate::grid::{Direction, FieldSet, MacGrid, Variable};
use crate::thermo::GasParams;

const P: usize = 0;
const UR: usize = 1;
const UT: usize = 2;
const UP: usize = 3;
const T: usize = 4;

/// Raw (unfolded) blocks of one pencil.
#[derive(Clone, Debug, Default)]
pub struct PencilBlocks {
    pub lower: Vec<Block>,
    pub diag: Vec<Block>,
    pub upper: Vec<Block>,
}

impl PencilBlocks {
    fn reset(&mut self, n: usize) {
        for v in [&mut self.lower, &mut self.diag, &mut self.upper] {
            v.clear();
            v.resize(n, ZERO_BLOCK);
        }
    }
}

/// Storage index of pencil slot `var` at position `m`.
#[inline(always)]
pub(crate) fn slot_index(dir: Direction, var: usize, m: isize, a: isize, b: isize) -> [isize; 3] {
    let mut idx = compose(dir, m, a, b);
    if (UR..=UP).contains(&var) {
        idx[var - 1] += 1;
    }
    idx
}

/// True if slot `var` of block `m` is an unknown rather than a boundary face.
#[inline(always)]
pub(crate) fn slot_active(grid: &MacGrid, dir: Direction, var: usize, m: isize, a: isize, b: isize) -> bool {
    if var == P || var == T {
        return true;
    }
    let c = var - 1;
    slot_index(dir, var, m, a, b)[c] < grid.n[c] as isize
}

/// Number of pencils along `dir` and the extents of their two fixed indices.
pub fn pencil_shape(grid: &MacGrid, dir: Direction) -> (usize, usize) {
    let (p, q) = others(dir);
    (grid.n[p], grid.n[q])
}

/// Scalar-row factors at a center.
struct ScalarCoef {
    /// Divergence multipliers for the p and T rows.
    div: [f64; 2],
    /// Viscous-heating multipliers.
    heat: [f64; 2],
    /// Conduction multipliers.
    cond: [f64; 2],
}

#[inline(always)]
fn scalar_coef(cs: &CoefficientState, gas: &GasParams, i: isize, j: isize, k: isize) -> ScalarCoef {
    let p = cs.state.p().get(i, j, k) + gas.pi_inf;
    let t = cs.state.temp().get(i, j, k);
    let g1 = gas.gamma - 1.0;
    let ht = g1 * t / p;
    let kappa = gas.kappa();
    ScalarCoef {
        div: [gas.gamma * p, g1 * t],
        heat: [g1, ht],
        cond: [g1 * kappa, ht * kappa],
    }
}

/// Fills the p and T rows of block `m` for one direction.
///
/// `adv`: advection coefficient `ū_d / (2 h)`. `vel`: column of the
/// direction's velocity. `div`/`heat`: (lo, hi) weights on the faces below and
/// above; `div` is in flux form, so fields with zero analytic divergence such
/// as `u_r ∝ 1/r²` have zero discrete divergence. `cond`: (lo, hi) conduction weights.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn scalar_rows(
    lo: &mut Block,
    di: &mut Block,
    up: &mut Block,
    sc: &ScalarCoef,
    adv: f64,
    vel: usize,
    div: [f64; 2],
    heat: [f64; 2],
    cond: [f64; 2],
) {
    for (row, e) in [(P, 0), (T, 1)] {
        lo[row][row] -= adv;
        up[row][row] += adv;
        lo[row][vel] += sc.div[e] * div[0] - sc.heat[e] * heat[0];
        di[row][vel] += sc.div[e] * div[1] - sc.heat[e] * heat[1];
        lo[row][T] -= sc.cond[e] * cond[0];
        up[row][T] -= sc.cond[e] * cond[1];
        di[row][T] += sc.cond[e] * (cond[0] + cond[1]);
    }
}

/// Advection plus diffusion in a velocity row; `visc` is (lo, hi) already scaled by ν.
#[inline(always)]
fn transport_row(lo: &mut Block, di: &mut Block, up: &mut Block, row: usize, adv: f64, visc: [f64; 2]) {
    lo[row][row] -= adv + visc[0];
    up[row][row] += adv - visc[1];
    di[row][row] += visc[0] + visc[1];
}

/// Pressure gradient and grad-div along the row's own direction.
///
/// `bp`: `1 / (ρ h)`. `gd`: `ν / (3 h)`. `alpha`/`beta`: (cell below, cell above)
/// weights of the upper and lower face in the directional divergence.
#[inline(always)]
fn own_row(lo: &mut Block, di: &mut Block, up: &mut Block, row: usize, bp: f64, gd: f64, alpha: [f64; 2], beta: [f64; 2]) {
    up[row][P] += bp;
    di[row][P] -= bp;
    up[row][row] -= gd * alpha[1];
    di[row][row] -= gd * (beta[1] - alpha[0]);
    lo[row][row] += gd * beta[0];
}

/// Raw directional blocks of pencil `(a, b)` along `dir`.
pub fn raw_blocks(
    dir: Direction,
    a: isize,
    b: isize,
    cs: &CoefficientState,
    grid: &MacGrid,
    gas: &GasParams,
    out: &mut PencilBlocks,
) {
    let n = grid.n[dir.index()];
    out.reset(n);
    let mu = gas.mu;
    let [dr, dt, dp] = grid.h;
    let [nr, nt, np] = grid.n.map(|v| v as isize);
    for mm in 0..n {
        let m = mm as isize;
        let lo = &mut out.lower[mm];
        let di = &mut out.diag[mm];
        let up = &mut out.upper[mm];
        match dir {
            Direction::R => {
                let (i, j, k) = (m, a, b);
                let r = grid.r_c(i);
                let sc = scalar_coef(cs, gas, i, j, k);
                let sg = |c: usize| cs.sigma[c].get(i, j, k);
                let adv = cs.vel_c[0].get(i, j, k) / (2.0 * dr);
                let w = sg(S_TT) + sg(S_PP);
                let rp2 = grid.r_f(i + 1).powi(2);
                let rm2 = grid.r_f(i).powi(2);
                scalar_rows(
                    lo,
                    di,
                    up,
                    &sc,
                    adv,
                    UR,
                    [-rm2 / (r * r * dr), rp2 / (r * r * dr)],
                    [-sg(S_RR) / dr + w / (2.0 * r), sg(S_RR) / dr + w / (2.0 * r)],
                    [rm2 / (r * r * dr * dr), rp2 / (r * r * dr * dr)],
                );
                let f = i + 1;
                if f < nr {
                    let rf = grid.r_f(f);
                    let rho = cs.rho_face[0].get(f, j, k);
                    let nu = mu / rho;
                    let (cm, cp) = (grid.r_c(f - 1), grid.r_c(f));
                    transport_row(
                        lo,
                        di,
                        up,
                        UR,
                        cs.vel_face[0][0].get(f, j, k) / (2.0 * dr),
                        [nu * cm * cm / (rf * rf * dr * dr), nu * cp * cp / (rf * rf * dr * dr)],
                    );
                    own_row(
                        lo,
                        di,
                        up,
                        UR,
                        1.0 / (rho * dr),
                        nu / (3.0 * dr),
                        [1.0 / dr + 1.0 / cm, 1.0 / dr + 1.0 / cp],
                        [-1.0 / dr + 1.0 / cm, -1.0 / dr + 1.0 / cp],
                    );
                }
                let rr = [rm2 / (r * r * dr * dr), rp2 / (r * r * dr * dr)];
                if j + 1 < nt {
                    let nu = mu / cs.rho_face[1].get(i, j + 1, k);
                    transport_row(lo, di, up, UT, cs.vel_face[1][0].get(i, j + 1, k) / (2.0 * dr), rr.map(|c| nu * c));
                }
                if k + 1 < np {
                    let nu = mu / cs.rho_face[2].get(i, j, k + 1);
                    transport_row(lo, di, up, UP, cs.vel_face[2][0].get(i, j, k + 1) / (2.0 * dr), rr.map(|c| nu * c));
                }
            }
            Direction::Theta => {
                let (i, j, k) = (a, m, b);
                let r = grid.r_c(i);
                let s = grid.sin_c(j);
                let ct = grid.cot_c(j);
                let sc = scalar_coef(cs, gas, i, j, k);
                let sg = |c: usize| cs.sigma[c].get(i, j, k);
                let adv = cs.vel_c[1].get(i, j, k) / (2.0 * r * dt);
                let w = sg(S_PP) * ct - sg(S_RT);
                let (sfm, sfp) = (grid.sin_f(j), grid.sin_f(j + 1));
                scalar_rows(
                    lo,
                    di,
                    up,
                    &sc,
                    adv,
                    UT,
                    [-sfm / (r * s * dt), sfp / (r * s * dt)],
                    [-sg(S_TT) / (r * dt) + w / (2.0 * r), sg(S_TT) / (r * dt) + w / (2.0 * r)],
                    [sfm / (r * r * s * dt * dt), sfp / (r * r * s * dt * dt)],
                );
                if i + 1 < nr {
                    let rf = grid.r_f(i + 1);
                    let nu = mu / cs.rho_face[0].get(i + 1, j, k);
                    let c = nu / (rf * rf * s * dt * dt);
                    transport_row(lo, di, up, UR, cs.vel_face[0][1].get(i + 1, j, k) / (2.0 * rf * dt), [c * sfm, c * sfp]);
                }
                let f = j + 1;
                if f < nt {
                    let sf = grid.sin_f(f);
                    let rho = cs.rho_face[1].get(i, f, k);
                    let nu = mu / rho;
                    let c = nu / (r * r * sf * dt * dt);
                    let (ctm, ctp) = (grid.cot_c(f - 1), grid.cot_c(f));
                    transport_row(
                        lo,
                        di,
                        up,
                        UT,
                        cs.vel_face[1][1].get(i, f, k) / (2.0 * r * dt),
                        [c * grid.sin_c(f - 1), c * grid.sin_c(f)],
                    );
                    own_row(
                        lo,
                        di,
                        up,
                        UT,
                        1.0 / (rho * r * dt),
                        nu / (3.0 * r * dt),
                        [1.0 / (r * dt) + ctm / (2.0 * r), 1.0 / (r * dt) + ctp / (2.0 * r)],
                        [-1.0 / (r * dt) + ctm / (2.0 * r), -1.0 / (r * dt) + ctp / (2.0 * r)],
                    );
                }
                if k + 1 < np {
                    let nu = mu / cs.rho_face[2].get(i, j, k + 1);
                    let c = nu / (r * r * s * dt * dt);
                    transport_row(lo, di, up, UP, cs.vel_face[2][1].get(i, j, k + 1) / (2.0 * r * dt), [c * sfm, c * sfp]);
                }
            }
            Direction::Phi => {
                let (i, j, k) = (a, b, m);
                let r = grid.r_c(i);
                let s = grid.sin_c(j);
                let ct = grid.cot_c(j);
                let sc = scalar_coef(cs, gas, i, j, k);
                let sg = |c: usize| cs.sigma[c].get(i, j, k);
                let h = r * s * dp;
                let adv = cs.vel_c[2].get(i, j, k) / (2.0 * h);
                let w = -(sg(S_RP) + sg(S_TP) * ct);
                let lap = 1.0 / (h * h);
                scalar_rows(
                    lo,
                    di,
                    up,
                    &sc,
                    adv,
                    UP,
                    [-1.0 / h, 1.0 / h],
                    [-sg(S_PP) / h + w / (2.0 * r), sg(S_PP) / h + w / (2.0 * r)],
                    [lap, lap],
                );
                if i + 1 < nr {
                    let rf = grid.r_f(i + 1);
                    let hf = rf * s * dp;
                    let nu = mu / cs.rho_face[0].get(i + 1, j, k);
                    let c = nu / (hf * hf);
                    transport_row(lo, di, up, UR, cs.vel_face[0][2].get(i + 1, j, k) / (2.0 * hf), [c, c]);
                }
                if j + 1 < nt {
                    let ht = r * grid.sin_f(j + 1) * dp;
                    let nu = mu / cs.rho_face[1].get(i, j + 1, k);
                    let c = nu / (ht * ht);
                    transport_row(lo, di, up, UT, cs.vel_face[1][2].get(i, j + 1, k) / (2.0 * ht), [c, c]);
                }
                let f = k + 1;
                if f < np {
                    let rho = cs.rho_face[2].get(i, j, f);
                    let nu = mu / rho;
                    transport_row(lo, di, up, UP, cs.vel_face[2][2].get(i, j, f) / (2.0 * h), [nu * lap, nu * lap]);
                    own_row(lo, di, up, UP, 1.0 / (rho * h), nu / (3.0 * h), [1.0 / h; 2], [-1.0 / h; 2]);
                }
            }
        }
    }
}

/// Raw pencil values at positions `-1..=n`, ghosts and boundary faces included.
pub(crate) fn gather_raw(state: &FieldSet, grid: &MacGrid, dir: Direction, a: isize, b: isize, out: &mut Vec<BVec>) {
    let n = grid.n[dir.index()] as isize;
    out.clear();
    for m in -1..=n {
        let mut v = [0.0; NB];
        for (var, slot) in v.iter_mut().enumerate() {
            if var == 1 + dir.index() && m == n {
                continue;
            }
            let idx = slot_index(dir, var, m, a, b);
            *slot = state.fields[var].get(idx[0], idx[1], idx[2]);
        }
        out.push(v);
    }
}

#[derive(Default)]
struct Scratch {
    raw: Vec<BVec>,
    blocks: Vec<Block>,
}

fn row_apply(pb: &PencilBlocks, raw: &[BVec], m: usize) -> BVec {
    let mut y = [0.0; NB];
    for (blk, v) in [(&pb.lower[m], &raw[m]), (&pb.diag[m], &raw[m + 1]), (&pb.upper[m], &raw[m + 2])] {
        for r in 0..NB {
            let mut s = 0.0;
            for c in 0..NB {
                s += blk[r][c] * v[c];
            }
            y[r] += s;
        }
    }
    y
}

/// Visits every pencil along `dir` in parallel and scatters the per-block
/// results into `out`, skipping boundary-face slots.
fn for_each_pencil<F>(grid: &MacGrid, dir: Direction, out: &mut FieldSet, accumulate: bool, f: F) -> Result<()>
where
    F: Fn(isize, isize, &mut PencilBlocks, &mut Scratch) -> Result<Vec<BVec>> + Sync,
{
    let (na, nb) = pencil_shape(grid, dir);
    let results: Vec<Vec<Vec<BVec>>> = (0..na as isize)
        .into_par_iter()
        .map_init(
            || (PencilBlocks::default(), Scratch::default()),
            |(pb, buf), a| (0..nb as isize).map(|b| f(a, b, pb, buf)).collect::<Result<Vec<_>>>(),
        )
        .collect::<Result<_>>()?;
    let n = grid.n[dir.index()] as isize;
    for (a, row) in results.iter().enumerate() {
        for (b, vals) in row.iter().enumerate() {
            let (a, b) = (a as isize, b as isize);
            for m in 0..n {
                for var in 0..NB {
                    if !slot_active(grid, dir, var, m, a, b) {
                        continue;
                    }
                    let idx = slot_index(dir, var, m, a, b);
                    let v = vals[m as usize][var];
                    if accumulate {
                        out.fields[var].add(idx[0], idx[1], idx[2], v);
                    } else {
                        out.fields[var].set(idx[0], idx[1], idx[2], v);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Adds `D_dir · state` into `out`; `state` ghosts must be filled.
pub fn apply_direction(
    dir: Direction,
    cs: &CoefficientState,
    state: &FieldSet,
    grid: &MacGrid,
    gas: &GasParams,
    out: &mut FieldSet,
) {
    for_each_pencil(grid, dir, out, true, |a, b, pb, scratch| {
        raw_blocks(dir, a, b, cs, grid, gas, pb);
        gather_raw(state, grid, dir, a, b, &mut scratch.raw);
        Ok((0..pb.diag.len()).map(|m| row_apply(pb, &scratch.raw, m)).collect())
    })
    .expect("explicit application cannot fail");
}

/// `I + (τ/2) D_dir` for pencil `(a, b)` with homogeneous ghosts folded into
/// the end blocks and identity rows at boundary-face slots.
#[allow(clippy::too_many_arguments)]
pub fn assemble_pencil(
    dir: Direction,
    a: isize,
    b: isize,
    cs: &CoefficientState,
    tau: f64,
    grid: &MacGrid,
    gas: &GasParams,
    bc: &BoundaryConditions,
    out: &mut PencilBlocks,
) {
    raw_blocks(dir, a, b, cs, grid, gas, out);
    let n = out.diag.len();
    let half = 0.5 * tau;
    for m in 0..n {
        for blk in [&mut out.lower[m], &mut out.diag[m], &mut out.upper[m]] {
            for row in blk.iter_mut() {
                for v in row.iter_mut() {
                    *v *= half;
                }
            }
        }
    }
    let factors: [f64; NB] = std::array::from_fn(|var| bc.ghost_factor(dir, Variable::ALL[var]));
    for r in 0..NB {
        for c in 0..NB {
            out.diag[0][r][c] += out.lower[0][r][c] * factors[c];
            out.diag[n - 1][r][c] += out.upper[n - 1][r][c] * factors[c];
        }
    }
    out.lower[0] = ZERO_BLOCK;
    out.upper[n - 1] = ZERO_BLOCK;
    for m in 0..n {
        for var in 0..NB {
            if slot_active(grid, dir, var, m as isize, a, b) {
                continue;
            }
            // Boundary face: known value, zero increment.
            for r in 0..NB {
                out.diag[m][r][var] = 0.0;
                if m > 0 {
                    out.upper[m - 1][r][var] = 0.0;
                }
                if m + 1 < n {
                    out.lower[m + 1][r][var] = 0.0;
                }
            }
            out.diag[m][var] = [0.0; NB];
            out.lower[m][var] = [0.0; NB];
            out.upper[m][var] = [0.0; NB];
        }
    }
    for m in 0..n {
        for r in 0..NB {
            out.diag[m][r][r] += 1.0;
        }
    }
}

/// Solves `(I + (τ/2) D_dir) x = rhs` along every pencil.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    dir: Direction,
    cs: &CoefficientState,
    tau: f64,
    rhs: &FieldSet,
    grid: &MacGrid,
    gas: &GasParams,
    bc: &BoundaryConditions,
    solver: LineSolver,
) -> Result<FieldSet> {
    let mut out = FieldSet::zeros(grid);
    let n = grid.n[dir.index()];
    for_each_pencil(grid, dir, &mut out, false, |a, b, pb, work| {
        assemble_pencil(dir, a, b, cs, tau, grid, gas, bc, pb);
        let mut x = Vec::with_capacity(n);
        for m in 0..n as isize {
            let mut v = [0.0; NB];
            for (var, slot) in v.iter_mut().enumerate() {
                if slot_active(grid, dir, var, m, a, b) {
                    let idx = slot_index(dir, var, m, a, b);
                    *slot = rhs.fields[var].get(idx[0], idx[1], idx[2]);
                }
            }
            x.push(v);
        }
        solver.solve_in_place(&pb.lower, &pb.diag, &pb.upper, &mut x, &mut work.blocks)?;
        Ok(x)
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::blocktri::mat_vec;
    use crate::boundary::ZeroVelocity;
    use crate::grid::ShellSector;

    fn setup() -> (MacGrid, GasParams, FieldSet) {
        let grid = MacGrid::new(ShellSector::new([1.0, 1.6], [1.0, 1.8], [0.2, 1.1]).unwrap(), 5, 6, 7).unwrap();
        let gas = GasParams::from_gamma(1.6, 1.0, 0.3, 0.8, 0.0).unwrap();
        let state = FieldSet::from_fn(&grid, |v, r, t, p| match v {
            Variable::Pressure => 6250.0 + 40.0 * (r * t).sin() + 10.0 * p.cos(),
            Variable::Temperature => 10400.0 + 30.0 * (r + p).cos(),
            Variable::VelR => 2.0 * (t + p).sin(),
            Variable::VelTheta => 1.5 * (r * p).cos(),
            Variable::VelPhi => -(r + t).sin(),
        });
        (grid, gas, state)
    }

    /// The assembled `I + D_dir` (τ = 2) reproduces `v + D_dir v` for an
    /// increment with homogeneous ghosts.
    fn check_consistency(bc: &BoundaryConditions) {
        let (grid, gas, mut state) = setup();
        bc.apply(&grid, &mut state, 0.0);
        let cs = CoefficientState::new(&state, &grid, &gas).unwrap();
        let mut v = FieldSet::from_fn(&grid, |var, r, t, p| ((var as usize + 1) as f64 * r + 2.0 * t - p).sin());
        bc.apply_homogeneous(&grid, &mut v);
        for dir in Direction::ALL {
            let mut dv = FieldSet::zeros(&grid);
            apply_direction(dir, &cs, &v, &grid, &gas, &mut dv);
            let (na, nb) = pencil_shape(&grid, dir);
            let n = grid.n[dir.index()];
            let mut pb = PencilBlocks::default();
            for a in 0..na as isize {
                for b in 0..nb as isize {
                    assemble_pencil(dir, a, b, &cs, 2.0, &grid, &gas, bc, &mut pb);
                    let x: Vec<BVec> = (0..n as isize)
                        .map(|m| {
                            std::array::from_fn(|var| {
                                if slot_active(&grid, dir, var, m, a, b) {
                                    let i = slot_index(dir, var, m, a, b);
                                    v.fields[var].get(i[0], i[1], i[2])
                                } else {
                                    0.0
                                }
                            })
                        })
                        .collect();
                    for m in 0..n {
                        let mut y = mat_vec(&pb.diag[m], &x[m]);
                        if m > 0 {
                            let l = mat_vec(&pb.lower[m], &x[m - 1]);
                            (0..NB).for_each(|r| y[r] += l[r]);
                        }
                        if m + 1 < n {
                            let u = mat_vec(&pb.upper[m], &x[m + 1]);
                            (0..NB).for_each(|r| y[r] += u[r]);
                        }
                        for var in 0..NB {
                            if !slot_active(&grid, dir, var, m as isize, a, b) {
                                continue;
                            }
                            let i = slot_index(dir, var, m as isize, a, b);
                            let want = v.fields[var].get(i[0], i[1], i[2]) + dv.fields[var].get(i[0], i[1], i[2]);
                            let scale = 1.0 + want.abs() + dv.fields[var].max_abs();
                            assert!(
                                (y[var] - want).abs() <= 1e-11 * scale,
                                "{dir:?} pencil ({a},{b}) m={m} var={var}: {} vs {want}",
                                y[var]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn assembled_pencils_match_free_slip_application() {
        check_consistency(&BoundaryConditions::free_slip(None));
    }

    #[test]
    fn assembled_pencils_match_no_slip_application() {
        check_consistency(&BoundaryConditions::no_slip(Arc::new(ZeroVelocity)));
    }
}
