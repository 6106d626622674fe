//! Unsplit Crank-Nicolson/Picard stepping with a dense coupled solve.
//!
//! Each iteration solves `(I + τ/2 (D_r + D_θ + D_φ)) δ = rhs` for all active
//! unknowns at once, with the same right side as the split scheme. Both
//! iterations share their fixed point, so the split solver must approach this
//! one as `K` grows. Only usable on tiny grids.

use crate::blocktri::lu_solve;
use crate::error::{Error, Result};
use crate::grid::{Direction, FieldSet, MacGrid, Variable};
use crate::operators::{apply_direction, CoefficientState};
use crate::timestepper::{build_rhs, Model, PicardConfig};

/// Largest number of unknowns the dense solve accepts.
pub const MAX_DENSE_UNKNOWNS: usize = 6000;

/// Unknown slots `(variable, [i, j, k])`: interior entries minus wall faces.
pub fn active_slots(grid: &MacGrid) -> Vec<(usize, [isize; 3])> {
    let mut out = Vec::new();
    for v in Variable::ALL {
        let stag = v.location().staggered();
        let n = grid.extents(v.location());
        for i in 0..n[0] as isize {
            for j in 0..n[1] as isize {
                for k in 0..n[2] as isize {
                    let idx = [i, j, k];
                    if let Some(d) = stag {
                        let m = idx[d.index()];
                        if m == 0 || m == grid.n[d.index()] as isize {
                            continue;
                        }
                    }
                    out.push((v as usize, idx));
                }
            }
        }
    }
    out
}

/// Row-major `I + (τ/2) Σ_d D_d` over `slots`, built column by column.
fn assemble(model: &Model, cs: &CoefficientState, tau: f64, slots: &[(usize, [isize; 3])]) -> Vec<f64> {
    let grid = &model.grid;
    let n = slots.len();
    let mut a = vec![0.0; n * n];
    let mut e = FieldSet::zeros(grid);
    for (col, &(v, [i, j, k])) in slots.iter().enumerate() {
        for f in e.fields.iter_mut() {
            f.data.fill(0.0);
        }
        e.fields[v].set(i, j, k, 1.0);
        model.bc.apply_homogeneous(grid, &mut e);
        let mut out = FieldSet::zeros(grid);
        for d in Direction::ALL {
            apply_direction(d, cs, &e, grid, &model.gas, &mut out);
        }
        for (row, &(w, [p, q, r])) in slots.iter().enumerate() {
            a[row * n + col] = 0.5 * tau * out.fields[w].get(p, q, r);
        }
        a[col * n + col] += 1.0;
    }
    a
}

/// One unsplit step from `u_n` (ghosts filled at `t_n`) with `cfg.iterations` iterations.
pub fn dense_picard_step(
    model: &Model,
    cfg: &PicardConfig,
    u_n: &FieldSet,
    t_n: f64,
    s_bar: Option<&FieldSet>,
) -> Result<FieldSet> {
    cfg.validate()?;
    let grid = &model.grid;
    let slots = active_slots(grid);
    if slots.len() > MAX_DENSE_UNKNOWNS {
        return Err(Error::InvalidParameter(format!(
            "dense oracle limited to {MAX_DENSE_UNKNOWNS} unknowns, grid has {}",
            slots.len()
        )));
    }
    let t1 = t_n + cfg.tau;
    let mut u_k = u_n.clone();
    model.bc.apply(grid, &mut u_k, t1);
    for _ in 0..cfg.iterations {
        let mid = FieldSet::midpoint(&u_k, u_n);
        let cs = CoefficientState::new(&mid, grid, &model.gas)?;
        let rhs = build_rhs(u_n, &u_k, &cs, cfg.tau, model, s_bar);
        let mut a = assemble(model, &cs, cfg.tau, &slots);
        let mut b: Vec<f64> = slots.iter().map(|&(v, [i, j, k])| rhs.fields[v].get(i, j, k)).collect();
        lu_solve(&mut a, slots.len(), &mut b)?;
        for (&(v, [i, j, k]), x) in slots.iter().zip(&b) {
            u_k.fields[v].add(i, j, k, *x);
        }
        model.bc.apply(grid, &mut u_k, t1);
    }
    Ok(u_k)
}

/// `n_steps` unsplit steps from `u0` at `t0`, averaging sources as [`advance`](crate::timestepper::advance) does.
pub fn dense_advance(model: &Model, cfg: &PicardConfig, u0: &FieldSet, t0: f64, n_steps: usize) -> Result<FieldSet> {
    let mut u = u0.clone();
    model.bc.apply(&model.grid, &mut u, t0);
    let mut s_prev = model.source(t0);
    for n in 0..n_steps {
        let t_n = t0 + n as f64 * cfg.tau;
        let s_next = model.source(t0 + (n + 1) as f64 * cfg.tau);
        let s_bar = match (&s_prev, &s_next) {
            (Some(a), Some(b)) => Some(FieldSet::midpoint(a, b)),
            _ => None,
        };
        u = dense_picard_step(model, cfg, &u, t_n, s_bar.as_ref())?;
        s_prev = s_next;
    }
    Ok(u)
}
