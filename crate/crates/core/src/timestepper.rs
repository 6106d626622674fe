//! Crank-Nicolson time stepping with Picard iteration and direction splitting.
//!
//! Each iteration solves
//! `(I + τ/2 D_r)(I + τ/2 D_θ)(I + τ/2 D_φ) δ = -(U_k - U_n) - τ [(D + D_M)(Ū) Ū + G - S̄]`
//! with coefficients frozen at `Ū = (U_k + U_n)/2`, then sets `U_{k+1} = U_k + δ`.
//! The right side vanishes exactly at the unsplit Crank-Nicolson solution, so
//! converged iterations remove the splitting error.

use std::sync::Arc;

use crate::blocktri::LineSolver;
use crate::boundary::BoundaryConditions;
use crate::error::{Error, Result};
use crate::grid::{Direction, Field, FieldSet, Location, MacGrid, Variable};
use crate::operators::{apply_direction, apply_mixed, sweep, CoefficientState};
use crate::thermo::{density, sound_speed, Environment, GasParams};

/// Time-dependent source terms added to the right side of the equations.
pub trait Forcing: Send + Sync {
    /// Sources at every interior position of each variable at time `t`.
    fn source(&self, grid: &MacGrid, t: f64) -> FieldSet;
}

/// Pressure against which relative fluctuations `Δp = (p - p_ref)/p_ref` are measured.
#[derive(Clone, Debug)]
pub enum ReferencePressure {
    Constant(f64),
    /// Cell-centered reference, e.g. a hydrostatic base state.
    Field(Arc<Field>),
}

impl ReferencePressure {
    /// `(max |Δp|, mean |Δp|)` over interior cells.
    pub fn fluctuation(&self, p: &Field) -> (f64, f64) {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut cnt = 0usize;
        p.for_each_interior(|i, j, k| {
            let r = match self {
                ReferencePressure::Constant(c) => *c,
                ReferencePressure::Field(f) => f.get(i, j, k),
            };
            let d = ((p.get(i, j, k) - r) / r).abs();
            max = max.max(d);
            sum += d;
            cnt += 1;
        });
        (max, sum / cnt.max(1) as f64)
    }
}

/// Everything except the state that defines a run.
#[derive(Clone)]
pub struct Model {
    pub grid: MacGrid,
    pub gas: GasParams,
    pub env: Environment,
    pub bc: BoundaryConditions,
    /// Gravity term of the `u_r` equation on r-faces; positive values pull inward.
    pub gravity: Field,
    pub forcing: Option<Arc<dyn Forcing>>,
    pub reference_pressure: ReferencePressure,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("grid", &self.grid)
            .field("gas", &self.gas)
            .field("env", &self.env)
            .field("bc", &self.bc)
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

impl Model {
    /// Model with uniform gravity `env.gravity` and no forcing.
    pub fn new(grid: MacGrid, gas: GasParams, env: Environment, bc: BoundaryConditions, p_ref: f64) -> Self {
        let gravity = uniform_gravity(&grid, env.gravity);
        Model {
            grid,
            gas,
            env,
            bc,
            gravity,
            forcing: None,
            reference_pressure: ReferencePressure::Constant(p_ref),
        }
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn with_gravity(mut self, gravity: Field) -> Self {
        self.gravity = gravity;
        self
    }

    pub fn with_reference(mut self, r: ReferencePressure) -> Self {
        self.reference_pressure = r;
        self
    }

    /// Forcing evaluated at time `t`, if the model has any.
    pub fn source(&self, t: f64) -> Option<FieldSet> {
        self.forcing.as_ref().map(|f| f.source(&self.grid, t))
    }
}

/// Constant gravity `g` on interior r-faces.
pub fn uniform_gravity(grid: &MacGrid, g: f64) -> Field {
    let mut f = Field::zeros(grid, Location::RFace);
    if g != 0.0 {
        let nr = grid.nr() as isize;
        f.par_fill_interior(|i, _, _| if i == 0 || i == nr { 0.0 } else { g });
    }
    f
}

/// Gravity that exactly balances the discrete pressure gradient of `base`:
/// `g_face = -(p[i] - p[i-1]) / (dr ρ_face)` with `ρ_face` the mean of the two
/// adjacent cell densities.
pub fn balanced_gravity(grid: &MacGrid, gas: &GasParams, base: &FieldSet) -> Field {
    let mut f = Field::zeros(grid, Location::RFace);
    let (p, t) = (base.p(), base.temp());
    let nr = grid.nr() as isize;
    let dr = grid.h[0];
    f.par_fill_interior(|i, j, k| {
        if i == 0 || i == nr {
            return 0.0;
        }
        let rho = 0.5 * (density(gas, p.get(i, j, k), t.get(i, j, k)) + density(gas, p.get(i - 1, j, k), t.get(i - 1, j, k)));
        -(p.get(i, j, k) - p.get(i - 1, j, k)) / (dr * rho)
    });
    f
}

/// Relative increment below which the divergence guard ignores growth.
pub const DIVERGENCE_FLOOR: f64 = 1e-12;

/// Picard iteration controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardConfig {
    pub tau: f64,
    /// Maximum number of iterations `K ≥ 1`.
    pub iterations: usize,
    /// Optional early exit once the relative l2 increment drops below this value.
    pub tolerance: Option<f64>,
    pub solver: LineSolver,
}

impl PicardConfig {
    pub fn new(tau: f64) -> Self {
        PicardConfig {
            tau,
            iterations: 2,
            tolerance: None,
            solver: LineSolver::Thomas,
        }
    }

    pub fn with_iterations(mut self, k: usize) -> Self {
        self.iterations = k;
        self
    }

    pub fn with_solver(mut self, solver: LineSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau must be > 0, got {}", self.tau)));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iteration count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Adds `(D + D_M)(cs) · v` into `out`.
pub fn apply_full(cs: &CoefficientState, v: &FieldSet, model: &Model, out: &mut FieldSet) {
    for d in Direction::ALL {
        apply_direction(d, cs, v, &model.grid, &model.gas, out);
    }
    apply_mixed(cs, v, &model.grid, &model.gas, &model.env, out);
}

/// Adds the gravity term to the `u_r` row of `out`, scaled by `a`.
fn add_gravity(model: &Model, a: f64, out: &mut FieldSet) {
    out.get_mut(Variable::VelR).axpy(a, &model.gravity);
}

/// Right side `-(U_k - U_n) - τ [(D + D_M)(Ū) Ū + G - S̄]`.
///
/// `u_k` and `u_n` must have ghosts filled; `s_bar` is the time-averaged source.
pub fn build_rhs(
    u_n: &FieldSet,
    u_k: &FieldSet,
    cs: &CoefficientState,
    tau: f64,
    model: &Model,
    s_bar: Option<&FieldSet>,
) -> FieldSet {
    let mut op = FieldSet::zeros(&model.grid);
    apply_full(cs, &cs.state, model, &mut op);
    add_gravity(model, 1.0, &mut op);
    if let Some(s) = s_bar {
        op.axpy(-1.0, s);
    }
    let mut rhs = FieldSet::difference(u_n, u_k);
    rhs.axpy(-tau, &op);
    rhs
}

/// Outcome of one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub time: f64,
    /// Relative l2 increment `‖δ‖/‖U_k‖` per Picard iteration.
    pub increments: Vec<f64>,
    pub courant: f64,
    pub dp_max: f64,
    pub dp_mean: f64,
}

/// Advances `u_n` (ghosts filled for `t_n`) by one step.
///
/// `s_bar` is the average of the sources at `t_n` and `t_n + τ`. Returns the
/// new state with ghosts filled at `t_n + τ` and the per-iteration increments.
pub fn picard_step(
    model: &Model,
    cfg: &PicardConfig,
    u_n: &FieldSet,
    t_n: f64,
    step: usize,
    s_bar: Option<&FieldSet>,
) -> Result<(FieldSet, Vec<f64>)> {
    cfg.validate()?;
    let grid = &model.grid;
    let t1 = t_n + cfg.tau;
    let mut u_k = u_n.clone();
    model.bc.apply(grid, &mut u_k, t1);
    let mut increments = Vec::with_capacity(cfg.iterations);
    let mut growth = 0usize;
    for k in 0..cfg.iterations {
        let mid = FieldSet::midpoint(&u_k, u_n);
        let cs = CoefficientState::new(&mid, grid, &model.gas)?;
        let rhs = build_rhs(u_n, &u_k, &cs, cfg.tau, model, s_bar);
        let mut x = rhs;
        for d in Direction::ALL {
            x = sweep(d, &cs, cfg.tau, &x, grid, &model.gas, &model.bc, cfg.solver)?;
        }
        if let Some(v) = x.first_non_finite() {
            return Err(Error::NonFinite {
                field: v.name(),
                step,
                iteration: k,
            });
        }
        let norm_u: f64 = u_k.l2_norms(grid).iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_d: f64 = x.l2_norms(grid).iter().map(|v| v * v).sum::<f64>().sqrt();
        let inc = if norm_u > 0.0 { norm_d / norm_u } else { norm_d };
        if let Some(&prev) = increments.last() {
            // Increments at round-off level fluctuate and are not growth.
            if inc > prev && inc > DIVERGENCE_FLOOR {
                growth += 1;
                if growth >= 3 {
                    return Err(Error::Divergence { step });
                }
            } else {
                growth = 0;
            }
        }
        increments.push(inc);
        u_k.axpy(1.0, &x);
        model.bc.apply(grid, &mut u_k, t1);
        if let Some(v) = u_k.first_non_finite() {
            return Err(Error::NonFinite {
                field: v.name(),
                step,
                iteration: k,
            });
        }
        if cfg.tolerance.is_some_and(|tol| inc < tol) {
            break;
        }
    }
    Ok((u_k, increments))
}

/// `max τ (|u_d| + c) / h_d` over cells and directions, with physical lengths
/// `h = (dr, r dθ, r sinθ dφ)` and velocities interpolated to centers.
pub fn courant_number(state: &FieldSet, grid: &MacGrid, gas: &GasParams, tau: f64) -> Result<f64> {
    let p = state.p();
    let t = state.temp();
    let mut worst = 0.0f64;
    let mut bad = None;
    let [dr, dt, dp] = grid.h;
    p.for_each_interior(|i, j, k| {
        let rho = density(gas, p.get(i, j, k), t.get(i, j, k));
        if !(rho > 0.0 && rho.is_finite()) {
            bad.get_or_insert((i, j, k));
            return;
        }
        let c = sound_speed(gas, p.get(i, j, k), rho);
        let r = grid.r_c(i);
        let h = [dr, r * dt, r * grid.sin_c(j) * dp];
        for d in 0..3 {
            let f = &state.fields[1 + d];
            let mut o = [i, j, k];
            o[d] += 1;
            let u = 0.5 * (f.get(i, j, k) + f.get(o[0], o[1], o[2]));
            worst = worst.max(tau * (u.abs() + c) / h[d]);
        }
    });
    if let Some((i, j, k)) = bad {
        return Err(Error::NonPhysical(format!("non-positive density at cell ({i}, {j}, {k})")));
    }
    Ok(worst)
}

/// Runs `n_steps` steps from `u0` at `t0`, calling `observer` after each step.
///
/// Sources are evaluated once per time level and averaged over each step.
pub fn advance(
    model: &Model,
    cfg: &PicardConfig,
    u0: &FieldSet,
    t0: f64,
    n_steps: usize,
    mut observer: impl FnMut(&StepReport, &FieldSet) -> Result<()>,
) -> Result<(FieldSet, Vec<StepReport>)> {
    cfg.validate()?;
    let grid = &model.grid;
    let mut u = u0.clone();
    model.bc.apply(grid, &mut u, t0);
    let mut reports = Vec::with_capacity(n_steps);
    let mut s_prev = model.source(t0);
    for n in 0..n_steps {
        let t_n = t0 + n as f64 * cfg.tau;
        let t1 = t0 + (n + 1) as f64 * cfg.tau;
        let s_next = model.source(t1);
        let s_bar = match (&s_prev, &s_next) {
            (Some(a), Some(b)) => Some(FieldSet::midpoint(a, b)),
            _ => None,
        };
        let (next, increments) = picard_step(model, cfg, &u, t_n, n, s_bar.as_ref())?;
        u = next;
        s_prev = s_next;
        let (dp_max, dp_mean) = model.reference_pressure.fluctuation(u.p());
        let report = StepReport {
            step: n + 1,
            time: t1,
            increments,
            courant: courant_number(&u, grid, &model.gas, cfg.tau)?,
            dp_max,
            dp_mean,
        };
        log::debug!(
            "step {} t={:.6e} courant={:.3} dp_max={:.3e} increments={:?}",
            report.step,
            report.time,
            report.courant,
            report.dp_max,
            report.increments
        );
        observer(&report, &u)?;
        reports.push(report);
    }
    Ok((u, reports))
}
