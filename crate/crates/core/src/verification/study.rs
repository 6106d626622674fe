//! Convergence, temporal-order and low-Mach studies on the manufactured solution.

use std::sync::Arc;

use super::manufactured::{ManufacturedCase, ManufacturedForcing};
use crate::boundary::BoundaryConditions;
use crate::error::{Error, Result};
use crate::grid::{FieldSet, MacGrid, Variable};
use crate::timestepper::{advance, Model, PicardConfig, ReferencePressure, StepReport};

/// Pressure scale above which the solver is known to lose accuracy unless rescaled.
pub const PRESSURE_SCALE_WARNING: f64 = 1e4;

/// Model for the manufactured problem: no-slip walls with exact velocity,
/// mirrored scalars, manufactured forcing and reference pressure `p0`.
pub fn mms_model(case: &ManufacturedCase, grid: MacGrid) -> Model {
    let env = ManufacturedCase::environment();
    let bc = BoundaryConditions::no_slip(Arc::new(*case));
    Model::new(grid, case.gas, env, bc, case.p0)
        .with_forcing(Arc::new(ManufacturedForcing::new(*case, env)))
        .with_reference(ReferencePressure::Constant(case.p0))
}

/// Result of one manufactured run.
#[derive(Clone, Debug)]
pub struct MmsOutcome {
    pub grid: MacGrid,
    pub state: FieldSet,
    pub time: f64,
    pub reports: Vec<StepReport>,
}

impl MmsOutcome {
    pub fn errors(&self, case: &ManufacturedCase) -> ErrorNorms {
        error_norms(case, &self.grid, &self.state, self.time)
    }
}

/// Runs `steps` steps from the exact solution at `t = 0`.
pub fn run_mms(case: &ManufacturedCase, grid: &MacGrid, cfg: &PicardConfig, steps: usize) -> Result<MmsOutcome> {
    if case.p0 > PRESSURE_SCALE_WARNING {
        log::warn!(
            "pressure scale p0 = {} exceeds {PRESSURE_SCALE_WARNING:e}; rescale the problem to avoid large derivative errors",
            case.p0
        );
    }
    let model = mms_model(case, grid.clone());
    let u0 = case.sample(grid, 0.0);
    let (state, reports) = advance(&model, cfg, &u0, 0.0, steps, |_, _| Ok(()))?;
    Ok(MmsOutcome {
        grid: grid.clone(),
        state,
        time: steps as f64 * cfg.tau,
        reports,
    })
}

/// Per-variable l2 and max norms of an error field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub l2: [f64; 5],
    pub max: [f64; 5],
}

/// Errors of `state` against the exact solution at each variable's own location.
pub fn error_norms(case: &ManufacturedCase, grid: &MacGrid, state: &FieldSet, t: f64) -> ErrorNorms {
    let exact = case.sample(grid, t);
    let diff = FieldSet::difference(state, &exact);
    ErrorNorms {
        l2: diff.l2_norms(grid),
        max: diff.max_norms(),
    }
}

/// One row group of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub n: [usize; 3],
    /// Grid size: largest coordinate spacing.
    pub d: f64,
    pub tau: f64,
    pub errors: ErrorNorms,
    /// Observed l2 order against the previous (coarser) grid.
    pub order: Option<[f64; 5]>,
}

/// `log(e1/e2) / log(d1/d2)`.
pub fn observed_order(e1: f64, e2: f64, d1: f64, d2: f64) -> f64 {
    (e1 / e2).ln() / (d1 / d2).ln()
}

/// Grid-refinement study at fixed `τ` up to `t_end`.
pub fn convergence_study(
    case: &ManufacturedCase,
    grids: &[MacGrid],
    cfg: &PicardConfig,
    t_end: f64,
) -> Result<Vec<ErrorReport>> {
    if grids.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "a convergence study needs at least 3 grids, got {}",
            grids.len()
        )));
    }
    let steps = step_count(t_end, cfg.tau)?;
    let mut out: Vec<ErrorReport> = Vec::with_capacity(grids.len());
    for g in grids {
        let run = run_mms(case, g, cfg, steps)?;
        let errors = run.errors(case);
        let order = out.last().map(|prev: &ErrorReport| {
            std::array::from_fn(|v| observed_order(prev.errors.l2[v], errors.l2[v], prev.d, g.diameter()))
        });
        log::info!("grid {:?}: l2 errors {:?}", g.n, errors.l2);
        out.push(ErrorReport {
            n: g.n,
            d: g.diameter(),
            tau: cfg.tau,
            errors,
            order,
        });
    }
    Ok(out)
}

/// Number of steps of size `tau` reaching `t_end`; rejects non-integer ratios.
pub fn step_count(t_end: f64, tau: f64) -> Result<usize> {
    let s = t_end / tau;
    let n = s.round();
    if !(tau > 0.0) || (s - n).abs() > 1e-9 * s.max(1.0) || n < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "t_end = {t_end} is not a whole number of steps of tau = {tau}"
        )));
    }
    Ok(n as usize)
}

/// Time convergence rate `log2(‖a - b‖ / ‖b - c‖)` from solutions at `τ, τ/2, τ/4`.
///
/// Returns `None` when the denominator vanishes and `-∞` when only the numerator does.
pub fn tcr(diff_coarse: f64, diff_fine: f64) -> Option<f64> {
    if diff_fine == 0.0 {
        return None;
    }
    if diff_coarse == 0.0 {
        return Some(f64::NEG_INFINITY);
    }
    Some((diff_coarse / diff_fine).log2())
}

/// TCR of every variable from three states on the same grid.
pub fn tcr_fields(grid: &MacGrid, a: &FieldSet, b: &FieldSet, c: &FieldSet) -> [Option<f64>; 5] {
    let d1 = FieldSet::difference(a, b).l2_norms(grid);
    let d2 = FieldSet::difference(b, c).l2_norms(grid);
    std::array::from_fn(|v| tcr(d1[v], d2[v]))
}

/// One row of a TCR table.
#[derive(Clone, Debug, PartialEq)]
pub struct TcrRow {
    pub tau: f64,
    pub tcr: [Option<f64>; 5],
}

/// TCR at each `τ` in `taus`, running the solver at `τ`, `τ/2` and `τ/4` to `t_end`.
/// Runs shared between ladder members are computed once.
pub fn tcr_study(case: &ManufacturedCase, grid: &MacGrid, cfg: &PicardConfig, taus: &[f64], t_end: f64) -> Result<Vec<TcrRow>> {
    let mut levels: Vec<f64> = taus.iter().flat_map(|&t| [t, t / 2.0, t / 4.0]).collect();
    levels.sort_by(|a, b| b.partial_cmp(a).expect("finite tau"));
    levels.dedup_by(|a, b| ((*a - *b) / *b).abs() < 1e-12);
    for &tau in &levels {
        step_count(t_end, tau)?;
    }
    let states: Vec<(f64, FieldSet)> = levels
        .iter()
        .map(|&tau| {
            let c = PicardConfig { tau, ..*cfg };
            run_mms(case, grid, &c, step_count(t_end, tau)?).map(|o| (tau, o.state))
        })
        .collect::<Result<_>>()?;
    let find = |tau: f64| {
        &states
            .iter()
            .find(|(t, _)| ((t - tau) / tau).abs() < 1e-12)
            .expect("every ladder level was run")
            .1
    };
    Ok(taus
        .iter()
        .map(|&tau| TcrRow {
            tau,
            tcr: tcr_fields(grid, find(tau), find(tau / 2.0), find(tau / 4.0)),
        })
        .collect())
}

/// `max |p - p0| / p0` over interior cells.
pub fn pressure_fluctuation(state: &FieldSet, p0: f64) -> f64 {
    ReferencePressure::Constant(p0).fluctuation(state.p()).0
}

/// One Mach number of a low-Mach sweep: `max Δp` recorded after selected steps.
#[derive(Clone, Debug, PartialEq)]
pub struct MachRow {
    pub m0: f64,
    /// `(step, max Δp)` pairs.
    pub dp: Vec<(usize, f64)>,
}

/// Runs the manufactured problem for each Mach number and records `max Δp` at `record_steps`.
pub fn mach_sweep(
    machs: &[f64],
    p0: f64,
    grid: &MacGrid,
    cfg: &PicardConfig,
    record_steps: &[usize],
) -> Result<Vec<MachRow>> {
    let last = record_steps.iter().copied().max().unwrap_or(0);
    machs
        .iter()
        .map(|&m0| {
            let gas = ManufacturedCase::with_mach(m0).gas;
            let case = ManufacturedCase::new(m0, p0, gas);
            let run = run_mms(&case, grid, cfg, last)?;
            let dp = record_steps
                .iter()
                .map(|&s| (s, if s == 0 { 0.0 } else { run.reports[s - 1].dp_max }))
                .collect();
            Ok(MachRow { m0, dp })
        })
        .collect()
}

/// `(max p - min p) / p0` of the manufactured pressure on `grid` at `t`.
pub fn well_prepared_pressure(case: &ManufacturedCase, grid: &MacGrid, t: f64) -> f64 {
    super::manufactured::pressure_spread(case, grid, t)
}

/// `l2(∇·u) / u0` of the manufactured velocity on `grid` at `t`.
pub fn well_prepared_divergence(case: &ManufacturedCase, grid: &MacGrid, t: f64) -> f64 {
    super::manufactured::divergence_ratio(case, grid, t)
}

/// Name of variable `v` for tables.
pub fn variable_name(v: usize) -> &'static str {
    Variable::ALL[v].name()
}
