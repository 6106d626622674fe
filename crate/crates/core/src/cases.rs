//! Rising thermal bubble benchmarks in a thin spherical sector.
//!
//! A hydrostatic atmosphere of constant potential temperature is perturbed
//! by a warm bubble in `Θ` at fixed pressure. Walls are free-slip with zero
//! normal velocity; pressure and temperature ghosts mirror the deviation from
//! the base state.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::boundary::BoundaryConditions;
use crate::error::{Error, Result};
use crate::grid::{Field, FieldSet, Location, MacGrid, ShellSector, Variable};
use crate::thermo::{potential_temperature, temperature_from_theta, Environment, GasParams, HydrostaticBase};
use crate::timestepper::{advance, balanced_gravity, Model, PicardConfig, ReferencePressure, StepReport};

/// Earth radius used by both benchmarks (m).
pub const EARTH_RADIUS: f64 = 6.371e6;
/// Standard gravity (m/s²).
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Radial profile of a bubble as a function of the normalized distance `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BubbleProfile {
    /// `A cos²(πL/2)`.
    Cos2,
    /// `(A/2)(1 + cos πL)`.
    HalfCos,
}

/// Potential-temperature bubble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BubbleSpec {
    /// Radius `R` (m).
    pub radius: f64,
    /// Center height above the bottom wall (m).
    pub height: f64,
    /// Lateral offsets of the center from the sector mid-lines (m).
    pub lateral: [f64; 2],
    /// Peak perturbation (K).
    pub amplitude: f64,
    pub profile: BubbleProfile,
}

impl BubbleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !(self.amplitude > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bubble radius and amplitude must be > 0, got {} and {}",
                self.radius, self.amplitude
            )));
        }
        Ok(())
    }

    /// Perturbation at normalized distance `l`; zero for `l > 1`.
    pub fn at_distance(&self, l: f64) -> f64 {
        if l > 1.0 {
            return 0.0;
        }
        match self.profile {
            BubbleProfile::Cos2 => self.amplitude * (0.5 * PI * l).cos().powi(2),
            BubbleProfile::HalfCos => 0.5 * self.amplitude * (1.0 + (PI * l).cos()),
        }
    }
}

/// Normalized distance from the bubble center. Lateral coordinates are arc
/// lengths `r (θ - θ_m)` and `r sinθ (φ - φ_m)` about the sector mid-lines.
pub fn bubble_distance(spec: &BubbleSpec, sector: &ShellSector, x: [f64; 3]) -> f64 {
    let [r, th, ph] = x;
    let tm = 0.5 * (sector.theta[0] + sector.theta[1]);
    let pm = 0.5 * (sector.phi[0] + sector.phi[1]);
    let dx = r - sector.r[0] - spec.height;
    let dy = r * (th - tm) - spec.lateral[0];
    let dz = r * th.sin() * (ph - pm) - spec.lateral[1];
    (dx * dx + dy * dy + dz * dz).sqrt() / spec.radius
}

/// `ΔΘ` of `spec` at the point `x = (r, θ, φ)`.
pub fn bubble_perturbation(spec: &BubbleSpec, sector: &ShellSector, x: [f64; 3]) -> f64 {
    spec.at_distance(bubble_distance(spec, sector, x))
}

/// A complete benchmark definition.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseSpec {
    pub name: &'static str,
    pub sector: ShellSector,
    pub gas: GasParams,
    pub env: Environment,
    pub base: HydrostaticBase,
    /// `None` gives the unperturbed control problem.
    pub bubble: Option<BubbleSpec>,
    pub end_time: f64,
    /// Grid used by the desk-scale runs.
    pub default_cells: [usize; 3],
}

fn equatorial_sector(height: f64, half_width: f64) -> ShellSector {
    let a = half_width / EARTH_RADIUS;
    ShellSector::new(
        [EARTH_RADIUS, EARTH_RADIUS + height],
        [PI / 2.0 - a, PI / 2.0 + a],
        [PI - a, PI + a],
    )
    .expect("benchmark sector is valid")
}

fn dry_air_case(name: &'static str, sector: ShellSector, bubble: BubbleSpec, end_time: f64, cells: usize) -> CaseSpec {
    let gas = GasParams::dry_air();
    let env = Environment::new(STANDARD_GRAVITY, [0.0; 3]);
    CaseSpec {
        name,
        sector,
        gas,
        env,
        base: HydrostaticBase {
            p00: 1e5,
            theta0: 300.0,
            gravity: STANDARD_GRAVITY,
            gas,
        },
        bubble: Some(bubble),
        end_time,
        default_cells: [cells; 3],
    }
}

/// 10 km tall, 20 km wide sector with a 2 K bubble of radius 2 km centered 2 km up.
pub fn build_thermal1() -> CaseSpec {
    dry_air_case(
        "thermal1",
        equatorial_sector(10_000.0, 10_000.0),
        BubbleSpec {
            radius: 2000.0,
            height: 2000.0,
            lateral: [0.0, 0.0],
            amplitude: 2.0,
            profile: BubbleProfile::Cos2,
        },
        500.0,
        50,
    )
}

/// 1 km cube-like sector with a 0.5 K bubble of radius 250 m centered 260 m up.
pub fn build_thermal2() -> CaseSpec {
    dry_air_case(
        "thermal2",
        equatorial_sector(1000.0, 500.0),
        BubbleSpec {
            radius: 250.0,
            height: 260.0,
            lateral: [0.0, 0.0],
            amplitude: 0.5,
            profile: BubbleProfile::HalfCos,
        },
        400.0,
        50,
    )
}

/// Dry-air bubble in an equatorial sector of the given height and lateral half-width.
pub fn build_custom(height: f64, half_width: f64, bubble: BubbleSpec, end_time: f64, cells: usize) -> Result<CaseSpec> {
    bubble.validate()?;
    let a = half_width / EARTH_RADIUS;
    let sector = ShellSector::new(
        [EARTH_RADIUS, EARTH_RADIUS + height],
        [PI / 2.0 - a, PI / 2.0 + a],
        [PI - a, PI + a],
    )?;
    Ok(dry_air_case("custom", sector, bubble, end_time, cells))
}

impl CaseSpec {
    /// Same case without the bubble.
    pub fn unperturbed(&self) -> CaseSpec {
        CaseSpec {
            bubble: None,
            ..self.clone()
        }
    }

    pub fn grid(&self, cells: [usize; 3]) -> Result<MacGrid> {
        MacGrid::new(self.sector, cells[0], cells[1], cells[2])
    }

    /// Hydrostatic base state at every stored position, ghosts included.
    pub fn base_state(&self, grid: &MacGrid) -> Result<FieldSet> {
        hydrostatic_base_state(&self.base, grid)
    }

    /// Base state plus bubble, with `T` recovered from `Θ0 + ΔΘ` at base pressure.
    pub fn initial_state(&self, grid: &MacGrid, base: &FieldSet) -> FieldSet {
        let mut s = base.clone();
        if let Some(b) = &self.bubble {
            let p = base.p();
            s.get_mut(Variable::Temperature).par_fill_interior(|i, j, k| {
                let x = grid.coords(Location::Center, i, j, k);
                let th = self.base.theta0 + bubble_perturbation(b, &self.sector, x);
                temperature_from_theta(&self.gas, p.get(i, j, k), th, self.base.p00)
            });
        }
        s
    }

    /// Model with well-balanced gravity, free-slip walls and the base pressure as reference.
    pub fn model(&self, grid: &MacGrid, base: &FieldSet) -> Model {
        let base_arc = Arc::new(base.clone());
        let bc = BoundaryConditions::free_slip(Some(base_arc));
        Model::new(grid.clone(), self.gas, self.env, bc, self.base.p00)
            .with_gravity(balanced_gravity(grid, &self.gas, base))
            .with_reference(ReferencePressure::Field(Arc::new(base.p().clone())))
    }

    /// `Θ - Θ0` at cell centers.
    pub fn theta_perturbation(&self, state: &FieldSet) -> Field {
        let mut f = state.p().clone();
        let (p, t) = (state.p(), state.temp());
        f.par_fill_interior(|i, j, k| {
            potential_temperature(&self.gas, p.get(i, j, k), t.get(i, j, k), self.base.p00) - self.base.theta0
        });
        f
    }
}

/// Analytic hydrostatic state with zero velocity, ghosts included.
pub fn hydrostatic_base_state(base: &HydrostaticBase, grid: &MacGrid) -> Result<FieldSet> {
    let r1 = grid.sector.r[0];
    // Highest point touched, the top ghost center.
    base.at(grid.r_c(grid.nr() as isize) - r1)?;
    Ok(FieldSet::from_fn(grid, |v, r, _, _| {
        let s = base.at(r - r1).expect("checked at the top ghost");
        match v {
            Variable::Pressure => s.p,
            Variable::Temperature => s.t,
            _ => 0.0,
        }
    }))
}

/// Height of the centroid of positive `ΔΘ` above the bottom wall.
pub fn center_of_mass_height(grid: &MacGrid, dtheta: &Field) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    dtheta.for_each_interior(|i, j, k| {
        let w = dtheta.get(i, j, k).max(0.0) * grid.volume_weight(Location::Center, i, j, k);
        num += w * (grid.r_c(i) - grid.sector.r[0]);
        den += w;
    });
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Largest mismatch of a cell field under reflection about the θ and φ mid-planes.
pub fn reflection_asymmetry(f: &Field) -> f64 {
    let n = f.n.map(|x| x as isize);
    let mut worst = 0.0f64;
    f.for_each_interior(|i, j, k| {
        let v = f.get(i, j, k);
        worst = worst
            .max((v - f.get(i, n[1] - 1 - j, k)).abs())
            .max((v - f.get(i, j, n[2] - 1 - k)).abs());
    });
    worst
}

/// Summary of the bubble at one output time.
#[derive(Clone, Debug, PartialEq)]
pub struct BubbleDiagnostics {
    pub step: usize,
    pub time: f64,
    pub center_height: f64,
    pub max_dtheta: f64,
    pub min_dtheta: f64,
    pub asymmetry: f64,
    pub max_speed: f64,
}

pub fn bubble_diagnostics(case: &CaseSpec, grid: &MacGrid, state: &FieldSet, step: usize, time: f64) -> BubbleDiagnostics {
    let dth = case.theta_perturbation(state);
    let (lo, hi) = dth
        .interior_values()
        .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
    let max_speed = (1..4).map(|v| state.fields[v].max_abs()).fold(0.0, f64::max);
    BubbleDiagnostics {
        step,
        time,
        center_height: center_of_mass_height(grid, &dth),
        max_dtheta: hi,
        min_dtheta: lo,
        asymmetry: reflection_asymmetry(&dth),
        max_speed,
    }
}

/// Result of a benchmark run.
#[derive(Clone, Debug)]
pub struct CaseRun {
    pub grid: MacGrid,
    pub state: FieldSet,
    pub diagnostics: Vec<BubbleDiagnostics>,
    pub reports: Vec<StepReport>,
}

/// Runs `steps` steps, recording diagnostics at step 0 and every `every` steps
/// and passing each recorded state to `snapshot`.
pub fn run_case(
    case: &CaseSpec,
    grid: &MacGrid,
    cfg: &PicardConfig,
    steps: usize,
    every: usize,
    mut snapshot: impl FnMut(&BubbleDiagnostics, &FieldSet) -> Result<()>,
) -> Result<CaseRun> {
    if let Some(b) = &case.bubble {
        b.validate()?;
    }
    let base = case.base_state(grid)?;
    let model = case.model(grid, &base);
    let mut u0 = case.initial_state(grid, &base);
    model.bc.apply(grid, &mut u0, 0.0);
    let first = bubble_diagnostics(case, grid, &u0, 0, 0.0);
    snapshot(&first, &u0)?;
    let mut diagnostics = vec![first];
    let every = every.max(1);
    let (state, reports) = advance(&model, cfg, &u0, 0.0, steps, |rep, u| {
        if rep.step % every == 0 || rep.step == steps {
            let d = bubble_diagnostics(case, grid, u, rep.step, rep.time);
            log::info!(
                "{} step {} t={:.1}s z_c={:.2}m dTheta=[{:.4}, {:.4}] |u|max={:.3e}",
                case.name,
                d.step,
                d.time,
                d.center_height,
                d.min_dtheta,
                d.max_dtheta,
                d.max_speed
            );
            snapshot(&d, u)?;
            diagnostics.push(d);
        }
        Ok(())
    })?;
    Ok(CaseRun {
        grid: grid.clone(),
        state,
        diagnostics,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal1_peak_and_edge() {
        let c = build_thermal1();
        let b = c.bubble.unwrap();
        assert_eq!(b.at_distance(0.0), 2.0);
        assert!(b.at_distance(1.0).abs() < 1e-15);
        assert_eq!(b.at_distance(1.5), 0.0);
    }

    #[test]
    fn thermal2_peak_is_half_kelvin() {
        let b = build_thermal2().bubble.unwrap();
        assert_eq!(b.at_distance(0.0), 0.5);
    }

    #[test]
    fn thermal1_gamma() {
        let c = build_thermal1();
        assert!((c.gas.gamma - 1000.0 / 713.0).abs() < 1e-12);
        assert!((c.gas.gamma - 1.40252).abs() < 1e-5);
    }

    #[test]
    fn surface_base_state() {
        let c = build_thermal1();
        let s = c.base.at(0.0).unwrap();
        assert_eq!(s.p, 1e5);
        assert_eq!(s.t, 300.0);
    }

    #[test]
    fn thermal2_domain_is_one_kilometre_tall() {
        let c = build_thermal2();
        assert!((c.sector.r[1] - c.sector.r[0] - 1000.0).abs() < 1e-6);
        assert_eq!(c.bubble.unwrap().height, 260.0);
    }

    #[test]
    fn thermal2_grid_spacing() {
        let g = build_thermal2().grid([50, 50, 50]).unwrap();
        assert!((g.h[1] - (1.0 / 6371.0) / 50.0).abs() < 1e-18);
    }

    #[test]
    fn initial_perturbation_peak_matches_amplitude_on_odd_grid() {
        let c = build_thermal2();
        // Bubble center at 260 m lies on a cell center for dr = 40 m, n = 25, odd lateral counts.
        let g = c.grid([25, 25, 25]).unwrap();
        let base = c.base_state(&g).unwrap();
        let s = c.initial_state(&g, &base);
        let d = c.theta_perturbation(&s);
        assert!((d.max_abs() - 0.5).abs() < 1e-9, "{}", d.max_abs());
        assert!(reflection_asymmetry(&d) < 1e-12);
    }
}
