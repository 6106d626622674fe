//! Well-prepared manufactured solution and its source terms.

use std::f64::consts::PI;

use super::jet::{Jet, Scalar};
use crate::boundary::BoundaryData;
use crate::grid::{Direction, Field, FieldSet, Location, MacGrid, ShellSector, Variable};
use crate::thermo::{density, Environment, GasParams};
use crate::timestepper::Forcing;

/// Pressure scale of the manufactured solution.
pub const MMS_P0: f64 = 6250.0;
/// Ratio of specific heats of the manufactured solution.
pub const MMS_GAMMA: f64 = 1.6;
/// Specific heat at constant volume; any positive value keeps `ρ ≡ 1`.
pub const MMS_CV: f64 = 1.0;

/// Scales of the manufactured solution with `ρ0 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub u0: f64,
    pub p0: f64,
    pub c0: f64,
    pub m0: f64,
    pub gas: GasParams,
}

/// Pointwise manufactured values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedValues {
    pub p: f64,
    pub u: [f64; 3],
    pub t: f64,
    pub rho: f64,
}

impl ManufacturedCase {
    /// Standard case: `p0 = 6250`, `γ = 1.6`, `μ = 1`, `Pr = 1`, `u0 = M0 c0`.
    pub fn with_mach(m0: f64) -> Self {
        let gas = GasParams::from_gamma(MMS_GAMMA, MMS_CV, 1.0, 1.0, 0.0).expect("valid MMS gas");
        ManufacturedCase::new(m0, MMS_P0, gas)
    }

    pub fn new(m0: f64, p0: f64, gas: GasParams) -> Self {
        let c0 = (gas.gamma * p0).sqrt();
        ManufacturedCase {
            u0: m0 * c0,
            p0,
            c0,
            m0,
            gas,
        }
    }

    /// Domain `[1,2] × [π/4, 3π/4] × [π/4, 7π/4]`.
    pub fn sector() -> ShellSector {
        ShellSector::new([1.0, 2.0], [PI / 4.0, 3.0 * PI / 4.0], [PI / 4.0, 7.0 * PI / 4.0])
            .expect("valid sector")
    }

    pub fn environment() -> Environment {
        Environment::NONE
    }

    /// `(p, u_r, u_θ, u_φ, T)` at a point, generic over the scalar type.
    pub fn eval<S: Scalar>(&self, r: S, th: S, ph: S, t: S) -> [S; 5] {
        let u0 = self.u0;
        let a = u0 * u0 / self.c0;
        let p = ((t * 5.0).sin() + 1.0 + (r * PI).cos().sqr() * (ph * 4.0).cos().sqr() * (th * 4.0).cos().sqr())
            * (u0 * u0)
            + self.p0;
        let ur = (t.sin() + 1.0) * u0 / (r.sqr() * 2.0)
            + ((t * 4.0).sin() + 1.0 + r.sqr().sin() * th.cos().cube() * ph.sin().sqr()) * a;
        let ut = ((t * 3.0 + 2.0).cos() + 1.0) * u0 / (th.sin() * 2.0)
            + (t.sin() + 1.0 + r.sqr().cos().cube() * th.cos().sqr() * ph.sin().cube()) * a;
        let up = ((t + 6.0).sin() + 1.0) * (u0 / 2.0)
            + ((t + 2.0).cos() + 1.0 + r.cos() * th.sin().cube() * ph.sin().sqr()) * a;
        let temp = p / (self.gas.cv * (self.gas.gamma - 1.0));
        [p, ur, ut, up, temp]
    }

    pub fn values(&self, x: [f64; 3], t: f64) -> ManufacturedValues {
        let [p, ur, ut, up, tt] = self.eval(x[0], x[1], x[2], t);
        ManufacturedValues {
            p,
            u: [ur, ut, up],
            t: tt,
            rho: density(&self.gas, p, tt),
        }
    }

    /// Exact state at every stored position, ghosts included.
    pub fn sample(&self, grid: &MacGrid, t: f64) -> FieldSet {
        FieldSet::from_fn(grid, |v, r, th, ph| self.eval(r, th, ph, t)[v as usize])
    }

    /// Jets of the five fields at a point.
    pub fn jets(&self, x: [f64; 3], t: f64) -> [Jet; 5] {
        self.eval(Jet::var(x[0], 0), Jet::var(x[1], 1), Jet::var(x[2], 2), Jet::var(t, 3))
    }

    /// Residual of the governing equations under the manufactured fields.
    pub fn residual(&self, env: &Environment, x: [f64; 3], t: f64) -> PdeTerms {
        pde_terms(&self.gas, env, x, &self.jets(x, t))
    }

    /// Analytic divergence of the manufactured velocity.
    pub fn divergence(&self, x: [f64; 3], t: f64) -> f64 {
        let j = self.jets(x, t);
        let g = gradient_tensor(x, &j);
        g[0][0] + g[1][1] + g[2][2]
    }
}

impl BoundaryData for ManufacturedCase {
    fn velocity(&self, comp: Direction, x: [f64; 3], t: f64) -> f64 {
        self.eval(x[0], x[1], x[2], t)[1 + comp.index()]
    }
}

/// Time-derivative and spatial parts of each equation, ordered `(p, u_r, u_θ, u_φ, T)`.
/// `spatial` holds advection, pressure, viscous, heating and Coriolis terms;
/// `gravity` is the body-force term of the `u_r` equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeTerms {
    pub dt: [f64; 5],
    pub spatial: [f64; 5],
    pub gravity: f64,
}

impl PdeTerms {
    /// Full residual `∂U/∂t + N(U) + G`.
    pub fn total(&self) -> [f64; 5] {
        let mut r: [f64; 5] = std::array::from_fn(|i| self.dt[i] + self.spatial[i]);
        r[1] += self.gravity;
        r
    }
}

/// Velocity gradient `G_ab` (derivative `a`, component `b`) from field jets.
fn gradient_tensor(x: [f64; 3], j: &[Jet; 5]) -> [[f64; 3]; 3] {
    let r = x[0];
    let s = x[1].sin();
    let ct = x[1].cos() / s;
    let (ur, ut, up) = (&j[1], &j[2], &j[3]);
    [
        [ur.g[0], ut.g[0], up.g[0]],
        [ur.g[1] / r - ut.v / r, ut.g[1] / r + ur.v / r, up.g[1] / r],
        [
            ur.g[2] / (r * s) - up.v / r,
            ut.g[2] / (r * s) - up.v * ct / r,
            up.g[2] / (r * s) + ur.v / r + ut.v * ct / r,
        ],
    ]
}

/// Evaluates the continuous equations in physical spherical components from
/// jets of `(p, u_r, u_θ, u_φ, T)` at `x`.
pub fn pde_terms(gas: &GasParams, env: &Environment, x: [f64; 3], j: &[Jet; 5]) -> PdeTerms {
    let [r, th, ph] = x;
    let s = th.sin();
    let ct = th.cos() / s;
    let [jp, jur, jut, jup, jt] = j;
    let u = [jur.v, jut.v, jup.v];
    let pp = jp.v + gas.pi_inf;
    let rho = density(gas, jp.v, jt.v);
    let mu = gas.mu;
    let kappa = gas.kappa();
    let g1 = gas.gamma - 1.0;

    let grad = |f: &Jet| [f.g[0], f.g[1] / r, f.g[2] / (r * s)];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let lap = |f: &Jet| {
        f.h[0][0] + 2.0 * f.g[0] / r + (f.h[1][1] + ct * f.g[1]) / (r * r) + f.h[2][2] / (r * r * s * s)
    };

    let g = gradient_tensor(x, j);
    let div = g[0][0] + g[1][1] + g[2][2];
    let sig = crate::operators::stress_from_gradient(mu, &g);
    let phi = sig[0] * g[0][0]
        + sig[1] * g[1][1]
        + sig[2] * g[2][2]
        + sig[3] * (g[0][1] + g[1][0])
        + sig[4] * (g[0][2] + g[2][0])
        + sig[5] * (g[1][2] + g[2][1]);
    let heat = kappa * lap(jt) + phi;

    let sp = dot(u, grad(jp)) + gas.gamma * pp * div - g1 * heat;
    let st = dot(u, grad(jt)) + g1 * jt.v * div - g1 * jt.v / pp * heat;

    // Divergence as a jet for its gradient.
    let rj = Jet::var(r, 0);
    let thj = Jet::var(th, 1);
    let sj = thj.sin();
    let ctj = thj.cos() / sj;
    let div_j = jur.d(0) + *jur * 2.0 / rj + (jut.d(1) + *jut * ctj) / rj + jup.d(2) / (rj * sj);
    let grad_div = grad(&div_j);

    let r2 = r * r;
    let vlap = [
        lap(jur) - 2.0 * jur.v / r2 - 2.0 / (r2 * s) * (jut.g[1] * s + jut.v * th.cos()) - 2.0 / (r2 * s) * jup.g[2],
        lap(jut) - jut.v / (r2 * s * s) + 2.0 / r2 * jur.g[1] - 2.0 * th.cos() / (r2 * s * s) * jup.g[2],
        lap(jup) - jup.v / (r2 * s * s) + 2.0 / (r2 * s) * jur.g[2] + 2.0 * th.cos() / (r2 * s * s) * jut.g[2],
    ];
    let w = env.omega_spherical(th, ph);
    let cor = [
        w[1] * u[2] - w[2] * u[1],
        w[2] * u[0] - w[0] * u[2],
        w[0] * u[1] - w[1] * u[0],
    ];
    let gp = grad(jp);
    let mom: [f64; 3] = std::array::from_fn(|b| {
        let adv = u[0] * g[0][b] + u[1] * g[1][b] + u[2] * g[2][b];
        adv + gp[b] / rho - mu / rho * (vlap[b] + grad_div[b] / 3.0) + 2.0 * cor[b]
    });
    PdeTerms {
        dt: [jp.g[3], jur.g[3], jut.g[3], jup.g[3], jt.g[3]],
        spatial: [sp, mom[0], mom[1], mom[2], st],
        gravity: env.gravity,
    }
}

/// Manufactured source terms at each variable's own location.
#[derive(Clone, Copy, Debug)]
pub struct ManufacturedForcing {
    pub case: ManufacturedCase,
    pub env: Environment,
}

impl ManufacturedForcing {
    pub fn new(case: ManufacturedCase, env: Environment) -> Self {
        ManufacturedForcing { case, env }
    }
}

/// Evaluates `f(var, x)` for all interior positions of every variable.
pub(crate) fn sample_interior(grid: &MacGrid, f: impl Fn(Variable, [f64; 3]) -> f64 + Sync) -> FieldSet {
    let mut out = FieldSet::zeros(grid);
    for v in Variable::ALL {
        let loc = v.location();
        out.get_mut(v).par_fill_interior(|i, j, k| f(v, grid.coords(loc, i, j, k)));
    }
    out
}

impl Forcing for ManufacturedForcing {
    fn source(&self, grid: &MacGrid, t: f64) -> FieldSet {
        sample_interior(grid, |v, x| self.case.residual(&self.env, x, t).total()[v as usize])
    }
}

/// Manufactured source fields at time `t`.
pub fn manufactured_sources(case: &ManufacturedCase, grid: &MacGrid, t: f64) -> FieldSet {
    ManufacturedForcing::new(*case, ManufacturedCase::environment()).source(grid, t)
}

/// `(max p - min p) / p0` of the manufactured pressure sampled at cell centers.
pub fn pressure_spread(case: &ManufacturedCase, grid: &MacGrid, t: f64) -> f64 {
    let p = case.sample(grid, t);
    let (lo, hi) = p
        .p()
        .interior_values()
        .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
    (hi - lo) / case.p0
}

/// `l2(∇·u) / u0` of the manufactured velocity at cell centers.
pub fn divergence_ratio(case: &ManufacturedCase, grid: &MacGrid, t: f64) -> f64 {
    let mut f = Field::zeros(grid, Location::Center);
    f.par_fill_interior(|i, j, k| case.divergence(grid.coords(Location::Center, i, j, k), t));
    f.l2_norm(grid) / case.u0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_velocity_at_reference_point() {
        let c = ManufacturedCase::with_mach(1e-2);
        let v = c.values([1.0, PI / 2.0, PI], 0.0);
        let want = c.u0 / 2.0 + c.u0 * c.u0 / c.c0;
        assert!((v.u[0] - want).abs() < 1e-14);
    }

    #[test]
    fn density_is_one_everywhere() {
        let c = ManufacturedCase::with_mach(1e-1);
        for &(r, t) in &[(1.0, 0.0), (1.3, 0.7), (1.9, 2.0)] {
            let v = c.values([r, 1.1, 2.2], t);
            assert!((v.rho - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sound_speed_is_one_hundred() {
        let c = ManufacturedCase::with_mach(1e-2);
        assert!((c.c0 - 100.0).abs() < 1e-12);
        assert!((c.u0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pressure_source_time_derivative_at_zero() {
        let c = ManufacturedCase::with_mach(1e-2);
        let terms = c.residual(&Environment::NONE, [1.5, 1.0, 2.0], 0.0);
        assert!((terms.dt[0] - 5.0 * c.u0 * c.u0).abs() < 1e-12);
    }

    #[test]
    fn constant_state_has_zero_residual() {
        let gas = GasParams::from_gamma(1.6, 1.0, 0.0, 1.0, 0.0).unwrap();
        let mk = |v: f64| Jet::constant(v);
        let j = [mk(6250.0), mk(0.3), mk(-0.2), mk(0.1), mk(6250.0 / 0.6)];
        let t = pde_terms(&gas, &Environment::NONE, [1.5, 1.0, 2.0], &j);
        // Constant spherical components are not a uniform flow, so the
        // pressure row still sees a divergence.
        assert!(t.spatial[0].abs() > 0.0);
        let j0 = [mk(6250.0), mk(0.0), mk(0.0), mk(0.0), mk(6250.0 / 0.6)];
        let t0 = pde_terms(&gas, &Environment::NONE, [1.5, 1.0, 2.0], &j0);
        assert!(t0.total().iter().all(|v| *v == 0.0));
    }
}
