//! Stiffened-gas thermodynamics and the hydrostatic reference atmosphere.

use crate::error::{Error, Result};

/// Stiffened-gas parameters. `gamma` is always `cp / cv`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasParams {
    pub gamma: f64,
    pub cp: f64,
    pub cv: f64,
    /// Dynamic viscosity.
    pub mu: f64,
    pub prandtl: f64,
    pub pi_inf: f64,
}

impl GasParams {
    pub fn new(cp: f64, cv: f64, mu: f64, prandtl: f64, pi_inf: f64) -> Result<Self> {
        if !(cv > 0.0 && cp > cv) {
            return Err(Error::InvalidParameter(format!(
                "need cp > cv > 0, got cp = {cp}, cv = {cv}"
            )));
        }
        if !(mu >= 0.0 && prandtl > 0.0 && pi_inf >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need mu >= 0, Pr > 0, pi_inf >= 0, got {mu}, {prandtl}, {pi_inf}"
            )));
        }
        Ok(GasParams {
            gamma: cp / cv,
            cp,
            cv,
            mu,
            prandtl,
            pi_inf,
        })
    }

    /// Gas with given `gamma` and `cv`.
    pub fn from_gamma(gamma: f64, cv: f64, mu: f64, prandtl: f64, pi_inf: f64) -> Result<Self> {
        GasParams::new(gamma * cv, cv, mu, prandtl, pi_inf)
    }

    /// Dry air: cp = 1000, cv = 713, Pr = 0.71, μ = 1.846e-5.
    pub fn dry_air() -> Self {
        GasParams::new(1000.0, 713.0, 1.846e-5, 0.71, 0.0).expect("valid constants")
    }

    /// Specific gas constant `cp - cv`.
    pub fn r_gas(&self) -> f64 {
        self.cp - self.cv
    }

    /// Thermal conductivity `μ cp / Pr`.
    pub fn kappa(&self) -> f64 {
        self.mu * self.cp / self.prandtl
    }
}

/// Constant gravity and planetary rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Environment {
    /// Gravitational acceleration magnitude, pointing towards decreasing r.
    pub gravity: f64,
    /// Angular velocity, Cartesian components with z along θ = 0.
    pub omega: [f64; 3],
}

impl Environment {
    pub const NONE: Environment = Environment {
        gravity: 0.0,
        omega: [0.0; 3],
    };

    pub fn new(gravity: f64, omega: [f64; 3]) -> Self {
        Environment { gravity, omega }
    }

    /// Rotation with rate `rate` about the polar axis.
    pub fn rotating(gravity: f64, rate: f64) -> Self {
        Environment {
            gravity,
            omega: [0.0, 0.0, rate],
        }
    }

    /// Spherical components `(ω_r, ω_θ, ω_φ)` at `(θ, φ)`.
    #[inline]
    pub fn omega_spherical(&self, theta: f64, phi: f64) -> [f64; 3] {
        let [wx, wy, wz] = self.omega;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        [
            wx * st * cp + wy * st * sp + wz * ct,
            wx * ct * cp + wy * ct * sp - wz * st,
            -wx * sp + wy * cp,
        ]
    }

    pub fn is_rotating(&self) -> bool {
        self.omega.iter().any(|&w| w != 0.0)
    }
}

/// Density `(p + π∞) / (cv (γ-1) T)`.
#[inline]
pub fn density(gas: &GasParams, p: f64, t: f64) -> f64 {
    (p + gas.pi_inf) / (gas.cv * (gas.gamma - 1.0) * t)
}

/// Density with positivity checks.
pub fn eos_density(gas: &GasParams, p: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !(p + gas.pi_inf > 0.0) {
        return Err(Error::NonPhysical(format!(
            "T = {t}, p + pi_inf = {} must both be positive",
            p + gas.pi_inf
        )));
    }
    Ok(density(gas, p, t))
}

/// Temperature from pressure and density.
pub fn eos_temperature(gas: &GasParams, p: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !(p + gas.pi_inf > 0.0) {
        return Err(Error::NonPhysical(format!(
            "rho = {rho}, p + pi_inf = {} must both be positive",
            p + gas.pi_inf
        )));
    }
    Ok((p + gas.pi_inf) / (gas.cv * (gas.gamma - 1.0) * rho))
}

/// Speed of sound `sqrt(γ (p + π∞) / ρ)`.
pub fn sound_speed(gas: &GasParams, p: f64, rho: f64) -> f64 {
    (gas.gamma * (p + gas.pi_inf) / rho).sqrt()
}

/// Exner function `(p / p00)^(R / cp)`.
pub fn exner(gas: &GasParams, p: f64, p00: f64) -> f64 {
    (p / p00).powf(gas.r_gas() / gas.cp)
}

/// Potential temperature `T (p00 / p)^(R / cp)`.
pub fn potential_temperature(gas: &GasParams, p: f64, t: f64, p00: f64) -> f64 {
    t / exner(gas, p, p00)
}

/// Temperature `Θ (p / p00)^(R / cp)` of potential temperature `theta` at pressure `p`.
pub fn temperature_from_theta(gas: &GasParams, p: f64, theta: f64, p00: f64) -> f64 {
    theta * exner(gas, p, p00)
}

/// Hydrostatic state of constant potential temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HydrostaticBase {
    pub p00: f64,
    pub theta0: f64,
    pub gravity: f64,
    pub gas: GasParams,
}

/// Pressure, temperature and density of a base state at one height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseState {
    pub p: f64,
    pub t: f64,
    pub rho: f64,
}

impl HydrostaticBase {
    /// Exner function `1 - g h / (cp Θ0)` at height `h` above the reference level.
    pub fn exner_at(&self, h: f64) -> f64 {
        1.0 - self.gravity * h / (self.gas.cp * self.theta0)
    }

    pub fn at(&self, h: f64) -> Result<BaseState> {
        let pi = self.exner_at(h);
        if !(pi > 0.0) {
            return Err(Error::NonPhysical(format!(
                "height {h} lies above the top of the adiabatic atmosphere"
            )));
        }
        let p = self.p00 * pi.powf(self.gas.cp / self.gas.r_gas());
        let t = self.theta0 * pi;
        let rho = eos_density(&self.gas, p, t)?;
        Ok(BaseState { p, t, rho })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_is_cp_over_cv() {
        let g = GasParams::dry_air();
        assert!((g.gamma - g.cp / g.cv).abs() <= 1e-12 * g.gamma);
    }

    #[test]
    fn dry_air_density_at_reference_conditions() {
        let g = GasParams::dry_air();
        let rho = density(&g, 1e5, 300.0);
        assert!((rho - 1e5 / (287.0 * 300.0)).abs() < 1e-12);
    }

    #[test]
    fn non_physical_states_rejected() {
        let g = GasParams::dry_air();
        assert!(eos_density(&g, 1e5, 0.0).is_err());
        assert!(eos_density(&g, -1.0, 300.0).is_err());
        assert!(eos_temperature(&g, 1e5, -1.0).is_err());
        assert!(GasParams::new(700.0, 713.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn hydrostatic_base_has_constant_potential_temperature() {
        let b = HydrostaticBase {
            p00: 1e5,
            theta0: 300.0,
            gravity: 9.80665,
            gas: GasParams::dry_air(),
        };
        for h in [0.0, 500.0, 5000.0] {
            let s = b.at(h).unwrap();
            let th = potential_temperature(&b.gas, s.p, s.t, b.p00);
            assert!((th - 300.0).abs() < 1e-9);
        }
    }

    #[test]
    fn polar_rotation_components() {
        let e = Environment::rotating(0.0, 2.0);
        let th = 0.7f64;
        let w = e.omega_spherical(th, 1.3);
        assert!((w[0] - 2.0 * th.cos()).abs() < 1e-15);
        assert!((w[1] + 2.0 * th.sin()).abs() < 1e-15);
        assert!(w[2].abs() < 1e-15);
    }
}
