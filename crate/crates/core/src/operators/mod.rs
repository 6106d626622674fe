//! Discrete spatial operators.
//!
//! `D = D_r + D_θ + D_φ` collects every term differentiating along a single
//! direction and is treated implicitly by the sweeps. `D_M` holds mixed
//! derivatives, metric couplings and Coriolis terms and is applied explicitly.
//! Coefficients are always frozen at a [`CoefficientState`].

mod coefficient;
mod mixed;
mod pencil;

pub use coefficient::{
    stress_from_gradient, velocity_gradient, viscous_heating, CoefficientState, GradTensor, S_PP, S_RP, S_RR,
    S_RT, S_TP, S_TT,
};
pub use mixed::apply_mixed;
pub use pencil::{apply_direction, assemble_pencil, pencil_shape, raw_blocks, sweep, PencilBlocks};

use crate::grid::{Direction, FieldSet, MacGrid};
use crate::thermo::{Environment, GasParams};

/// `(D_r + D_θ + D_φ) · state` with coefficients from `cs`.
pub fn apply_explicit_d(cs: &CoefficientState, state: &FieldSet, grid: &MacGrid, gas: &GasParams) -> FieldSet {
    let mut out = FieldSet::zeros(grid);
    for d in Direction::ALL {
        apply_direction(d, cs, state, grid, gas, &mut out);
    }
    out
}

/// `D_M · state` with coefficients from `cs`.
pub fn apply_explicit_dm(
    cs: &CoefficientState,
    state: &FieldSet,
    grid: &MacGrid,
    gas: &GasParams,
    env: &Environment,
) -> FieldSet {
    let mut out = FieldSet::zeros(grid);
    apply_mixed(cs, state, grid, gas, env, &mut out);
    out
}
