//! Manufactured solutions, convergence studies and independent residual checks.

pub mod conservative;
pub mod dense;
pub mod jet;
pub mod manufactured;
pub mod study;

pub use dense::{dense_advance, dense_picard_step};
pub use manufactured::{manufactured_sources, ManufacturedCase, ManufacturedForcing, ManufacturedValues};
pub use conservative::{conservative_residual, manufactured_conservative_residual, ConservativeResidual};
pub use study::{
    convergence_study, error_norms, mach_sweep, mms_model, observed_order, pressure_fluctuation, run_mms,
    step_count, tcr, tcr_fields, tcr_study, well_prepared_divergence, well_prepared_pressure, ErrorNorms,
    ErrorReport, MachRow, MmsOutcome, TcrRow,
};
