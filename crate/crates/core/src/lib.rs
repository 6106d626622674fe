//! Implicit direction-splitting solver for weakly compressible Navier-Stokes
//! flow in a spherical-shell sector.
//!
//! Unknowns `(p, u_r, u_θ, u_φ, T)` live on a MAC grid ([`grid`]). Each time
//! step is a Crank-Nicolson step solved by Picard iteration, where every
//! iteration performs three block-tridiagonal line sweeps ([`timestepper`],
//! [`blocktri`]). Velocities are physical components in m/s.

pub mod blocktri;
pub mod boundary;
pub mod cases;
pub mod error;
pub mod grid;
pub mod io;
pub mod operators;
pub mod thermo;
pub mod timestepper;
pub mod verification;

pub use error::{Error, Result};
