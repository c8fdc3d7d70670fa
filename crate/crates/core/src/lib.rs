//! Numerical toolkit for local kinetic-energy densities, plane-wave
//! superpositions and variational solutions of the time-independent
//! Schrödinger equation.
//!
//! Everything is expressed in Hartree atomic units (ħ = m = e = 1, lengths
//! in bohr, energies in hartree). [`hydrogen::hartree_to_ev`] converts for
//! display.
//!
//! Module map:
//!
//! - [`grid`]: uniform grids, quadrature and finite differences.
//! - [`hydrogen`]: closed-form hydrogen ground-state profiles.
//! - [`densities`]: gradient and Laplacian kinetic-energy densities, local
//!   momentum, local `L_z` and integrated energy reports.
//! - [`synthesis`]: wavefunctions as sums of constant-amplitude plane waves.
//! - [`eigen`]: tridiagonal inverse iteration and variational minimization.
//! - [`interference`]: multi-slit screen patterns.
//! - [`momentum`]: spherical (sinc) transforms to momentum amplitudes.
//! - [`sampling`]: the seeded generator shared by every stochastic routine.
//! - [`cli`]: the `qedens` command-line front end.

pub mod cli;
pub mod densities;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod hydrogen;
pub mod interference;
pub mod momentum;
pub mod sampling;
pub mod synthesis;
pub mod table;

pub use error::{Error, Result};
pub use num_complex::Complex64;
