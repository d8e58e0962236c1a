//! Numerical toolkit for polaritons in dispersive, absorbing dielectrics.
//!
//! The crate is organised bottom-up:
//!
//! * [`medium`] — Lorentz permittivity models, susceptibility kernels and
//!   Kramers–Kronig diagnostics.
//! * [`dispersion`] — complex polariton roots certified by winding numbers.
//! * [`propagators`] — residue-sum and Bromwich (FFT) evaluations of the modal
//!   propagators, sum rules and the scalar Green function.
//! * [`greens`] — dyadic Green tensors, plane-wave mode sums, depolarization
//!   dyads and a coupled-dipole Lippmann–Schwinger solver.
//! * [`hopfield`] — exact lossless Hopfield diagonalization.
//! * [`quasimode`] — weak-loss windowed commutator integrals.
//! * [`evolution`] — a time-domain simulator of the field coupled to a
//!   discretized oscillator bath.
//!
//! Units are natural: `c = ħ = 1`, frequencies in units of a reference
//! frequency chosen by the caller.

pub mod dispersion;
pub mod error;
pub mod evolution;
pub mod greens;
pub mod hopfield;
pub mod medium;
pub mod numerics;
pub mod propagators;
pub mod quasimode;
pub mod tolerances;

pub use error::{Error, Result};
pub use medium::{LorentzResonance, Medium, SpatialMediumMap};
pub use num_complex::Complex64;
