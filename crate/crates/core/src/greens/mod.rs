//! Dyadic Green tensors.
//!
//! Conventions: `G` solves `∇×∇×G − ε ω² G = δ I` (with `c = 1`), so in a
//! homogeneous medium `G = [I + ∇∇/k²] e^{ikR}/(4πR)` with `k = ω√ε`, and
//! `S ≡ ∇×∇×G = ε ω² G + δ I`.

pub mod basis;
pub mod depolarization;
pub mod dyadic;
pub mod lippmann;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use basis::{polarization_vectors, BoxModeBasis, ModeIndex, Polarization};
pub use depolarization::{depolarization_dyad, ExclusionShape};
pub use dyadic::{g_dyadic_homogeneous, planewave_split, vacuum_time_propagators, VacuumKernels};
pub use lippmann::{
    lippmann_schwinger_solve, GreenBackground, HomogeneousBackground, ScatterCell, ScattererGrid, Site, SolvedGreen,
};

/// A 3×3 complex tensor.
pub type Dyad = Matrix3<Complex64>;

/// What a [`DyadicSample`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DyadKind {
    G,
    S,
    GPerp,
    GPar,
}

/// A Green tensor evaluated at one point pair and frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicSample {
    pub source: Vector3<f64>,
    pub field: Vector3<f64>,
    pub omega: Complex64,
    pub tensor: Dyad,
    pub kind: DyadKind,
}

/// Promotes a real dyad to complex.
pub fn complexify(m: &Matrix3<f64>) -> Dyad {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Largest entry modulus.
pub fn max_abs(m: &Dyad) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
