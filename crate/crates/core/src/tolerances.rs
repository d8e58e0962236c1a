//! Numerical thresholds shared across modules.
//!
//! The physics consists of exact identities; every finite threshold below is
//! either a modelling choice or was fixed by a convergence study (see the
//! README section on tolerances). Keeping them in one place makes the
//! provenance auditable.

/// A Lorentz denominator `ω_n² − (ω + iγ_n)²` smaller than this multiple of
/// `ω_n²` is treated as a pole hit.
pub const POLE_PROXIMITY: f64 = 1e-12;

/// Newton polishing target for roots, relative to the magnitude of the
/// terms of the secular function (`ω_α²` away from permittivity poles).
pub const ROOT_RESIDUAL: f64 = 1e-12;

/// Largest acceptable distance of a winding-number estimate from an integer.
pub const WINDING_INTEGER_SLACK: f64 = 0.05;

/// Smallest edge length (relative to the rectangle diagonal) the adaptive
/// contour sampler may use before declaring the contour too close to a
/// zero or pole.
pub const CONTOUR_MIN_SEGMENT: f64 = 1e-13;

/// Sum-rule tolerance certifying a complete root set.
pub const SUM_RULE: f64 = 1e-8;

/// Residue-sum versus Bromwich inversion agreement (absolute).
pub const PROPAGATOR_ORACLE: f64 = 1e-6;

/// Relative agreement of the raw and the diagonalized Hopfield energy.
pub const HOPFIELD_DIAGONAL: f64 = 1e-10;

/// Relative error target of the adaptive Gauss–Kronrod integrator.
pub const QUADRATURE_REL: f64 = 1e-10;

/// Fraction of the windowed integrand allowed in the outer edge zones.
pub const WINDOW_EDGE_MASS: f64 = 0.01;

/// Width of each edge zone as a fraction of the full window width.
pub const WINDOW_EDGE_ZONE: f64 = 0.05;

/// Default window width in units of the resonance half-width `|Im Ω|`.
pub const WINDOW_WIDTH_IN_LINEWIDTHS: f64 = 1000.0;

/// Lower bound of the default window width relative to the window center.
pub const WINDOW_WIDTH_MIN_FRACTION: f64 = 1e-3;

/// Cell cap of the dense Lippmann–Schwinger solver.
pub const MAX_SCATTERER_CELLS: usize = 4000;

/// Reciprocal condition number below which a scattering system is singular.
pub const SINGULAR_RCOND: f64 = 1e-13;

/// Integration step must satisfy `Δt < STABILITY_MARGIN / ω_max`.
pub const STABILITY_MARGIN: f64 = 0.1;

/// Default energy-drift bound that aborts an integration mid-run.
pub const ENERGY_DRIFT_ABORT: f64 = 1e-6;

/// Loss of coupling-matrix Frobenius norm to the mode cutoff that triggers
/// a truncation warning.
pub const TRUNCATION_WARNING: f64 = 0.01;
