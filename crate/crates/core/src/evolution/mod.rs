//! Time-domain simulation of the field coupled to a discretized oscillator
//! bath, with the (free, scattered) split, energy ledger, symplectic and
//! time-reversal audits, and the Langevin-truncation experiment.

pub mod basis;
pub mod bath;
pub mod energy;
pub mod experiment;
pub mod fit;
pub mod integrator;
pub mod longitudinal;
pub mod reversal;
pub mod split;
pub mod symplectic;
pub mod system;

pub use basis::{PolarizationFilter, RealModeBasis};
pub use bath::{BathConfig, BathDiscretization};
pub use integrator::{integrate, IntegratorConfig, Scheme, Trajectory};
pub use split::{split_free_scattered, DiscreteModePropagators, PropagatorSource, SplitResult};
pub use system::{assemble_system, LinearSystem, MediumLayout, State};
