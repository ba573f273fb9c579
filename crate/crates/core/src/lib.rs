//! Lewis-Riesenfeld solution of a two-level atom dispersively coupled to a
//! driven field mode, checked against a truncated-Fock-space propagator.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`]: Fock-space states and operators.
//! * [`analytic`]: closed-form coefficients, phases and trajectories.
//! * [`propagate`]: Hamiltonian builders and time steppers.
//! * [`experiments`]: Ramsey, cat-state and validity protocols.

pub mod analytic;
mod error;
pub mod experiments;
pub mod export;
mod params;
pub mod propagate;
pub mod qstate;

pub use num_complex::Complex64 as C64;

pub use analytic::{Branch, DriveProfile, InvariantCoeffs, PhaseRecord, SampledDrive};
pub use error::{Error, Result};
pub use params::{RegimeAdvisory, SystemParams};
pub use qstate::{FieldState, JointState, OperatorMatrix};
