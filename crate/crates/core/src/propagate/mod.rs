//! Truncated-Fock-space Hamiltonians and time steppers: the numerical
//! counterpart of the closed forms in [`crate::analytic`].

mod hamiltonian;
mod phase;
mod stepper;

pub use hamiltonian::{
    build_branch_hamiltonian, build_hamiltonian, build_joint_hamiltonian, build_rabi_hamiltonian,
    CompiledHamiltonian, HamiltonianKind, HamiltonianSpec,
};
pub use phase::{extract_total_phase, geometric_phase_numeric, invariant_matrix, write_snapshot_csv};
pub use stepper::{propagate, Evolution, Snapshots, StateVector, StepMethod, StepperConfig};
