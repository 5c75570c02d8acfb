//! Simulation and design toolkit for a single-step multi-target controlled-phase
//! gate acting on microwave-photonic qubits.
//!
//! The modeled system is a register of `n` microwave cavities dispersively
//! coupled to a single flux qutrit (levels `|g>`, `|e>`, `|f>`). Each cavity
//! hosts one qubit in its `{vacuum, single-photon}` subspace; a single free
//! evolution of duration `pi/chi` realizes a controlled-phase gate in which
//! cavity 1 simultaneously controls phase flips on all other cavities.
//!
//! Module map:
//! - [`hilbert`] — truncated Fock/qutrit operator algebra on the composite space
//! - [`hamiltonian`] — interaction-picture Hamiltonians (wanted couplings,
//!   unwanted couplings, inter-cavity crosstalk) and the diagonal effective model
//! - [`lindblad`] — master-equation integration with cavity decay, qutrit
//!   relaxation and dephasing
//! - [`gate`] — ideal gate unitary, analytic propagator, benchmark states,
//!   fidelity
//! - [`design`] — closed-form solution of the gate design constraints
//! - [`experiments`] — configuration, single runs, parameter sweeps, CSV output

pub mod design;
pub mod error;
pub mod experiments;
pub mod gate;
pub mod hamiltonian;
pub mod hilbert;
pub mod linalg;
pub mod lindblad;

pub use error::{Error, Result};
pub use hilbert::{BasisLabel, Operator, QutritLevel, SpaceDescriptor, StateVector};
pub use hamiltonian::{EffectiveHamiltonian, RotatingTerm, RotatingTermHamiltonian, SystemParams};
pub use lindblad::{
    DecoherenceParams, DensityMatrix, Dissipators, EvolveOutput, SolverMethod, SolverOptions,
};
pub use design::DesignSolution;
pub use experiments::{RunConfig, SweepOutcome, SweepRecord};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
