//! Dense truncated-Fock simulation of the bandgap quantum coupler.
//!
//! A central bosonic mode `a` is coupled linearly to `N` outer modes `b_j`
//! under the resonant Hamiltonian
//!
//! ```text
//! H = w a†a + w Σ b_j†b_j + Σ g_j (b_j a† + a b_j†)
//! ```
//!
//! The crate builds that Hamiltonian on a truncated multimode Fock basis,
//! evaluates the propagator both by brute-force exponentiation and through
//! the symmetric su(2) product
//!
//! ```text
//! U(t) = e^{εw N̂} e^{εf Σ g_j a†b_j} e^{εh Σ g_j a b_j†} e^{εf Σ g_j a†b_j},   ε = −it
//! ```
//!
//! and reads off the conditional phase gates the coupler realises at its
//! special interaction times.
//!
//! The crate is `no_std` and only needs `alloc`. IO, CLI handling and report
//! formats live in the `coupler-lab` companion crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod coupler;
mod error;
pub mod fock;
pub mod gates;
pub mod matrix;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub mod prelude {
    pub use crate::analysis::{
        entanglement_profile, extract_gate, gate_time, scan_times, schmidt, truth_table,
        EntanglementProfile, ExtractedGate, GateTimeSpec, ScanHit, SchmidtDecomposition,
        TruthTable, TruthTableRow,
    };
    pub use crate::coupler::{
        algebra_check, build_hamiltonian, exact_propagator, factor_coefficients,
        factorized_propagator, verify_factorization, AlgebraCheck, CouplerParams,
        FactorCoefficients, FactorizationReport, SignConvention,
    };
    pub use crate::fock::{
        annihilation, basis_state, creation, excitation_blocks, number_operator, total_number,
        DenseOperator, ExcitationBlock, ModeLayout, StateVector,
    };
    pub use crate::gates::QubitGate;
    pub use crate::matrix::{
        expm_general, expm_hermitian, is_unitary, phase_distance, PhaseAlignedDistance,
    };
    pub use crate::{CMatrix, CVector, Error, Result, C64};
}
