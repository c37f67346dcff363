//! Thermodynamic figures of merit and the measured-ancilla protocol.
//!
//! Entropies are in bits. The free energy carries an explicit `ln 2`, and
//! thermal states use a base-2 exponent, so `β = log₂(p/(1−p))` gives
//! `τ = diag(p, 1−p)` for `H = |1⟩⟨1|`.

mod figures;
mod protocol;

pub use figures::{
    beta_from_gad, ergotropy, free_energy, passive_state, thermal_state, von_neumann_entropy,
    Hamiltonian, ThermoFigure,
};
pub use protocol::{
    ancilla_ket, ancilla_state, average_figure, daemonic_ergotropy, marginal_ergotropy,
    measurement_basis, pure_target, run_protocol, run_protocol_on_channel, Branch,
    MeasurementBasis, ZERO_BRANCH,
};

pub(crate) use figures::{energies_ascending, ergotropy_of};
pub(crate) use protocol::conditional_operators;
