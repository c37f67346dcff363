//! Dense complex linear algebra over labelled tensor-product spaces.

mod layout;
mod matrix;
pub mod random;
mod spectral;

pub use layout::{
    partial_trace, partial_transpose, permute_systems, permute_vector, Subsystem, SystemLayout,
};
pub use matrix::{basis_ket, kron, kron_all, pauli, ComplexMatrix, C64, I, ONE, ZERO};
pub use spectral::{exp_hermitian, herm_eig, Eigen, HERMITIAN_TOL, PSD_CLIP};

pub(crate) use spectral::herm_eig_unchecked;
