//! Higher-order processes and their contraction with slot channels.

mod comb;
mod contraction;
mod io;
mod structure;
mod validate;
mod vectors;
mod zoo;

pub use comb::{
    apply_comb, comb_ising2, comb_ising3, comb_markov, comb_to_process_matrix, ising_hamiltonian,
    ising_unitary, CombRecipe, CombStep,
};
pub use contraction::{apply_process, apply_process_matrix, apply_process_vector};
pub use io::{parse_process, write_process};
pub use structure::{mixture, Process, ProcessMatrix, ProcessStructure, ProcessVector, SlotSpec};
pub use validate::{validate_sampled, ValidationReport, SAMPLE_ENV_DIM};
pub use vectors::{
    identity_link, w_chain, w_compose, w_lugano, w_replacement, w_switch2, w_switch3, CausalOrder,
};
pub use zoo::{AuxState, LuganoWiring, ProcessKind, Superchannel};
