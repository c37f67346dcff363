//! Simulation of higher-order quantum processes (channel compositions,
//! quantum switches, non-Markovian combs, the Lugano process) and the
//! thermodynamic figures of merit they induce on a measured target qubit.
//!
//! Module map:
//!
//! * [`tensor`]: dense complex matrices over labelled tensor-product spaces.
//! * [`channels`]: Kraus and Choi channels, CPTP checks.
//! * [`processes`]: process vectors and matrices, combs, contraction with slot channels.
//! * [`thermo`]: entropy, free energy, ergotropy, and the measured-ancilla protocol.
//! * [`optimizer`]: multi-start simplex maximization of daemonic ergotropy.

pub mod channels;
pub mod error;
pub mod optimizer;
pub mod processes;
pub mod tensor;
pub mod thermo;

pub use channels::{ChoiOperator, DensityState, KrausChannel};
pub use error::{Error, Result};
pub use optimizer::{OptConfig, OptResult, ParamVector};
pub use processes::{Process, ProcessKind, ProcessMatrix, ProcessVector, Superchannel};
pub use tensor::{ComplexMatrix, SystemLayout, C64};
pub use thermo::{Hamiltonian, MeasurementBasis, ThermoFigure};
