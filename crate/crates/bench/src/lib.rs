//! Fixtures shared by the benchmarks.

use causalthermo_core::channels::{gad, phase_flip};
use causalthermo_core::KrausChannel;

/// `(R, T)` or `(R, R, T)` at the given generalized amplitude damping and
/// phase flip parameters.
pub fn slot_channels(p: f64, lambda: f64, q: f64, arity: usize) -> Vec<KrausChannel> {
    let r = gad(p, lambda).expect("valid parameters");
    let t = phase_flip(q).expect("valid parameters");
    if arity == 2 {
        vec![r, t]
    } else {
        vec![r.clone(), r, t]
    }
}

/// Channels used by the ergotropy sweep.
pub fn ergotropy_channels(arity: usize) -> Vec<KrausChannel> {
    slot_channels(1.0 / 3.0, 0.5, 0.0, arity)
}
