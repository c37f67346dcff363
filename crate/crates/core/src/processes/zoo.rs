//! Named processes, each exposed as a map from slot channels to a channel on
//! `target ⊗ ancilla` with past `S_I Q_I` and future `S_O Q_O`.

use super::comb::{comb_ising2, comb_ising3, comb_to_process_matrix};
use super::contraction::apply_process;
use super::structure::{mixture, Process};
use super::vectors::{
    w_chain, w_compose, w_lugano, w_replacement, w_switch2, w_switch3, CausalOrder,
};
use crate::channels::{kraus_to_choi, ChoiOperator, DensityState, KrausChannel};
use crate::error::{check_range, Error, Result};
use crate::tensor::{permute_systems, ComplexMatrix, SystemLayout, C64, ZERO};
use std::fmt;
use std::str::FromStr;

/// State fed into the unused Lugano past qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxState {
    Zero,
    Plus,
}

impl AuxState {
    pub fn density(self) -> ComplexMatrix {
        match self {
            AuxState::Zero => ComplexMatrix::unit(2, 0, 0),
            AuxState::Plus => ComplexMatrix::from_fn(2, 2, |_, _| C64::new(0.5, 0.0)),
        }
    }
}

impl fmt::Display for AuxState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuxState::Zero => "zero",
            AuxState::Plus => "plus",
        })
    }
}

impl FromStr for AuxState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(AuxState::Zero),
            "plus" | "+" => Ok(AuxState::Plus),
            _ => Err(Error::InvalidState(format!("unknown auxiliary state `{s}`"))),
        }
    }
}

/// Roles of the three Lugano past and future qubits, as indices 1..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LuganoWiring {
    pub past_target: u8,
    pub past_ancilla: u8,
    pub past_auxiliary: u8,
    pub future_target: u8,
    pub future_ancilla: u8,
    pub future_discarded: u8,
    pub auxiliary: AuxState,
}

impl LuganoWiring {
    pub fn new(auxiliary: AuxState) -> Self {
        Self {
            past_target: 1,
            past_ancilla: 2,
            past_auxiliary: 3,
            future_target: 1,
            future_ancilla: 2,
            future_discarded: 3,
            auxiliary,
        }
    }

    fn validate(&self) -> Result<()> {
        let is_perm = |a: u8, b: u8, c: u8| {
            let mut v = [a, b, c];
            v.sort_unstable();
            v == [1, 2, 3]
        };
        if !is_perm(self.past_target, self.past_ancilla, self.past_auxiliary)
            || !is_perm(self.future_target, self.future_ancilla, self.future_discarded)
        {
            return Err(Error::InvalidPermutation(format!("{self:?}")));
        }
        Ok(())
    }
}

impl Default for LuganoWiring {
    fn default() -> Self {
        Self::new(AuxState::Zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessKind {
    /// Two slots in a definite order.
    Composition(CausalOrder),
    /// Three slots chained in the given order, e.g. `"ABC"` for `C∘B∘A`.
    Composition3(String),
    /// `q·W_{A→B} + (1−q)·W_{B→A}`.
    Mixture(f64),
    Switch2,
    Switch3,
    Ising2,
    Ising3,
    Lugano(LuganoWiring),
    /// Replacement by `diag(s, 1−s)`.
    Replacement(f64),
}

impl ProcessKind {
    /// Number of slots.
    pub fn arity(&self) -> usize {
        match self {
            ProcessKind::Composition(_)
            | ProcessKind::Mixture(_)
            | ProcessKind::Switch2
            | ProcessKind::Ising2
            | ProcessKind::Replacement(_) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessKind::Composition(CausalOrder::AThenB) => write!(f, "composition"),
            ProcessKind::Composition(CausalOrder::BThenA) => write!(f, "composition:BA"),
            ProcessKind::Composition3(o) if o == "ABC" => write!(f, "composition3"),
            ProcessKind::Composition3(o) => write!(f, "composition3:{o}"),
            ProcessKind::Mixture(q) => write!(f, "mixture:{q}"),
            ProcessKind::Switch2 => write!(f, "switch2"),
            ProcessKind::Switch3 => write!(f, "switch3"),
            ProcessKind::Ising2 => write!(f, "ising2"),
            ProcessKind::Ising3 => write!(f, "ising3"),
            ProcessKind::Lugano(_) => write!(f, "lugano"),
            ProcessKind::Replacement(s) if *s == 1.0 => write!(f, "replacement"),
            ProcessKind::Replacement(s) => write!(f, "replacement:{s}"),
        }
    }
}

impl FromStr for ProcessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidState(format!("unknown process `{s}`"));
        let number = |a: Option<&str>, default: Option<f64>| -> Result<f64> {
            match a {
                Some(a) => a
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidState(format!("bad parameter in `{s}`"))),
                None => default.ok_or_else(|| Error::InvalidState(format!("`{s}` needs a parameter"))),
            }
        };
        let kind = match name {
            "composition" => match arg {
                None | Some("AB") => ProcessKind::Composition(CausalOrder::AThenB),
                Some("BA") => ProcessKind::Composition(CausalOrder::BThenA),
                _ => return Err(bad()),
            },
            "composition3" => {
                let order = arg.unwrap_or("ABC");
                let mut sorted: Vec<char> = order.chars().collect();
                sorted.sort_unstable();
                if sorted != ['A', 'B', 'C'] {
                    return Err(bad());
                }
                ProcessKind::Composition3(order.to_string())
            }
            "mixture" => {
                let q = number(arg, None)?;
                check_range("q", q, 0.0, 1.0, "[0, 1]")?;
                ProcessKind::Mixture(q)
            }
            "replacement" => {
                let v = number(arg, Some(1.0))?;
                check_range("s", v, 0.0, 1.0, "[0, 1]")?;
                ProcessKind::Replacement(v)
            }
            "switch2" if arg.is_none() => ProcessKind::Switch2,
            "switch3" if arg.is_none() => ProcessKind::Switch3,
            "ising2" if arg.is_none() => ProcessKind::Ising2,
            "ising3" if arg.is_none() => ProcessKind::Ising3,
            "lugano" => ProcessKind::Lugano(LuganoWiring::new(match arg {
                Some(a) => a.parse()?,
                None => AuxState::Zero,
            })),
            _ => return Err(bad()),
        };
        Ok(kind)
    }
}

/// A built process together with the wiring that turns it into a channel on
/// `target ⊗ ancilla`.
#[derive(Debug, Clone)]
pub struct Superchannel {
    kind: ProcessKind,
    process: Process,
}

impl Superchannel {
    pub fn build(kind: ProcessKind) -> Result<Self> {
        let process: Process = match &kind {
            ProcessKind::Composition(o) => w_compose(*o, 2)?.into(),
            ProcessKind::Composition3(o) => {
                let labels: Vec<String> = o.chars().map(String::from).collect();
                let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
                w_chain(&refs, 2)?.into()
            }
            ProcessKind::Mixture(q) => {
                let ab = w_compose(CausalOrder::AThenB, 2)?.to_matrix();
                let ba = w_compose(CausalOrder::BThenA, 2)?.to_matrix();
                mixture(*q, &ab, &ba)?.into()
            }
            ProcessKind::Switch2 => w_switch2()?.into(),
            ProcessKind::Switch3 => w_switch3()?.into(),
            ProcessKind::Ising2 => comb_to_process_matrix(&comb_ising2())?.into(),
            ProcessKind::Ising3 => comb_to_process_matrix(&comb_ising3())?.into(),
            ProcessKind::Lugano(wiring) => {
                wiring.validate()?;
                w_lugano()?.into()
            }
            ProcessKind::Replacement(s) => {
                w_replacement(&DensityState::qubit_diagonal(*s)?)?.into()
            }
        };
        Ok(Self { kind, process })
    }

    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    pub fn process(&self) -> &Process {
        &self.process
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    /// Effective channel `S_I Q_I → S_O Q_O` for the given slot channels.
    pub fn output_channel(&self, channels: &[ChoiOperator]) -> Result<ChoiOperator> {
        let j = apply_process(&self.process, channels)?;
        match &self.kind {
            ProcessKind::Switch2 | ProcessKind::Switch3 | ProcessKind::Ising2 | ProcessKind::Ising3 => {
                Ok(j)
            }
            ProcessKind::Lugano(w) => lugano_effective(&j, w),
            _ => with_idle_ancilla(&j),
        }
    }

    pub fn output_channel_kraus(&self, channels: &[KrausChannel]) -> Result<ChoiOperator> {
        let chois: Vec<ChoiOperator> = channels.iter().map(kraus_to_choi).collect();
        self.output_channel(&chois)
    }
}

fn target_ancilla_layouts() -> (SystemLayout, SystemLayout) {
    (
        SystemLayout::qubits(&["S_I", "Q_I"]).expect("distinct"),
        SystemLayout::qubits(&["S_O", "Q_O"]).expect("distinct"),
    )
}

/// `J ⊗ J_𝟙` reordered to `S_I Q_I S_O Q_O`.
fn with_idle_ancilla(j: &ChoiOperator) -> Result<ChoiOperator> {
    if j.din() != 2 || j.dout() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a qubit channel, got {}→{}",
            j.din(),
            j.dout()
        )));
    }
    let id = kraus_to_choi(&KrausChannel::identity(2));
    let joint = j.matrix().kron(id.matrix());
    let layout = SystemLayout::qubits(&["S_I", "S_O", "Q_I", "Q_O"])?;
    let m = permute_systems(&joint, &layout, &["S_I", "Q_I", "S_O", "Q_O"])?;
    let (i, o) = target_ancilla_layouts();
    ChoiOperator::new_unchecked(m, i, o)
}

/// Feeds the auxiliary state into one past qubit and traces one future qubit:
/// `J_eff = Tr_{aux, disc}[(𝟙 ⊗ aᵀ ⊗ 𝟙) J]`.
fn lugano_effective(j: &ChoiOperator, w: &LuganoWiring) -> Result<ChoiOperator> {
    let label = |prefix: &str, k: u8| format!("{prefix}{k}");
    let order = [
        label("P", w.past_target),
        label("P", w.past_ancilla),
        label("P", w.past_auxiliary),
        label("F", w.future_target),
        label("F", w.future_ancilla),
        label("F", w.future_discarded),
    ];
    let refs: Vec<&str> = order.iter().map(String::as_str).collect();
    let m = permute_systems(j.matrix(), &j.layout(), &refs)?;
    let a = w.auxiliary.density();
    // m indices: ((x·2 + α)·8 + g·2 + d)
    let idx = |x: usize, alpha: usize, g: usize, d: usize| (x * 2 + alpha) * 8 + g * 2 + d;
    let mut out = ComplexMatrix::zeros(16, 16);
    for x in 0..4 {
        for xp in 0..4 {
            for g in 0..4 {
                for gp in 0..4 {
                    let mut acc = ZERO;
                    for alpha in 0..2 {
                        for alphap in 0..2 {
                            let c = a[(alpha, alphap)];
                            if c == ZERO {
                                continue;
                            }
                            for d in 0..2 {
                                acc += c * m[(idx(x, alpha, g, d), idx(xp, alphap, gp, d))];
                            }
                        }
                    }
                    out[(x * 4 + g, xp * 4 + gp)] = acc;
                }
            }
        }
    }
    let (i, o) = target_ancilla_layouts();
    ChoiOperator::new_unchecked(out, i, o)
}
