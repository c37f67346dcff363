//! Constructors for the concrete processes: compositions, switches, the
//! Lugano process and the replacement process.

use super::structure::{ProcessMatrix, ProcessStructure, ProcessVector, SlotSpec};
use crate::channels::DensityState;
use crate::error::{Error, Result};
use crate::tensor::{basis_ket, kron_all, ComplexMatrix, Subsystem, SystemLayout, C64, ONE, ZERO};

/// Definite order of two slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalOrder {
    /// `B ∘ A`.
    AThenB,
    /// `A ∘ B`.
    BThenA,
}

/// `|𝟙⟩⟩ = Σ_i |i⟩ ⊗ |i⟩` (unnormalized).
pub fn identity_link(dim: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = ONE;
    }
    v
}

pub(crate) fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn links(dim: usize, count: usize) -> Vec<C64> {
    let link = identity_link(dim);
    (1..count).fold(link.clone(), |acc, _| kron_vec(&acc, &link))
}

fn uniform_slots(labels: &[&str], dim: usize) -> Vec<SlotSpec> {
    labels.iter().map(|l| SlotSpec::uniform(l, dim)).collect()
}

fn chain_layout(head: &[Subsystem], order: &[&str], dim: usize, tail: &[Subsystem]) -> Result<SystemLayout> {
    let mut systems = head.to_vec();
    for l in order {
        systems.push(Subsystem::new(format!("{l}_I"), dim));
        systems.push(Subsystem::new(format!("{l}_O"), dim));
    }
    systems.extend(tail.iter().cloned());
    SystemLayout::new(systems)
}

/// Sequential composition of slots in the given order, with global past `P`
/// and future `F`. `w_chain(&["A", "B"], d)` is `|A→B⟩`.
pub fn w_chain(order: &[&str], dim: usize) -> Result<ProcessVector> {
    if order.is_empty() {
        return Err(Error::MetadataMismatch("a chain needs at least one slot".into()));
    }
    let past = Subsystem::new("P", dim);
    let future = Subsystem::new("F", dim);
    let structure = ProcessStructure::new(
        vec![past.clone()],
        uniform_slots(order, dim),
        vec![future.clone()],
    )?;
    let native = chain_layout(&[past], order, dim, &[future])?;
    ProcessVector::from_native(structure, &native, &links(dim, order.len() + 1))
}

/// `|A→B⟩` or `|B→A⟩` on `dim`-dimensional systems.
pub fn w_compose(order: CausalOrder, dim: usize) -> Result<ProcessVector> {
    match order {
        CausalOrder::AThenB => w_chain(&["A", "B"], dim),
        CausalOrder::BThenA => w_chain(&["B", "A"], dim),
    }
}

fn switch_structure(slots: &[&str]) -> Result<ProcessStructure> {
    ProcessStructure::new(
        vec![Subsystem::qubit("S_I"), Subsystem::qubit("Q_I")],
        uniform_slots(slots, 2),
        vec![Subsystem::qubit("S_O"), Subsystem::qubit("Q_O")],
    )
}

/// Branch of a switch: the chain over `order` with the control fixed to
/// `|c⟩_{Q_I}|c⟩_{Q_O}`, brought to the switch's canonical order.
fn switch_branch(structure: &ProcessStructure, order: &[&str], control: usize) -> Result<Vec<C64>> {
    let native = chain_layout(
        &[Subsystem::qubit("S_I")],
        order,
        2,
        &[
            Subsystem::qubit("S_O"),
            Subsystem::qubit("Q_I"),
            Subsystem::qubit("Q_O"),
        ],
    )?;
    let ctrl = basis_ket(2, control);
    let v = kron_vec(&kron_vec(&links(2, order.len() + 1), &ctrl), &ctrl);
    Ok(ProcessVector::from_native(structure.clone(), &native, &v)?
        .vector()
        .to_vec())
}

fn add(a: Vec<C64>, b: Vec<C64>) -> Vec<C64> {
    a.into_iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Bipartite quantum switch `|w₀⟩ + |w₁⟩`; past `S_I Q_I`, future `S_O Q_O`.
pub fn w_switch2() -> Result<ProcessVector> {
    let s = switch_structure(&["A", "B"])?;
    let w0 = switch_branch(&s, &["A", "B"], 0)?;
    let w1 = switch_branch(&s, &["B", "A"], 1)?;
    ProcessVector::new(s, add(w0, w1))
}

/// Tripartite switch between `A→B→C` (control 0) and `C→B→A` (control 1).
///
/// The branches are summed without a prefactor, matching the bipartite
/// switch, so the induced channel is trace preserving under the unnormalized
/// link convention.
pub fn w_switch3() -> Result<ProcessVector> {
    let s = switch_structure(&["A", "B", "C"])?;
    let w0 = switch_branch(&s, &["A", "B", "C"], 0)?;
    let w1 = switch_branch(&s, &["C", "B", "A"], 1)?;
    ProcessVector::new(s, add(w0, w1))
}

/// The Lugano process on qubits: past `P1 P2 P3`, slots `A B C`, future `F1 F2 F3`.
pub fn w_lugano() -> Result<ProcessVector> {
    let q = |l: &str| Subsystem::qubit(l);
    let structure = ProcessStructure::new(
        vec![q("P1"), q("P2"), q("P3")],
        uniform_slots(&["A", "B", "C"], 2),
        vec![q("F1"), q("F2"), q("F3")],
    )?;
    let native = SystemLayout::qubits(&[
        "A_I", "B_I", "C_I", "P1", "P2", "P3", "F1", "F2", "F3", "A_O", "B_O", "C_O",
    ])?;
    let mut v = vec![ZERO; 1 << 12];
    for bits in 0..64usize {
        let [i, j, k, r, s, t] = [5, 4, 3, 2, 1, 0].map(|b| (bits >> b) & 1);
        let a_in = r ^ ((1 - j) & k);
        let b_in = s ^ ((1 - k) & i);
        let c_in = t ^ ((1 - i) & j);
        let digits = [a_in, b_in, c_in, r, s, t, i, j, k, i, j, k];
        v[native.flat(&digits)] = ONE;
    }
    ProcessVector::from_native(structure, &native, &v)
}

/// Process mapping every pair of slot channels to the replacement channel
/// `X ↦ Tr[X] σ`: `W = 𝟙_P ⊗ |0⟩⟨0|_{A_I} ⊗ 𝟙_{A_O} ⊗ |0⟩⟨0|_{B_I} ⊗ 𝟙_{B_O} ⊗ σ_F`.
pub fn w_replacement(sigma: &DensityState) -> Result<ProcessMatrix> {
    let dim = sigma.dim();
    let structure = ProcessStructure::new(
        vec![Subsystem::new("P", dim)],
        uniform_slots(&["A", "B"], dim),
        vec![Subsystem::new("F", dim)],
    )?;
    let id = ComplexMatrix::identity(dim);
    let zero = ComplexMatrix::unit(dim, 0, 0);
    let w = kron_all([&id, &zero, &id, &zero, &id, sigma.matrix()]);
    ProcessMatrix::new(structure, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::permute_vector;

    #[test]
    fn compose_vector_norm() {
        let w = w_compose(CausalOrder::AThenB, 2).unwrap();
        assert!((w.norm_sqr() - 8.0).abs() < 1e-15);
        assert_eq!(w.terms().len(), 8);
    }

    #[test]
    fn compose_orders_differ_but_share_structure() {
        let ab = w_compose(CausalOrder::AThenB, 2).unwrap();
        let ba = w_compose(CausalOrder::BThenA, 2).unwrap();
        assert_eq!(ab.structure(), ba.structure());
        assert_ne!(ab.vector(), ba.vector());
    }

    #[test]
    fn switch_terms_are_orthogonal() {
        let s = switch_structure(&["A", "B"]).unwrap();
        let w0 = switch_branch(&s, &["A", "B"], 0).unwrap();
        let w1 = switch_branch(&s, &["B", "A"], 1).unwrap();
        let overlap: C64 = w0.iter().zip(&w1).map(|(a, b)| a.conj() * b).sum();
        assert_eq!(overlap, ZERO);
        let w = w_switch2().unwrap();
        assert!((w.norm_sqr() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn native_order_independence() {
        // Build |w₀⟩ through an intermediate order (control first), then canonicalize.
        let s = switch_structure(&["A", "B"]).unwrap();
        let direct = switch_branch(&s, &["A", "B"], 0).unwrap();
        let native = SystemLayout::qubits(&["Q_I", "Q_O", "S_I", "A_I", "A_O", "B_I", "B_O", "S_O"]).unwrap();
        let ctrl = basis_ket(4, 0);
        let v = kron_vec(&ctrl, &links(2, 3));
        let canon = permute_vector(&v, &native, &s.layout().labels()).unwrap();
        let diff: f64 = canon.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn lugano_terms() {
        let w = w_lugano().unwrap();
        let terms = w.terms();
        assert_eq!(terms.len(), 64);
        assert!(terms.iter().all(|(_, a)| *a == ONE));
        assert!((w.norm_sqr() - 64.0).abs() < 1e-12);
        let layout = w.structure().layout().clone();
        assert_eq!(
            layout.labels(),
            vec!["P1", "P2", "P3", "A_I", "A_O", "B_I", "B_O", "C_I", "C_O", "F1", "F2", "F3"]
        );
        // all-zero term
        assert_eq!(w.vector()[0], ONE);
        // i = 1, j = k = r = s = t = 0: A_I B_I C_I = 010, P = 000, F = 100, outputs 100
        let digits_of = |pairs: &[(&str, usize)]| {
            let mut d = vec![0; 12];
            for (l, v) in pairs {
                d[layout.position(l).unwrap()] = *v;
            }
            layout.flat(&d)
        };
        let idx = digits_of(&[("B_I", 1), ("F1", 1), ("A_O", 1)]);
        assert_eq!(w.vector()[idx], ONE);
    }

    #[test]
    fn replacement_process_shape() {
        let sigma = DensityState::qubit_diagonal(0.1).unwrap();
        let w = w_replacement(&sigma).unwrap();
        assert_eq!(w.matrix().rows(), 64);
        assert!((w.matrix().trace().re - 8.0).abs() < 1e-15);
    }
}
