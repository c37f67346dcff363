//! Direct circuit simulations of the named processes, written against plain
//! matrix products so they share no code with the process contraction.
#![allow(dead_code)]

use causalthermo_core::tensor::{kron, pauli, partial_trace, ComplexMatrix, SystemLayout, C64};
use causalthermo_core::{KrausChannel, ProcessKind};

pub fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b).unwrap()
}

pub fn id(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d)
}

pub fn ket_bra(d: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::unit(d, i, j)
}

/// `Σ K ρ K†`.
pub fn kraus_sum(ks: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(ks[0].rows(), ks[0].rows());
    for k in ks {
        acc = &acc + &mul(&mul(k, rho), &k.adjoint());
    }
    acc
}

/// `exp(M)` by scaling and squaring a truncated Taylor series.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    let squarings = 8;
    let a = m.scale_real(1.0 / f64::from(1u32 << squarings));
    let mut term = id(m.rows());
    let mut sum = id(m.rows());
    for k in 1..=20 {
        term = mul(&term, &a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

/// `exp(−iH)` for `H = −σx⊗σx − (𝟙⊗σz + σz⊗𝟙)` on target ⊗ environment.
pub fn ising_u() -> ComplexMatrix {
    let (x, z) = (pauli::x(), pauli::z());
    let h = &(&kron(&x, &x).scale_real(-1.0) - &kron(&id(2), &z)) - &kron(&z, &id(2));
    expm(&h.scale(C64::new(0.0, -1.0)))
}

fn on_target(k: &ComplexMatrix) -> ComplexMatrix {
    kron(k, &id(2))
}

fn products(lists: &[&[ComplexMatrix]]) -> Vec<Vec<ComplexMatrix>> {
    let mut out: Vec<Vec<ComplexMatrix>> = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// `ops[n−1] ⋯ ops[0]`: the first element acts first.
fn chain(ops: &[ComplexMatrix]) -> ComplexMatrix {
    ops.iter().skip(1).fold(ops[0].clone(), |acc, k| mul(k, &acc))
}

/// Output on target ⊗ ancilla for input `rho`, or `None` for processes
/// without a circuit here.
pub fn circuit_output(
    kind: &ProcessKind,
    channels: &[KrausChannel],
    rho: &ComplexMatrix,
) -> Option<ComplexMatrix> {
    let k: Vec<&[ComplexMatrix]> = channels.iter().map(|c| c.operators()).collect();
    let sequential = |order: &[usize]| -> ComplexMatrix {
        let lists: Vec<&[ComplexMatrix]> = order.iter().map(|&i| k[i]).collect();
        let ops: Vec<ComplexMatrix> = products(&lists)
            .iter()
            .map(|seq| on_target(&chain(seq)))
            .collect();
        kraus_sum(&ops, rho)
    };
    let switch = |forward: &[usize], backward: &[usize]| -> ComplexMatrix {
        let (p0, p1) = (ket_bra(2, 0, 0), ket_bra(2, 1, 1));
        let n = forward.len();
        let lists: Vec<&[ComplexMatrix]> = (0..n).map(|i| k[i]).collect();
        let ops: Vec<ComplexMatrix> = products(&lists)
            .iter()
            .map(|pick| {
                let f: Vec<ComplexMatrix> = forward.iter().map(|&i| pick[i].clone()).collect();
                let b: Vec<ComplexMatrix> = backward.iter().map(|&i| pick[i].clone()).collect();
                &kron(&chain(&f), &p0) + &kron(&chain(&b), &p1)
            })
            .collect();
        kraus_sum(&ops, rho)
    };
    let ising = |n: usize| -> ComplexMatrix {
        let u = ising_u();
        let lists: Vec<&[ComplexMatrix]> = (0..n).map(|i| k[i]).collect();
        let ops: Vec<ComplexMatrix> = products(&lists)
            .iter()
            .map(|pick| {
                let mut seq = vec![u.clone()];
                for a in pick {
                    seq.push(on_target(a));
                    seq.push(u.clone());
                }
                chain(&seq)
            })
            .collect();
        kraus_sum(&ops, rho)
    };
    Some(match kind {
        ProcessKind::Composition(o) => match o {
            causalthermo_core::processes::CausalOrder::AThenB => sequential(&[0, 1]),
            causalthermo_core::processes::CausalOrder::BThenA => sequential(&[1, 0]),
        },
        ProcessKind::Composition3(order) => {
            let idx: Vec<usize> = order.bytes().map(|b| (b - b'A') as usize).collect();
            sequential(&idx)
        }
        ProcessKind::Mixture(q) => {
            &sequential(&[0, 1]).scale_real(*q) + &sequential(&[1, 0]).scale_real(1.0 - q)
        }
        ProcessKind::Switch2 => switch(&[0, 1], &[1, 0]),
        ProcessKind::Switch3 => switch(&[0, 1, 2], &[2, 1, 0]),
        ProcessKind::Ising2 => ising(2),
        ProcessKind::Ising3 => ising(3),
        ProcessKind::Replacement(s) => {
            let layout = SystemLayout::qubits(&["S", "Q"]).unwrap();
            let anc = partial_trace(rho, &layout, &["S"]).unwrap();
            kron(&ComplexMatrix::diag(&[*s, 1.0 - s]), &anc)
        }
        ProcessKind::Lugano(_) => return None,
    })
}
