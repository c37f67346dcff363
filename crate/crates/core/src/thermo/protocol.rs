use super::figures::{energies_ascending, ergotropy_of, Hamiltonian, ThermoFigure};
use crate::channels::{ChoiOperator, DensityState, KrausChannel};
use crate::error::{check_range, Error, Result};
use crate::processes::Superchannel;
use crate::tensor::{partial_trace, ComplexMatrix, SystemLayout, C64, ZERO};

/// Branches below this probability are not conditioned on.
pub const ZERO_BRANCH: f64 = 1e-12;

/// Orthonormal rank-one projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    kets: Vec<Vec<C64>>,
}

impl MeasurementBasis {
    /// Checks that the kets form an orthonormal basis within 1e-9.
    pub fn new(kets: Vec<Vec<C64>>) -> Result<Self> {
        let d = kets.len();
        if d == 0 || kets.iter().any(|k| k.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "{d} kets do not form a basis of their space"
            )));
        }
        for (i, a) in kets.iter().enumerate() {
            for (j, b) in kets.iter().enumerate() {
                let g: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - C64::new(target, 0.0)).norm() > 1e-9 {
                    return Err(Error::InvalidState(format!(
                        "Gram entry ({i}, {j}) is {g}"
                    )));
                }
            }
        }
        Ok(Self { kets })
    }

    /// `{|0⟩, |1⟩}`.
    pub fn computational() -> Self {
        Self {
            kets: vec![
                vec![C64::new(1.0, 0.0), ZERO],
                vec![ZERO, C64::new(1.0, 0.0)],
            ],
        }
    }

    /// `{|+⟩, |−⟩}`.
    pub fn plus_minus() -> Self {
        measurement_basis(0.5, 0.0).expect("in range")
    }

    pub fn kets(&self) -> &[Vec<C64>] {
        &self.kets
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        self.kets.iter().map(|k| ComplexMatrix::projector(k)).collect()
    }

    pub fn dim(&self) -> usize {
        self.kets.len()
    }
}

/// `|M₁⟩ = √m|0⟩ + e^{iφ}√(1−m)|1⟩`, `|M₂⟩ = −e^{−iφ}√(1−m)|0⟩ + √m|1⟩`.
pub fn measurement_basis(m: f64, phi: f64) -> Result<MeasurementBasis> {
    check_range("m", m, 0.0, 1.0, "[0, 1]")?;
    if !phi.is_finite() {
        return Err(Error::NonFinite);
    }
    let (a, b) = (m.sqrt(), (1.0 - m).sqrt());
    let e = C64::from_polar(1.0, phi);
    Ok(MeasurementBasis {
        kets: vec![
            vec![C64::new(a, 0.0), e * b],
            vec![-e.conj() * b, C64::new(a, 0.0)],
        ],
    })
}

/// `cos(x/2)|0⟩ + e^{iχ} sin(x/2)|1⟩`.
pub fn ancilla_ket(x: f64, chi: f64) -> [C64; 2] {
    [
        C64::new((x / 2.0).cos(), 0.0),
        C64::from_polar((x / 2.0).sin(), chi),
    ]
}

/// Pure ancilla state on a system labelled `Q`.
pub fn ancilla_state(x: f64, chi: f64) -> Result<DensityState> {
    if !x.is_finite() || !chi.is_finite() {
        return Err(Error::NonFinite);
    }
    DensityState::pure(&ancilla_ket(x, chi), SystemLayout::single("Q", 2))
}

/// `√r|0⟩ + √(1−r)|1⟩`.
pub fn pure_target(r: f64) -> Result<DensityState> {
    check_range("r", r, 0.0, 1.0, "[0, 1]")?;
    DensityState::pure(
        &[C64::new(r.sqrt(), 0.0), C64::new((1.0 - r).sqrt(), 0.0)],
        SystemLayout::single("S", 2),
    )
}

/// One measurement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    /// Normalized target state; maximally mixed placeholder when `degenerate`.
    pub state: DensityState,
    pub degenerate: bool,
}

/// Unnormalized conditional target operators `Tr_Q[(𝟙 ⊗ |M_j⟩⟨M_j|) ρ_SQ]`.
pub(crate) fn conditional_operators(
    joint: &ComplexMatrix,
    ds: usize,
    basis: &MeasurementBasis,
) -> Vec<ComplexMatrix> {
    let dq = basis.dim();
    basis
        .kets()
        .iter()
        .map(|k| {
            ComplexMatrix::from_fn(ds, ds, |s, sp| {
                let mut acc = ZERO;
                for q in 0..dq {
                    for qp in 0..dq {
                        acc += k[q].conj() * joint[(s * dq + q, sp * dq + qp)] * k[qp];
                    }
                }
                acc
            })
        })
        .collect()
}

fn branches_from(ops: Vec<ComplexMatrix>, layout: &SystemLayout) -> Vec<Branch> {
    ops.into_iter()
        .map(|op| {
            let p = op.trace().re;
            if p < ZERO_BRANCH {
                Branch {
                    probability: 0.0,
                    state: DensityState::maximally_mixed(op.rows()),
                    degenerate: true,
                }
            } else {
                let m = op.scale_real(1.0 / p);
                let m = (&m + &m.adjoint()).scale_real(0.5);
                Branch {
                    probability: p,
                    state: DensityState::from_trusted(m, layout.clone()),
                    degenerate: false,
                }
            }
        })
        .collect()
}

/// Protocol on an already-contracted channel `S_I Q_I → S_O Q_O`.
pub fn run_protocol_on_channel(
    channel: &ChoiOperator,
    target: &DensityState,
    ancilla: &DensityState,
    basis: &MeasurementBasis,
) -> Result<Vec<Branch>> {
    let (ds, dq) = (target.dim(), ancilla.dim());
    if channel.din() != ds * dq || channel.dout() != ds * dq || basis.dim() != dq {
        return Err(Error::DimensionMismatch(format!(
            "channel {}→{} with target {ds}, ancilla {dq}, basis {}",
            channel.din(),
            channel.dout(),
            basis.dim()
        )));
    }
    let input = target.matrix().kron(ancilla.matrix());
    let out = channel.apply_operator(&input)?;
    Ok(branches_from(
        conditional_operators(&out, ds, basis),
        &SystemLayout::single("S", ds),
    ))
}

/// Prepares `target ⊗ ancilla`, sends it through the superchannel built from
/// `channels`, measures the ancilla and returns one branch per outcome.
pub fn run_protocol(
    process: &Superchannel,
    channels: &[KrausChannel],
    target: &DensityState,
    ancilla: &DensityState,
    basis: &MeasurementBasis,
) -> Result<Vec<Branch>> {
    let j = process.output_channel_kraus(channels)?;
    run_protocol_on_channel(&j, target, ancilla, basis)
}

/// `Σ_j p_j T(σ_j)`; degenerate branches contribute nothing.
pub fn average_figure(branches: &[Branch], figure: ThermoFigure, h: &Hamiltonian) -> Result<f64> {
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!(
            "branch probabilities sum to {total}"
        )));
    }
    let mut acc = 0.0;
    for b in branches.iter().filter(|b| !b.degenerate) {
        acc += b.probability * figure.evaluate(&b.state, h)?;
    }
    Ok(acc)
}

/// `Σ_α p_α E(ρ_{S|α})` for a state on `system ⊗ ancilla`.
pub fn daemonic_ergotropy(
    rho_sa: &DensityState,
    h: &Hamiltonian,
    basis: &MeasurementBasis,
) -> Result<f64> {
    let layout = rho_sa.layout();
    if layout.len() != 2 || layout.dims() != [h.dim(), basis.dim()] {
        return Err(Error::DimensionMismatch(format!(
            "expected a bipartite state on {}⊗{}, got layout {}",
            h.dim(),
            basis.dim(),
            layout
        )));
    }
    let energies = energies_ascending(h);
    Ok(conditional_operators(rho_sa.matrix(), h.dim(), basis)
        .iter()
        .map(|op| ergotropy_of(op, h.matrix(), &energies))
        .sum())
}

/// Unconditioned ergotropy of the system marginal, for comparison.
pub fn marginal_ergotropy(rho_sa: &DensityState, h: &Hamiltonian) -> Result<f64> {
    let layout = rho_sa.layout();
    if layout.len() != 2 {
        return Err(Error::DimensionMismatch(format!("layout {layout} is not bipartite")));
    }
    let anc = layout.labels()[1].to_string();
    let m = partial_trace(rho_sa.matrix(), layout, &[anc.as_str()])?;
    Ok(ergotropy_of(&m, h.matrix(), &energies_ascending(h)))
}
