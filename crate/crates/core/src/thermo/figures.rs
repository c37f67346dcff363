use crate::channels::DensityState;
use crate::error::{Error, Result};
use crate::tensor::{herm_eig, herm_eig_unchecked, ComplexMatrix, SystemLayout, C64, HERMITIAN_TOL};
use std::f64::consts::LN_2;

/// Hermitian energy operator (ℏ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Hamiltonian",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { matrix })
    }

    /// `|1⟩⟨1|` on a qubit.
    pub fn qubit() -> Self {
        Self {
            matrix: ComplexMatrix::diag(&[0.0, 1.0]),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Tr[Hρ]` for any operator of matching size.
    pub fn energy(&self, rho: &ComplexMatrix) -> f64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * rho[(j, i)];
            }
        }
        acc.re
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{dim}-dimensional state against a {}-dimensional Hamiltonian",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Figure of merit evaluated on output states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermoFigure {
    FreeEnergy { beta: f64 },
    Ergotropy,
}

impl ThermoFigure {
    pub fn free_energy(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
                range: "(0, ∞)",
            });
        }
        Ok(ThermoFigure::FreeEnergy { beta })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ThermoFigure::FreeEnergy { .. } => "free_energy",
            ThermoFigure::Ergotropy => "ergotropy",
        }
    }

    pub fn evaluate(&self, rho: &DensityState, h: &Hamiltonian) -> Result<f64> {
        match *self {
            ThermoFigure::FreeEnergy { beta } => free_energy(rho, h, beta),
            ThermoFigure::Ergotropy => ergotropy(rho, h),
        }
    }
}

/// `β = log₂(p/(1−p))`.
pub fn beta_from_gad(p: f64) -> f64 {
    (p / (1.0 - p)).log2()
}

/// `−Σ λ log₂ λ` over the spectrum of a Hermitian operator.
pub(crate) fn entropy_bits(m: &ComplexMatrix) -> f64 {
    herm_eig_unchecked(m)
        .values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Entropy in bits.
pub fn von_neumann_entropy(rho: &DensityState) -> f64 {
    entropy_bits(rho.matrix()).max(0.0)
}

/// `2^(−βH) / Tr 2^(−βH)`.
pub fn thermal_state(h: &Hamiltonian, beta: f64) -> Result<DensityState> {
    if !beta.is_finite() {
        return Err(Error::NonFinite);
    }
    let e = herm_eig(h.matrix())?;
    // shift by the extreme energy on the dominant side to keep weights ≤ 1
    let shift = if beta >= 0.0 {
        e.values.iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        e.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    };
    let weights: Vec<f64> = e.values.iter().map(|&x| (-beta * (x - shift)).exp2()).collect();
    let z: f64 = weights.iter().sum();
    let n = h.dim();
    let mut tau = ComplexMatrix::zeros(n, n);
    for (k, w) in weights.iter().enumerate() {
        tau = &tau + &ComplexMatrix::projector(&e.vector(k)).scale_real(w / z);
    }
    let herm = (&tau + &tau.adjoint()).scale_real(0.5);
    Ok(DensityState::from_trusted(herm, SystemLayout::single("S", h.dim())))
}

/// `Tr[Hρ] − β⁻¹ ln2 · S(ρ)` with `S` in bits.
pub fn free_energy(rho: &DensityState, h: &Hamiltonian, beta: f64) -> Result<f64> {
    ThermoFigure::free_energy(beta)?;
    h.check(rho.dim())?;
    Ok(h.energy(rho.matrix()) - LN_2 / beta * von_neumann_entropy(rho))
}

/// `Σ_k λ_k↓ |ε_k↑⟩⟨ε_k↑|`.
pub fn passive_state(rho: &DensityState, h: &Hamiltonian) -> Result<DensityState> {
    h.check(rho.dim())?;
    let lambdas = herm_eig_unchecked(rho.matrix()).values;
    let eh = herm_eig(h.matrix())?;
    let n = h.dim();
    // energies ascending = reverse of the descending eigen order
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &l) in lambdas.iter().enumerate() {
        let v = eh.vector(n - 1 - k);
        out = &out + &ComplexMatrix::projector(&v).scale_real(l);
    }
    Ok(DensityState::from_trusted(out, rho.layout().clone()))
}

/// Ergotropy of an operator that need not be normalized:
/// `Tr[Hσ] − Σ λ_k↓ ε_k↑`, which is homogeneous of degree one in `σ`.
pub(crate) fn ergotropy_of(sigma: &ComplexMatrix, h: &ComplexMatrix, energies_asc: &[f64]) -> f64 {
    let lambdas = herm_eig_unchecked(sigma).values;
    let passive: f64 = lambdas.iter().zip(energies_asc).map(|(l, e)| l * e).sum();
    let n = h.rows();
    let mut energy = 0.0;
    for i in 0..n {
        for j in 0..n {
            energy += (h[(i, j)] * sigma[(j, i)]).re;
        }
    }
    (energy - passive).max(0.0)
}

pub(crate) fn energies_ascending(h: &Hamiltonian) -> Vec<f64> {
    let mut e = herm_eig_unchecked(h.matrix()).values;
    e.reverse();
    e
}

/// `Tr[Hρ] − Tr[H·passive(ρ)]`, clamped at zero against rounding.
pub fn ergotropy(rho: &DensityState, h: &Hamiltonian) -> Result<f64> {
    h.check(rho.dim())?;
    Ok(ergotropy_of(rho.matrix(), h.matrix(), &energies_ascending(h)))
}
