use crate::error::{Error, Result};
use crate::tensor::{herm_eig, partial_trace, ComplexMatrix, SystemLayout, C64, HERMITIAN_TOL};

/// Tolerance on trace and negative eigenvalues when validating a state.
pub const STATE_TOL: f64 = 1e-9;

/// Density operator annotated with its subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: ComplexMatrix,
    layout: SystemLayout,
}

impl DensityState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix, layout: SystemLayout) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix against layout {}",
                matrix.rows(),
                matrix.cols(),
                layout
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (relative deviation {defect:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = herm_eig(&matrix)?.min_value();
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix, layout })
    }

    /// State on a single system labelled `S`.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        Self::new(matrix, SystemLayout::single("S", n))
    }

    /// Wraps an operator produced by a CPTP map from a valid state.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, layout: SystemLayout) -> Self {
        debug_assert_eq!(matrix.rows(), layout.dim());
        Self { matrix, layout }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &[C64], layout: SystemLayout) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("ket has squared norm {norm}")));
        }
        if ket.len() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "ket of length {} against layout {}",
                ket.len(),
                layout
            )));
        }
        Ok(Self {
            matrix: ComplexMatrix::projector(ket),
            layout,
        })
    }

    /// Diagonal state on a single system `S`.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::diag(populations))
    }

    /// `r|0⟩⟨0| + (1−r)|1⟩⟨1|`.
    pub fn qubit_diagonal(r: f64) -> Result<Self> {
        crate::error::check_range("r", r, 0.0, 1.0, "[0, 1]")?;
        Self::diagonal(&[r, 1.0 - r])
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
            layout: SystemLayout::single("S", dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Same operator, new labels (dimensions must agree).
    pub fn relabel(self, layout: SystemLayout) -> Result<Self> {
        if layout.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot relabel a {}-dimensional state with layout {}",
                self.dim(),
                layout
            )));
        }
        Ok(Self {
            matrix: self.matrix,
            layout,
        })
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.kron(&other.matrix),
            layout: self.layout.concat(&other.layout)?,
        })
    }

    pub fn partial_trace(&self, discard: &[&str]) -> Result<Self> {
        Ok(Self {
            matrix: partial_trace(&self.matrix, &self.layout, discard)?,
            layout: self.layout.without(discard)?,
        })
    }

    /// `⟨i|ρ|i⟩` for every basis index.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}
