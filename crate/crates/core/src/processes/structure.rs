use crate::error::{check_range, Error, Result};
use crate::tensor::{permute_vector, ComplexMatrix, Subsystem, SystemLayout, C64, ZERO};

/// A position where a caller-supplied channel is plugged in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotSpec {
    pub label: String,
    pub input: Subsystem,
    pub output: Subsystem,
}

impl SlotSpec {
    pub fn new(label: impl Into<String>, input: Subsystem, output: Subsystem) -> Result<Self> {
        if input.dim == 0 || output.dim == 0 {
            return Err(Error::DimensionMismatch("slot dimensions must be at least 1".into()));
        }
        Ok(Self {
            label: label.into(),
            input,
            output,
        })
    }

    /// Slot `X` with systems `X_I`, `X_O` of dimension `dim`.
    pub fn uniform(label: &str, dim: usize) -> Self {
        Self {
            label: label.to_string(),
            input: Subsystem::new(format!("{label}_I"), dim),
            output: Subsystem::new(format!("{label}_O"), dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.input.dim * self.output.dim
    }
}

/// Global past, slots and global future of a process.
///
/// The canonical factor order is: past systems, then the slots sorted by
/// label (each input before its output), then future systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessStructure {
    past: Vec<Subsystem>,
    slots: Vec<SlotSpec>,
    future: Vec<Subsystem>,
    layout: SystemLayout,
}

impl ProcessStructure {
    pub fn new(past: Vec<Subsystem>, mut slots: Vec<SlotSpec>, future: Vec<Subsystem>) -> Result<Self> {
        slots.sort_by(|a, b| a.label.cmp(&b.label));
        if let Some(w) = slots.windows(2).find(|w| w[0].label == w[1].label) {
            return Err(Error::DuplicateLabel(w[0].label.clone()));
        }
        let mut systems = past.clone();
        for s in &slots {
            systems.push(s.input.clone());
            systems.push(s.output.clone());
        }
        systems.extend(future.iter().cloned());
        let layout = SystemLayout::new(systems)?;
        Ok(Self {
            past,
            slots,
            future,
            layout,
        })
    }

    pub fn past(&self) -> &[Subsystem] {
        &self.past
    }

    pub fn slots(&self) -> &[SlotSpec] {
        &self.slots
    }

    pub fn future(&self) -> &[Subsystem] {
        &self.future
    }

    /// Canonical layout.
    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn past_layout(&self) -> SystemLayout {
        SystemLayout::new(self.past.clone()).expect("validated")
    }

    pub fn future_layout(&self) -> SystemLayout {
        SystemLayout::new(self.future.clone()).expect("validated")
    }

    pub fn past_dim(&self) -> usize {
        self.past.iter().map(|s| s.dim).product()
    }

    pub fn future_dim(&self) -> usize {
        self.future.iter().map(|s| s.dim).product()
    }

    /// Dimension of all slot systems together.
    pub fn slot_dim(&self) -> usize {
        self.slots.iter().map(SlotSpec::dim).product()
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Flat canonical index of `(past, slots, future)`.
    pub(crate) fn index(&self, p: usize, s: usize, f: usize) -> usize {
        (p * self.slot_dim() + s) * self.future_dim() + f
    }

    /// Splits a flat canonical index into `(past, slots, future)`.
    pub(crate) fn split(&self, flat: usize) -> (usize, usize, usize) {
        let (ds, df) = (self.slot_dim(), self.future_dim());
        (flat / (ds * df), (flat / df) % ds, flat % df)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::MetadataMismatch(format!(
                "{} vs {}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }
}

/// Process matrix in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    structure: ProcessStructure,
    matrix: ComplexMatrix,
}

impl ProcessMatrix {
    pub fn new(structure: ProcessStructure, matrix: ComplexMatrix) -> Result<Self> {
        let d = structure.dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} process matrix for layout {}",
                matrix.rows(),
                matrix.cols(),
                structure.layout()
            )));
        }
        Ok(Self { structure, matrix })
    }

    pub fn structure(&self) -> &ProcessStructure {
        &self.structure
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Pure process `|w⟩`, stored densely in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessVector {
    structure: ProcessStructure,
    vector: Vec<C64>,
}

impl ProcessVector {
    pub fn new(structure: ProcessStructure, vector: Vec<C64>) -> Result<Self> {
        if vector.len() != structure.dim() {
            return Err(Error::DimensionMismatch(format!(
                "process vector of length {} for layout {}",
                vector.len(),
                structure.layout()
            )));
        }
        Ok(Self { structure, vector })
    }

    /// Takes a vector expressed in `native` factor order and brings it to
    /// canonical order.
    pub fn from_native(
        structure: ProcessStructure,
        native: &SystemLayout,
        vector: &[C64],
    ) -> Result<Self> {
        let canon = structure.layout().labels();
        let v = permute_vector(vector, native, &canon)?;
        Self::new(structure, v)
    }

    pub fn structure(&self) -> &ProcessStructure {
        &self.structure
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn norm_sqr(&self) -> f64 {
        self.vector.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Non-zero amplitudes as `(flat index, amplitude)`.
    pub fn terms(&self) -> Vec<(usize, C64)> {
        self.vector
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(i, z)| (i, *z))
            .collect()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            structure: self.structure.clone(),
            vector: self.vector.iter().map(|z| z * s).collect(),
        }
    }

    /// Dense `|w⟩⟨w|`.
    pub fn to_matrix(&self) -> ProcessMatrix {
        ProcessMatrix {
            structure: self.structure.clone(),
            matrix: ComplexMatrix::projector(&self.vector),
        }
    }
}

/// Either representation of a process.
#[derive(Debug, Clone, PartialEq)]
pub enum Process {
    Matrix(ProcessMatrix),
    Vector(ProcessVector),
}

impl Process {
    pub fn structure(&self) -> &ProcessStructure {
        match self {
            Process::Matrix(m) => m.structure(),
            Process::Vector(v) => v.structure(),
        }
    }
}

impl From<ProcessMatrix> for Process {
    fn from(m: ProcessMatrix) -> Self {
        Process::Matrix(m)
    }
}

impl From<ProcessVector> for Process {
    fn from(v: ProcessVector) -> Self {
        Process::Vector(v)
    }
}

/// `q·wa + (1−q)·wb`.
pub fn mixture(q: f64, wa: &ProcessMatrix, wb: &ProcessMatrix) -> Result<ProcessMatrix> {
    check_range("q", q, 0.0, 1.0, "[0, 1]")?;
    wa.structure.same_shape(&wb.structure)?;
    Ok(ProcessMatrix {
        structure: wa.structure.clone(),
        matrix: &wa.matrix.scale_real(q) + &wb.matrix.scale_real(1.0 - q),
    })
}
