use std::fmt;

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// One tensor factor of a composite space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Self {
            label: label.into(),
            dim,
        }
    }

    pub fn qubit(label: impl Into<String>) -> Self {
        Self::new(label, 2)
    }
}

/// Ordered list of labelled tensor factors; the first factor is the most
/// significant digit of a flat index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemLayout {
    systems: Vec<Subsystem>,
}

impl SystemLayout {
    pub fn new(systems: Vec<Subsystem>) -> Result<Self> {
        for (i, s) in systems.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "system `{}` has dimension 0",
                    s.label
                )));
            }
            if systems[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
        }
        Ok(Self { systems })
    }

    /// Layout of qubits with the given labels.
    pub fn qubits(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|l| Subsystem::qubit(*l)).collect())
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Self {
        Self {
            systems: vec![Subsystem::new(label, dim)],
        }
    }

    pub fn empty() -> Self {
        Self { systems: vec![] }
    }

    pub fn systems(&self) -> &[Subsystem] {
        &self.systems
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    /// Total dimension (1 for the empty layout).
    pub fn dim(&self) -> usize {
        self.systems.iter().map(|s| s.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(|s| s.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.systems.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.systems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.systems.iter().any(|s| s.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.systems[self.position(label)?].dim)
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut systems = self.systems.clone();
        systems.extend(other.systems.iter().cloned());
        Self::new(systems)
    }

    /// Layout with the given labels removed.
    pub fn without(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.position(l)?;
        }
        Ok(Self {
            systems: self
                .systems
                .iter()
                .filter(|s| !labels.contains(&s.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Layout reordered to `order` (a permutation of this layout's labels).
    pub fn reordered(&self, order: &[&str]) -> Result<Self> {
        let idx = self.permutation_indices(order)?;
        Ok(Self {
            systems: idx.iter().map(|&i| self.systems[i].clone()).collect(),
        })
    }

    fn permutation_indices(&self, order: &[&str]) -> Result<Vec<usize>> {
        if order.len() != self.systems.len() {
            return Err(Error::InvalidPermutation(format!(
                "{} labels given for a layout of {} systems",
                order.len(),
                self.systems.len()
            )));
        }
        let mut seen = vec![false; order.len()];
        let mut idx = Vec::with_capacity(order.len());
        for l in order {
            let p = self.position(l)?;
            if seen[p] {
                return Err(Error::InvalidPermutation(format!("label `{l}` repeated")));
            }
            seen[p] = true;
            idx.push(p);
        }
        Ok(idx)
    }

    /// Row-major strides of each factor.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.systems.len()];
        for k in (0..self.systems.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.systems[k + 1].dim;
        }
        strides
    }

    /// Splits a flat index into per-system digits.
    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.systems.len()];
        for k in (0..self.systems.len()).rev() {
            out[k] = flat % self.systems[k].dim;
            flat /= self.systems[k].dim;
        }
        out
    }

    /// Joins per-system digits into a flat index.
    pub fn flat(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.systems)
            .fold(0, |acc, (&d, s)| acc * s.dim + d)
    }

    /// For every flat index of the reordered space, the flat index of the
    /// same basis element in this layout.
    fn permutation_map(&self, order: &[&str]) -> Result<Vec<usize>> {
        let idx = self.permutation_indices(order)?;
        let strides = self.strides();
        let new_dims: Vec<usize> = idx.iter().map(|&i| self.systems[i].dim).collect();
        let new_strides: Vec<usize> = idx.iter().map(|&i| strides[i]).collect();
        let n = self.dim();
        let mut map = vec![0; n];
        let mut digits = vec![0usize; idx.len()];
        for slot in map.iter_mut() {
            *slot = digits.iter().zip(&new_strides).map(|(d, s)| d * s).sum();
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < new_dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Ok(map)
    }

    fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "layout {} has dimension {}, matrix is {}x{}",
                self,
                self.dim(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .systems
            .iter()
            .map(|s| format!("{}:{}", s.label, s.dim))
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Re-expresses `m` (annotated by `layout`) in the factor order `order`.
pub fn permute_systems(
    m: &ComplexMatrix,
    layout: &SystemLayout,
    order: &[&str],
) -> Result<ComplexMatrix> {
    layout.check_square(m)?;
    let map = layout.permutation_map(order)?;
    let n = map.len();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])]))
}

/// Vector counterpart of [`permute_systems`].
pub fn permute_vector(v: &[C64], layout: &SystemLayout, order: &[&str]) -> Result<Vec<C64>> {
    if v.len() != layout.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against layout {}",
            v.len(),
            layout
        )));
    }
    let map = layout.permutation_map(order)?;
    Ok(map.iter().map(|&k| v[k]).collect())
}

/// Traces out the systems in `discard`; the kept systems stay in layout order.
pub fn partial_trace(
    m: &ComplexMatrix,
    layout: &SystemLayout,
    discard: &[&str],
) -> Result<ComplexMatrix> {
    layout.check_square(m)?;
    let kept = layout.without(discard)?;
    if discard.is_empty() {
        return Ok(m.clone());
    }
    let dropped: Vec<&str> = layout
        .labels()
        .into_iter()
        .filter(|l| discard.contains(l))
        .collect();
    let mut order = kept.labels();
    order.extend(dropped.iter().copied());
    let p = permute_systems(m, layout, &order)?;
    let dk = kept.dim();
    let dd = layout.dim() / dk;
    let n = dk * dd;
    let mut out = vec![ZERO; dk * dk];
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for d in 0..dd {
                acc += p.data()[(a * dd + d) * n + b * dd + d];
            }
            out[a * dk + b] = acc;
        }
    }
    Ok(ComplexMatrix::from_raw(dk, dk, out))
}

/// Transposes the factors in `subset`, leaving the others untouched.
pub fn partial_transpose(
    m: &ComplexMatrix,
    layout: &SystemLayout,
    subset: &[&str],
) -> Result<ComplexMatrix> {
    layout.check_square(m)?;
    let mut positions = Vec::with_capacity(subset.len());
    for l in subset {
        positions.push(layout.position(l)?);
    }
    let strides = layout.strides();
    let dims = layout.dims();
    let n = layout.dim();
    // part[i] = contribution of the transposed digits to flat index i
    let part: Vec<usize> = (0..n)
        .map(|i| {
            positions
                .iter()
                .map(|&k| (i / strides[k]) % dims[k] * strides[k])
                .sum()
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let r2 = r - part[r] + part[c];
            let c2 = c - part[c] + part[r];
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}
