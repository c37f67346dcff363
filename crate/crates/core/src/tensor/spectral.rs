use faer::{Mat, Side};

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues in `[-PSD_CLIP, 0)` are treated as zero in PSD contexts.
pub const PSD_CLIP: f64 = 1e-10;

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let weights: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, w) in weights.iter().enumerate() {
            if *w == ZERO {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| C64::new(l, 0.0))
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending
/// with ties kept in solver order.
pub fn herm_eig(m: &ComplexMatrix) -> Result<Eigen> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(herm_eig_unchecked(m))
}

pub(crate) fn herm_eig_unchecked(m: &ComplexMatrix) -> Eigen {
    let n = m.rows();
    match n {
        1 => Eigen {
            values: vec![m[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        },
        2 => eig_2x2(m),
        _ => eig_general(m),
    }
}

fn eig_general(m: &ComplexMatrix) -> Eigen {
    let n = m.rows();
    // symmetrize so the solver only sees the Hermitian part
    let a = Mat::<C64>::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let se = a
        .self_adjoint_eigen(Side::Lower)
        .expect("self-adjoint eigendecomposition of a finite matrix");
    let (s, u) = (se.S(), se.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].re.total_cmp(&s[i].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, c| u[(i, order[c])]);
    Eigen { values, vectors }
}

/// Closed form for 2x2 Hermitian matrices; this sits on the optimizer's hot path.
fn eig_2x2(m: &ComplexMatrix) -> Eigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    let (l1, l2) = (mean + r, mean - r);
    if b.norm() <= 1e-300 {
        // already diagonal; keep the solver-order tie rule (index order)
        let vectors = if a >= d {
            ComplexMatrix::identity(2)
        } else {
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
        };
        return Eigen {
            values: vec![a.max(d), a.min(d)],
            vectors,
        };
    }
    // (b, l1 - a) is an eigenvector for l1; pick the better-conditioned form
    let (v1, v2) = if half >= 0.0 {
        let x = [C64::new(l1 - d, 0.0), b.conj()];
        let y = [-b, C64::new(l1 - d, 0.0)];
        (x, y)
    } else {
        let x = [b, C64::new(l1 - a, 0.0)];
        let y = [C64::new(-(l1 - a), 0.0), b.conj()];
        (x, y)
    };
    let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
    let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
    let vectors = ComplexMatrix::from_raw(
        2,
        2,
        vec![v1[0] / n1, v2[0] / n2, v1[1] / n1, v2[1] / n2],
    );
    Eigen {
        values: vec![l1, l2],
        vectors,
    }
}

/// `exp(scale · h)` for Hermitian `h`, through its spectral decomposition.
pub fn exp_hermitian(h: &ComplexMatrix, scale: C64) -> Result<ComplexMatrix> {
    let e = herm_eig(h)?;
    Ok(e.map(|l| (scale * l).exp()))
}
