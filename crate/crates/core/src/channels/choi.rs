use super::kraus::KrausChannel;
use super::state::DensityState;
use crate::error::{Error, Result};
use crate::tensor::{herm_eig, partial_trace, ComplexMatrix, SystemLayout, C64, ZERO};

/// Tolerance used when validating a Choi operator on construction.
pub const CHOI_TOL: f64 = 1e-9;

/// Choi operator `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, input factor first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    matrix: ComplexMatrix,
    input: SystemLayout,
    output: SystemLayout,
}

impl ChoiOperator {
    /// Validates positivity and `Tr_out J = 𝟙` within [`CHOI_TOL`].
    pub fn new(matrix: ComplexMatrix, input: SystemLayout, output: SystemLayout) -> Result<Self> {
        let j = Self::new_unchecked(matrix, input, output)?;
        let report = super::is_cptp(&j);
        if report.tp_deviation > CHOI_TOL || report.min_eigenvalue < -CHOI_TOL {
            return Err(Error::InvalidChannel(report.diagnostic));
        }
        Ok(j)
    }

    /// Checks only that the shape matches `din · dout`.
    pub fn new_unchecked(
        matrix: ComplexMatrix,
        input: SystemLayout,
        output: SystemLayout,
    ) -> Result<Self> {
        let d = input.dim() * output.dim();
        if !matrix.is_square() || matrix.rows() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Choi matrix for input {} and output {}",
                matrix.rows(),
                matrix.cols(),
                input,
                output
            )));
        }
        input.concat(&output)?;
        Ok(Self {
            matrix,
            input,
            output,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn input(&self) -> &SystemLayout {
        &self.input
    }

    pub fn output(&self) -> &SystemLayout {
        &self.output
    }

    pub fn din(&self) -> usize {
        self.input.dim()
    }

    pub fn dout(&self) -> usize {
        self.output.dim()
    }

    /// `input ⊗ output` layout of the matrix.
    pub fn layout(&self) -> SystemLayout {
        self.input.concat(&self.output).expect("validated on construction")
    }

    pub fn with_layouts(self, input: SystemLayout, output: SystemLayout) -> Result<Self> {
        Self::new_unchecked(self.matrix, input, output)
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr_out J`.
    pub fn input_marginal(&self) -> ComplexMatrix {
        let out = self.output.labels();
        partial_trace(&self.matrix, &self.layout(), &out).expect("labels from own layout")
    }

    /// Applies the map to an arbitrary operator: `Tr_in[(Xᵀ ⊗ 𝟙) J]`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_choi_matrix(&self.matrix, self.din(), self.dout(), x)
    }

    /// Superoperator `S` with `vec(Φ(X)) = S vec(X)` (row-major vectorization).
    pub fn superoperator(&self) -> ComplexMatrix {
        let (di, dout) = (self.din(), self.dout());
        ComplexMatrix::from_fn(dout * dout, di * di, |r, c| {
            let (f, fp) = (r / dout, r % dout);
            let (k, i) = (c / di, c % di);
            self.matrix[(k * dout + f, i * dout + fp)]
        })
    }

    /// Vectors `a_k` with `J = Σ_k |a_k⟩⟨a_k|` (scaled eigenvectors).
    /// Eigenvalues at or below `cutoff` are dropped.
    pub fn kraus_vectors(&self, cutoff: f64) -> Result<Vec<Vec<C64>>> {
        let e = herm_eig(&self.matrix)?;
        Ok(e.values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > cutoff)
            .map(|(k, &l)| e.vector(k).into_iter().map(|z| z * l.sqrt()).collect())
            .collect())
    }

    /// Kraus form recovered from the spectral decomposition.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let (di, dout) = (self.din(), self.dout());
        let kraus = self
            .kraus_vectors(1e-14)?
            .into_iter()
            .map(|a| ComplexMatrix::from_fn(dout, di, |o, i| a[i * dout + o]))
            .collect();
        KrausChannel::new_unchecked(kraus)
    }
}

pub(crate) fn apply_choi_matrix(
    j: &ComplexMatrix,
    din: usize,
    dout: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if x.rows() != din || x.cols() != din {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator into a map with input dimension {din}",
            x.rows(),
            x.cols()
        )));
    }
    let mut out = vec![ZERO; dout * dout];
    for k in 0..din {
        for i in 0..din {
            let w = x[(k, i)];
            if w == ZERO {
                continue;
            }
            for f in 0..dout {
                let row = (k * dout + f) * din * dout + i * dout;
                for fp in 0..dout {
                    out[f * dout + fp] += w * j.data()[row + fp];
                }
            }
        }
    }
    Ok(ComplexMatrix::from_raw(dout, dout, out))
}

/// Choi operator of a Kraus channel.
pub fn kraus_to_choi(ch: &KrausChannel) -> ChoiOperator {
    let (di, dout) = (ch.din(), ch.dout());
    let mut j = ComplexMatrix::zeros(di * dout, di * dout);
    for k in ch.operators() {
        // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
        let v: Vec<C64> = (0..di * dout).map(|x| k[(x % dout, x / dout)]).collect();
        j = &j + &ComplexMatrix::projector(&v);
    }
    ChoiOperator {
        matrix: j,
        input: SystemLayout::single("in", di),
        output: SystemLayout::single("out", dout),
    }
}

/// `Tr_in[(ρᵀ ⊗ 𝟙) J]`.
pub fn apply_via_choi(j: &ChoiOperator, rho: &DensityState) -> Result<DensityState> {
    let out = j.apply_operator(rho.matrix())?;
    let layout = if j.din() == j.dout() && rho.layout().dim() == j.dout() {
        rho.layout().clone()
    } else {
        j.output.clone()
    };
    Ok(DensityState::from_trusted(out, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::kraus::{apply_kraus, gad, phase_flip, random_channel, replacement_channel};
    use crate::tensor::random::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_choi_is_unnormalized_bell_projector() {
        let j = kraus_to_choi(&KrausChannel::identity(2));
        let v = [C64::new(1.0, 0.0), ZERO, ZERO, C64::new(1.0, 0.0)];
        assert_eq!(j.matrix(), &ComplexMatrix::projector(&v));
        assert!((j.matrix().trace().re - 2.0).abs() < 1e-15);
        let e = herm_eig(j.matrix()).unwrap();
        assert_eq!(e.values.iter().filter(|&&l| l > 1e-12).count(), 1);
    }

    #[test]
    fn replacement_choi_is_identity_tensor_sigma() {
        let sigma = DensityState::qubit_diagonal(0.7).unwrap();
        let j = kraus_to_choi(&replacement_channel(&sigma, 2).unwrap());
        let expected = ComplexMatrix::identity(2).kron(sigma.matrix());
        assert!(j.matrix().max_abs_diff(&expected) < 1e-15);
        let rho = DensityState::qubit_diagonal(0.1).unwrap();
        assert!(apply_via_choi(&j, &rho).unwrap().matrix().max_abs_diff(sigma.matrix()) < 1e-15);
    }

    #[test]
    fn thermalizing_choi_is_trace_preserving() {
        let j = kraus_to_choi(&gad(0.8, 1.0).unwrap());
        assert!(j.input_marginal().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn identity_choi_applies_as_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = DensityState::from_matrix(random_density(&mut rng, 2)).unwrap();
        let j = kraus_to_choi(&KrausChannel::identity(2));
        assert!(apply_via_choi(&j, &rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn cross_representation_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let channels = [
            random_channel(&mut rng, 2, 2),
            gad(0.3, 0.4).unwrap(),
            phase_flip(0.25).unwrap(),
        ];
        for ch in &channels {
            let rho = DensityState::from_matrix(random_density(&mut rng, 2)).unwrap();
            let a = apply_kraus(ch, &rho).unwrap();
            let b = apply_via_choi(&kraus_to_choi(ch), &rho).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
        }
    }

    #[test]
    fn superoperator_matches_choi_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let ch = random_channel(&mut rng, 3, 2);
        let j = kraus_to_choi(&ch);
        let x = random_density(&mut rng, 3);
        let direct = j.apply_operator(&x).unwrap();
        let vec = j.superoperator().apply(x.data()).unwrap();
        assert!(ComplexMatrix::new(3, 3, vec).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn kraus_recovered_from_choi() {
        let ch = gad(0.4, 0.3).unwrap();
        let back = kraus_to_choi(&ch).to_kraus().unwrap();
        assert!(kraus_to_choi(&back).matrix().max_abs_diff(kraus_to_choi(&ch).matrix()) < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let j = kraus_to_choi(&KrausChannel::identity(2));
        let rho = DensityState::maximally_mixed(3);
        assert!(matches!(apply_via_choi(&j, &rho), Err(Error::DimensionMismatch(_))));
    }
}
