use rand::Rng;

use super::state::DensityState;
use crate::error::{check_range, Error, Result};
use crate::tensor::random::haar_unitary;
use crate::tensor::{herm_eig, pauli, ComplexMatrix, C64, PSD_CLIP};

/// Trace-preservation tolerance for constructing a Kraus channel.
pub const KRAUS_TP_TOL: f64 = 1e-9;

/// Channel given by Kraus operators `K_i : C^din → C^dout`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    din: usize,
    dout: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates shapes and `Σ K†K = 𝟙` within [`KRAUS_TP_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(kraus)?;
        let dev = ch.tp_deviation();
        if dev > KRAUS_TP_TOL {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators are not trace preserving (‖ΣK†K − 𝟙‖ = {dev:.3e})"
            )));
        }
        Ok(ch)
    }

    /// Checks shapes only; trace preservation is left to [`super::is_cptp`].
    pub fn new_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus list".into()))?;
        let (dout, din) = (first.rows(), first.cols());
        if let Some(bad) = kraus.iter().find(|k| k.rows() != dout || k.cols() != din) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {}x{} in a {dout}x{din} channel",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { din, dout, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            din: dim,
            dout: dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `‖Σ K†K − 𝟙‖_F`.
    pub fn tp_deviation(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.distance(&ComplexMatrix::identity(self.din))
    }

    /// `Σ K X K†` for an arbitrary operator `X`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.din || x.cols() != self.din {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator into a channel with input dimension {}",
                x.rows(),
                x.cols(),
                self.din
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out = &out + &k.sandwich(x);
        }
        Ok(out)
    }

    /// `(K ⊗ 𝟙_env)` Kraus set, acting on `system ⊗ env`.
    pub fn extend_with_identity(&self, env_dim: usize) -> Self {
        let id = ComplexMatrix::identity(env_dim);
        Self {
            din: self.din * env_dim,
            dout: self.dout * env_dim,
            kraus: self.kraus.iter().map(|k| k.kron(&id)).collect(),
        }
    }

    /// `self ⊗ other` (independent parallel use).
    pub fn tensor(&self, other: &Self) -> Self {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        Self {
            din: self.din * other.din,
            dout: self.dout * other.dout,
            kraus,
        }
    }
}

/// `Σ K ρ K†`.
pub fn apply_kraus(ch: &KrausChannel, rho: &DensityState) -> Result<DensityState> {
    let out = ch.apply_operator(rho.matrix())?;
    let layout = if ch.din == ch.dout {
        rho.layout().clone()
    } else {
        crate::tensor::SystemLayout::single("S", ch.dout)
    };
    Ok(DensityState::from_trusted(out, layout))
}

/// Generalized amplitude damping `R_{p,λ}`.
pub fn gad(p: f64, lambda: f64) -> Result<KrausChannel> {
    check_range("p", p, 0.0, 1.0, "[0, 1]")?;
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    let s = (1.0 - lambda).sqrt();
    let r1 = ComplexMatrix::diag(&[1.0, s]).scale_real(p.sqrt());
    let r2 = ComplexMatrix::diag(&[s, 1.0]).scale_real((1.0 - p).sqrt());
    let r3 = ComplexMatrix::unit(2, 0, 1).scale_real((p * lambda).sqrt());
    let r4 = ComplexMatrix::unit(2, 1, 0).scale_real(((1.0 - p) * lambda).sqrt());
    KrausChannel::new(vec![r1, r2, r3, r4])
}

/// Phase flip `T_q` with Kraus operators `{√q 𝟙, √(1−q) σz}`.
pub fn phase_flip(q: f64) -> Result<KrausChannel> {
    check_range("q", q, 0.0, 1.0, "[0, 1]")?;
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_real(q.sqrt()),
        pauli::z().scale_real((1.0 - q).sqrt()),
    ])
}

/// Single-Kraus channel `U · U†`.
pub fn unitary_channel(u: &ComplexMatrix) -> Result<KrausChannel> {
    let dev = u.unitarity_defect();
    if dev > KRAUS_TP_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(KrausChannel {
        din: u.rows(),
        dout: u.rows(),
        kraus: vec![u.clone()],
    })
}

/// `X ↦ Tr[X] σ` on a `din`-dimensional input.
pub fn replacement_channel(sigma: &DensityState, din: usize) -> Result<KrausChannel> {
    if din == 0 {
        return Err(Error::DimensionMismatch("replacement input dimension 0".into()));
    }
    let e = herm_eig(sigma.matrix())?;
    let dout = sigma.dim();
    let mut kraus = Vec::new();
    for (k, &lam) in e.values.iter().enumerate() {
        if lam <= PSD_CLIP {
            continue;
        }
        let v = e.vector(k);
        for i in 0..din {
            let m = ComplexMatrix::from_fn(dout, din, |r, c| {
                if c == i {
                    v[r] * lam.sqrt()
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            kraus.push(m);
        }
    }
    KrausChannel::new(kraus)
}

/// `later ∘ earlier`, Kraus set `{L_i E_j}`.
pub fn compose(later: &KrausChannel, earlier: &KrausChannel) -> Result<KrausChannel> {
    if earlier.dout != later.din {
        return Err(Error::DimensionMismatch(format!(
            "cannot feed a {}-dimensional output into a {}-dimensional input",
            earlier.dout, later.din
        )));
    }
    let mut kraus = Vec::with_capacity(later.kraus.len() * earlier.kraus.len());
    for l in &later.kraus {
        for e in &earlier.kraus {
            kraus.push(l * e);
        }
    }
    Ok(KrausChannel {
        din: earlier.din,
        dout: later.dout,
        kraus,
    })
}

/// Random channel on `dim` from a Haar-random unitary dilation with an
/// `env_dim`-dimensional environment starting in `|0⟩`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize, env_dim: usize) -> KrausChannel {
    let u = haar_unitary(rng, dim * env_dim);
    // K_e[i, j] = ⟨i, e| U |j, 0⟩
    let kraus = (0..env_dim)
        .map(|e| ComplexMatrix::from_fn(dim, dim, |i, j| u[(i * env_dim + e, j * env_dim)]))
        .collect();
    KrausChannel {
        din: dim,
        dout: dim,
        kraus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{basis_ket, SystemLayout};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus() -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![C64::new(s, 0.0), C64::new(s, 0.0)]
    }

    fn minus() -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![C64::new(s, 0.0), C64::new(-s, 0.0)]
    }

    #[test]
    fn identity_channel_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = DensityState::from_matrix(crate::tensor::random::random_density(&mut rng, 3))
            .unwrap();
        let out = apply_kraus(&KrausChannel::identity(3), &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn gad_thermalizes_diagonal_states() {
        let ch = gad(0.8, 1.0).unwrap();
        for r in [0.0, 0.3, 0.5, 1.0] {
            let out = apply_kraus(&ch, &DensityState::qubit_diagonal(r).unwrap()).unwrap();
            assert!(out.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.8, 0.2])) < 1e-15);
        }
    }

    #[test]
    fn gad_without_damping_is_identity() {
        let ch = gad(0.37, 0.0).unwrap();
        let rho = DensityState::pure(&plus(), SystemLayout::single("S", 2)).unwrap();
        let out = apply_kraus(&ch, &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert!(ch.operators()[2].max_abs() == 0.0 && ch.operators()[3].max_abs() == 0.0);
    }

    #[test]
    fn gad_parameter_grid_is_trace_preserving() {
        for i in 0..=10 {
            for j in 0..=10 {
                let ch = gad(i as f64 / 10.0, j as f64 / 10.0).unwrap();
                assert!(ch.tp_deviation() < 1e-12);
            }
        }
        assert!(gad(1.1, 0.5).is_err());
        assert!(gad(0.5, -0.1).is_err());
    }

    #[test]
    fn phase_flip_cases() {
        assert!(phase_flip(-0.1).is_err());
        let plus_state = DensityState::pure(&plus(), SystemLayout::single("S", 2)).unwrap();
        let id = apply_kraus(&phase_flip(1.0).unwrap(), &plus_state).unwrap();
        assert!(id.matrix().max_abs_diff(plus_state.matrix()) < 1e-15);
        let flipped = apply_kraus(&phase_flip(0.0).unwrap(), &plus_state).unwrap();
        assert!(flipped.matrix().max_abs_diff(&ComplexMatrix::projector(&minus())) < 1e-15);
        let mixed = apply_kraus(&phase_flip(0.8).unwrap(), &plus_state).unwrap();
        let expected = &ComplexMatrix::projector(&plus()).scale_real(0.8)
            + &ComplexMatrix::projector(&minus()).scale_real(0.2);
        assert!(mixed.matrix().max_abs_diff(&expected) < 1e-15);
        // diagonal states are untouched
        let d = DensityState::qubit_diagonal(0.3).unwrap();
        let out = apply_kraus(&phase_flip(0.4).unwrap(), &d).unwrap();
        assert!(out.matrix().max_abs_diff(d.matrix()) < 1e-15);
    }

    #[test]
    fn unitary_channels() {
        let flip = unitary_channel(&pauli::x()).unwrap();
        let zero = DensityState::pure(&basis_ket(2, 0), SystemLayout::single("S", 2)).unwrap();
        let out = apply_kraus(&flip, &zero).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::projector(&basis_ket(2, 1))) < 1e-15);
        assert_eq!(unitary_channel(&ComplexMatrix::identity(2)).unwrap(), KrausChannel::identity(2));
        assert!(matches!(
            unitary_channel(&ComplexMatrix::diag(&[1.0, 0.5])),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn replacement_outputs_sigma() {
        let zero = DensityState::pure(&basis_ket(2, 0), SystemLayout::single("S", 2)).unwrap();
        let ch = replacement_channel(&zero, 2).unwrap();
        let rho = DensityState::qubit_diagonal(0.25).unwrap();
        assert!(apply_kraus(&ch, &rho).unwrap().matrix().max_abs_diff(zero.matrix()) < 1e-15);

        let tau = DensityState::qubit_diagonal(0.8).unwrap();
        let ch = replacement_channel(&tau, 2).unwrap();
        let one = DensityState::pure(&basis_ket(2, 1), SystemLayout::single("S", 2)).unwrap();
        assert!(apply_kraus(&ch, &one).unwrap().matrix().max_abs_diff(tau.matrix()) < 1e-15);
    }

    #[test]
    fn replacement_random_sigma_is_tp() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let sigma =
                DensityState::from_matrix(crate::tensor::random::random_density(&mut rng, 2))
                    .unwrap();
            let ch = replacement_channel(&sigma, 3).unwrap();
            assert_eq!((ch.din(), ch.dout()), (3, 2));
            assert!(ch.tp_deviation() < 1e-12);
        }
    }

    #[test]
    fn composition_thermalizes_both_orders() {
        let r = gad(0.8, 1.0).unwrap();
        let t = phase_flip(0.3).unwrap();
        let tau = ComplexMatrix::diag(&[0.8, 0.2]);
        for ch in [compose(&t, &r).unwrap(), compose(&r, &t).unwrap()] {
            for x in [0.0, 0.4, 1.0] {
                let out = apply_kraus(&ch, &DensityState::qubit_diagonal(x).unwrap()).unwrap();
                assert!(out.matrix().max_abs_diff(&tau) < 1e-15);
            }
        }
    }

    #[test]
    fn compose_dimension_mismatch() {
        let a = KrausChannel::identity(2);
        let b = KrausChannel::identity(3);
        assert!(matches!(compose(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn identity_composition_on_basis_inputs() {
        let ch = gad(0.3, 0.6).unwrap();
        let composed = compose(&KrausChannel::identity(2), &ch).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let x = ComplexMatrix::unit(2, i, j);
                let a = composed.apply_operator(&x).unwrap();
                let b = ch.apply_operator(&x).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-15);
            }
        }
    }

    #[test]
    fn random_channels_are_tp() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2, 3, 4] {
            assert!(random_channel(&mut rng, d, 2).tp_deviation() < 1e-12);
        }
    }
}
