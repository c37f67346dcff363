//! Quantum channels in Kraus and Choi form.

mod choi;
mod kraus;
mod state;

pub use choi::{apply_via_choi, kraus_to_choi, ChoiOperator, CHOI_TOL};
pub use kraus::{
    apply_kraus, compose, gad, phase_flip, random_channel, replacement_channel, unitary_channel,
    KrausChannel, KRAUS_TP_TOL,
};
pub use state::{DensityState, STATE_TOL};


use crate::tensor::{herm_eig, ComplexMatrix};

/// Tolerance used by [`is_cptp`].
pub const CPTP_TOL: f64 = 1e-8;

/// Outcome of a CPTP check.
#[derive(Debug, Clone, PartialEq)]
pub struct CptpReport {
    pub cptp: bool,
    /// `‖ΣK†K − 𝟙‖_F` or `‖Tr_out J − 𝟙‖_F`.
    pub tp_deviation: f64,
    /// Smallest Choi eigenvalue; `0` for Kraus input, which is CP by construction.
    pub min_eigenvalue: f64,
    pub diagnostic: String,
}

/// Anything that can be checked for complete positivity and trace preservation.
pub trait CptpCheck {
    fn cptp_report(&self) -> CptpReport;
}

impl CptpCheck for KrausChannel {
    fn cptp_report(&self) -> CptpReport {
        let dev = self.tp_deviation();
        let cptp = dev <= CPTP_TOL;
        CptpReport {
            cptp,
            tp_deviation: dev,
            min_eigenvalue: 0.0,
            diagnostic: if cptp {
                "ok".into()
            } else {
                format!("trace preservation violated: ‖ΣK†K − 𝟙‖_F = {dev:.3e}")
            },
        }
    }
}

impl CptpCheck for ChoiOperator {
    fn cptp_report(&self) -> CptpReport {
        let dev = self
            .input_marginal()
            .distance(&ComplexMatrix::identity(self.din()));
        let herm = self.matrix().hermiticity_defect();
        let min = if herm > crate::tensor::HERMITIAN_TOL {
            f64::NEG_INFINITY
        } else {
            herm_eig(self.matrix()).map(|e| e.min_value()).unwrap_or(f64::NEG_INFINITY)
        };
        let mut problems = Vec::new();
        if dev > CPTP_TOL {
            problems.push(format!("trace preservation violated: ‖Tr_out J − 𝟙‖_F = {dev:.3e}"));
        }
        if min < -CPTP_TOL {
            problems.push(if min.is_finite() {
                format!("positivity violated: min eigenvalue {min:.3e}")
            } else {
                format!("positivity violated: J not Hermitian (deviation {herm:.3e})")
            });
        }
        CptpReport {
            cptp: problems.is_empty(),
            tp_deviation: dev,
            min_eigenvalue: min,
            diagnostic: if problems.is_empty() {
                "ok".into()
            } else {
                problems.join("; ")
            },
        }
    }
}

pub fn is_cptp<C: CptpCheck + ?Sized>(ch: &C) -> CptpReport {
    ch.cptp_report()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SystemLayout;

    #[test]
    fn identity_kraus_passes() {
        let r = is_cptp(&KrausChannel::identity(2));
        assert!(r.cptp, "{}", r.diagnostic);
    }

    #[test]
    fn scaled_identity_fails_tp() {
        let ch = KrausChannel::new_unchecked(vec![ComplexMatrix::identity(2).scale_real(0.5)])
            .unwrap();
        let r = is_cptp(&ch);
        assert!(!r.cptp);
        assert!(r.diagnostic.contains("trace preservation"));
        assert!((r.tp_deviation - (2.0f64 * 0.75 * 0.75).sqrt()).abs() < 1e-12);
        assert!(KrausChannel::new(vec![ComplexMatrix::identity(2).scale_real(0.5)]).is_err());
    }

    #[test]
    fn gad_grid_passes_both_representations() {
        for i in 0..=10 {
            for j in 0..=10 {
                let ch = gad(i as f64 / 10.0, j as f64 / 10.0).unwrap();
                assert!(is_cptp(&ch).cptp);
                assert!(is_cptp(&kraus_to_choi(&ch)).cptp);
            }
        }
    }

    #[test]
    fn non_positive_choi_fails() {
        // transpose map: TP but not CP
        let mut j = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for k in 0..2 {
                j[(i * 2 + k, k * 2 + i)] = crate::tensor::ONE;
            }
        }
        let c = ChoiOperator::new_unchecked(
            j.clone(),
            SystemLayout::single("in", 2),
            SystemLayout::single("out", 2),
        )
        .unwrap();
        let r = is_cptp(&c);
        assert!(!r.cptp);
        assert!(r.diagnostic.contains("positivity"));
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-12);
        assert!(ChoiOperator::new(j, SystemLayout::single("in", 2), SystemLayout::single("out", 2))
            .is_err());
    }
}
