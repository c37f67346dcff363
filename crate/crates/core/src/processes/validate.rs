use super::contraction::apply_process;
use super::structure::Process;
use crate::channels::{is_cptp, kraus_to_choi, random_channel, CPTP_TOL};
use crate::error::{Error, Result};
use crate::tensor::herm_eig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Environment dimension of the random dilations used for sampling.
pub const SAMPLE_ENV_DIM: usize = 2;

/// Outcome of [`validate_sampled`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub psd: bool,
    /// Smallest eigenvalue of the process matrix; `0` for pure processes.
    pub min_eigenvalue: f64,
    pub samples: usize,
    pub failures: usize,
    pub worst_tp_deviation: f64,
    pub worst_output_eigenvalue: f64,
    pub diagnostics: Vec<String>,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.psd && self.failures == 0
    }

    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        format!(
            "valid={}\npsd={}\nmin_eigenvalue={:e}\nsamples={}\nfailures={}\nworst_tp_deviation={:e}\nworst_output_eigenvalue={:e}\n",
            self.valid(),
            self.psd,
            self.min_eigenvalue,
            self.samples,
            self.failures,
            self.worst_tp_deviation,
            self.worst_output_eigenvalue
        )
    }
}

/// Checks positivity of the process and that `n` random CPTP slot tuples are
/// mapped to CPTP channels. Deterministic in `seed`.
pub fn validate_sampled(process: &Process, n: usize, seed: u64) -> Result<ValidationReport> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: "≥ 1",
        });
    }
    let st = process.structure();
    if let Some(s) = st.slots().iter().find(|s| s.input.dim != s.output.dim) {
        return Err(Error::DimensionMismatch(format!(
            "slot {} is not square; sampling needs equal input and output dimensions",
            s.label
        )));
    }
    let mut diagnostics = Vec::new();
    let min_eigenvalue = match process {
        Process::Vector(_) => 0.0,
        Process::Matrix(w) => match herm_eig(w.matrix()) {
            Ok(e) => e.min_value(),
            Err(err) => {
                diagnostics.push(format!("process matrix: {err}"));
                f64::NEG_INFINITY
            }
        },
    };
    let scale = match process {
        Process::Vector(v) => v.norm_sqr(),
        Process::Matrix(w) => w.matrix().max_abs(),
    }
    .max(1.0);
    let psd = min_eigenvalue >= -CPTP_TOL * scale;
    if !psd && min_eigenvalue.is_finite() {
        diagnostics.push(format!("process matrix not PSD: min eigenvalue {min_eigenvalue:.3e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut worst_tp: f64 = 0.0;
    let mut worst_eig = f64::INFINITY;
    for sample in 0..n {
        let chans: Vec<_> = st
            .slots()
            .iter()
            .map(|s| kraus_to_choi(&random_channel(&mut rng, s.input.dim, SAMPLE_ENV_DIM)))
            .collect();
        let out = apply_process(process, &chans)?;
        let r = is_cptp(&out);
        worst_tp = worst_tp.max(r.tp_deviation);
        worst_eig = worst_eig.min(r.min_eigenvalue);
        if !r.cptp {
            failures += 1;
            diagnostics.push(format!("sample {sample}: {}", r.diagnostic));
        }
    }
    Ok(ValidationReport {
        psd,
        min_eigenvalue,
        samples: n,
        failures,
        worst_tp_deviation: worst_tp,
        worst_output_eigenvalue: worst_eig,
        diagnostics,
    })
}
