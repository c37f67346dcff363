//! Maximization of daemonic ergotropy over ancilla preparation `(x, χ)` and
//! measurement basis `(m, φ)`.
//!
//! Each restart runs Nelder–Mead on unconstrained coordinates. `m` and `x`
//! are obtained by reflection at their interval ends, `φ` and `χ` by wrapping
//! modulo 2π, so every simplex vertex maps to a valid parameter point.
//! Restart `k` draws its start from a ChaCha8 stream `k` seeded with
//! `cfg.seed`, which makes serial and parallel runs identical.

mod simplex;

use crate::channels::{ChoiOperator, DensityState, KrausChannel};
use crate::error::{Error, Result};
use crate::processes::Superchannel;
use crate::tensor::{ComplexMatrix, C64, ZERO};
use crate::thermo::{
    ancilla_ket, conditional_operators, energies_ascending, ergotropy_of, measurement_basis,
    Hamiltonian, MeasurementBasis,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use simplex::{minimize, SimplexSettings};
use std::f64::consts::{PI, TAU};

/// Measurement weight `m`, measurement phase `φ`, preparation angles `x`, `χ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamVector {
    pub m: f64,
    pub phi: f64,
    pub x: f64,
    pub chi: f64,
}

impl ParamVector {
    pub fn new(m: f64, phi: f64, x: f64, chi: f64) -> Result<Self> {
        let p = Self { m, phi, x, chi };
        p.validate()?;
        Ok(p)
    }

    /// `|+⟩` preparation, `{|+⟩, |−⟩}` measurement.
    pub fn benchmark() -> Self {
        Self {
            m: 0.5,
            phi: 0.0,
            x: PI / 2.0,
            chi: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, lo: f64, hi: f64, closed: bool, range: &'static str| {
            let ok = v.is_finite() && v >= lo && (v < hi || (closed && v == hi));
            if ok {
                Ok(())
            } else {
                Err(Error::OutOfRange { name, value: v, range })
            }
        };
        check("m", self.m, 0.0, 1.0, true, "[0, 1]")?;
        check("phi", self.phi, 0.0, TAU, false, "[0, 2π)")?;
        check("x", self.x, 0.0, PI, true, "[0, π]")?;
        check("chi", self.chi, 0.0, TAU, false, "[0, 2π)")
    }

    /// Maps unconstrained coordinates `[m, φ, x, χ]` into bounds.
    pub fn from_raw(raw: &[f64]) -> Self {
        Self {
            m: reflect(raw[0], 1.0),
            phi: wrap(raw[1]),
            x: reflect(raw[2], PI),
            chi: wrap(raw[3]),
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.m, self.phi, self.x, self.chi]
    }

    pub fn basis(&self) -> MeasurementBasis {
        measurement_basis(self.m, self.phi).expect("validated bounds")
    }
}

fn reflect(v: f64, width: f64) -> f64 {
    let t = v.rem_euclid(2.0 * width);
    if t <= width {
        t
    } else {
        2.0 * width - t
    }
}

fn wrap(v: f64) -> f64 {
    let t = v.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

const RANGES: [f64; 4] = [1.0, TAU, PI, TAU];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Stop when the simplex values agree to this.
    pub tolerance: f64,
    /// ... and the vertices agree to this in raw coordinates.
    pub xatol: f64,
    pub max_iterations: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 7,
            tolerance: 1e-8,
            xatol: 1e-7,
            max_iterations: 2000,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::OutOfRange {
                name: "restarts",
                value: 0.0,
                range: "≥ 1",
            });
        }
        for (name, v) in [("tolerance", self.tolerance), ("xatol", self.xatol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "(0, ∞)",
                });
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::OutOfRange {
                name: "max_iterations",
                value: 0.0,
                range: "≥ 1",
            });
        }
        Ok(())
    }

    fn settings(&self) -> SimplexSettings {
        SimplexSettings {
            xatol: self.xatol,
            fatol: self.tolerance,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub start: ParamVector,
    pub start_value: f64,
    pub end: ParamVector,
    pub end_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_value: f64,
    pub best_params: ParamVector,
    pub trace: Vec<RestartRecord>,
    pub evaluations: usize,
}

/// Daemonic ergotropy of the protocol output as a function of the
/// preparation and measurement parameters, with the process contraction done
/// once up front.
#[derive(Debug, Clone)]
pub struct Objective {
    superop: ComplexMatrix,
    target: ComplexMatrix,
    h: Hamiltonian,
    energies: Vec<f64>,
}

impl Objective {
    pub fn new(
        process: &Superchannel,
        channels: &[KrausChannel],
        target: &DensityState,
        h: &Hamiltonian,
    ) -> Result<Self> {
        Self::from_channel(&process.output_channel_kraus(channels)?, target, h)
    }

    /// Same, for an already-contracted channel on `target ⊗ ancilla`.
    pub fn from_channel(j: &ChoiOperator, target: &DensityState, h: &Hamiltonian) -> Result<Self> {
        if target.dim() != h.dim() || j.din() != 2 * h.dim() {
            return Err(Error::DimensionMismatch(format!(
                "target {} and Hamiltonian {} against a channel on {}",
                target.dim(),
                h.dim(),
                j.din()
            )));
        }
        Ok(Self {
            superop: j.superoperator(),
            target: target.matrix().clone(),
            h: h.clone(),
            energies: energies_ascending(h),
        })
    }

    /// Joint output on `target ⊗ ancilla`.
    pub fn output(&self, p: &ParamVector) -> ComplexMatrix {
        let a = ancilla_ket(p.x, p.chi);
        let anc = ComplexMatrix::projector(&a);
        let input = self.target.kron(&anc);
        let n = input.rows();
        let mut out = vec![ZERO; n * n];
        let inp = input.data();
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.superop.data()[r * n * n..(r + 1) * n * n];
            *o = row.iter().zip(inp).map(|(s, x)| s * x).sum::<C64>();
        }
        ComplexMatrix::new(n, n, out).expect("square")
    }

    pub fn evaluate(&self, p: &ParamVector) -> f64 {
        let out = self.output(p);
        conditional_operators(&out, self.h.dim(), &p.basis())
            .iter()
            .map(|op| ergotropy_of(op, self.h.matrix(), &self.energies))
            .sum()
    }
}

/// From-scratch evaluation with `H = |1⟩⟨1|`.
pub fn objective(
    process: &Superchannel,
    channels: &[KrausChannel],
    target: &DensityState,
    params: &ParamVector,
) -> Result<f64> {
    params.validate()?;
    Ok(Objective::new(process, channels, target, &Hamiltonian::qubit())?.evaluate(params))
}

fn local_search<F: Fn(&ParamVector) -> f64 + ?Sized>(
    f: &F,
    start: [f64; 4],
    cfg: &OptConfig,
) -> (RestartRecord, usize) {
    let g = |raw: &[f64]| -f(&ParamVector::from_raw(raw));
    let steps = RANGES.map(|r| r / 4.0);
    let out = minimize(&g, &start, &steps, &cfg.settings());
    let start_p = ParamVector::from_raw(&start);
    let record = RestartRecord {
        start: start_p,
        start_value: f(&start_p),
        end: ParamVector::from_raw(&out.x),
        end_value: -out.value,
        iterations: out.iterations,
        converged: out.converged,
    };
    (record, out.evaluations + 1)
}

/// Multi-start maximization of an arbitrary function of the parameters.
pub fn maximize_fn<F: Fn(&ParamVector) -> f64 + Sync>(f: &F, cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    let runs: Vec<(RestartRecord, usize)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let start = RANGES.map(|r| rng.random::<f64>() * r);
            local_search(f, start, cfg)
        })
        .collect();
    let mut best = 0;
    for (k, (r, _)) in runs.iter().enumerate() {
        if r.end_value > runs[best].0.end_value {
            best = k;
        }
    }
    Ok(OptResult {
        best_value: runs[best].0.end_value,
        best_params: runs[best].0.end,
        evaluations: runs.iter().map(|(_, e)| e).sum(),
        trace: runs.into_iter().map(|(r, _)| r).collect(),
    })
}

pub fn maximize(
    process: &Superchannel,
    channels: &[KrausChannel],
    target: &DensityState,
    cfg: &OptConfig,
) -> Result<OptResult> {
    let obj = Objective::new(process, channels, target, &Hamiltonian::qubit())?;
    maximize_fn(&|p: &ParamVector| obj.evaluate(p), cfg)
}

/// Uniform grid with `resolution` points per axis (`m`, `x` include both
/// ends; `φ`, `χ` step by `2π/resolution`), then one local refinement from
/// the best grid point. Returns the refined value and parameters.
pub fn grid_oracle_fn<F: Fn(&ParamVector) -> f64 + Sync>(
    f: &F,
    resolution: usize,
) -> Result<(f64, ParamVector)> {
    if resolution < 2 {
        return Err(Error::OutOfRange {
            name: "resolution",
            value: resolution as f64,
            range: "≥ 2",
        });
    }
    let r = resolution;
    let closed = |i: usize, w: f64| w * i as f64 / (r - 1) as f64;
    let open = |i: usize| TAU * i as f64 / r as f64;
    let (value, raw) = (0..r)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, [0.0; 4]);
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let raw = [closed(i, 1.0), open(j), closed(k, PI), open(l)];
                        let v = f(&ParamVector::from_raw(&raw));
                        if v > best.0 {
                            best = (v, raw);
                        }
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::NEG_INFINITY, [0.0; 4]), |a, b| if b.0 > a.0 { b } else { a });
    let (rec, _) = local_search(f, raw, &OptConfig::default());
    Ok(if rec.end_value > value {
        (rec.end_value, rec.end)
    } else {
        (value, ParamVector::from_raw(&raw))
    })
}

pub fn grid_oracle(
    process: &Superchannel,
    channels: &[KrausChannel],
    target: &DensityState,
    resolution: usize,
) -> Result<f64> {
    let obj = Objective::new(process, channels, target, &Hamiltonian::qubit())?;
    Ok(grid_oracle_fn(&|p: &ParamVector| obj.evaluate(p), resolution)?.0)
}
