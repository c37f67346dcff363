//! Sweep configuration: a flat TOML file where every key is optional and
//! unknown keys are rejected.
//!
//! ```toml
//! processes = ["composition", "switch2", "ising2"]
//! p = 0.8
//! q = 0.8
//! lambda = 1.0
//! r_points = 41
//! ancilla = "plus"            # or [x, chi]
//! measurement = "plus-minus"  # "computational", "optimize", or [m, phi]
//! ```

use crate::error::CliError;
use causalthermo_core::channels::{gad, phase_flip};
use causalthermo_core::processes::{AuxState, LuganoWiring};
use causalthermo_core::thermo::beta_from_gad;
use causalthermo_core::{KrausChannel, OptConfig, ParamVector, ProcessKind};
use serde::Deserialize;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FreeEnergy,
    Ergotropy,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::FreeEnergy => "free-energy",
            Experiment::Ergotropy => "ergotropy",
        })
    }
}

/// Input state of the target as a function of `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    /// `r|0⟩⟨0| + (1−r)|1⟩⟨1|`
    Diagonal,
    /// `√r|0⟩ + √(1−r)|1⟩`
    Pure,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AngleSpec {
    Named(String),
    Angles([f64; 2]),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<Experiment>,
    processes: Option<Vec<String>>,
    p: Option<f64>,
    q: Option<f64>,
    lambda: Option<f64>,
    beta: Option<f64>,
    r_start: Option<f64>,
    r_stop: Option<f64>,
    r_points: Option<usize>,
    target: Option<TargetKind>,
    ancilla: Option<AngleSpec>,
    measurement: Option<AngleSpec>,
    lugano_auxiliary: Option<String>,
    restarts: Option<usize>,
    tolerance: Option<f64>,
    xatol: Option<f64>,
    max_iterations: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

/// How the ancilla is prepared and measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// Preparation `(x, χ)` and measurement `(m, φ)` held fixed.
    Fixed { x: f64, chi: f64, m: f64, phi: f64 },
    /// Maximize the figure over all four angles.
    Optimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    /// Name as written in the config; used verbatim in the CSV.
    pub label: String,
    pub kind: ProcessKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.start + span * i as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub processes: Vec<ProcessSpec>,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    /// Inverse temperature for free energy; unused for ergotropy.
    pub beta: f64,
    pub grid: Grid,
    pub target: TargetKind,
    pub protocol: Protocol,
    pub optimizer: OptConfig,
    /// State fed to the spare Lugano input when the name is plain `lugano`.
    pub auxiliary: AuxState,
    pub out: Option<PathBuf>,
}

fn process_spec(name: &str, aux: AuxState) -> Result<ProcessSpec, CliError> {
    let kind = if name == "lugano" {
        ProcessKind::Lugano(LuganoWiring::new(aux))
    } else {
        ProcessKind::from_str(name)?
    };
    Ok(ProcessSpec {
        label: name.to_string(),
        kind,
    })
}

const FREE_ENERGY_PROCESSES: [&str; 6] =
    ["composition", "switch2", "ising2", "switch3", "ising3", "lugano"];
const ERGOTROPY_PROCESSES: [&str; 7] = [
    "composition",
    "switch2",
    "ising2",
    "composition3",
    "switch3",
    "ising3",
    "lugano",
];

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
}

impl SweepConfig {
    /// Defaults for the given experiment with no file.
    pub fn defaults(experiment: Experiment) -> Result<Self, CliError> {
        Self::from_toml("", Some(experiment))
    }

    /// Parses `text`; `experiment` is forced by the subcommand when given.
    pub fn from_toml(text: &str, experiment: Option<Experiment>) -> Result<Self, CliError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
        let fail = |key: &str, msg: String| {
            CliError::Config(match line_of(text, key) {
                Some(n) => format!("line {}: {key}: {msg}", n + 1),
                None => format!("{key}: {msg}"),
            })
        };

        let experiment = match (experiment, raw.experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(fail("experiment", format!("`{b}` conflicts with the `{a}` subcommand")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => {
                return Err(CliError::Config(
                    "experiment is not set; add `experiment = \"free-energy\"` or `\"ergotropy\"`".into(),
                ))
            }
        };
        let free = experiment == Experiment::FreeEnergy;

        let (p, q, lambda) = if free {
            (raw.p.unwrap_or(0.8), raw.q.unwrap_or(0.8), raw.lambda.unwrap_or(1.0))
        } else {
            (raw.p.unwrap_or(1.0 / 3.0), raw.q.unwrap_or(0.0), raw.lambda.unwrap_or(0.5))
        };
        for (key, v) in [("p", p), ("q", q), ("lambda", lambda)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(fail(key, format!("{v} is outside [0, 1]")));
            }
        }
        let beta = match raw.beta {
            Some(b) => b,
            None => beta_from_gad(p),
        };
        if free && !(beta.is_finite() && beta > 0.0) {
            let key = if raw.beta.is_some() { "beta" } else { "p" };
            return Err(fail(
                key,
                format!("inverse temperature {beta} is not positive; free energy needs p in (1/2, 1) or an explicit beta > 0"),
            ));
        }

        let grid = Grid {
            start: raw.r_start.unwrap_or(0.0),
            stop: raw.r_stop.unwrap_or(1.0),
            points: raw.r_points.unwrap_or(if free { 41 } else { 11 }),
        };
        for (key, v) in [("r_start", grid.start), ("r_stop", grid.stop)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(fail(key, format!("{v} is outside [0, 1]")));
            }
        }
        if grid.points == 0 {
            return Err(fail("r_points", "the grid is empty".into()));
        }

        let aux = match &raw.lugano_auxiliary {
            Some(s) => AuxState::from_str(s).map_err(|e| fail("lugano_auxiliary", e.to_string()))?,
            None if free => AuxState::Zero,
            None => AuxState::Plus,
        };
        let names: Vec<String> = match raw.processes {
            Some(v) => v,
            None if free => FREE_ENERGY_PROCESSES.map(String::from).to_vec(),
            None => ERGOTROPY_PROCESSES.map(String::from).to_vec(),
        };
        if names.is_empty() {
            return Err(fail("processes", "the process list is empty".into()));
        }
        let mut processes = Vec::with_capacity(names.len());
        for name in names {
            if processes.iter().any(|s: &ProcessSpec| s.label == name) {
                return Err(fail("processes", format!("`{name}` is listed twice")));
            }
            let spec = process_spec(&name, aux).map_err(|e| fail("processes", e.to_string()))?;
            processes.push(spec);
        }

        let target = raw.target.unwrap_or(if free {
            TargetKind::Diagonal
        } else {
            TargetKind::Pure
        });

        let measurement = raw.measurement.unwrap_or(AngleSpec::Named(
            if free { "plus-minus" } else { "optimize" }.into(),
        ));
        let protocol = match measurement {
            AngleSpec::Named(s) if s == "optimize" => Protocol::Optimize,
            other => {
                let (m, phi) = match other {
                    AngleSpec::Named(s) => match s.as_str() {
                        "plus-minus" => (0.5, 0.0),
                        "computational" => (1.0, 0.0),
                        _ => {
                            return Err(fail(
                                "measurement",
                                format!("unknown basis `{s}`; expected plus-minus, computational, optimize or [m, phi]"),
                            ))
                        }
                    },
                    AngleSpec::Angles([m, phi]) => (m, phi),
                };
                let (x, chi) = match raw.ancilla.unwrap_or(AngleSpec::Named("plus".into())) {
                    AngleSpec::Named(s) => match s.as_str() {
                        "zero" => (0.0, 0.0),
                        "one" => (PI, 0.0),
                        "plus" => (PI / 2.0, 0.0),
                        "minus" => (PI / 2.0, PI),
                        _ => {
                            return Err(fail(
                                "ancilla",
                                format!("unknown state `{s}`; expected zero, one, plus, minus or [x, chi]"),
                            ))
                        }
                    },
                    AngleSpec::Angles([x, chi]) => (x, chi),
                };
                ParamVector::new(m, phi, x, chi).map_err(|e| fail("measurement", e.to_string()))?;
                Protocol::Fixed { x, chi, m, phi }
            }
        };

        let defaults = OptConfig::default();
        let optimizer = OptConfig {
            restarts: raw.restarts.unwrap_or(defaults.restarts),
            seed: raw.seed.unwrap_or(defaults.seed),
            tolerance: raw.tolerance.unwrap_or(defaults.tolerance),
            xatol: raw.xatol.unwrap_or(defaults.xatol),
            max_iterations: raw.max_iterations.unwrap_or(defaults.max_iterations),
        };
        optimizer
            .validate()
            .map_err(|e| CliError::Config(format!("optimizer: {e}")))?;

        Ok(Self {
            experiment,
            processes,
            p,
            q,
            lambda,
            beta,
            grid,
            target,
            protocol,
            optimizer,
            auxiliary: aux,
            out: raw.out,
        })
    }

    /// Slot channels: `(R, T)` for two slots, `(R, R, T)` for three.
    pub fn slot_channels(&self, arity: usize) -> Result<Vec<KrausChannel>, CliError> {
        let r = gad(self.p, self.lambda)?;
        let t = phase_flip(self.q)?;
        Ok(match arity {
            2 => vec![r, t],
            _ => vec![r.clone(), r, t],
        })
    }

    pub fn process(&self, label: &str) -> Option<&ProcessSpec> {
        self.processes.iter().find(|s| s.label == label)
    }

    /// The configured entry for `name`, or a fresh one if it is not listed.
    pub fn spec_for(&self, name: &str) -> Result<ProcessSpec, CliError> {
        match self.process(name) {
            Some(s) => Ok(s.clone()),
            None => process_spec(name, self.auxiliary),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_energy_defaults() {
        let c = SweepConfig::defaults(Experiment::FreeEnergy).unwrap();
        assert_eq!((c.p, c.q, c.lambda), (0.8, 0.8, 1.0));
        assert!((c.beta - 2.0).abs() < 1e-12);
        assert_eq!(c.grid.values().len(), 41);
        assert_eq!(c.grid.values()[20], 0.5);
        assert_eq!(c.target, TargetKind::Diagonal);
        assert!(matches!(c.protocol, Protocol::Fixed { m, .. } if m == 0.5));
        let lug = c.process("lugano").unwrap();
        assert!(matches!(&lug.kind, ProcessKind::Lugano(w) if w.auxiliary == AuxState::Zero));
    }

    #[test]
    fn ergotropy_defaults() {
        let c = SweepConfig::defaults(Experiment::Ergotropy).unwrap();
        assert_eq!((c.p, c.q, c.lambda), (1.0 / 3.0, 0.0, 0.5));
        assert_eq!(c.grid.points, 11);
        assert_eq!(c.protocol, Protocol::Optimize);
        assert_eq!(c.optimizer, OptConfig::default());
        let lug = c.process("lugano").unwrap();
        assert!(matches!(&lug.kind, ProcessKind::Lugano(w) if w.auxiliary == AuxState::Plus));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = SweepConfig::from_toml("p = 0.8\nlamda = 1.0\n", Some(Experiment::FreeEnergy))
            .unwrap_err()
            .to_string();
        assert!(err.contains("lamda"), "{err}");
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn out_of_range_reports_line() {
        let err = SweepConfig::from_toml("# c\nq = 1.5\n", Some(Experiment::FreeEnergy))
            .unwrap_err()
            .to_string();
        assert!(err.starts_with("config: line 2: q:"), "{err}");
    }

    #[test]
    fn free_energy_needs_positive_beta() {
        assert!(SweepConfig::from_toml("p = 0.3", Some(Experiment::FreeEnergy)).is_err());
        assert!(SweepConfig::from_toml("p = 0.3\nbeta = 1.0", Some(Experiment::FreeEnergy)).is_ok());
        assert!(SweepConfig::from_toml("p = 0.3", Some(Experiment::Ergotropy)).is_ok());
    }

    #[test]
    fn conflicting_experiment() {
        let r = SweepConfig::from_toml("experiment = \"ergotropy\"", Some(Experiment::FreeEnergy));
        assert!(r.is_err());
        assert!(SweepConfig::from_toml("", None).is_err());
        let c = SweepConfig::from_toml("experiment = \"ergotropy\"", None).unwrap();
        assert_eq!(c.experiment, Experiment::Ergotropy);
    }

    #[test]
    fn explicit_angles_and_names() {
        let text = "processes = [\"switch2\", \"lugano\", \"mixture:0.25\"]\nancilla = [0.0, 0.0]\nmeasurement = \"computational\"\nlugano_auxiliary = \"plus\"\n";
        let c = SweepConfig::from_toml(text, Some(Experiment::FreeEnergy)).unwrap();
        assert_eq!(
            c.protocol,
            Protocol::Fixed { x: 0.0, chi: 0.0, m: 1.0, phi: 0.0 }
        );
        assert_eq!(c.processes[2].kind, ProcessKind::Mixture(0.25));
        assert!(matches!(&c.processes[1].kind, ProcessKind::Lugano(w) if w.auxiliary == AuxState::Plus));
    }

    #[test]
    fn bad_entries() {
        let fe = Some(Experiment::FreeEnergy);
        assert!(SweepConfig::from_toml("processes = []", fe).is_err());
        assert!(SweepConfig::from_toml("processes = [\"switch9\"]", fe).is_err());
        assert!(SweepConfig::from_toml("processes = [\"ising2\", \"ising2\"]", fe).is_err());
        assert!(SweepConfig::from_toml("r_points = 0", fe).is_err());
        assert!(SweepConfig::from_toml("ancilla = \"up\"", fe).is_err());
        assert!(SweepConfig::from_toml("measurement = [2.0, 0.0]", fe).is_err());
        assert!(SweepConfig::from_toml("restarts = 0", fe).is_err());
        assert!(SweepConfig::from_toml("p = \"high\"", fe).is_err());
    }

    #[test]
    fn single_point_grid() {
        let g = Grid { start: 0.3, stop: 0.9, points: 1 };
        assert_eq!(g.values(), vec![0.3]);
    }
}
