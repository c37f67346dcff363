//! Grid evaluation of the protocol for every configured process.

use crate::config::{Experiment, Protocol, ProcessSpec, SweepConfig, TargetKind};
use crate::error::CliError;
use causalthermo_core::optimizer::{maximize_fn, Objective};
use causalthermo_core::thermo::{
    ancilla_state, average_figure, pure_target, run_protocol_on_channel, Branch,
};
use causalthermo_core::{
    ChoiOperator, DensityState, Hamiltonian, KrausChannel, ParamVector, Superchannel, ThermoFigure,
};
use rayon::prelude::*;

/// One output line.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub process: String,
    pub r: f64,
    /// Only reported for ergotropy sweeps.
    pub delta_rho: Option<f64>,
    pub figure: &'static str,
    pub value: f64,
    pub probabilities: [f64; 2],
    /// Set when the protocol was optimized or given explicitly.
    pub params: Option<ParamVector>,
}

/// A process with its slot channels already contracted.
pub struct Prepared {
    pub label: String,
    pub superchannel: Superchannel,
    pub channels: Vec<KrausChannel>,
    pub channel: ChoiOperator,
}

pub fn prepare(cfg: &SweepConfig, spec: &ProcessSpec) -> Result<Prepared, CliError> {
    let superchannel = Superchannel::build(spec.kind.clone())?;
    let channels = cfg.slot_channels(superchannel.arity())?;
    let channel = superchannel.output_channel_kraus(&channels)?;
    Ok(Prepared {
        label: spec.label.clone(),
        superchannel,
        channels,
        channel,
    })
}

pub fn target_state(kind: TargetKind, r: f64) -> Result<DensityState, CliError> {
    Ok(match kind {
        TargetKind::Diagonal => DensityState::qubit_diagonal(r)?,
        TargetKind::Pure => pure_target(r)?,
    })
}

pub fn figure(cfg: &SweepConfig) -> Result<ThermoFigure, CliError> {
    Ok(match cfg.experiment {
        Experiment::FreeEnergy => ThermoFigure::free_energy(cfg.beta)?,
        Experiment::Ergotropy => ThermoFigure::Ergotropy,
    })
}

fn branches_at(
    prep: &Prepared,
    target: &DensityState,
    p: &ParamVector,
) -> Result<Vec<Branch>, CliError> {
    let ancilla = ancilla_state(p.x, p.chi)?;
    Ok(run_protocol_on_channel(&prep.channel, target, &ancilla, &p.basis())?)
}

fn probabilities(branches: &[Branch]) -> [f64; 2] {
    [branches[0].probability, branches[1].probability]
}

/// Evaluates one grid point. `params` overrides the configured protocol.
pub fn evaluate_point(
    cfg: &SweepConfig,
    prep: &Prepared,
    r: f64,
    params: Option<ParamVector>,
) -> Result<SweepRow, CliError> {
    let h = Hamiltonian::qubit();
    let fig = figure(cfg)?;
    let target = target_state(cfg.target, r)?;
    let (value, probabilities, params) = match (params, cfg.protocol) {
        (Some(p), _) => {
            p.validate()?;
            let b = branches_at(prep, &target, &p)?;
            (average_figure(&b, fig, &h)?, probabilities(&b), Some(p))
        }
        (None, Protocol::Fixed { x, chi, m, phi }) => {
            let p = ParamVector::new(m, phi, x, chi)?;
            let b = branches_at(prep, &target, &p)?;
            (average_figure(&b, fig, &h)?, probabilities(&b), None)
        }
        (None, Protocol::Optimize) => {
            let best = match fig {
                ThermoFigure::Ergotropy => {
                    let obj = Objective::from_channel(&prep.channel, &target, &h)?;
                    maximize_fn(&|p: &ParamVector| obj.evaluate(p), &cfg.optimizer)?
                }
                ThermoFigure::FreeEnergy { .. } => {
                    let f = |p: &ParamVector| {
                        branches_at(prep, &target, p)
                            .ok()
                            .and_then(|b| average_figure(&b, fig, &h).ok())
                            .unwrap_or(f64::NAN)
                    };
                    maximize_fn(&f, &cfg.optimizer)?
                }
            };
            let b = branches_at(prep, &target, &best.best_params)?;
            (best.best_value, probabilities(&b), Some(best.best_params))
        }
    };
    if !value.is_finite() {
        return Err(CliError::Input(format!(
            "{} at r = {r}: non-finite value",
            prep.label
        )));
    }
    Ok(SweepRow {
        process: prep.label.clone(),
        r,
        delta_rho: (cfg.experiment == Experiment::Ergotropy).then_some(1.0 - 2.0 * r),
        figure: fig.name(),
        value,
        probabilities,
        params,
    })
}

/// All rows, ordered by process then grid index. Runs on the current rayon
/// pool; the ordering does not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    let prepared: Vec<Prepared> = cfg
        .processes
        .par_iter()
        .map(|s| prepare(cfg, s))
        .collect::<Result<_, _>>()?;
    let rs = cfg.grid.values();
    let tasks: Vec<(usize, f64)> = (0..prepared.len())
        .flat_map(|i| rs.iter().map(move |&r| (i, r)))
        .collect();
    tasks
        .par_iter()
        .map(|&(i, r)| evaluate_point(cfg, &prepared[i], r, None))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    #[test]
    fn composition_free_energy_is_flat() {
        let mut cfg = SweepConfig::defaults(Experiment::FreeEnergy).unwrap();
        cfg.processes.truncate(1);
        cfg.grid.points = 5;
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 5);
        // F(τ) = E − S ln2/β for τ = diag(0.8, 0.2), β = 2
        let h2 = -(0.8f64 * 0.8f64.log2() + 0.2 * 0.2f64.log2());
        let expect = 0.2 - h2 * std::f64::consts::LN_2 / 2.0;
        for row in &rows {
            assert!((row.value - expect).abs() < 1e-12);
            assert_eq!(row.delta_rho, None);
            assert_eq!(row.params, None);
            assert!((row.probabilities[0] + row.probabilities[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rows_are_ordered() {
        let mut cfg = SweepConfig::defaults(Experiment::FreeEnergy).unwrap();
        cfg.grid.points = 3;
        let rows = run_sweep(&cfg).unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.process.as_str()).collect();
        assert_eq!(&names[..4], ["composition", "composition", "composition", "switch2"]);
        assert_eq!(rows[1].r, 0.5);
        assert_eq!(rows.len(), 3 * cfg.processes.len());
    }

    #[test]
    fn optimized_row_matches_fixed_reevaluation() {
        let mut cfg = SweepConfig::defaults(Experiment::Ergotropy).unwrap();
        cfg.optimizer.restarts = 4;
        let prep = prepare(&cfg, cfg.process("switch2").unwrap()).unwrap();
        let row = evaluate_point(&cfg, &prep, 0.3, None).unwrap();
        let p = row.params.unwrap();
        let again = evaluate_point(&cfg, &prep, 0.3, Some(p)).unwrap();
        assert!((row.value - again.value).abs() < 1e-12);
        assert_eq!(row.delta_rho, Some(1.0 - 0.6));
        assert!(row.value >= evaluate_point(&cfg, &prep, 0.3, Some(ParamVector::benchmark())).unwrap().value - 1e-9);
    }

    #[test]
    fn free_energy_can_be_optimized() {
        let mut cfg = SweepConfig::defaults(Experiment::FreeEnergy).unwrap();
        cfg.protocol = Protocol::Optimize;
        cfg.optimizer.restarts = 4;
        let prep = prepare(&cfg, cfg.process("switch2").unwrap()).unwrap();
        let opt = evaluate_point(&cfg, &prep, 0.2, None).unwrap();
        let fixed = evaluate_point(&cfg, &prep, 0.2, Some(ParamVector::benchmark())).unwrap();
        assert!(opt.value >= fixed.value - 1e-9);
    }
}
