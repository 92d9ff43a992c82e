//! Experiment timelines and their execution: time reversal, imperfection
//! ablations and Floquet-engineered XXZ dynamics.

mod engine;
pub mod floquet;
mod reversal;
mod scans;
mod timeline;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::couplings::{
    coupling_deviation, coupling_matrix, coupling_matrix_at, median_nn_strength, CouplingMatrix, InteractionParams,
};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::mace::{select_cluster, MaceConfig};
use crate::quantum::EvolutionConfig;
use crate::results::{Diagnostic, RunMeta, RunResult};
use crate::units::angular_to_mhz;

pub(crate) use engine::{Motion, Record, Simulator};
pub use floquet::{
    average_hamiltonian, build_floquet_schedule, AverageHamiltonian, CycleKind, FloquetMode, FloquetParams,
    ScheduleItem,
};
pub use reversal::{
    build_forward_timeline, build_reversal_timeline, engineered_events, revival_time, Engineering, PulseSpec,
    ReversalParams, RevivalRule, TransferModel,
};
pub use scans::{anisotropy_scan, cluster_size_scan, reversal_scan, AnisotropyScan};
pub use timeline::{CouplingForm, Event, EventTimeline};

/// Largest system accepted by the exact full-system solver.
pub const MAX_EXACT_SPINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solver {
    Mace(MaceConfig),
    Exact(EvolutionConfig),
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Mace(_) => "mace",
            Solver::Exact(_) => "exact",
        }
    }

    pub fn evolution(&self) -> &EvolutionConfig {
        match self {
            Solver::Mace(c) => &c.evolution,
            Solver::Exact(e) => e,
        }
    }

    pub fn validate(&self, system_size: usize) -> Result<()> {
        match self {
            Solver::Mace(c) => c.validate(system_size),
            Solver::Exact(e) => {
                if system_size > MAX_EXACT_SPINS {
                    return Err(Error::invalid(
                        "solver",
                        format!("exact evolution limited to {MAX_EXACT_SPINS} spins, got {system_size}"),
                    ));
                }
                e.validate()
            }
        }
    }
}

/// Per-center traces plus the records of the first unit (labels and clocks).
pub(crate) struct UnitOutput {
    pub centers: Vec<usize>,
    pub traces: Vec<Vec<[f64; 3]>>,
    pub template: Vec<Record>,
}

/// Runs `job` on every MACE cluster, or once on the full system.
pub(crate) fn run_units<F>(
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    solver: &Solver,
    motion: Motion,
    job: F,
) -> Result<UnitOutput>
where
    F: Fn(Simulator) -> Result<Vec<Record>> + Sync,
{
    let n = ensemble.len();
    solver.validate(n)?;
    interaction.validate()?;
    match solver {
        Solver::Mace(cfg) => {
            let j0 = coupling_matrix(
                &ensemble.positions,
                &InteractionParams {
                    sign_scale: 1.0,
                    ..interaction.clone()
                },
            )?;
            let centers = cfg.centers(n);
            let runs: Vec<Vec<Record>> = centers
                .par_iter()
                .map(|&c| {
                    let run = || {
                        let cluster = select_cluster(&j0, c, cfg.cluster_size)?;
                        let sub = ensemble.subset(&cluster);
                        let sim = Simulator::new(
                            sub.positions,
                            sub.velocities,
                            interaction,
                            &cfg.evolution,
                            motion,
                            vec![0],
                        )?;
                        job(sim)
                    };
                    run().map_err(|e| e.at_center(c))
                })
                .collect::<Result<_>>()?;
            let traces = runs
                .iter()
                .map(|r| r.iter().map(|rec| rec.sites[0]).collect())
                .collect();
            let template = runs.into_iter().next().unwrap_or_default();
            Ok(UnitOutput {
                centers,
                traces,
                template,
            })
        }
        Solver::Exact(evolution) => {
            let sim = Simulator::new(
                ensemble.positions.clone(),
                ensemble.velocities.clone(),
                interaction,
                evolution,
                motion,
                (0..n).collect(),
            )?;
            let recs = job(sim)?;
            let traces = (0..n).map(|s| recs.iter().map(|r| r.sites[s]).collect()).collect();
            Ok(UnitOutput {
                centers: (0..n).collect(),
                traces,
                template: recs,
            })
        }
    }
}

/// J_m and ||dJ|| of the whole ensemble at each wall-clock time.
pub fn coupling_diagnostics(
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    clocks: &[f64],
    motion: bool,
) -> Result<Vec<Diagnostic>> {
    let base = InteractionParams {
        sign_scale: 1.0,
        ..interaction.clone()
    };
    let j0 = coupling_matrix(&ensemble.positions, &base)?;
    let jm = |j: &CouplingMatrix| median_nn_strength(j).map(angular_to_mhz).unwrap_or(f64::NAN);
    let jm0 = jm(&j0);
    let mut last: Option<Diagnostic> = None;
    let mut out = Vec::with_capacity(clocks.len());
    for &clock in clocks {
        let d = match last {
            Some(d) if d.clock == clock => d,
            _ if !motion || clock == 0.0 => Diagnostic {
                clock,
                jm_mhz: jm0,
                delta_j: if j0.frobenius_norm() > 0.0 { 0.0 } else { f64::NAN },
            },
            _ => {
                let jt = coupling_matrix_at(&ensemble.positions_at(clock), &base, clock)?;
                Diagnostic {
                    clock,
                    jm_mhz: jm(&jt),
                    delta_j: coupling_deviation(&jt, &j0).unwrap_or(f64::NAN),
                }
            }
        };
        last = Some(d);
        out.push(d);
    }
    Ok(out)
}

pub(crate) fn assemble(
    axis: &str,
    x: Vec<f64>,
    units: UnitOutput,
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    motion: bool,
    solver: &Solver,
) -> Result<RunResult> {
    let clocks: Vec<f64> = units.template.iter().map(|r| r.clock).collect();
    let diagnostics = coupling_diagnostics(ensemble, interaction, &clocks, motion)?;
    let jm0_mhz = coupling_diagnostics(ensemble, interaction, &[0.0], false)?[0].jm_mhz;
    Ok(RunResult {
        axis: axis.to_string(),
        x,
        centers: units.centers,
        traces: units.traces,
        diagnostics,
        meta: RunMeta {
            solver: solver.name().to_string(),
            n_atoms: ensemble.len(),
            cluster_size: match solver {
                Solver::Mace(c) => Some(c.cluster_size),
                Solver::Exact(_) => None,
            },
            seed: Some(ensemble.params.seed),
            jm0_mhz: jm0_mhz.is_finite().then_some(jm0_mhz),
            config_hash: None,
            notes: Vec::new(),
        },
    })
}

/// Steps through the timeline with the chosen solver and records every measure event.
pub fn execute_timeline(
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    timeline: &EventTimeline,
    solver: &Solver,
) -> Result<RunResult> {
    timeline.validate()?;
    let motion = Motion::of(timeline);
    let units = run_units(ensemble, interaction, solver, motion, |mut sim| {
        sim.run(&timeline.events, 0)
    })?;
    let x = timeline.measure_labels();
    assemble("t_us", x, units, ensemble, interaction, motion.enabled, solver)
}
