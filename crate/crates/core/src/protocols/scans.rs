use crate::couplings::InteractionParams;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::mace::MaceConfig;
use crate::results::RunResult;

use super::engine::Motion;
use super::floquet::FloquetParams;
use super::reversal::{build_forward_timeline, build_reversal_timeline, engineered_events, ReversalParams};
use super::timeline::Event;
use super::{assemble, execute_timeline, run_units, Solver};

/// Reversed magnetization at t_rev for each t1. The forward evolution is
/// shared: each t1 branches off one running simulation.
pub fn reversal_scan(
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    t1_list: &[f64],
    p: &ReversalParams,
    solver: &Solver,
) -> Result<RunResult> {
    p.validate()?;
    if t1_list.iter().any(|t| !(*t >= 0.0)) || t1_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("t1_list", "must be sorted and non-negative"));
    }
    let motion = Motion {
        enabled: p.motion_enabled,
        refresh: p.coupling_refresh_interval,
    };
    let prep = match p.prep {
        Some(d) => engineered_events(d, &super::Engineering::Natural)?,
        None => Vec::new(),
    };
    let tails: Vec<Vec<Event>> = t1_list
        .iter()
        .map(|&t1| {
            let q = p.with_t1(t1);
            let mut tail = q.transfer.events();
            tail.push(Event::SetSignScale { scale: -q.k });
            tail.extend(engineered_events(q.second_period(), &q.engineering)?);
            tail.push(Event::Measure {
                label: q.revival_time(),
            });
            Ok(tail)
        })
        .collect::<Result<_>>()?;
    let units = run_units(ensemble, interaction, solver, motion, |mut sim| {
        sim.run(&prep, 0)?;
        let mut cursor = 0.0;
        let mut out = Vec::with_capacity(t1_list.len());
        for (&t1, tail) in t1_list.iter().zip(&tails) {
            sim.run(&engineered_events(t1 - cursor, &p.engineering)?, 0)?;
            cursor = t1;
            let mut branch = sim.clone();
            out.extend(branch.run(tail, 0)?);
        }
        Ok(out)
    })?;
    let x = t1_list.iter().map(|&t1| p.with_t1(t1).revival_time()).collect();
    assemble("t_rev_us", x, units, ensemble, interaction, motion.enabled, solver)
}

/// Forward and reversed magnetization per anisotropy.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyScan {
    pub anisotropies: Vec<f64>,
    /// Right after the prep.
    pub post_prep: RunResult,
    /// Forward-only, at t1.
    pub forward: RunResult,
    /// Full reversal, at t_rev.
    pub reversed: RunResult,
}

fn column(runs: &[RunResult], sample: usize, x: &[f64], axis: &str) -> RunResult {
    let first = &runs[0];
    RunResult {
        axis: axis.to_string(),
        x: x.to_vec(),
        centers: first.centers.clone(),
        traces: (0..first.centers.len())
            .map(|c| runs.iter().map(|r| r.traces[c][sample]).collect())
            .collect(),
        diagnostics: runs.iter().map(|r| r.diagnostics[sample]).collect(),
        meta: first.meta.clone(),
    }
}

/// For each anisotropy: prep, then the engineered XXZ forward to t1; and the
/// full reversal with the same engineering in both periods.
pub fn anisotropy_scan(
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    anisotropies: &[f64],
    floquet: &FloquetParams,
    reversal: &ReversalParams,
    solver: &Solver,
) -> Result<AnisotropyScan> {
    floquet.validate()?;
    if anisotropies.is_empty() {
        return Err(Error::invalid("anisotropies", "must not be empty"));
    }
    let mut forward = Vec::new();
    let mut reversed = Vec::new();
    for &a in anisotropies {
        let f = floquet.for_anisotropy(a)?;
        let p = ReversalParams {
            engineering: f.engineering(),
            ..reversal.clone()
        };
        let fwd = build_forward_timeline(&p, &[0.0, p.t1])?;
        forward.push(execute_timeline(ensemble, interaction, &fwd, solver)?);
        let rev = build_reversal_timeline(&p, &[0.0, p.revival_time()])?;
        reversed.push(execute_timeline(ensemble, interaction, &rev, solver)?);
    }
    Ok(AnisotropyScan {
        anisotropies: anisotropies.to_vec(),
        post_prep: column(&forward, 0, anisotropies, "anisotropy"),
        forward: column(&forward, 1, anisotropies, "anisotropy"),
        reversed: column(&reversed, 1, anisotropies, "anisotropy"),
    })
}

/// Reversed magnetization at t_rev for each MACE cluster size.
pub fn cluster_size_scan(
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    p: &ReversalParams,
    sizes: &[usize],
    base: &MaceConfig,
) -> Result<RunResult> {
    if sizes.is_empty() {
        return Err(Error::invalid("sizes", "must not be empty"));
    }
    let timeline = build_reversal_timeline(p, &[])?;
    let runs = sizes
        .iter()
        .map(|&n| {
            let cfg = MaceConfig {
                cluster_size: n,
                ..base.clone()
            };
            execute_timeline(ensemble, interaction, &timeline, &Solver::Mace(cfg))
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let mut out = column(&runs, 0, &x, "cluster_size");
    out.meta.cluster_size = None;
    Ok(out)
}
