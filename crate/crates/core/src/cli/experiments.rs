use std::fmt::Write as _;

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use crate::couplings::InteractionParams;
use crate::ensemble::{calibrate_density, derive_seed, random_subset, CloudParams, Ensemble};
use crate::error::{Error, Result};
use crate::protocols::{
    anisotropy_scan, build_floquet_schedule, build_forward_timeline, build_reversal_timeline, cluster_size_scan,
    execute_timeline, reversal_scan, Engineering, EventTimeline, FloquetParams, ReversalParams, Solver, TransferModel,
};
use crate::quantum::EvolutionConfig;
use crate::results::{DisorderAverage, RunResult};

const REALIZATION_STREAM: u64 = 0x5eed;
const CENTER_STREAM: u64 = 0xce47;

/// Largest system the oracle command accepts.
pub const ORACLE_MAX_ATOMS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Mace,
    Oracle,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealizationInfo {
    pub index: usize,
    pub seed: u64,
    pub n_atoms: usize,
    pub jm0_mhz: Option<f64>,
    pub centers: Vec<usize>,
}

/// Averaged series of one experiment, ready to be written.
#[derive(Debug, Clone)]
pub struct Report {
    pub kind: ExperimentKind,
    pub series: Vec<(String, DisorderAverage)>,
    pub realizations: Vec<RealizationInfo>,
    pub summary: Vec<String>,
    /// Cloud actually sampled, after any density calibration.
    pub cloud: CloudParams,
}

impl Report {
    pub fn get(&self, name: &str) -> Option<&DisorderAverage> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }
}

fn reversal_params(cfg: &ExperimentConfig) -> ReversalParams {
    let p = &cfg.protocol;
    ReversalParams {
        t1: p.t1,
        k: cfg.interaction.k,
        transfer: p.transfer.clone(),
        prep: p.prep,
        revival: p.revival,
        engineering: Engineering::Natural,
        motion_enabled: p.motion,
        coupling_refresh_interval: p.refresh,
    }
}

fn floquet_params(cfg: &ExperimentConfig) -> FloquetParams {
    FloquetParams {
        tau1: 0.0,
        tau: cfg.protocol.tau,
        cycles: 1,
        mode: cfg.protocol.floquet,
    }
}

/// Every timeline the experiment builds, by name.
pub fn timelines(cfg: &ExperimentConfig) -> Result<Vec<(String, EventTimeline)>> {
    let p = reversal_params(cfg);
    let grid = cfg.sample_grid();
    Ok(match cfg.experiment {
        ExperimentKind::Fig1c => vec![
            ("forward".into(), build_forward_timeline(&p, &grid)?),
            (
                "reversal".into(),
                build_reversal_timeline(&p, &reversal_grid(&grid, p.revival_time()))?,
            ),
        ],
        ExperimentKind::ReversalScan | ExperimentKind::Ablation => cfg
            .t1_values()
            .into_iter()
            .map(|t1| Ok((format!("t1={t1}"), build_reversal_timeline(&p.with_t1(t1), &[])?)))
            .collect::<Result<_>>()?,
        ExperimentKind::MaceConvergence => vec![("reversal".into(), build_reversal_timeline(&p, &[])?)],
        ExperimentKind::XxzScan => {
            let f = floquet_params(cfg);
            let mut out = Vec::new();
            for &a in &cfg.protocol.anisotropies {
                let q = ReversalParams {
                    engineering: f.for_anisotropy(a)?.engineering(),
                    ..p.clone()
                };
                out.push((format!("forward a={a}"), build_forward_timeline(&q, &[0.0, q.t1])?));
                out.push((
                    format!("reversal a={a}"),
                    build_reversal_timeline(&q, &[0.0, q.revival_time()])?,
                ));
                if a == cfg.protocol.anisotropies[0] {
                    out.push((format!("floquet a={a}"), build_floquet_schedule(&f.for_anisotropy(a)?)?));
                }
            }
            out
        }
        ExperimentKind::Timeline => vec![(
            "timeline".into(),
            cfg.protocol.timeline.clone().expect("validated config has a timeline"),
        )],
    })
}

/// The sample grid with the revival time added.
fn reversal_grid(grid: &[f64], t_rev: f64) -> Vec<f64> {
    let mut g = grid.to_vec();
    if !g.iter().any(|t| (t - t_rev).abs() < 1e-12) {
        g.push(t_rev);
        g.sort_by(f64::total_cmp);
    }
    g
}

/// Cloud parameters after the optional density calibration.
pub fn resolved_cloud(cfg: &ExperimentConfig) -> Result<CloudParams> {
    let cloud = cfg.cloud();
    let params = cloud.params(cfg.seed);
    match cloud.calibrate_rmed_um {
        Some(target) => {
            let cal = calibrate_density(&params, target, &cfg.calibration.clone().unwrap_or_default())?;
            Ok(cal.params)
        }
        None => Ok(params),
    }
}

pub fn realization_seed(master: u64, r: usize) -> u64 {
    derive_seed(master, REALIZATION_STREAM, r as u64)
}

fn solver(cfg: &ExperimentConfig, backend: Backend, n: usize, r: usize) -> Solver {
    match backend {
        Backend::Oracle => Solver::Exact(EvolutionConfig::dense()),
        Backend::Mace => {
            let centers = cfg
                .mace
                .centers
                .filter(|&c| c < n)
                .map(|c| random_subset(n, c, derive_seed(cfg.seed, CENTER_STREAM, r as u64)));
            Solver::Mace(cfg.mace.config(centers))
        }
    }
}

fn one_realization(
    cfg: &ExperimentConfig,
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    solver: &Solver,
) -> Result<Vec<(String, RunResult)>> {
    let p = reversal_params(cfg);
    Ok(match cfg.experiment {
        ExperimentKind::Fig1c => {
            let grid = cfg.sample_grid();
            let fwd = build_forward_timeline(&p, &grid)?;
            let rev = build_reversal_timeline(&p, &reversal_grid(&grid, p.revival_time()))?;
            vec![
                ("forward".into(), execute_timeline(ensemble, interaction, &fwd, solver)?),
                (
                    "reversal".into(),
                    execute_timeline(ensemble, interaction, &rev, solver)?,
                ),
            ]
        }
        ExperimentKind::ReversalScan => {
            vec![(
                "reversal_scan".into(),
                reversal_scan(ensemble, interaction, &cfg.t1_values(), &p, solver)?,
            )]
        }
        ExperimentKind::Ablation => {
            let t1s = cfg.t1_values();
            let pulses = match &p.transfer {
                TransferModel::IdealSignFlip => TransferModel::experimental(),
                other => other.clone(),
            };
            let variants = [
                ("ideal", TransferModel::IdealSignFlip, false),
                ("pulse_only", pulses.clone(), false),
                ("motion_only", TransferModel::IdealSignFlip, true),
                ("both", pulses, true),
            ];
            variants
                .into_iter()
                .map(|(name, transfer, motion)| {
                    let q = ReversalParams {
                        transfer,
                        motion_enabled: motion,
                        ..p.clone()
                    };
                    Ok((
                        name.to_string(),
                        reversal_scan(ensemble, interaction, &t1s, &q, solver)?,
                    ))
                })
                .collect::<Result<_>>()?
        }
        ExperimentKind::XxzScan => {
            let scan = anisotropy_scan(
                ensemble,
                interaction,
                &cfg.protocol.anisotropies,
                &floquet_params(cfg),
                &p,
                solver,
            )?;
            vec![
                ("xxz_post_prep".into(), scan.post_prep),
                ("xxz_forward".into(), scan.forward),
                ("xxz_reversed".into(), scan.reversed),
            ]
        }
        ExperimentKind::MaceConvergence => {
            let out = match solver {
                Solver::Mace(base) => cluster_size_scan(ensemble, interaction, &p, &cfg.protocol.cluster_sizes, base)?,
                Solver::Exact(_) => {
                    execute_timeline(ensemble, interaction, &build_reversal_timeline(&p, &[])?, solver)?
                }
            };
            vec![("mace_convergence".into(), out)]
        }
        ExperimentKind::Timeline => {
            let t = cfg.protocol.timeline.as_ref().expect("validated config has a timeline");
            vec![("timeline".into(), execute_timeline(ensemble, interaction, t, solver)?)]
        }
    })
}

/// Runs every disorder realization and averages the series.
pub fn run_experiment(cfg: &ExperimentConfig, backend: Backend) -> Result<Report> {
    cfg.validate()?;
    let cloud = resolved_cloud(cfg)?;
    if backend == Backend::Oracle && cloud.target_count > ORACLE_MAX_ATOMS {
        return Err(Error::Config {
            field: "cloud.target_count".into(),
            reason: format!(
                "oracle runs are limited to {ORACLE_MAX_ATOMS} atoms, got {}",
                cloud.target_count
            ),
        });
    }
    let interaction = cfg.interaction.params();
    let hash = cfg.hash();
    let mut per_series: Vec<(String, Vec<RunResult>)> = Vec::new();
    let mut infos = Vec::with_capacity(cfg.realizations);
    for r in 0..cfg.realizations {
        let run = || -> Result<(RealizationInfo, Vec<(String, RunResult)>)> {
            let seed = realization_seed(cfg.seed, r);
            let ensemble = Ensemble::sample(&cloud.with_seed(seed))?;
            let solver = solver(cfg, backend, ensemble.len(), r);
            let mut results = one_realization(cfg, &ensemble, &interaction, &solver)?;
            for (_, res) in &mut results {
                res.meta.config_hash = Some(hash.clone());
            }
            let first = &results[0].1;
            let info = RealizationInfo {
                index: r,
                seed,
                n_atoms: ensemble.len(),
                jm0_mhz: first.meta.jm0_mhz,
                centers: first.centers.clone(),
            };
            Ok((info, results))
        };
        let (info, results) = run().map_err(|e| e.at_realization(r))?;
        infos.push(info);
        for (name, res) in results {
            match per_series.iter_mut().find(|(n, _)| *n == name) {
                Some((_, v)) => v.push(res),
                None => per_series.push((name, vec![res])),
            }
        }
    }
    let series = per_series
        .into_iter()
        .map(|(n, v)| Ok((n, DisorderAverage::new(v)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report {
        kind: cfg.experiment,
        series,
        realizations: infos,
        summary: Vec::new(),
        cloud,
    };
    report.summary = summarize(cfg, &report);
    Ok(report)
}

fn first_below(x: &[f64], y: &[f64], level: f64) -> Option<f64> {
    x.iter().zip(y).find(|(_, v)| **v < level).map(|(t, _)| *t)
}

fn peak_after(x: &[f64], y: &[f64], after: f64) -> Option<(f64, f64)> {
    x.iter()
        .zip(y)
        .filter(|(t, _)| **t > after)
        .map(|(t, v)| (*t, *v))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

fn summarize(cfg: &ExperimentConfig, report: &Report) -> Vec<String> {
    let mut s = Vec::new();
    let jm: Vec<f64> = report.realizations.iter().filter_map(|r| r.jm0_mhz).collect();
    if !jm.is_empty() {
        s.push(format!(
            "computed J_m/2pi = {:.4} MHz (mean over {} realizations)",
            jm.iter().sum::<f64>() / jm.len() as f64,
            jm.len()
        ));
    }
    let m0 = |a: &DisorderAverage| a.magnetization(0.0);
    match cfg.experiment {
        ExperimentKind::Fig1c => {
            if let Some(f) = report.get("forward") {
                match first_below(f.x(), &m0(f), 0.05) {
                    Some(t) => s.push(format!("forward magnetization first below 0.05 at t = {t:.3} us")),
                    None => s.push("forward magnetization never drops below 0.05".into()),
                }
            }
            if let Some(r) = report.get("reversal") {
                for (label, y) in [("magnetization", m0(r)), ("contrast", r.contrast())] {
                    if let Some((t, v)) = peak_after(r.x(), &y, cfg.protocol.t1) {
                        s.push(format!("revival peak ({label}) {v:.4} at t = {t:.3} us"));
                    }
                }
            }
        }
        ExperimentKind::ReversalScan | ExperimentKind::Ablation | ExperimentKind::MaceConvergence => {
            for (name, a) in &report.series {
                let m = m0(a);
                let points: Vec<String> = a.x().iter().zip(&m).map(|(x, v)| format!("{x:.3}:{v:.4}")).collect();
                s.push(format!("{name} ({}: M) {}", a.axis(), points.join(" ")));
                let dj = a.delta_j();
                if let Some(last) = dj.last().filter(|v| v.is_finite() && **v > 0.0) {
                    s.push(format!("{name} ||dJ|| at the last point {last:.4}"));
                }
            }
        }
        ExperimentKind::XxzScan => {
            for (name, a) in &report.series {
                let m = m0(a);
                let points: Vec<String> = a.x().iter().zip(&m).map(|(x, v)| format!("{x}:{v:.4}")).collect();
                s.push(format!("{name} (anisotropy: M) {}", points.join(" ")));
            }
        }
        ExperimentKind::Timeline => {
            if let Some(a) = report.get("timeline") {
                let m = m0(a);
                s.push(format!(
                    "{} samples, final M = {:.6}",
                    m.len(),
                    m.last().copied().unwrap_or(f64::NAN)
                ));
            }
        }
    }
    s
}

/// The summary text written next to the data files.
pub fn summary_text(cfg: &ExperimentConfig, report: &Report, build: &str, backend: Backend) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "experiment: {}", cfg.experiment.name());
    let _ = writeln!(
        out,
        "backend: {}",
        match backend {
            Backend::Mace => "mace",
            Backend::Oracle => "oracle (dense full system)",
        }
    );
    let _ = writeln!(out, "config hash: {}", cfg.hash());
    let _ = writeln!(out, "build: {build}");
    let _ = writeln!(out, "master seed: {}", cfg.seed);
    let _ = writeln!(
        out,
        "atoms: {}, realizations: {}",
        report.cloud.target_count,
        report.realizations.len()
    );
    for line in &report.summary {
        let _ = writeln!(out, "{line}");
    }
    out
}
