use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind, Preset};
use super::experiments::{resolved_cloud, run_experiment, summary_text, timelines, Backend, Report};
use crate::couplings::{coupling_matrix, median_nn_strength};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::units::angular_to_mhz;

/// Version plus the commit the binary was built from.
pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("RYDBERG_BUILD_COMMIT"));

/// Values given on the command line; they take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub preset: Option<String>,
}

fn load(o: &Overrides, fallback: Option<ExperimentKind>) -> Result<ExperimentConfig> {
    let mut cfg = match (&o.config, fallback) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(kind)) => ExperimentConfig::from_toml(&format!("experiment = \"{}\"", kind.name()))?,
        (None, None) => {
            return Err(Error::Config {
                field: "--config".into(),
                reason: "a config file is required".into(),
            })
        }
    };
    if let Some(p) = &o.preset {
        Preset::load(p)?;
        cfg.preset = Some(p.clone());
        cfg.cloud = None;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(d) = &o.out_dir {
        cfg.out_dir = Some(d.clone());
    }
    cfg.resolve()
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn emit(cfg: &ExperimentConfig, report: &Report, backend: Backend) -> Result<String> {
    let dir = out_dir(cfg);
    let hash = cfg.hash();
    let prefix = match backend {
        Backend::Mace => "",
        Backend::Oracle => "oracle_",
    };
    let mut files = Vec::new();
    for (name, avg) in &report.series {
        let file = format!("{prefix}{name}.csv");
        write(&dir, &file, &avg.to_csv(&hash))?;
        files.push(file);
    }
    let summary = summary_text(cfg, report, BUILD_ID, backend);
    let summary_file = format!("{prefix}summary.txt");
    let meta_file = format!("{prefix}metadata.json");
    let meta = json!({
        "config_hash": hash,
        "build": BUILD_ID,
        "backend": match backend { Backend::Mace => "mace", Backend::Oracle => "oracle" },
        "config": cfg,
        "cloud": report.cloud,
        "realizations": report.realizations,
        "files": files,
        "summary": summary_file,
    });
    write(&dir, &meta_file, &serde_json::to_string_pretty(&meta)?)?;
    write(
        &dir,
        &summary_file,
        &format!("{summary}data: {}\nmetadata: {meta_file}\n", files.join(", ")),
    )?;
    Ok(format!(
        "{summary}wrote {} files to {}\n",
        files.len() + 2,
        dir.display()
    ))
}

/// Runs the configured experiment with MACE and writes CSV, metadata and summary.
pub fn cmd_run(o: &Overrides) -> Result<String> {
    let cfg = load(o, None)?;
    let report = run_experiment(&cfg, Backend::Mace)?;
    emit(&cfg, &report, Backend::Mace)
}

/// The same experiment through dense full-system evolution.
pub fn cmd_oracle(o: &Overrides) -> Result<String> {
    let cfg = load(o, None)?;
    let report = run_experiment(&cfg, Backend::Oracle)?;
    emit(&cfg, &report, Backend::Oracle)
}

/// Samples one ensemble (realization 0 of the config) and writes it as JSON.
pub fn cmd_sample(o: &Overrides) -> Result<String> {
    let cfg = load(o, Some(ExperimentKind::Fig1c))?;
    let cloud = resolved_cloud(&cfg)?;
    let params = cloud.with_seed(cfg.seed);
    let ensemble = Ensemble::sample(&params)?;
    let interaction = cfg.interaction.params();
    let j = coupling_matrix(&ensemble.positions, &interaction)?;
    let jm = median_nn_strength(&j).map(angular_to_mhz).ok();
    let dir = out_dir(&cfg);
    let path = write(&dir, "ensemble.json", &ensemble.to_json_tagged(Some(&cfg.hash()))?)?;
    let mut out = String::new();
    out.push_str(&format!("atoms: {}\n", ensemble.len()));
    out.push_str(&format!("seed: {}\n", cfg.seed));
    out.push_str(&format!("cloud sigma (um): {:?}\n", params.cloud_sigma));
    out.push_str(&format!("r_med (um): {:.4}\n", ensemble.median_nn_distance()));
    match jm {
        Some(v) => out.push_str(&format!("J_m/2pi (MHz): {v:.4}\n")),
        None => out.push_str("J_m/2pi (MHz): undefined\n"),
    }
    if let Some(n) = cfg.cloud().jm_nominal_mhz {
        out.push_str(&format!("nominal J_m/2pi (MHz): {n}\n"));
    }
    out.push_str(&format!(
        "blockade radius (um): {}, closest pair (um): {:.4}\n",
        params.blockade_radius,
        ensemble.min_pair_distance()
    ));
    out.push_str(&format!("config hash: {}\n", cfg.hash()));
    out.push_str(&format!("wrote {}\n", path.display()));
    Ok(out)
}

/// The event timelines of the experiment as JSON.
pub fn cmd_dump_timeline(o: &Overrides) -> Result<String> {
    let cfg = load(o, None)?;
    let list = timelines(&cfg)?;
    let value = json!({
        "config_hash": cfg.hash(),
        "timelines": list.iter().map(|(name, t)| json!({"name": name, "timeline": t})).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&value)? + "\n";
    if o.out_dir.is_some() {
        let path = write(&out_dir(&cfg), "timeline.json", &text)?;
        return Ok(format!("wrote {}\n", path.display()));
    }
    Ok(text)
}
