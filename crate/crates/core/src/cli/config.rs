use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::couplings::InteractionParams;
use crate::ensemble::{CalibrationConfig, CloudParams};
use crate::error::{Error, Result};
use crate::mace::MaceConfig;
use crate::protocols::{EventTimeline, FloquetMode, RevivalRule, TransferModel};
use crate::quantum::EvolutionConfig;

const PRESET_SOURCES: [(&str, &str); 3] = [
    ("0.43MHz", include_str!("../../presets/0.43MHz.toml")),
    ("0.79MHz", include_str!("../../presets/0.79MHz.toml")),
    ("0.95MHz", include_str!("../../presets/0.95MHz.toml")),
];

/// One row of the excitation-model table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub jm_nominal_mhz: f64,
    pub target_count: usize,
    pub blockade_radius_um: f64,
    pub rmed_um: f64,
    pub cloud_sigma_um: f64,
    pub temperature_uk: f64,
}

impl Preset {
    pub fn names() -> Vec<&'static str> {
        PRESET_SOURCES.iter().map(|(n, _)| *n).collect()
    }

    pub fn load(name: &str) -> Result<Self> {
        let (_, src) = PRESET_SOURCES
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Config {
                field: "preset".into(),
                reason: format!("unknown preset `{name}`; available: {}", Self::names().join(", ")),
            })?;
        toml::from_str(src).map_err(|e| Error::Config {
            field: "preset".into(),
            reason: e.to_string(),
        })
    }

    pub fn cloud(&self) -> CloudConfig {
        CloudConfig {
            target_count: self.target_count,
            blockade_radius_um: self.blockade_radius_um,
            cloud_sigma_um: [self.cloud_sigma_um; 3],
            temperature_uk: self.temperature_uk,
            calibrate_rmed_um: None,
            jm_nominal_mhz: Some(self.jm_nominal_mhz),
        }
    }

    /// One interaction cycle 2 pi / J_m at the nominal J_m, us.
    pub fn cycle_time(&self) -> f64 {
        1.0 / self.jm_nominal_mhz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Fig1c,
    ReversalScan,
    Ablation,
    XxzScan,
    MaceConvergence,
    Timeline,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig1c => "fig1c",
            ExperimentKind::ReversalScan => "reversal-scan",
            ExperimentKind::Ablation => "ablation",
            ExperimentKind::XxzScan => "xxz-scan",
            ExperimentKind::MaceConvergence => "mace-convergence",
            ExperimentKind::Timeline => "timeline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudConfig {
    pub target_count: usize,
    pub blockade_radius_um: f64,
    pub cloud_sigma_um: [f64; 3],
    pub temperature_uk: f64,
    /// Rescale the cloud to this median nearest-neighbor distance before sampling.
    #[serde(default)]
    pub calibrate_rmed_um: Option<f64>,
    /// Sets the interaction-cycle unit 2 pi / J_m.
    #[serde(default)]
    pub jm_nominal_mhz: Option<f64>,
}

impl CloudConfig {
    pub fn params(&self, seed: u64) -> CloudParams {
        CloudParams {
            cloud_sigma: self.cloud_sigma_um,
            ..CloudParams::new(
                self.target_count,
                self.blockade_radius_um,
                1.0,
                self.temperature_uk * 1e-6,
                seed,
            )
        }
    }
}

fn default_c3() -> f64 {
    3200.0
}

fn default_k() -> f64 {
    1.1
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    /// C3/2pi of the first encoding, MHz um^3.
    #[serde(default = "default_c3")]
    pub c3_over_2pi: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_axis")]
    pub quantization_axis: [f64; 3],
}

impl Default for InteractionConfig {
    fn default() -> Self {
        Self {
            c3_over_2pi: default_c3(),
            k: default_k(),
            quantization_axis: default_axis(),
        }
    }
}

impl InteractionConfig {
    pub fn params(&self) -> InteractionParams {
        InteractionParams {
            c3_over_2pi: self.c3_over_2pi,
            quantization_axis: self.quantization_axis,
            sign_scale: 1.0,
        }
    }
}

fn default_cluster() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaceSettings {
    #[serde(default = "default_cluster")]
    pub cluster_size: usize,
    /// Random centers per realization; every spin when absent.
    #[serde(default)]
    pub centers: Option<usize>,
    #[serde(default)]
    pub evolution: EvolutionConfig,
}

impl Default for MaceSettings {
    fn default() -> Self {
        Self {
            cluster_size: default_cluster(),
            centers: None,
            evolution: EvolutionConfig::default(),
        }
    }
}

impl MaceSettings {
    pub fn config(&self, centers: Option<Vec<usize>>) -> MaceConfig {
        MaceConfig {
            cluster_size: self.cluster_size,
            center_subset: centers,
            evolution: self.evolution.clone(),
        }
    }
}

fn default_t1() -> f64 {
    0.4
}

fn default_t_max() -> f64 {
    1.2
}

fn default_step() -> f64 {
    0.02
}

fn default_refresh() -> f64 {
    0.2
}

fn default_transfer() -> TransferModel {
    TransferModel::experimental()
}

fn default_cycles() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
}

fn default_anisotropies() -> Vec<f64> {
    vec![0.14, 0.33, 0.6, 1.0]
}

fn default_tau() -> f64 {
    0.01
}

fn default_floquet() -> FloquetMode {
    FloquetMode::IdealXxz
}

fn default_sizes() -> Vec<usize> {
    vec![2, 4, 6, 8, 10, 12, 14, 16]
}

fn revival_default() -> RevivalRule {
    RevivalRule::TimeRatio
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Transfer time for fig1c and the xxz-scan, us.
    #[serde(default = "default_t1")]
    pub t1: f64,
    /// End of the sampled window, us.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_step")]
    pub sample_step: f64,
    /// Explicit transfer times for scans, us.
    #[serde(default)]
    pub t1_list: Option<Vec<f64>>,
    /// Reversal times in interaction cycles, used when t1_list is absent.
    #[serde(default = "default_cycles")]
    pub cycles: Vec<f64>,
    #[serde(default = "default_transfer")]
    pub transfer: TransferModel,
    #[serde(default)]
    pub motion: bool,
    #[serde(default = "default_refresh")]
    pub refresh: f64,
    #[serde(default = "revival_default")]
    pub revival: RevivalRule,
    #[serde(default)]
    pub prep: Option<f64>,
    #[serde(default = "default_anisotropies")]
    pub anisotropies: Vec<f64>,
    /// Floquet delay tau, us.
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_floquet")]
    pub floquet: FloquetMode,
    #[serde(default = "default_sizes")]
    pub cluster_sizes: Vec<usize>,
    #[serde(default)]
    pub timeline: Option<EventTimeline>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        toml::from_str("").expect("all protocol fields have defaults")
    }
}

fn default_realizations() -> usize {
    10
}

/// A complete experiment description as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub cloud: Option<CloudConfig>,
    #[serde(default)]
    pub interaction: InteractionConfig,
    #[serde(default)]
    pub mace: MaceSettings,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub calibration: Option<CalibrationConfig>,
}

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(src).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "config".into());
            config_err(&field, e.to_string().trim())
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src =
            std::fs::read_to_string(path).map_err(|e| config_err("config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&src)
    }

    /// Expands the preset into an explicit cloud and validates every field.
    pub fn resolve(mut self) -> Result<Self> {
        if self.cloud.is_none() {
            let name = self
                .preset
                .as_deref()
                .ok_or_else(|| config_err("cloud", "either `preset` or a [cloud] table is required"))?;
            self.cloud = Some(Preset::load(name)?.cloud());
        } else if let Some(name) = self.preset.as_deref() {
            // keep the nominal J_m of the named row when the cloud is overridden
            let preset = Preset::load(name)?;
            if let Some(c) = self.cloud.as_mut() {
                c.jm_nominal_mhz = c.jm_nominal_mhz.or(Some(preset.jm_nominal_mhz));
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn cloud(&self) -> &CloudConfig {
        self.cloud.as_ref().expect("resolved config has a cloud")
    }

    pub fn validate(&self) -> Result<()> {
        let cloud = self.cloud.as_ref().ok_or_else(|| config_err("cloud", "missing"))?;
        cloud
            .params(self.seed)
            .validate()
            .map_err(|e| config_err("cloud", e.to_string()))?;
        if let Some(r) = cloud.calibrate_rmed_um {
            if !(r > cloud.blockade_radius_um) {
                return Err(config_err("cloud.calibrate_rmed_um", "must exceed the blockade radius"));
            }
        }
        if let Some(j) = cloud.jm_nominal_mhz {
            if !(j > 0.0) {
                return Err(config_err("cloud.jm_nominal_mhz", "must be positive"));
            }
        }
        if self.realizations < 1 {
            return Err(config_err("realizations", "must be at least 1"));
        }
        self.interaction
            .params()
            .validate()
            .map_err(|e| config_err("interaction", e.to_string()))?;
        if !(self.interaction.k > 0.0) {
            return Err(config_err("interaction.k", "must be positive"));
        }
        let n = cloud.target_count;
        if self.mace.cluster_size < 1 || self.mace.cluster_size > n {
            return Err(config_err("mace.cluster_size", format!("must lie in [1, {n}]")));
        }
        if let Some(c) = self.mace.centers {
            if c < 1 || c > n {
                return Err(config_err("mace.centers", format!("must lie in [1, {n}]")));
            }
        }
        self.mace
            .evolution
            .validate()
            .map_err(|e| config_err("mace.evolution", e.to_string()))?;
        let p = &self.protocol;
        if !(p.t1 >= 0.0) {
            return Err(config_err("protocol.t1", "must be non-negative"));
        }
        if !(p.sample_step > 0.0) || !(p.t_max >= 0.0) {
            return Err(config_err(
                "protocol.sample_step",
                "step must be positive and t_max non-negative",
            ));
        }
        if p.motion && !(p.refresh > 0.0) {
            return Err(config_err("protocol.refresh", "must be positive"));
        }
        if let Some(list) = &p.t1_list {
            if list.is_empty() || list.iter().any(|t| !(*t >= 0.0)) || list.windows(2).any(|w| w[1] < w[0]) {
                return Err(config_err(
                    "protocol.t1_list",
                    "must be non-empty, sorted and non-negative",
                ));
            }
        } else if matches!(
            self.experiment,
            ExperimentKind::ReversalScan | ExperimentKind::Ablation | ExperimentKind::MaceConvergence
        ) {
            if p.cycles.is_empty() || p.cycles.iter().any(|c| !(*c > 0.0)) || p.cycles.windows(2).any(|w| w[1] < w[0]) {
                return Err(config_err("protocol.cycles", "must be non-empty, sorted and positive"));
            }
            if cloud.jm_nominal_mhz.is_none() {
                return Err(config_err(
                    "cloud.jm_nominal_mhz",
                    "needed to convert cycles into times",
                ));
            }
        }
        if p.anisotropies.is_empty() || p.anisotropies.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(config_err("protocol.anisotropies", "values must lie in (0, 1]"));
        }
        if !(p.tau > 0.0) {
            return Err(config_err("protocol.tau", "must be positive"));
        }
        if self.experiment == ExperimentKind::MaceConvergence
            && (p.cluster_sizes.is_empty() || p.cluster_sizes.iter().any(|&s| s < 1 || s > n))
        {
            return Err(config_err(
                "protocol.cluster_sizes",
                format!("sizes must lie in [1, {n}]"),
            ));
        }
        if self.experiment == ExperimentKind::Timeline {
            let t = p
                .timeline
                .as_ref()
                .ok_or_else(|| config_err("protocol.timeline", "required for the timeline experiment"))?;
            t.validate()
                .map_err(|e| config_err("protocol.timeline", e.to_string()))?;
        }
        for e in p.transfer.events() {
            e.validate()
                .map_err(|e| config_err("protocol.transfer", e.to_string()))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the resolved config, output directory excluded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&Self {
            out_dir: None,
            ..self.clone()
        })
        .expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Transfer times: the explicit list or the cycle grid converted with t1 = t_rev k/(k+1).
    pub fn t1_values(&self) -> Vec<f64> {
        if let Some(list) = &self.protocol.t1_list {
            return list.clone();
        }
        let cycle = 1.0 / self.cloud().jm_nominal_mhz.unwrap_or(f64::NAN);
        let k = self.interaction.k;
        self.protocol
            .cycles
            .iter()
            .map(|c| {
                let t_rev = c * cycle;
                match self.protocol.revival {
                    RevivalRule::TimeRatio => t_rev * k / (k + 1.0),
                    RevivalRule::Additive => t_rev / (1.0 + k),
                }
            })
            .collect()
    }

    /// 0, step, 2 step, ... up to t_max.
    pub fn sample_grid(&self) -> Vec<f64> {
        let p = &self.protocol;
        let n = (p.t_max / p.sample_step + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * p.sample_step).collect()
    }
}
