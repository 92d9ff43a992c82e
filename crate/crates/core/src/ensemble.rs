//! Disorder realizations: blockade-constrained random clouds with thermal
//! velocities and ballistic motion.

use std::path::Path;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{BOLTZMANN, RB87_MASS};

pub type Vec3 = Vector3<f64>;

/// Consecutive rejections after which sampling gives up.
pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

const POSITION_STREAM: u64 = 0;
const VELOCITY_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudParams {
    pub target_count: usize,
    /// um
    pub blockade_radius: f64,
    /// Per-axis Gaussian standard deviations, um.
    pub cloud_sigma: [f64; 3],
    /// K
    pub temperature: f64,
    /// kg
    #[serde(default = "default_mass")]
    pub atom_mass: f64,
    pub seed: u64,
    #[serde(default = "default_rejection_cap")]
    pub rejection_cap: u64,
}

fn default_mass() -> f64 {
    RB87_MASS
}

fn default_rejection_cap() -> u64 {
    DEFAULT_REJECTION_CAP
}

impl CloudParams {
    pub fn new(target_count: usize, blockade_radius: f64, sigma: f64, temperature: f64, seed: u64) -> Self {
        Self {
            target_count,
            blockade_radius,
            cloud_sigma: [sigma; 3],
            temperature,
            atom_mass: RB87_MASS,
            seed,
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut p = self.clone();
        for s in &mut p.cloud_sigma {
            *s *= factor;
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_count < 1 {
            return Err(Error::invalid("target_count", "must be at least 1"));
        }
        if !(self.blockade_radius >= 0.0) {
            return Err(Error::invalid("blockade_radius", "must be non-negative"));
        }
        if self.cloud_sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::invalid("cloud_sigma", "components must be positive"));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::invalid("temperature", "must be non-negative"));
        }
        if !(self.atom_mass > 0.0) {
            return Err(Error::invalid("atom_mass", "must be positive"));
        }
        Ok(())
    }

    /// Standard deviation of each velocity component, um/us.
    pub fn velocity_sigma(&self) -> f64 {
        (BOLTZMANN * self.temperature / self.atom_mass).sqrt()
    }
}

/// One disorder realization. Immutable once sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub params: CloudParams,
}

impl Ensemble {
    pub fn sample(params: &CloudParams) -> Result<Self> {
        let positions = sample_positions(params)?;
        let velocities = sample_velocities(params)?;
        Ok(Self {
            positions,
            velocities,
            params: params.clone(),
        })
    }

    /// Ensemble at rest with explicit positions. Used for hand-built geometries.
    pub fn from_positions(positions: Vec<Vec3>) -> Self {
        let n = positions.len();
        Self {
            velocities: vec![Vec3::zeros(); n],
            params: CloudParams::new(n.max(1), 0.0, 1.0, 0.0, 0),
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Ballistic positions at time `t` (us).
    pub fn positions_at(&self, t: f64) -> Vec<Vec3> {
        positions_at(&self.positions, &self.velocities, t)
    }

    /// Restriction to a subset of atoms, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Ensemble {
        Ensemble {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            velocities: indices.iter().map(|&i| self.velocities[i]).collect(),
            params: CloudParams {
                target_count: indices.len(),
                ..self.params.clone()
            },
        }
    }

    pub fn min_pair_distance(&self) -> f64 {
        min_pair_distance(&self.positions)
    }

    pub fn median_nn_distance(&self) -> f64 {
        median_nn_distance(&self.positions)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        self.to_json_tagged(None)
    }

    /// JSON form carrying the hash of the config that produced it.
    pub fn to_json_tagged(&self, config_hash: Option<&str>) -> Result<String> {
        let file = EnsembleFile {
            config_hash: config_hash.map(str::to_string),
            schema: ENSEMBLE_SCHEMA.to_string(),
            version: ENSEMBLE_VERSION,
            length_unit: "um".into(),
            velocity_unit: "um/us".into(),
            params: self.params.clone(),
            positions: self.positions.iter().map(|p| [p.x, p.y, p.z]).collect(),
            velocities: self.velocities.iter().map(|v| [v.x, v.y, v.z]).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: EnsembleFile = serde_json::from_str(s)?;
        if file.schema != ENSEMBLE_SCHEMA {
            return Err(Error::Serde(format!("unexpected schema `{}`", file.schema)));
        }
        if file.version != ENSEMBLE_VERSION {
            return Err(Error::Serde(format!("unsupported ensemble version {}", file.version)));
        }
        if file.positions.len() != file.velocities.len() {
            return Err(Error::DimensionMismatch {
                expected: file.positions.len(),
                found: file.velocities.len(),
            });
        }
        Ok(Self {
            positions: file.positions.iter().map(|a| Vec3::from(*a)).collect(),
            velocities: file.velocities.iter().map(|a| Vec3::from(*a)).collect(),
            params: file.params,
        })
    }
}

pub const ENSEMBLE_SCHEMA: &str = "rydberg-reversal/ensemble";
pub const ENSEMBLE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct EnsembleFile {
    schema: String,
    version: u32,
    length_unit: String,
    velocity_unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_hash: Option<String>,
    params: CloudParams,
    positions: Vec<[f64; 3]>,
    velocities: Vec<[f64; 3]>,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sequential rejection sampling from the anisotropic Gaussian cloud: a
/// candidate closer than the blockade radius to any accepted atom is dropped.
pub fn sample_positions(params: &CloudParams) -> Result<Vec<Vec3>> {
    params.validate()?;
    let mut rng = stream_rng(params.seed, POSITION_STREAM);
    let normals = params
        .cloud_sigma
        .map(|s| Normal::new(0.0, s).expect("sigma validated positive"));
    let rb2 = params.blockade_radius * params.blockade_radius;
    let mut accepted: Vec<Vec3> = Vec::with_capacity(params.target_count);
    let mut rejections = 0u64;
    while accepted.len() < params.target_count {
        let c = Vec3::new(
            normals[0].sample(&mut rng),
            normals[1].sample(&mut rng),
            normals[2].sample(&mut rng),
        );
        if accepted.iter().all(|p| (p - c).norm_squared() >= rb2) {
            accepted.push(c);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections > params.rejection_cap {
                return Err(Error::SamplingStalled {
                    accepted: accepted.len(),
                    target: params.target_count,
                    rejections,
                });
            }
        }
    }
    Ok(accepted)
}

/// Maxwell-Boltzmann velocities: independent Gaussian components with
/// standard deviation sqrt(k_B T / m), in um/us.
pub fn sample_velocities(params: &CloudParams) -> Result<Vec<Vec3>> {
    params.validate()?;
    let sigma = params.velocity_sigma();
    if sigma == 0.0 {
        return Ok(vec![Vec3::zeros(); params.target_count]);
    }
    let mut rng = stream_rng(params.seed, VELOCITY_STREAM);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid("temperature", e.to_string()))?;
    Ok((0..params.target_count)
        .map(|_| {
            Vec3::new(
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
            )
        })
        .collect())
}

pub fn positions_at(positions: &[Vec3], velocities: &[Vec3], t: f64) -> Vec<Vec3> {
    positions.iter().zip(velocities).map(|(p, v)| p + v * t).collect()
}

pub fn min_pair_distance(positions: &[Vec3]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in positions.iter().enumerate() {
        for b in &positions[i + 1..] {
            best = best.min((a - b).norm_squared());
        }
    }
    best.sqrt()
}

pub fn nearest_neighbor_distances(positions: &[Vec3]) -> Vec<f64> {
    let n = positions.len();
    let mut nn = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in i + 1..n {
            let d2 = (positions[i] - positions[j]).norm_squared();
            if d2 < nn[i] {
                nn[i] = d2;
            }
            if d2 < nn[j] {
                nn[j] = d2;
            }
        }
    }
    nn.into_iter().map(f64::sqrt).collect()
}

/// Median of a sample; the mean of the two central values for even counts.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    values.sort_by(|a, b| a.total_cmp(b));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

pub fn median_nn_distance(positions: &[Vec3]) -> f64 {
    if positions.len() < 2 {
        return f64::INFINITY;
    }
    median(&mut nearest_neighbor_distances(positions))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    /// Realizations averaged per density evaluation.
    pub realizations: usize,
    /// Relative tolerance on the median nearest-neighbor distance.
    pub rel_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            realizations: 8,
            rel_tolerance: 0.02,
            max_iterations: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub params: CloudParams,
    /// Isotropic factor applied to the input cloud_sigma.
    pub scale: f64,
    pub achieved_rmed: f64,
}

/// Expected median nearest-neighbor distance, averaged over realizations
/// whose seeds derive from `params.seed`.
pub fn mean_median_nn(params: &CloudParams, realizations: usize) -> Result<f64> {
    let values: Vec<Result<f64>> = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let p = params.with_seed(derive_seed(params.seed, 0xca11b, r));
            Ok(median_nn_distance(&sample_positions(&p)?))
        })
        .collect();
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Ok(sum / realizations as f64)
}

/// Rescale the cloud isotropically so the expected median nearest-neighbor
/// distance matches `target_rmed` (bisection on the scale factor).
pub fn calibrate_density(params: &CloudParams, target_rmed: f64, cfg: &CalibrationConfig) -> Result<Calibration> {
    params.validate()?;
    if !(target_rmed > params.blockade_radius) {
        return Err(Error::invalid(
            "target_rmed",
            format!("must exceed the blockade radius {}", params.blockade_radius),
        ));
    }
    if params.target_count < 2 {
        return Err(Error::invalid("target_count", "calibration needs at least two atoms"));
    }
    let eval = |s: f64| -> Result<f64> {
        match mean_median_nn(&params.scaled(s), cfg.realizations) {
            Err(Error::SamplingStalled { .. }) => Ok(f64::NAN),
            other => other,
        }
    };
    let reached = |rmed: f64| (rmed - target_rmed).abs() <= cfg.rel_tolerance * target_rmed;

    let mut scale = 1.0;
    let mut rmed = eval(scale)?;
    if reached(rmed) {
        return Ok(Calibration {
            params: params.scaled(scale),
            scale,
            achieved_rmed: rmed,
        });
    }
    // bracket [lo, hi] with rmed(lo) < target < rmed(hi)
    let (mut lo, mut hi);
    if rmed.is_nan() || rmed < target_rmed {
        lo = scale;
        hi = scale;
        let mut found = false;
        for _ in 0..40 {
            hi *= 2.0;
            let r = eval(hi)?;
            if reached(r) {
                return Ok(Calibration {
                    params: params.scaled(hi),
                    scale: hi,
                    achieved_rmed: r,
                });
            }
            if r > target_rmed {
                found = true;
                break;
            }
            lo = hi;
        }
        if !found {
            return Err(Error::NonBracketing {
                target: target_rmed,
                reason: "median distance never exceeded the target while expanding the cloud".into(),
            });
        }
    } else {
        hi = scale;
        lo = scale;
        let mut found = false;
        for _ in 0..40 {
            lo *= 0.5;
            let r = eval(lo)?;
            if r.is_nan() {
                break;
            }
            if reached(r) {
                return Ok(Calibration {
                    params: params.scaled(lo),
                    scale: lo,
                    achieved_rmed: r,
                });
            }
            if r < target_rmed {
                found = true;
                break;
            }
            hi = lo;
        }
        if !found {
            return Err(Error::NonBracketing {
                target: target_rmed,
                reason: "target lies below what the blockade constraint can pack".into(),
            });
        }
    }
    for _ in 0..cfg.max_iterations {
        scale = 0.5 * (lo + hi);
        rmed = eval(scale)?;
        if reached(rmed) {
            return Ok(Calibration {
                params: params.scaled(scale),
                scale,
                achieved_rmed: rmed,
            });
        }
        if rmed.is_nan() || rmed < target_rmed {
            lo = scale;
        } else {
            hi = scale;
        }
    }
    Err(Error::NonBracketing {
        target: target_rmed,
        reason: format!("bisection did not reach {} relative tolerance", cfg.rel_tolerance),
    })
}

/// Independent sub-seed for stream `tag`, index `index` (splitmix64 mixing).
pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random subset of `count` distinct indices out of `0..n`, sorted.
pub fn random_subset(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    let count = count.min(n);
    for i in 0..count {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let mut out = idx[..count].to_vec();
    out.sort_unstable();
    out
}
