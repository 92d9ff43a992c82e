//! Moving-average cluster expansion: every spin is simulated exactly together
//! with its most strongly coupled partners and only its own observables are kept.

use serde::{Deserialize, Serialize};

use crate::couplings::{CouplingMatrix, InteractionParams};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::protocols::{execute_timeline, EventTimeline, Solver};
use crate::quantum::EvolutionConfig;
use crate::results::RunResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaceConfig {
    pub cluster_size: usize,
    /// Centers to simulate; all spins when absent.
    pub center_subset: Option<Vec<usize>>,
    pub evolution: EvolutionConfig,
}

impl Default for MaceConfig {
    fn default() -> Self {
        Self {
            cluster_size: 16,
            center_subset: None,
            evolution: EvolutionConfig::default(),
        }
    }
}

impl MaceConfig {
    pub fn new(cluster_size: usize) -> Self {
        Self {
            cluster_size,
            ..Self::default()
        }
    }

    pub fn with_centers(mut self, centers: Vec<usize>) -> Self {
        self.center_subset = Some(centers);
        self
    }

    pub fn with_evolution(mut self, evolution: EvolutionConfig) -> Self {
        self.evolution = evolution;
        self
    }

    pub fn validate(&self, system_size: usize) -> Result<()> {
        if self.cluster_size < 1 || self.cluster_size > system_size {
            return Err(Error::invalid(
                "cluster_size",
                format!("must lie in [1, {system_size}], got {}", self.cluster_size),
            ));
        }
        if let Some(centers) = &self.center_subset {
            if centers.is_empty() {
                return Err(Error::invalid("center_subset", "must not be empty"));
            }
            if let Some(c) = centers.iter().find(|&&c| c >= system_size) {
                return Err(Error::invalid(
                    "center_subset",
                    format!("center {c} outside the ensemble"),
                ));
            }
        }
        self.evolution.validate()
    }

    pub fn centers(&self, system_size: usize) -> Vec<usize> {
        self.center_subset.clone().unwrap_or_else(|| (0..system_size).collect())
    }
}

/// The center followed by its n-1 strongest partners by |J|, ties to the lower index.
pub fn select_cluster(j: &CouplingMatrix, center: usize, n: usize) -> Result<Vec<usize>> {
    let size = j.dim();
    if center >= size {
        return Err(Error::invalid(
            "center",
            format!("{center} outside a {size}-spin system"),
        ));
    }
    if n < 1 || n > size {
        return Err(Error::invalid(
            "cluster_size",
            format!("must lie in [1, {size}], got {n}"),
        ));
    }
    let mut partners: Vec<usize> = (0..size).filter(|&k| k != center).collect();
    partners.sort_by(|&a, &b| {
        j.get(center, b)
            .abs()
            .total_cmp(&j.get(center, a).abs())
            .then(a.cmp(&b))
    });
    let mut out = Vec::with_capacity(n);
    out.push(center);
    out.extend(partners.into_iter().take(n - 1));
    Ok(out)
}

/// Runs the timeline on every center's cluster and reports per-center traces.
pub fn run_mace(
    ensemble: &Ensemble,
    interaction: &InteractionParams,
    timeline: &EventTimeline,
    cfg: &MaceConfig,
) -> Result<RunResult> {
    execute_timeline(ensemble, interaction, timeline, &Solver::Mace(cfg.clone()))
}
