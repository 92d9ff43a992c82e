use serde::{Deserialize, Serialize};

use super::dense::DenseEigen;
use super::hamiltonian::Hamiltonian;
use super::krylov::{self, KrylovWorkspace};
use super::{Axis, SpinState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Dense up to `dense_max_spins`, Krylov above.
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub method: Method,
    pub tolerance: f64,
    pub max_krylov_dim: usize,
    pub dense_max_spins: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            tolerance: 1e-9,
            max_krylov_dim: 30,
            dense_max_spins: 8,
        }
    }
}

impl EvolutionConfig {
    pub fn dense() -> Self {
        Self {
            method: Method::Dense,
            ..Self::default()
        }
    }

    pub fn krylov() -> Self {
        Self {
            method: Method::Krylov,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", "must be positive"));
        }
        if self.max_krylov_dim < 2 {
            return Err(Error::invalid("max_krylov_dim", "must be at least 2"));
        }
        Ok(())
    }

    pub fn uses_dense(&self, n: usize) -> bool {
        match self.method {
            Method::Dense => true,
            Method::Krylov => false,
            Method::Auto => n <= self.dense_max_spins,
        }
    }
}

enum Backend {
    Dense(DenseEigen),
    Krylov(Box<KrylovWorkspace>),
}

impl Clone for Backend {
    fn clone(&self) -> Self {
        match self {
            Backend::Dense(eig) => Backend::Dense(eig.clone()),
            Backend::Krylov(ws) => Backend::Krylov(Box::new(ws.fresh())),
        }
    }
}

/// exp(-i H t) for one fixed Hamiltonian, reusable across many time steps.
#[derive(Clone)]
pub struct Propagator {
    h: Hamiltonian,
    backend: Backend,
    cfg: EvolutionConfig,
}

impl Propagator {
    pub fn new(h: Hamiltonian, cfg: &EvolutionConfig) -> Result<Self> {
        cfg.validate()?;
        let backend = if cfg.uses_dense(h.n()) {
            Backend::Dense(DenseEigen::new(&h))
        } else {
            Backend::Krylov(Box::new(KrylovWorkspace::new(h.dim(), cfg.max_krylov_dim)))
        };
        Ok(Self {
            h,
            backend,
            cfg: cfg.clone(),
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.backend, Backend::Dense(_))
    }

    pub fn advance(&mut self, state: &mut SpinState, t: f64) -> Result<()> {
        if state.dim() != self.h.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.h.dim(),
                found: state.dim(),
            });
        }
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("evolution time must be non-negative, got {t}")));
        }
        if t == 0.0 {
            return Ok(());
        }
        match &mut self.backend {
            Backend::Dense(eig) => eig.propagate(state.amplitudes_mut(), t),
            Backend::Krylov(ws) => {
                krylov::propagate_with(
                    &self.h,
                    state.amplitudes_mut(),
                    t,
                    self.cfg.tolerance,
                    self.cfg.max_krylov_dim,
                    ws,
                )?;
            }
        }
        Ok(())
    }
}

/// exp(-i H t)|psi>
pub fn evolve(state: &SpinState, h: &Hamiltonian, t: f64, cfg: &EvolutionConfig) -> Result<SpinState> {
    let mut out = state.clone();
    Propagator::new(h.clone(), cfg)?.advance(&mut out, t)?;
    Ok(out)
}

/// Evolves under h_int + rabi * sum_i S_axis^i for area/rabi, so that without
/// interactions the pulse is the rotation exp(-i area sum_i S_axis^i).
pub fn apply_driven_pulse(
    state: &SpinState,
    h_int: &Hamiltonian,
    axis: Axis,
    rabi: f64,
    area: f64,
    cfg: &EvolutionConfig,
) -> Result<SpinState> {
    let (h, duration) = driven_pulse_hamiltonian(h_int, axis, rabi, area)?;
    evolve(state, &h, duration, cfg)
}

/// Hamiltonian and duration of a square pulse. Negative areas drive along -axis.
pub fn driven_pulse_hamiltonian(h_int: &Hamiltonian, axis: Axis, rabi: f64, area: f64) -> Result<(Hamiltonian, f64)> {
    if !(rabi > 0.0) {
        return Err(Error::invalid("rabi", "must be positive"));
    }
    let signed = if area < 0.0 { -rabi } else { rabi };
    Ok((h_int.with_drive(axis, signed), area.abs() / rabi))
}
