//! Event-by-event execution of a timeline on one set of atoms.

use std::f64::consts::TAU;

use crate::couplings::{coupling_matrix_at, CouplingMatrix, InteractionParams};
use crate::ensemble::{positions_at, Vec3};
use crate::error::{Error, Result};
use crate::quantum::{
    build_hamiltonian, initial_product_state, rotate_in_place, Axis, EvolutionConfig, Propagator, SpinState,
    XXZCouplings,
};

use super::timeline::{Event, EventTimeline};

/// Ballistic motion settings of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Motion {
    pub enabled: bool,
    /// us
    pub refresh: f64,
}

impl Motion {
    pub fn of(timeline: &EventTimeline) -> Self {
        Self {
            enabled: timeline.motion_enabled,
            refresh: timeline.coupling_refresh_interval,
        }
    }
}

/// Observables recorded at one measure event.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Record {
    pub label: f64,
    pub clock: f64,
    /// (sx, sy, sz) for each observed site.
    pub sites: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    epoch: u64,
    perp: f64,
    parallel: f64,
    drive: Option<(Axis, f64)>,
}

/// State, clock and cached propagator of a simulated atom set.
#[derive(Clone)]
pub(crate) struct Simulator {
    positions: Vec<Vec3>,
    velocities: Vec<Vec3>,
    interaction: InteractionParams,
    evolution: EvolutionConfig,
    motion: bool,
    refresh: f64,
    clock: f64,
    sign: f64,
    couplings: Option<(u64, CouplingMatrix)>,
    propagator: Option<(Key, Propagator)>,
    state: SpinState,
    observed: Vec<usize>,
}

impl Simulator {
    pub fn new(
        positions: Vec<Vec3>,
        velocities: Vec<Vec3>,
        interaction: &InteractionParams,
        evolution: &EvolutionConfig,
        motion: Motion,
        observed: Vec<usize>,
    ) -> Result<Self> {
        let n = positions.len();
        if velocities.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: velocities.len(),
            });
        }
        if let Some(&bad) = observed.iter().find(|&&s| s >= n) {
            return Err(Error::Domain(format!("observed site {bad} outside a {n}-spin system")));
        }
        // the sign scale is tracked by the timeline, not the coupling constant
        let interaction = InteractionParams {
            sign_scale: 1.0,
            ..interaction.clone()
        };
        Ok(Self {
            positions,
            velocities,
            interaction,
            evolution: evolution.clone(),
            motion: motion.enabled,
            refresh: motion.refresh,
            clock: 0.0,
            sign: 1.0,
            couplings: None,
            propagator: None,
            state: initial_product_state(n, 0.0),
            observed,
        })
    }

    fn epoch_at(&self, t: f64) -> u64 {
        if self.motion {
            (t / self.refresh + 1e-9).floor().max(0.0) as u64
        } else {
            0
        }
    }

    fn couplings_for(&mut self, epoch: u64) -> Result<&CouplingMatrix> {
        let stale = !matches!(&self.couplings, Some((e, _)) if *e == epoch);
        if stale {
            let t = epoch as f64 * self.refresh;
            let j = if self.motion {
                coupling_matrix_at(
                    &positions_at(&self.positions, &self.velocities, t),
                    &self.interaction,
                    t,
                )?
            } else {
                coupling_matrix_at(&self.positions, &self.interaction, 0.0)?
            };
            self.couplings = Some((epoch, j));
        }
        Ok(&self.couplings.as_ref().expect("set above").1)
    }

    fn propagator_for(&mut self, key: Key) -> Result<&mut Propagator> {
        let stale = !matches!(&self.propagator, Some((k, _)) if *k == key);
        if stale {
            let j = self.couplings_for(key.epoch)?;
            let xxz = XXZCouplings::from_matrix(j, key.perp, key.parallel);
            let mut h = build_hamiltonian(&xxz)?;
            if let Some((axis, rabi)) = key.drive {
                h = h.with_drive(axis, rabi);
            }
            self.propagator = Some((key, Propagator::new(h, &self.evolution)?));
        }
        Ok(&mut self.propagator.as_mut().expect("set above").1)
    }

    /// Evolves for `duration`, splitting at coupling refresh boundaries.
    fn evolve(&mut self, duration: f64, perp: f64, parallel: f64, drive: Option<(Axis, f64)>) -> Result<()> {
        let end = self.clock + duration;
        let mut remaining = duration;
        while remaining > 0.0 {
            let epoch = self.epoch_at(self.clock);
            let seg = if self.motion {
                remaining.min((epoch + 1) as f64 * self.refresh - self.clock)
            } else {
                remaining
            };
            let key = Key {
                epoch,
                perp,
                parallel,
                drive,
            };
            let mut state = std::mem::replace(&mut self.state, SpinState::all_down(0));
            let res = self
                .propagator_for(key)
                .and_then(|p| p.advance(&mut state, seg.max(0.0)));
            self.state = state;
            res?;
            remaining -= seg;
            self.clock += seg;
            if remaining <= 1e-12 * duration.max(1.0) {
                break;
            }
        }
        self.clock = end;
        Ok(())
    }

    pub fn apply(&mut self, event: &Event) -> Result<Option<Record>> {
        match *event {
            Event::FreeEvolution {
                duration,
                coupling_scale,
                form,
            } => {
                let s = self.sign * coupling_scale;
                self.evolve(duration, s * form.perp, s * form.parallel, None)?;
            }
            Event::Rotation { axis, angle } => rotate_in_place(&mut self.state, axis, angle),
            Event::DrivenPulse { axis, rabi_mhz, area } => {
                let rabi = TAU * rabi_mhz;
                let signed = if area < 0.0 { -rabi } else { rabi };
                self.evolve(area.abs() / rabi, self.sign, 0.0, Some((axis, signed)))?;
            }
            Event::SetSignScale { scale } => self.sign = scale,
            Event::Measure { label } => {
                return Ok(Some(Record {
                    label,
                    clock: self.clock,
                    sites: self.observed.iter().map(|&s| self.state.site_expectation(s)).collect(),
                }))
            }
        }
        Ok(None)
    }

    pub fn run(&mut self, events: &[Event], offset: usize) -> Result<Vec<Record>> {
        let mut out = Vec::new();
        for (i, e) in events.iter().enumerate() {
            if let Some(r) = self.apply(e).map_err(|err| err.at_event(offset + i))? {
                out.push(r);
            }
        }
        Ok(out)
    }
}
