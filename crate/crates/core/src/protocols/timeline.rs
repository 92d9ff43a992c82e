use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::Axis;

/// Multipliers applied to J_ij for the transverse and longitudinal parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingForm {
    pub perp: f64,
    pub parallel: f64,
}

impl Default for CouplingForm {
    fn default() -> Self {
        Self::XX
    }
}

impl CouplingForm {
    pub const XX: CouplingForm = CouplingForm {
        perp: 1.0,
        parallel: 0.0,
    };

    pub fn anisotropy(&self) -> f64 {
        self.parallel / self.perp
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    /// Interaction-only evolution under coupling_scale * sign_scale * form.
    FreeEvolution {
        /// us
        duration: f64,
        #[serde(default = "one")]
        coupling_scale: f64,
        #[serde(default)]
        form: CouplingForm,
    },
    /// Instantaneous global rotation exp(-i angle sum_i S_axis).
    Rotation {
        axis: Axis,
        angle: f64,
    },
    /// Square pulse of Rabi frequency rabi_mhz (as Omega/2pi) on top of the
    /// current interactions; lasts |area| / Omega.
    DrivenPulse {
        axis: Axis,
        rabi_mhz: f64,
        area: f64,
    },
    SetSignScale {
        scale: f64,
    },
    /// Records observables; `label` is the nominal time in us.
    Measure {
        label: f64,
    },
}

impl Event {
    pub fn free(duration: f64) -> Self {
        Event::FreeEvolution {
            duration,
            coupling_scale: 1.0,
            form: CouplingForm::XX,
        }
    }

    pub fn free_with(duration: f64, form: CouplingForm) -> Self {
        Event::FreeEvolution {
            duration,
            coupling_scale: 1.0,
            form,
        }
    }

    /// Wall-clock duration in us.
    pub fn duration(&self) -> f64 {
        match *self {
            Event::FreeEvolution { duration, .. } => duration,
            Event::DrivenPulse { rabi_mhz, area, .. } => area.abs() / (TAU * rabi_mhz),
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Event::FreeEvolution {
                duration,
                coupling_scale,
                form,
            } => {
                if !(duration >= 0.0) || !duration.is_finite() {
                    return Err(Error::invalid("duration", "must be finite and non-negative"));
                }
                if !coupling_scale.is_finite() || !form.perp.is_finite() || !form.parallel.is_finite() {
                    return Err(Error::invalid("coupling_scale", "must be finite"));
                }
            }
            Event::Rotation { angle, .. } => {
                if !angle.is_finite() {
                    return Err(Error::invalid("angle", "must be finite"));
                }
            }
            Event::DrivenPulse { axis, rabi_mhz, area } => {
                if !(rabi_mhz > 0.0) || !rabi_mhz.is_finite() {
                    return Err(Error::invalid("rabi_mhz", "must be positive"));
                }
                if !area.is_finite() {
                    return Err(Error::invalid("area", "must be finite"));
                }
                if axis == Axis::Z {
                    return Err(Error::invalid("axis", "driven pulses must be transverse"));
                }
            }
            Event::SetSignScale { scale } => {
                if !scale.is_finite() {
                    return Err(Error::invalid("scale", "must be finite"));
                }
            }
            Event::Measure { label } => {
                if !label.is_finite() {
                    return Err(Error::invalid("label", "must be finite"));
                }
            }
        }
        Ok(())
    }
}

fn default_refresh() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTimeline {
    pub events: Vec<Event>,
    #[serde(default)]
    pub motion_enabled: bool,
    /// us
    #[serde(default = "default_refresh")]
    pub coupling_refresh_interval: f64,
}

impl EventTimeline {
    pub fn new(events: Vec<Event>) -> Self {
        Self {
            events,
            motion_enabled: false,
            coupling_refresh_interval: default_refresh(),
        }
    }

    pub fn with_motion(mut self, enabled: bool) -> Self {
        self.motion_enabled = enabled;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.motion_enabled && !(self.coupling_refresh_interval > 0.0) {
            return Err(Error::invalid(
                "coupling_refresh_interval",
                "must be positive when motion is enabled",
            ));
        }
        for (i, e) in self.events.iter().enumerate() {
            e.validate().map_err(|err| err.at_event(i))?;
        }
        Ok(())
    }

    pub fn measure_labels(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Measure { label } => Some(*label),
                _ => None,
            })
            .collect()
    }

    /// Wall-clock time of each measure event.
    pub fn measure_clocks(&self) -> Vec<f64> {
        let mut clock = 0.0;
        let mut out = Vec::new();
        for e in &self.events {
            if matches!(e, Event::Measure { .. }) {
                out.push(clock);
            }
            clock += e.duration();
        }
        out
    }

    pub fn total_duration(&self) -> f64 {
        self.events.iter().map(Event::duration).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
