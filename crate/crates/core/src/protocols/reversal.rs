use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::floquet::{cycle_time, schedule_events, CycleKind};
use super::timeline::{CouplingForm, Event, EventTimeline};
use crate::error::{Error, Result};
use crate::quantum::Axis;

fn y_axis() -> Axis {
    Axis::Y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    #[serde(default = "y_axis")]
    pub axis: Axis,
    /// Omega/2pi, MHz
    pub rabi_mhz: f64,
    pub area: f64,
}

/// How the encoding change between the two periods is modelled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransferModel {
    /// Only the coupling sign and scale change.
    IdealSignFlip,
    /// An instantaneous, interaction-free 2 pi rotation.
    Instantaneous2Pi,
    /// Square pulses with the interactions left on.
    DrivenPulses { pulses: Vec<PulseSpec> },
}

impl TransferModel {
    /// pi pulses at 9 and 11 MHz about y.
    pub fn experimental() -> Self {
        TransferModel::DrivenPulses {
            pulses: vec![
                PulseSpec {
                    axis: Axis::Y,
                    rabi_mhz: 9.0,
                    area: PI,
                },
                PulseSpec {
                    axis: Axis::Y,
                    rabi_mhz: 11.0,
                    area: PI,
                },
            ],
        }
    }

    pub fn events(&self) -> Vec<Event> {
        match self {
            TransferModel::IdealSignFlip => Vec::new(),
            TransferModel::Instantaneous2Pi => vec![Event::Rotation {
                axis: Axis::Y,
                angle: TAU,
            }],
            TransferModel::DrivenPulses { pulses } => pulses
                .iter()
                .map(|p| Event::DrivenPulse {
                    axis: p.axis,
                    rabi_mhz: p.rabi_mhz,
                    area: p.area,
                })
                .collect(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.events().iter().map(Event::duration).sum()
    }
}

/// Length of the second period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevivalRule {
    /// t2 = t1 / k, from t1 = k t2.
    TimeRatio,
    /// t2 = k t1
    Additive,
}

/// Interaction engineering applied during both periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Engineering {
    Natural,
    Ideal { form: CouplingForm },
    Pulsed { tau1: f64, tau: f64, schedule: CycleKind },
}

fn default_k() -> f64 {
    1.1
}

fn default_refresh() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversalParams {
    /// us
    pub t1: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    pub transfer: TransferModel,
    /// Natural XX evolution before the first period, us.
    #[serde(default)]
    pub prep: Option<f64>,
    pub revival: RevivalRule,
    pub engineering: Engineering,
    #[serde(default)]
    pub motion_enabled: bool,
    #[serde(default = "default_refresh")]
    pub coupling_refresh_interval: f64,
}

impl Default for ReversalParams {
    fn default() -> Self {
        Self {
            t1: 0.4,
            k: default_k(),
            transfer: TransferModel::IdealSignFlip,
            prep: None,
            revival: RevivalRule::TimeRatio,
            engineering: Engineering::Natural,
            motion_enabled: false,
            coupling_refresh_interval: default_refresh(),
        }
    }
}

impl ReversalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t1 >= 0.0) || !self.t1.is_finite() {
            return Err(Error::invalid("t1", "must be finite and non-negative"));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::invalid("k", "must be positive"));
        }
        if let Some(p) = self.prep {
            if !(p >= 0.0) {
                return Err(Error::invalid("prep", "must be non-negative"));
            }
        }
        if self.motion_enabled && !(self.coupling_refresh_interval > 0.0) {
            return Err(Error::invalid("coupling_refresh_interval", "must be positive"));
        }
        if let Engineering::Pulsed { tau1, tau, .. } = self.engineering {
            if !(tau1 >= 0.0) || !(tau > 0.0) {
                return Err(Error::invalid(
                    "engineering",
                    "pulsed delays need tau1 >= 0 and tau > 0",
                ));
            }
        }
        for e in self.transfer.events() {
            e.validate()?;
        }
        Ok(())
    }

    pub fn with_t1(&self, t1: f64) -> Self {
        Self { t1, ..self.clone() }
    }

    pub fn second_period(&self) -> f64 {
        match self.revival {
            RevivalRule::TimeRatio => self.t1 / self.k,
            RevivalRule::Additive => self.k * self.t1,
        }
    }

    pub fn revival_time(&self) -> f64 {
        revival_time(self.t1, self.k, self.revival)
    }

    fn timeline(&self, events: Vec<Event>) -> EventTimeline {
        EventTimeline {
            events,
            motion_enabled: self.motion_enabled,
            coupling_refresh_interval: self.coupling_refresh_interval,
        }
    }
}

/// Nominal revival time t1 + t2 (free evolution only).
pub fn revival_time(t1: f64, k: f64, rule: RevivalRule) -> f64 {
    match rule {
        RevivalRule::TimeRatio => t1 + t1 / k,
        RevivalRule::Additive => t1 + k * t1,
    }
}

/// Free evolution of `duration` under the given engineering. Pulsed mode
/// uses a whole number of cycles, stretched to fill the duration exactly.
pub fn engineered_events(duration: f64, eng: &Engineering) -> Result<Vec<Event>> {
    if !(duration >= 0.0) {
        return Err(Error::invalid("duration", "must be non-negative"));
    }
    if duration == 0.0 {
        return Ok(Vec::new());
    }
    Ok(match *eng {
        Engineering::Natural => vec![Event::free(duration)],
        Engineering::Ideal { form } => vec![Event::free_with(duration, form)],
        Engineering::Pulsed { tau1, tau, schedule } => {
            let tc = cycle_time(tau1, tau);
            let cycles = (duration / tc).round().max(1.0);
            let stretch = duration / (cycles * tc);
            let one = schedule_events(&schedule.cycle(tau1 * stretch, tau * stretch));
            (0..cycles as usize).flat_map(|_| one.iter().cloned()).collect()
        }
    })
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::invalid("sample_times", "must be finite and non-negative"));
    }
    if samples.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("sample_times", "must be sorted"));
    }
    Ok(())
}

/// Evolution to each sample, measuring as it goes.
fn sampled(cursor: &mut f64, samples: &[f64], eng: &Engineering, events: &mut Vec<Event>) -> Result<()> {
    for &s in samples {
        events.extend(engineered_events(s - *cursor, eng)?);
        events.push(Event::Measure { label: s });
        *cursor = s;
    }
    Ok(())
}

/// Prep, forward period to t1, transfer, then the -k period. Samples are
/// nominal free-evolution times counted after the prep; an empty list
/// measures at the revival time only.
pub fn build_reversal_timeline(p: &ReversalParams, sample_times: &[f64]) -> Result<EventTimeline> {
    p.validate()?;
    check_samples(sample_times)?;
    let t_rev = p.revival_time();
    let (samples, split) = if sample_times.is_empty() {
        (vec![t_rev], 0)
    } else {
        (sample_times.to_vec(), sample_times.partition_point(|&s| s <= p.t1))
    };
    let mut events = Vec::new();
    if let Some(prep) = p.prep {
        events.extend(engineered_events(prep, &Engineering::Natural)?);
    }
    let mut cursor = 0.0;
    sampled(&mut cursor, &samples[..split], &p.engineering, &mut events)?;
    events.extend(engineered_events(p.t1 - cursor, &p.engineering)?);
    cursor = p.t1;
    events.extend(p.transfer.events());
    events.push(Event::SetSignScale { scale: -p.k });
    sampled(&mut cursor, &samples[split..], &p.engineering, &mut events)?;
    Ok(p.timeline(events))
}

/// Prep followed by forward evolution only, sampled at the given times.
pub fn build_forward_timeline(p: &ReversalParams, sample_times: &[f64]) -> Result<EventTimeline> {
    p.validate()?;
    check_samples(sample_times)?;
    let mut events = Vec::new();
    if let Some(prep) = p.prep {
        events.extend(engineered_events(prep, &Engineering::Natural)?);
    }
    let mut cursor = 0.0;
    sampled(&mut cursor, sample_times, &p.engineering, &mut events)?;
    Ok(p.timeline(events))
}
