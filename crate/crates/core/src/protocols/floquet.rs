//! Toggling-frame engine for global pi/2 pulse sequences and the XXZ
//! schedules built from it.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::reversal::Engineering;
use super::timeline::{CouplingForm, Event, EventTimeline};
use crate::error::{Error, Result};
use crate::quantum::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleItem {
    /// Free evolution under the natural interaction, us.
    Delay { duration: f64 },
    /// Instantaneous exp(-i angle sum_i S_axis).
    Pulse { axis: Axis, angle: f64 },
}

impl ScheduleItem {
    pub fn delay(duration: f64) -> Self {
        ScheduleItem::Delay { duration }
    }

    pub fn pulse(axis: Axis, angle: f64) -> Self {
        ScheduleItem::Pulse { axis, angle }
    }
}

/// Time-averaged coefficients of sum_ij J_ij S_a S_a over one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageHamiltonian {
    pub c_xx: f64,
    pub c_yy: f64,
    pub c_zz: f64,
    pub cycle_time: f64,
    /// True when the pulses of the cycle compose to the identity frame.
    pub closes: bool,
}

impl AverageHamiltonian {
    pub fn sum(&self) -> f64 {
        self.c_xx + self.c_yy + self.c_zz
    }

    /// XXZ form with perp = c_xx; meaningful when c_xx == c_yy.
    pub fn form(&self) -> CouplingForm {
        CouplingForm {
            perp: self.c_xx,
            parallel: self.c_zz,
        }
    }

    pub fn anisotropy(&self) -> f64 {
        self.c_zz / self.c_xx
    }
}

/// Rotation matrix R with U^dagger S_b U = sum_c R_bc S_c for U = exp(-i q pi/2 S_axis).
fn quarter_turn(axis: Axis, q: i64) -> Matrix3<f64> {
    let (c, s) = match q.rem_euclid(4) {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, -1.0),
    };
    match axis {
        Axis::X => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        Axis::Y => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        Axis::Z => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    }
}

fn quarter_turns(angle: f64) -> Result<i64> {
    let q = angle / FRAC_PI_2;
    let r = q.round();
    if !angle.is_finite() || (q - r).abs() > 1e-9 {
        return Err(Error::UnsupportedSchedule(format!(
            "pulse angle {angle} is not a multiple of pi/2"
        )));
    }
    Ok(r as i64)
}

/// Leading-order average Hamiltonian of the natural XX interaction.
pub fn average_hamiltonian(schedule: &[ScheduleItem]) -> Result<AverageHamiltonian> {
    average_hamiltonian_of(schedule, [1.0, 1.0, 0.0])
}

/// Same for a natural interaction sum_a natural[a] S_a S_a.
pub fn average_hamiltonian_of(schedule: &[ScheduleItem], natural: [f64; 3]) -> Result<AverageHamiltonian> {
    let mut frame = Matrix3::identity();
    let mut acc = [0.0; 3];
    let mut total = 0.0;
    for item in schedule {
        match *item {
            ScheduleItem::Delay { duration } => {
                if !(duration >= 0.0) {
                    return Err(Error::invalid("duration", "delays must be non-negative"));
                }
                // each row of a signed permutation has one +-1 entry
                for (a, &weight) in natural.iter().enumerate() {
                    let target = (0..3)
                        .find(|&c| frame[(a, c)] != 0.0)
                        .expect("frame rows are signed unit vectors");
                    acc[target] += weight * duration;
                }
                total += duration;
            }
            ScheduleItem::Pulse { axis, angle } => {
                frame = quarter_turn(axis, quarter_turns(angle)?) * frame;
            }
        }
    }
    if !(total > 0.0) {
        // no free evolution: the bare Hamiltonian by convention
        return Ok(AverageHamiltonian {
            c_xx: natural[0],
            c_yy: natural[1],
            c_zz: natural[2],
            cycle_time: 0.0,
            closes: frame == Matrix3::identity(),
        });
    }
    Ok(AverageHamiltonian {
        c_xx: acc[0] / total,
        c_yy: acc[1] / total,
        c_zz: acc[2] / total,
        cycle_time: total,
        closes: frame == Matrix3::identity(),
    })
}

/// Time-symmetric cycle with frames xy (2 tau1), xz (2 tau), yz (2 tau).
pub fn mirrored_cycle(tau1: f64, tau: f64) -> Vec<ScheduleItem> {
    use ScheduleItem as S;
    vec![
        S::delay(tau1),
        S::pulse(Axis::X, FRAC_PI_2),
        S::delay(tau),
        S::pulse(Axis::Y, FRAC_PI_2),
        S::delay(2.0 * tau),
        S::pulse(Axis::Y, -FRAC_PI_2),
        S::delay(tau),
        S::pulse(Axis::X, -FRAC_PI_2),
        S::delay(tau1),
    ]
}

/// Same frame durations visited once in order, so odd Magnus terms survive.
pub fn sequential_cycle(tau1: f64, tau: f64) -> Vec<ScheduleItem> {
    use ScheduleItem as S;
    vec![
        S::delay(2.0 * tau1),
        S::pulse(Axis::X, FRAC_PI_2),
        S::delay(2.0 * tau),
        S::pulse(Axis::Y, FRAC_PI_2),
        S::delay(2.0 * tau),
        S::pulse(Axis::Y, -FRAC_PI_2),
        S::pulse(Axis::X, -FRAC_PI_2),
    ]
}

/// t_c = 2 (tau1 + 2 tau)
pub fn cycle_time(tau1: f64, tau: f64) -> f64 {
    2.0 * (tau1 + 2.0 * tau)
}

/// J_perp = J 2(tau1 + tau)/t_c, J_par = J 2 tau/t_c.
pub fn eq2_form(tau1: f64, tau: f64) -> CouplingForm {
    let tc = cycle_time(tau1, tau);
    CouplingForm {
        perp: 2.0 * (tau1 + tau) / tc,
        parallel: 2.0 * tau / tc,
    }
}

/// tau1/tau giving anisotropy `a` in ideal mode, from a = tau/(tau1 + tau).
pub fn ideal_delay_ratio(a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid("anisotropy", "must lie in (0, 1]"));
    }
    Ok((1.0 - a) / a)
}

/// tau1/tau giving anisotropy `a` for the pulsed cycle, whose engine value is 2 tau/(tau1 + tau).
pub fn pulsed_delay_ratio(a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid("anisotropy", "must lie in (0, 1]"));
    }
    Ok((2.0 - a) / a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Mirrored,
    Sequential,
}

impl CycleKind {
    pub fn cycle(self, tau1: f64, tau: f64) -> Vec<ScheduleItem> {
        match self {
            CycleKind::Mirrored => mirrored_cycle(tau1, tau),
            CycleKind::Sequential => sequential_cycle(tau1, tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FloquetMode {
    IdealXxz,
    Pulsed { schedule: CycleKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloquetParams {
    pub tau1: f64,
    pub tau: f64,
    pub cycles: usize,
    pub mode: FloquetMode,
}

impl FloquetParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau1 >= 0.0) {
            return Err(Error::invalid("tau1", "must be non-negative"));
        }
        if !(self.tau > 0.0) {
            return Err(Error::invalid("tau", "must be positive"));
        }
        if self.cycles < 1 {
            return Err(Error::invalid("cycles", "must be at least 1"));
        }
        Ok(())
    }

    pub fn cycle_time(&self) -> f64 {
        cycle_time(self.tau1, self.tau)
    }

    pub fn duration(&self) -> f64 {
        self.cycles as f64 * self.cycle_time()
    }

    /// Delays reproducing anisotropy `a` at the current tau.
    pub fn for_anisotropy(&self, a: f64) -> Result<Self> {
        let ratio = match self.mode {
            FloquetMode::IdealXxz => ideal_delay_ratio(a)?,
            FloquetMode::Pulsed { .. } => pulsed_delay_ratio(a)?,
        };
        Ok(Self {
            tau1: ratio * self.tau,
            ..*self
        })
    }

    /// Effective couplings: the closed-form delay ratio in ideal mode, the engine result when pulsed.
    pub fn effective_form(&self) -> Result<CouplingForm> {
        match self.mode {
            FloquetMode::IdealXxz => Ok(eq2_form(self.tau1, self.tau)),
            FloquetMode::Pulsed { schedule } => Ok(average_hamiltonian(&schedule.cycle(self.tau1, self.tau))?.form()),
        }
    }

    pub fn engineering(&self) -> Engineering {
        match self.mode {
            FloquetMode::IdealXxz => Engineering::Ideal {
                form: eq2_form(self.tau1, self.tau),
            },
            FloquetMode::Pulsed { schedule } => Engineering::Pulsed {
                tau1: self.tau1,
                tau: self.tau,
                schedule,
            },
        }
    }
}

pub fn schedule_events(schedule: &[ScheduleItem]) -> Vec<Event> {
    schedule
        .iter()
        .filter_map(|item| match *item {
            ScheduleItem::Delay { duration } if duration > 0.0 => Some(Event::free(duration)),
            ScheduleItem::Delay { .. } => None,
            ScheduleItem::Pulse { axis, angle } => Some(Event::Rotation { axis, angle }),
        })
        .collect()
}

/// `cycles` Floquet periods as a timeline (one XXZ segment in ideal mode).
pub fn build_floquet_schedule(p: &FloquetParams) -> Result<EventTimeline> {
    p.validate()?;
    let events = match p.mode {
        FloquetMode::IdealXxz => vec![Event::free_with(p.duration(), eq2_form(p.tau1, p.tau))],
        FloquetMode::Pulsed { schedule } => {
            let one = schedule_events(&schedule.cycle(p.tau1, p.tau));
            (0..p.cycles).flat_map(|_| one.iter().cloned()).collect()
        }
    };
    Ok(EventTimeline::new(events))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn bare_delay_is_xx() {
        let h = average_hamiltonian(&[ScheduleItem::delay(1.0)]).unwrap();
        assert_eq!((h.c_xx, h.c_yy, h.c_zz), (1.0, 1.0, 0.0));
        let h = average_hamiltonian(&[]).unwrap();
        assert_eq!((h.c_xx, h.c_yy, h.c_zz), (1.0, 1.0, 0.0));
    }

    #[test]
    fn equal_thirds_are_heisenberg() {
        let h = average_hamiltonian(&sequential_cycle(0.5, 0.5)).unwrap();
        for c in [h.c_xx, h.c_yy, h.c_zz] {
            assert!(close(c, 2.0 / 3.0));
        }
        assert!(h.closes);
    }

    #[test]
    fn mirrored_cycle_coefficients() {
        let (tau1, tau) = (0.3, 0.11);
        let h = average_hamiltonian(&mirrored_cycle(tau1, tau)).unwrap();
        let tc = cycle_time(tau1, tau);
        assert!(close(h.c_xx, 2.0 * (tau1 + tau) / tc));
        assert!(close(h.c_yy, h.c_xx));
        assert!(close(h.c_zz, 4.0 * tau / tc));
        assert!(close(h.sum(), 2.0));
        assert!(close(h.cycle_time, tc));
        assert!(h.closes);
    }

    #[test]
    fn single_quarter_turns() {
        // X(pi/2): y -> -z
        let h = average_hamiltonian(&[ScheduleItem::pulse(Axis::X, FRAC_PI_2), ScheduleItem::delay(1.0)]).unwrap();
        assert_eq!((h.c_xx, h.c_yy, h.c_zz), (1.0, 0.0, 1.0));
        assert!(!h.closes);
        let h =
            average_hamiltonian(&[ScheduleItem::pulse(Axis::Z, 3.0 * FRAC_PI_2), ScheduleItem::delay(1.0)]).unwrap();
        assert_eq!((h.c_xx, h.c_yy, h.c_zz), (1.0, 1.0, 0.0));
    }

    #[test]
    fn non_clifford_rejected() {
        let err = average_hamiltonian(&[ScheduleItem::pulse(Axis::X, 0.3)]).unwrap_err();
        assert!(matches!(err, Error::UnsupportedSchedule(_)));
    }

    #[test]
    fn eq2_limits() {
        let f = eq2_form(0.0, 1.0);
        assert_eq!(f.anisotropy(), 1.0);
        let f = eq2_form(1e9, 1.0);
        assert!(f.anisotropy() < 1e-8);
        let r = ideal_delay_ratio(0.14).unwrap();
        assert!((r - 6.142857142857143).abs() < 1e-12);
        assert!(close(eq2_form(r, 1.0).anisotropy(), 0.14));
        let r = pulsed_delay_ratio(0.14).unwrap();
        let h = average_hamiltonian(&mirrored_cycle(r, 1.0)).unwrap();
        assert!(close(h.anisotropy(), 0.14));
        assert!(ideal_delay_ratio(0.0).is_err());
    }

    #[test]
    fn schedule_timeline() {
        let p = FloquetParams {
            tau1: 0.1,
            tau: 0.05,
            cycles: 3,
            mode: FloquetMode::Pulsed {
                schedule: CycleKind::Mirrored,
            },
        };
        let t = build_floquet_schedule(&p).unwrap();
        assert_eq!(t.events.len(), 27);
        assert!(close(t.total_duration(), 3.0 * p.cycle_time()));
        let ideal = FloquetParams {
            mode: FloquetMode::IdealXxz,
            ..p
        };
        let t = build_floquet_schedule(&ideal).unwrap();
        assert_eq!(t.events, vec![Event::free_with(3.0 * 0.4, eq2_form(0.1, 0.05))]);
    }
}
